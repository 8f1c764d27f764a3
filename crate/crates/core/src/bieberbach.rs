//! Exact models of Bieberbach groups: crystallographic groups acting freely.
//!
//! A group is stored as a rational lattice basis (columns, ambient
//! coordinates) plus one affine coset representative (B, b) per point-group
//! element, in lattice coordinates, with the convention g = B ∘ L_b, i.e.
//! x ↦ B(x + b). Rotation parts are therefore integer matrices orthogonal
//! with respect to the Gram form of the basis; translation parts live in
//! [0,1)ⁿ. All validation is exact rational arithmetic.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use crate::character::OrthogonalElement;
use crate::error::CoreError;
use crate::linalg::{common_denominator, int_lattice_contains, RatMat};
use crate::{Int, Rat};

/// Affine coset representative (B, b), lattice coordinates, g = B∘L_b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineRep {
    pub rotation: RatMat,
    pub translation: Vec<Rat>,
}

impl AffineRep {
    pub fn new(rotation: RatMat, translation: Vec<Rat>) -> AffineRep {
        AffineRep {
            rotation,
            translation: reduce_mod_one(&translation),
        }
    }

    pub fn identity(n: usize) -> AffineRep {
        AffineRep {
            rotation: RatMat::identity(n),
            translation: vec![Rat::zero(); n],
        }
    }

    pub fn is_identity_rotation(&self) -> bool {
        self.rotation.is_identity()
    }

    /// Product in the g = B∘L_b convention: (B₁,b₁)(B₂,b₂) = (B₁B₂, b₂ + B₂⁻¹b₁).
    pub fn compose(&self, other: &AffineRep) -> Result<AffineRep, CoreError> {
        let rotation = self.rotation.mul(&other.rotation);
        let inv = other.rotation.inverse()?;
        let shifted = inv.matvec(&self.translation);
        let translation: Vec<Rat> = other
            .translation
            .iter()
            .zip(&shifted)
            .map(|(a, b)| a + b)
            .collect();
        Ok(AffineRep::new(rotation, translation))
    }

    /// Translation of the same isometry written as L_a ∘ B: a = B·b.
    ///
    /// This is the single conversion point between the two affine
    /// factorizations; the Fourier phases of the spectrum oracle use a.
    pub fn l_form_translation(&self) -> Vec<Rat> {
        self.rotation.matvec(&self.translation)
    }

    fn sort_key(&self) -> (Vec<String>, Vec<String>) {
        (
            (0..self.rotation.nrows())
                .flat_map(|i| self.rotation.row(i).iter().map(|x| x.to_string()))
                .collect(),
            self.translation.iter().map(|x| x.to_string()).collect(),
        )
    }
}

fn reduce_mod_one(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| x - x.floor()).collect()
}

/// A crystallographic group candidate; `validate` decides whether it is a
/// genuine Bieberbach group.
#[derive(Debug, Clone)]
pub struct BieberbachGroup {
    name: String,
    n: usize,
    basis: RatMat,
    reps: Vec<AffineRep>,
}

/// Violations reported by [`BieberbachGroup::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Lattice basis is singular.
    SingularBasis,
    /// A rotation does not preserve the lattice (non-integer entries).
    NonCrystallographic { rep: usize },
    /// A rotation fails Gram-orthogonality.
    NotOrthogonal { rep: usize },
    /// Coset representatives are not closed under composition, or a pure
    /// translation outside the lattice appeared.
    NonGroup { detail: String },
    /// An affine element with nontrivial rotation has a fixed point; the
    /// quotient would be an orbifold rather than a manifold.
    NonFree { rep: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SingularBasis => write!(f, "singular lattice basis"),
            Violation::NonCrystallographic { rep } => {
                write!(f, "rotation of representative #{rep} does not preserve the lattice")
            }
            Violation::NotOrthogonal { rep } => {
                write!(f, "rotation of representative #{rep} is not Gram-orthogonal")
            }
            Violation::NonGroup { detail } => write!(f, "not a group: {detail}"),
            Violation::NonFree { rep } => {
                write!(f, "representative #{rep} acts with a fixed point")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", lines.join("; "))
        }
    }
}

const CLOSURE_CAP: usize = 512;

impl BieberbachGroup {
    /// Build a group from generators, closing them into a full coset list.
    pub fn from_generators(
        name: impl Into<String>,
        basis: RatMat,
        generators: Vec<AffineRep>,
    ) -> Result<BieberbachGroup, CoreError> {
        let n = basis.nrows();
        if basis.ncols() != n {
            return Err(CoreError::DimensionMismatch("basis must be square".into()));
        }
        if basis.det().is_zero() {
            return Err(CoreError::InvalidGroup("singular lattice basis".into()));
        }
        for g in &generators {
            if g.rotation.nrows() != n || g.translation.len() != n {
                return Err(CoreError::DimensionMismatch(
                    "generator size does not match the lattice rank".into(),
                ));
            }
        }
        let mut elems: Vec<AffineRep> = vec![AffineRep::identity(n)];
        let mut frontier: Vec<AffineRep> = generators.clone();
        while let Some(g) = frontier.pop() {
            if elems.contains(&g) {
                continue;
            }
            if elems.len() >= CLOSURE_CAP {
                return Err(CoreError::InvalidGroup(format!(
                    "closure exceeded {CLOSURE_CAP} cosets"
                )));
            }
            elems.push(g.clone());
            let snapshot = elems.clone();
            for h in &snapshot {
                frontier.push(g.compose(h)?);
                frontier.push(h.compose(&g)?);
            }
        }
        elems.sort_by_key(|r| r.sort_key());
        Ok(BieberbachGroup {
            name: name.into(),
            n,
            basis,
            reps: elems,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &RatMat {
        &self.basis
    }

    pub fn reps(&self) -> &[AffineRep] {
        &self.reps
    }

    pub fn point_group_order(&self) -> usize {
        self.reps.len()
    }

    pub fn is_torus(&self) -> bool {
        self.reps.iter().all(|r| r.is_identity_rotation())
    }

    /// Gram matrix of the lattice basis.
    pub fn gram(&self) -> RatMat {
        self.basis.transpose().mul(&self.basis)
    }

    /// Basis of the dual lattice: inverse transpose of the basis.
    pub fn dual_lattice(&self) -> Result<RatMat, CoreError> {
        Ok(self.basis.inverse()?.transpose())
    }

    /// Gram matrix of the dual lattice, i.e. the inverse of `gram`.
    pub fn dual_gram(&self) -> Result<RatMat, CoreError> {
        self.gram().inverse()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.basis.det().is_zero() {
            report.violations.push(Violation::SingularBasis);
            return report;
        }
        let gram = self.gram();
        for (i, rep) in self.reps.iter().enumerate() {
            if !rep.rotation.is_integral() {
                report.violations.push(Violation::NonCrystallographic { rep: i });
                continue;
            }
            if OrthogonalElement::with_gram(rep.rotation.clone(), gram.clone()).is_err() {
                report.violations.push(Violation::NotOrthogonal { rep: i });
            }
        }
        if !report.violations.is_empty() {
            return report;
        }
        // distinct rotations: a repeat means the translation lattice was not
        // the full translation subgroup
        let mut seen: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for (i, rep) in self.reps.iter().enumerate() {
            let key: Vec<String> = (0..self.n)
                .flat_map(|r| rep.rotation.row(r).iter().map(|x| x.to_string()))
                .collect();
            if let Some(&j) = seen.get(&key) {
                report.violations.push(Violation::NonGroup {
                    detail: format!(
                        "representatives #{j} and #{i} share a rotation; \
                         the lattice is not the full translation subgroup"
                    ),
                });
                return report;
            }
            seen.insert(key, i);
        }
        // closure modulo the lattice
        for a in &self.reps {
            for b in &self.reps {
                let Ok(prod) = a.compose(b) else {
                    report.violations.push(Violation::NonGroup {
                        detail: "non-invertible rotation".into(),
                    });
                    return report;
                };
                if !self.reps.contains(&prod) {
                    report.violations.push(Violation::NonGroup {
                        detail: format!(
                            "product of two representatives is missing (rotation {:?})",
                            prod.rotation
                        ),
                    });
                    return report;
                }
            }
        }
        // freeness, exactly: x ↦ B(x+b)+λ has a fixed point iff
        // b (mod the lattice) meets the column space of (I − B)
        for (i, rep) in self.reps.iter().enumerate() {
            if rep.is_identity_rotation() {
                continue;
            }
            if has_affine_fixed_point(&rep.rotation, &rep.translation) {
                report.violations.push(Violation::NonFree { rep: i });
            }
        }
        report
    }

    /// Conjugate by the ambient isometry x ↦ Qx + t with Q rational
    /// orthogonal. The quotient manifold is unchanged up to isometry.
    pub fn conjugated(&self, q: &RatMat, t: &[Rat]) -> Result<BieberbachGroup, CoreError> {
        if !q.transpose().mul(q).is_identity() {
            return Err(CoreError::NotOrthogonal);
        }
        if q.nrows() != self.n || t.len() != self.n {
            return Err(CoreError::DimensionMismatch("conjugator size".into()));
        }
        let new_basis = q.mul(&self.basis);
        let new_basis_inv = new_basis.inverse()?;
        let mut reps = Vec::with_capacity(self.reps.len());
        for rep in &self.reps {
            // ambient affine form x ↦ Ax + c
            let a_amb = self
                .basis
                .mul(&rep.rotation)
                .mul(&self.basis.inverse()?);
            let c_amb = self.basis.matvec(&rep.l_form_translation());
            let a_new = q.mul(&a_amb).mul(&q.inverse()?);
            let qc = q.matvec(&c_amb);
            let at = a_new.matvec(t);
            let c_new: Vec<Rat> = t
                .iter()
                .zip(&qc)
                .zip(&at)
                .map(|((ti, qi), ai)| ti + qi - ai)
                .collect();
            // back to the B∘L_b convention in new lattice coordinates
            let rot_lat = new_basis_inv.mul(&a_new).mul(&new_basis);
            let b_amb = a_new.inverse()?.matvec(&c_new);
            let b_lat = new_basis_inv.matvec(&b_amb);
            reps.push(AffineRep::new(rot_lat, b_lat));
        }
        reps.sort_by_key(|r| r.sort_key());
        Ok(BieberbachGroup {
            name: format!("{}~conj", self.name),
            n: self.n,
            basis: new_basis,
            reps,
        })
    }

    /// Re-express the same group in another lattice basis: basis ↦ basis·U
    /// with U unimodular.
    pub fn rebased(&self, u: &RatMat) -> Result<BieberbachGroup, CoreError> {
        let Some(_) = u.to_int_rows() else {
            return Err(CoreError::InvalidGroup("change of basis must be integral".into()));
        };
        if !u.det().abs().is_one() {
            return Err(CoreError::InvalidGroup("change of basis must be unimodular".into()));
        }
        let u_inv = u.inverse()?;
        let reps = self
            .reps
            .iter()
            .map(|rep| {
                AffineRep::new(
                    u_inv.mul(&rep.rotation).mul(u),
                    u_inv.matvec(&rep.translation),
                )
            })
            .collect::<Vec<_>>();
        let mut reps = reps;
        reps.sort_by_key(|r| r.sort_key());
        Ok(BieberbachGroup {
            name: format!("{}~rebase", self.name),
            n: self.n,
            basis: self.basis.mul(u),
            reps,
        })
    }
}

/// Does x ↦ Bx + Bb + λ admit a fixed point for some lattice vector λ?
/// Equivalent to b meeting Im(I−B) modulo ℤⁿ, checked exactly.
fn has_affine_fixed_point(rotation: &RatMat, translation: &[Rat]) -> bool {
    let n = rotation.nrows();
    // fixed point: (I−B)x = b + λ  (lattice coordinates, both sides in the
    // B∘L_b convention after multiplying by B⁻¹; the image condition is the
    // same for b and Bb since B preserves both the lattice and the image)
    let id = RatMat::identity(n);
    let m = id.sub(rotation);
    // rows spanning the left kernel of (I−B): Im(I−B) = {x : Nx = 0}
    let left_kernel = m.transpose().kernel();
    if left_kernel.is_empty() {
        // (I−B) invertible: a fixed point always exists
        return true;
    }
    let nmat = RatMat::from_rows(left_kernel);
    let nb = nmat.matvec(translation);
    // clear denominators of N and Nb together; membership is scale invariant
    let mut all: Vec<Rat> = nb.clone();
    for i in 0..nmat.nrows() {
        all.extend(nmat.row(i).iter().cloned());
    }
    let scale = Rat::from_integer(common_denominator(&all));
    let target: Vec<Int> = nb.iter().map(|x| (x * &scale).to_integer()).collect();
    let cols: Vec<Vec<Int>> = (0..n)
        .map(|j| {
            (0..nmat.nrows())
                .map(|i| (nmat.at(i, j) * &scale).to_integer())
                .collect()
        })
        .collect();
    int_lattice_contains(&cols, &target)
}

fn rat(p: i64, q: i64) -> Rat {
    Rat::new(Int::from(p), Int::from(q))
}

fn diag_basis(entries: &[(i64, i64)]) -> RatMat {
    let n = entries.len();
    let mut m = RatMat::zeros(n, n);
    for (i, &(p, q)) in entries.iter().enumerate() {
        *m.at_mut(i, i) = rat(p, q);
    }
    m
}

fn int_mat(rows: &[&[i64]]) -> RatMat {
    RatMat::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
            .collect(),
    )
}

fn gen(rows: &[&[i64]], translation: &[(i64, i64)]) -> AffineRep {
    AffineRep::new(
        int_mat(rows),
        translation.iter().map(|&(p, q)| rat(p, q)).collect(),
    )
}

/// The built-in corpus. Every entry passes `validate`; the gating test lives
/// in this module and the acceptance suite re-checks it.
pub fn presets() -> Vec<BieberbachGroup> {
    let mut out = Vec::new();
    let torus = |name: &str, basis: RatMat| {
        BieberbachGroup::from_generators(name, basis, vec![]).expect("torus preset")
    };
    out.push(torus("torus-z2", RatMat::identity(2)));
    out.push(torus("torus-rect2", diag_basis(&[(2, 1), (1, 2)])));
    out.push(torus(
        "torus-skew2",
        RatMat::from_rows(vec![
            vec![rat(1, 1), rat(1, 2)],
            vec![rat(0, 1), rat(1, 1)],
        ]),
    ));
    out.push(
        BieberbachGroup::from_generators(
            "klein-bottle",
            RatMat::identity(2),
            vec![gen(&[&[1, 0], &[0, -1]], &[(1, 2), (0, 1)])],
        )
        .expect("klein preset"),
    );
    out.push(torus("torus-z3", RatMat::identity(3)));
    out.push(
        BieberbachGroup::from_generators(
            "halfturn-3",
            RatMat::identity(3),
            vec![gen(
                &[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]],
                &[(1, 2), (0, 1), (0, 1)],
            )],
        )
        .expect("halfturn preset"),
    );
    out.push(
        BieberbachGroup::from_generators(
            "hantzsche-wendt",
            RatMat::identity(3),
            vec![
                gen(
                    &[&[1, 0, 0], &[0, -1, 0], &[0, 0, -1]],
                    &[(1, 2), (1, 2), (0, 1)],
                ),
                gen(
                    &[&[-1, 0, 0], &[0, 1, 0], &[0, 0, -1]],
                    &[(0, 1), (1, 2), (1, 2)],
                ),
            ],
        )
        .expect("hantzsche-wendt preset"),
    );
    out.push(torus("torus-z4", RatMat::identity(4)));
    out.push(
        BieberbachGroup::from_generators(
            "halfturn-4",
            RatMat::identity(4),
            vec![gen(
                &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]],
                &[(1, 2), (0, 1), (0, 1), (0, 1)],
            )],
        )
        .expect("halfturn-4 preset"),
    );
    out.push(
        BieberbachGroup::from_generators(
            "klein-x-torus2",
            RatMat::identity(4),
            vec![gen(
                &[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]],
                &[(1, 2), (0, 1), (0, 1), (0, 1)],
            )],
        )
        .expect("klein-x-torus2 preset"),
    );
    out.push(
        BieberbachGroup::from_generators(
            "z2xz2-4d",
            RatMat::identity(4),
            vec![
                gen(
                    &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, -1]],
                    &[(1, 2), (0, 1), (0, 1), (0, 1)],
                ),
                gen(
                    &[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, -1]],
                    &[(0, 1), (0, 1), (1, 2), (0, 1)],
                ),
            ],
        )
        .expect("z2xz2-4d preset"),
    );
    out
}

pub fn preset(name: &str) -> Option<BieberbachGroup> {
    presets().into_iter().find(|g| g.name() == name)
}
