//! The τ-spectrum of the twisted Laplacian on a compact flat manifold,
//! computed two independent ways.
//!
//! The oracle route works directly with Fourier modes on the dual lattice:
//! for each eigenvalue 4π²ν the multiplicity is
//!
//!   d_ν = (1/|F|) Σ_{(B,b)} tr τ(B) · Σ_{u ∈ Λ*, ‖u‖²=ν, Bu=u} e^{−2πi⟨u,a⟩}
//!
//! with a the translation of the representative rewritten as L_a∘B. In
//! lattice coordinates the fixed-mode condition is Bᵀk = k and the phase
//! exponent is the exact rational kᵀ(Bb), so everything except the final
//! character-weighted sum is exact. Multiplicities are rounded to integers
//! under a 1e−6 gate and any residual is a hard error.
//!
//! The second route evaluates the multiplicity formula through the motion
//! group: d_0 = n_Γ(τ̃) and d_ν = Σ_{σ ∈ branch(τ)} n_Γ(π_{σ,√ν}) for ν > 0,
//! given a table of right-regular-representation multiplicities.

use std::collections::BTreeMap;

use num::{ToPrimitive, Zero};

use crate::bieberbach::BieberbachGroup;
use crate::character::{character, ElementSignature, OrthogonalElement};
use crate::enumerate::{shells_of_form, Shells};
use crate::error::CoreError;
use crate::orthogonal::{Embedding, OIrrep};
use crate::{format_rat, Convention, Int, Rat};

/// Multiplicity table of one twisted Laplacian: ν ↦ d_{4π²ν}.
/// The ν = 0 row is always present; other rows are stored only when nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTable {
    pub tau: OIrrep,
    pub group: String,
    pub nu_max: Rat,
    pub entries: BTreeMap<Rat, u64>,
}

impl SpectrumTable {
    pub fn multiplicity(&self, nu: &Rat) -> u64 {
        self.entries.get(nu).copied().unwrap_or(0)
    }

    pub fn zero_row(&self) -> u64 {
        self.multiplicity(&Rat::zero())
    }

    /// First ν (ascending) where the two tables disagree.
    pub fn first_difference(&self, other: &SpectrumTable) -> Option<(Rat, u64, u64)> {
        let keys: std::collections::BTreeSet<&Rat> =
            self.entries.keys().chain(other.entries.keys()).collect();
        for nu in keys {
            let (a, b) = (self.multiplicity(nu), other.multiplicity(nu));
            if a != b {
                return Some((nu.clone(), a, b));
            }
        }
        None
    }

    /// CSV with columns nu_num, nu_den, lambda_float, multiplicity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("nu_num,nu_den,lambda_float,multiplicity\n");
        for (nu, d) in &self.entries {
            let lambda = 4.0
                * std::f64::consts::PI
                * std::f64::consts::PI
                * nu.to_f64().expect("nu fits in f64");
            out.push_str(&format!(
                "{},{},{:.12e},{}\n",
                nu.numer(),
                nu.denom(),
                lambda,
                d
            ));
        }
        out
    }
}

/// Right-regular-representation multiplicities below cutoffs: n_Γ(τ̃) per
/// K-type and n_Γ(π_{σ,√ν}) per (σ, ν) with ν > 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiplicityTable {
    pub n: usize,
    pub weight_bound: u32,
    pub nu_max: Rat,
    pub zero_part: BTreeMap<OIrrep, u64>,
    pub continuous_part: BTreeMap<(OIrrep, Rat), u64>,
}

impl MultiplicityTable {
    pub fn zero_mult(&self, tau: &OIrrep) -> u64 {
        self.zero_part.get(tau).copied().unwrap_or(0)
    }

    pub fn continuous_mult(&self, sigma: &OIrrep, nu: &Rat) -> u64 {
        self.continuous_part
            .get(&(sigma.clone(), nu.clone()))
            .copied()
            .unwrap_or(0)
    }
}

/// Execution strategy for the oracle's shell loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Default for Parallelism {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

const INTEGRALITY_TOL: f64 = 1e-6;

/// Precomputed per-representative data for the oracle sum.
struct RepTerm {
    character: f64,
    rotation_t: Vec<Vec<Int>>,
    l_translation: Vec<Rat>,
}

/// Dual-lattice shells of the group up to the norm bound.
pub fn dual_shells(group: &BieberbachGroup, nu_max: &Rat) -> Result<Shells, CoreError> {
    shells_of_form(&group.dual_gram()?, nu_max)
}

/// Direct Fourier-mode computation of the τ-spectrum.
pub fn tau_spectrum_oracle(
    group: &BieberbachGroup,
    tau: &OIrrep,
    nu_max: &Rat,
    conv: Convention,
    mode: Parallelism,
) -> Result<SpectrumTable, CoreError> {
    let shells = dual_shells(group, nu_max)?;
    tau_spectrum_oracle_with_shells(group, &shells, tau, nu_max, conv, mode)
}

/// Oracle with shared shells, so one enumeration serves many bundles.
pub fn tau_spectrum_oracle_with_shells(
    group: &BieberbachGroup,
    shells: &Shells,
    tau: &OIrrep,
    nu_max: &Rat,
    conv: Convention,
    mode: Parallelism,
) -> Result<SpectrumTable, CoreError> {
    if tau.group_dim() != group.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "irrep of O({}) on a {}-dimensional group",
            tau.group_dim(),
            group.dim()
        )));
    }
    let gram = group.gram();
    let mut terms = Vec::with_capacity(group.reps().len());
    for rep in group.reps() {
        let element = OrthogonalElement::with_gram(rep.rotation.clone(), gram.clone())?;
        let sig: ElementSignature = element.signature()?;
        let rotation_t = rep
            .rotation
            .transpose()
            .to_int_rows()
            .ok_or_else(|| CoreError::InvalidGroup("rotation is not integral".into()))?;
        terms.push(RepTerm {
            character: character(tau, &sig, conv),
            rotation_t,
            l_translation: rep.l_form_translation(),
        });
    }
    let order = group.reps().len() as f64;

    let shell_values: Vec<(Rat, (f64, f64))> = run_shells(shells, mode, &terms);

    let mut entries = BTreeMap::new();
    for (nu, (re, im)) in shell_values {
        let value = re / order;
        let rounded = value.round();
        if (value - rounded).abs() > INTEGRALITY_TOL
            || im.abs() / order > INTEGRALITY_TOL
            || rounded < -0.5
        {
            return Err(CoreError::NonIntegralMultiplicity {
                tau: tau.to_string(),
                nu: format_rat(&nu),
                value,
                residual: (value - rounded).abs().max(im.abs() / order),
            });
        }
        let d = rounded as i64;
        if d < 0 {
            return Err(CoreError::NonIntegralMultiplicity {
                tau: tau.to_string(),
                nu: format_rat(&nu),
                value,
                residual: value.abs(),
            });
        }
        if d > 0 || nu.is_zero() {
            entries.insert(nu, d as u64);
        }
    }
    entries.entry(Rat::zero()).or_insert(0);
    Ok(SpectrumTable {
        tau: tau.clone(),
        group: group.name().to_string(),
        nu_max: nu_max.clone(),
        entries,
    })
}

fn run_shells(shells: &Shells, mode: Parallelism, terms: &[RepTerm]) -> Vec<(Rat, (f64, f64))> {
    let work: Vec<(&Rat, &Vec<Vec<Int>>)> = shells.by_norm.iter().collect();
    match mode {
        Parallelism::Sequential => work
            .into_iter()
            .map(|(nu, pts)| (nu.clone(), shell_sum(pts, terms)))
            .collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            work.into_par_iter()
                .map(|(nu, pts)| (nu.clone(), shell_sum(pts, terms)))
                .collect()
        }
    }
}

/// Character-weighted phase sum over one norm shell; deterministic order.
fn shell_sum(points: &[Vec<Int>], terms: &[RepTerm]) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for term in terms {
        if term.character == 0.0 {
            continue;
        }
        let mut s_re = 0.0;
        let mut s_im = 0.0;
        for k in points {
            if !fixes(&term.rotation_t, k) {
                continue;
            }
            // exponent ⟨u, a⟩ = kᵀ (B b) in lattice coordinates, exact
            let mut q = Rat::zero();
            for (ki, ai) in k.iter().zip(&term.l_translation) {
                if !ai.is_zero() && !ki.is_zero() {
                    q += Rat::from_integer(ki.clone()) * ai;
                }
            }
            let frac = &q - q.floor();
            let angle = -2.0 * std::f64::consts::PI * frac.to_f64().expect("phase fits in f64");
            s_re += angle.cos();
            s_im += angle.sin();
        }
        re += term.character * s_re;
        im += term.character * s_im;
    }
    (re, im)
}

fn fixes(rotation_t: &[Vec<Int>], k: &[Int]) -> bool {
    rotation_t.iter().zip(k).all(|(row, ki)| {
        let mut acc = Int::zero();
        for (r, kj) in row.iter().zip(k) {
            if !r.is_zero() && !kj.is_zero() {
                acc += r * kj;
            }
        }
        acc == *ki
    })
}

/// The multiplicity-formula route: build SpectrumTable rows from a
/// MultiplicityTable. Fails loudly when the requested τ or cutoff exceeds
/// what the table covers.
pub fn tau_spectrum_from_multiplicities(
    mult: &MultiplicityTable,
    tau: &OIrrep,
    nu_max: &Rat,
    conv: Convention,
) -> Result<SpectrumTable, CoreError> {
    if tau.group_dim() != mult.n {
        return Err(CoreError::DimensionMismatch(format!(
            "irrep of O({}) against a table for O({})",
            tau.group_dim(),
            mult.n
        )));
    }
    let head = tau.weight().head();
    if head > Int::from(mult.weight_bound) {
        return Err(CoreError::CutoffInsufficiency(format!(
            "{tau} has head {head}, table covers weight bound {}",
            mult.weight_bound
        )));
    }
    if nu_max > &mult.nu_max {
        return Err(CoreError::CutoffInsufficiency(format!(
            "requested nu_max {} exceeds table cutoff {}",
            format_rat(nu_max),
            format_rat(&mult.nu_max)
        )));
    }
    let mut entries: BTreeMap<Rat, u64> = BTreeMap::new();
    entries.insert(Rat::zero(), mult.zero_mult(tau));
    for sigma in tau.branch(Embedding::Standard, conv) {
        let lo = (sigma.clone(), Rat::zero());
        let hi = (sigma, nu_max.clone());
        for ((_, nu), value) in mult.continuous_part.range(lo..=hi) {
            if *value > 0 {
                *entries.entry(nu.clone()).or_insert(0) += value;
            }
        }
    }
    Ok(SpectrumTable {
        tau: tau.clone(),
        group: String::from("(from multiplicities)"),
        nu_max: nu_max.clone(),
        entries,
    })
}

/// Verdict of an exact spectrum comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauVerdict {
    EqualUpTo(Rat),
    FirstMismatch { nu: Rat, d1: u64, d2: u64 },
}

impl TauVerdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, TauVerdict::EqualUpTo(_))
    }
}

impl std::fmt::Display for TauVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TauVerdict::EqualUpTo(nu) => write!(f, "equal up to nu={}", format_rat(nu)),
            TauVerdict::FirstMismatch { nu, d1, d2 } => write!(
                f,
                "first mismatch at nu={}: {d1} vs {d2}",
                format_rat(nu)
            ),
        }
    }
}

/// Compare the τ-spectra of two groups of equal dimension.
pub fn are_tau_isospectral(
    g1: &BieberbachGroup,
    g2: &BieberbachGroup,
    tau: &OIrrep,
    nu_max: &Rat,
    conv: Convention,
    mode: Parallelism,
) -> Result<TauVerdict, CoreError> {
    if g1.dim() != g2.dim() {
        return Err(CoreError::DimensionMismatch(
            "groups act on spaces of different dimension".into(),
        ));
    }
    let s1 = tau_spectrum_oracle(g1, tau, nu_max, conv, mode)?;
    let s2 = tau_spectrum_oracle(g2, tau, nu_max, conv, mode)?;
    Ok(match s1.first_difference(&s2) {
        None => TauVerdict::EqualUpTo(nu_max.clone()),
        Some((nu, d1, d2)) => TauVerdict::FirstMismatch { nu, d1, d2 },
    })
}
