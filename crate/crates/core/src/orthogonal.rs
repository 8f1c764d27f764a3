//! The unitary dual of O(n): labels, catalog, dimensions, duality and the
//! branching laws to O(n−1).
//!
//! An irreducible of O(n) is labeled by a dominant weight Λ of SO(n) with
//! nonnegative last coordinate together with a sign δ: for n odd δ ∈ {±1};
//! for n even δ ∈ {±1} when the last coordinate vanishes, while Λ with a
//! positive last coordinate names a single merged class δ = 0 realized on
//! V_Λ ⊕ V_Λ̄. Internally every label is converted to its Weyl partition
//! (see [`crate::partition`]), where branching and sign bookkeeping are
//! canonical. The δ ↔ partition dictionary for even n is the only
//! convention-dependent step and is controlled by [`Convention`].

use num::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::partition::Partition;
use crate::weights::{Parity, Weight};
use crate::{Convention, Int, Rat};

/// Label of an irreducible representation of O(n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OIrrep {
    n: usize,
    weight: Weight,
    delta: i8,
}

/// Which copy of O(n−1) inside O(n) a restriction refers to.
///
/// `Standard` is the stabilizer of the last basis vector, B ↦ diag(B, 1);
/// this is the embedding the spectral formulas use. `DetCompensated` is the
/// subgroup {diag(B, det B)} of SO(n); its restrictions differ by a det twist
/// on part of the constituents and need not be multiplicity free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Embedding {
    Standard,
    DetCompensated,
}

impl OIrrep {
    pub fn new(n: usize, weight: Weight, delta: i8) -> Result<OIrrep, CoreError> {
        let m = n / 2;
        if weight.rank() != m || weight.parity() != Parity::of_group_dim(n) {
            return Err(CoreError::InvalidIrrep {
                n,
                reason: format!("weight {weight} has wrong rank or parity for O({n})"),
            });
        }
        let last_positive = weight
            .coords()
            .last()
            .map_or(false, |c| c.is_positive());
        if weight.coords().last().map_or(false, |c| c.is_negative()) {
            return Err(CoreError::InvalidIrrep {
                n,
                reason: "use the nonnegative bar representative".into(),
            });
        }
        let delta_ok = if n % 2 == 1 {
            delta == 1 || delta == -1
        } else if last_positive {
            delta == 0
        } else {
            delta == 1 || delta == -1
        };
        if !delta_ok {
            return Err(CoreError::InvalidIrrep {
                n,
                reason: format!("delta {delta} incompatible with weight {weight}"),
            });
        }
        Ok(OIrrep { n, weight, delta })
    }

    pub fn from_i64(n: usize, coords: &[i64], delta: i8) -> Result<OIrrep, CoreError> {
        let w = Weight::from_i64(coords, Parity::of_group_dim(n))?;
        OIrrep::new(n, w, delta)
    }

    pub fn trivial(n: usize) -> OIrrep {
        OIrrep {
            n,
            weight: Weight::zero(n / 2, Parity::of_group_dim(n)),
            delta: 1,
        }
    }

    /// The determinant character.
    pub fn det_rep(n: usize) -> OIrrep {
        OIrrep {
            n,
            weight: Weight::zero(n / 2, Parity::of_group_dim(n)),
            delta: -1,
        }
    }

    pub fn group_dim(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn delta(&self) -> i8 {
        self.delta
    }

    pub fn is_merged(&self) -> bool {
        self.delta == 0
    }

    /// Tensoring with det flips δ and fixes the merged classes.
    pub fn det_twist(&self) -> OIrrep {
        OIrrep {
            n: self.n,
            weight: self.weight.clone(),
            delta: -self.delta,
        }
    }

    /// Contragredient; orthogonal irreducibles are self-dual.
    pub fn dual(&self) -> OIrrep {
        self.clone()
    }

    /// Weyl partition of this irreducible under the given convention.
    pub fn to_partition(&self, conv: Convention) -> Partition {
        let small = Partition::new(
            self.weight
                .coords()
                .iter()
                .map(|c| {
                    u64::try_from(c.abs().clone()).expect("weight coordinate exceeds u64")
                })
                .collect(),
        );
        if self.delta == 0 {
            return small;
        }
        let canonical_plus: i8 = if self.n % 2 == 1 {
            if small.size() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            match conv {
                Convention::A => 1,
                Convention::B => -1,
            }
        };
        if self.delta == canonical_plus {
            small
        } else {
            small.associated(self.n)
        }
    }

    /// Inverse of [`OIrrep::to_partition`].
    pub fn from_partition(p: &Partition, n: usize, conv: Convention) -> OIrrep {
        let m = n / 2;
        debug_assert!(p.valid_o_label(n), "{p} is not a valid O({n}) label");
        let (small, is_small) = if p.len() > m {
            (p.associated(n), false)
        } else {
            (p.clone(), true)
        };
        let coords: Vec<Int> = (0..m).map(|i| Int::from(small.part(i))).collect();
        let weight = Weight::validate(coords, m, Parity::of_group_dim(n))
            .expect("partition rows are weakly decreasing");
        if n % 2 == 0 && small.len() == m {
            // self-associated: the merged class
            debug_assert!(p.is_self_associated(n));
            return OIrrep { n, weight, delta: 0 };
        }
        let canonical_plus: i8 = if n % 2 == 1 {
            if small.size() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            match conv {
                Convention::A => 1,
                Convention::B => -1,
            }
        };
        let delta = if is_small { canonical_plus } else { -canonical_plus };
        OIrrep { n, weight, delta }
    }

    /// Dimension by the Weyl dimension formula (doubled for merged classes).
    pub fn dim(&self) -> Int {
        let m = self.n / 2;
        let a: Vec<Int> = self.weight.coords().iter().map(|c| c.abs()).collect();
        let dim_so = if self.n % 2 == 1 {
            // type B_m with doubled entries L_j = 2a_j + 2(m−j) + 1
            let l: Vec<Int> = (0..m)
                .map(|j| Int::from(2) * &a[j] + Int::from(2 * (m - j - 1) as i64 + 1))
                .collect();
            let s: Vec<Int> = (0..m).map(|j| Int::from(2 * (m - j - 1) as i64 + 1)).collect();
            let mut v = Rat::one();
            for i in 0..m {
                for j in i + 1..m {
                    v *= Rat::new(&l[i] * &l[i] - &l[j] * &l[j], &s[i] * &s[i] - &s[j] * &s[j]);
                }
                v *= Rat::new(l[i].clone(), s[i].clone());
            }
            v
        } else {
            // type D_m with L_j = a_j + m − j
            let l: Vec<Int> = (0..m).map(|j| &a[j] + Int::from((m - j - 1) as i64)).collect();
            let s: Vec<Int> = (0..m).map(|j| Int::from((m - j - 1) as i64)).collect();
            let mut v = Rat::one();
            for i in 0..m {
                for j in i + 1..m {
                    v *= Rat::new(&l[i] * &l[i] - &l[j] * &l[j], &s[i] * &s[i] - &s[j] * &s[j]);
                }
            }
            v
        };
        debug_assert!(dim_so.denom().is_one(), "Weyl dimension must be integral");
        let d = dim_so.to_integer();
        if self.is_merged() {
            Int::from(2) * d
        } else {
            d
        }
    }

    /// Restriction constituents in O(n−1), with multiplicity, sorted.
    pub fn branch(&self, embedding: Embedding, conv: Convention) -> Vec<OIrrep> {
        assert!(self.n >= 2, "branching needs n >= 2");
        let lambda = self.to_partition(conv);
        let mut out: Vec<OIrrep> = lambda
            .branch(self.n)
            .into_iter()
            .map(|mu| {
                let labeled = match embedding {
                    Embedding::Standard => mu,
                    Embedding::DetCompensated => {
                        if (lambda.size() - mu.size()) % 2 == 1 {
                            mu.associated(self.n - 1)
                        } else {
                            mu
                        }
                    }
                };
                OIrrep::from_partition(&labeled, self.n - 1, conv)
            })
            .collect();
        out.sort();
        out
    }

    /// Multiplicity of `sigma` in the restriction of `self` to O(n−1).
    ///
    /// Always 0 or 1 for the standard embedding; the det-compensated subgroup
    /// can see multiplicity 2 when a merged class restricts.
    pub fn restriction_mult(&self, sigma: &OIrrep, embedding: Embedding, conv: Convention) -> usize {
        self.branch(embedding, conv)
            .iter()
            .filter(|s| *s == sigma)
            .count()
    }

    fn delta_rank(&self) -> u8 {
        match self.delta {
            1 => 0,
            -1 => 1,
            _ => 2,
        }
    }
}

impl PartialOrd for OIrrep {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OIrrep {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.weight, self.delta_rank()).cmp(&(other.n, &other.weight, other.delta_rank()))
    }
}

// Display is used in reports and error messages; keep it compact and stable.
impl std::fmt::Display for OIrrep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = match self.delta {
            1 => "+1",
            -1 => "-1",
            _ => "0",
        };
        write!(f, "tau[{};{};{}]", self.n, self.weight, d)
    }
}

/// Serialized form used in manifests and reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OIrrepRepr {
    pub n: usize,
    pub weight: Vec<i64>,
    pub delta: i8,
}

impl From<&OIrrep> for OIrrepRepr {
    fn from(t: &OIrrep) -> Self {
        OIrrepRepr {
            n: t.n,
            weight: t
                .weight
                .coords()
                .iter()
                .map(|c| i64::try_from(c.clone()).expect("weight coordinate exceeds i64"))
                .collect(),
            delta: t.delta,
        }
    }
}

impl TryFrom<&OIrrepRepr> for OIrrep {
    type Error = CoreError;
    fn try_from(r: &OIrrepRepr) -> Result<Self, Self::Error> {
        OIrrep::from_i64(r.n, &r.weight, r.delta)
    }
}

/// All irreducibles of O(n) with a₁ ≤ bound, duplicate free, in label order.
/// Merged classes are listed once, with the positive last coordinate.
pub fn catalog(n: usize, bound: u32) -> Vec<OIrrep> {
    let m = n / 2;
    let mut out = Vec::new();
    for w in crate::weights::enumerate_weights(m, Parity::of_group_dim(n), bound) {
        if w.coords().last().map_or(false, |c| c.is_negative()) {
            continue; // bar partner of an already-listed merged class
        }
        let merged = n % 2 == 0 && w.coords().last().map_or(false, |c| c.is_positive());
        if merged {
            out.push(OIrrep::new(n, w, 0).unwrap());
        } else {
            out.push(OIrrep::new(n, w.clone(), 1).unwrap());
            out.push(OIrrep::new(n, w, -1).unwrap());
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(n: usize, coords: &[i64], delta: i8) -> OIrrep {
        OIrrep::from_i64(n, coords, delta).unwrap()
    }

    #[test]
    fn label_invariants() {
        assert!(OIrrep::from_i64(3, &[2], 0).is_err());
        assert!(OIrrep::from_i64(4, &[1, 1], 1).is_err());
        assert!(OIrrep::from_i64(4, &[1, 1], 0).is_ok());
        assert!(OIrrep::from_i64(4, &[1, 0], 0).is_err());
        assert!(OIrrep::from_i64(4, &[1, -1], 0).is_err());
    }

    #[test]
    fn catalog_examples() {
        let c3: Vec<String> = catalog(3, 1).iter().map(|t| t.to_string()).collect();
        assert_eq!(
            c3,
            vec![
                "tau[3;(0);+1]",
                "tau[3;(0);-1]",
                "tau[3;(1);+1]",
                "tau[3;(1);-1]"
            ]
        );
        let c2: Vec<String> = catalog(2, 1).iter().map(|t| t.to_string()).collect();
        assert_eq!(c2, vec!["tau[2;(0);+1]", "tau[2;(0);-1]", "tau[2;(1);0]"]);
        let c4 = catalog(4, 1);
        assert_eq!(c4.len(), 5);
        assert_eq!(
            c4.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            vec![
                "tau[4;(0,0);+1]",
                "tau[4;(0,0);-1]",
                "tau[4;(1,0);+1]",
                "tau[4;(1,0);-1]",
                "tau[4;(1,1);0]"
            ]
        );
        // O(1) has exactly the trivial and sign characters
        assert_eq!(catalog(1, 3).len(), 2);
    }

    #[test]
    fn dims() {
        for a in 0..5i64 {
            assert_eq!(tau(3, &[a], 1).dim(), Int::from(2 * a + 1));
        }
        assert_eq!(tau(4, &[1, 1], 0).dim(), Int::from(6));
        assert_eq!(tau(4, &[1, 0], 1).dim(), Int::from(4));
        assert_eq!(tau(5, &[1, 0], 1).dim(), Int::from(5));
        assert_eq!(tau(5, &[1, 1], 1).dim(), Int::from(10));
        assert_eq!(tau(5, &[2, 2], 1).dim(), Int::from(35));
        assert_eq!(tau(7, &[1, 1, 1], 1).dim(), Int::from(35));
        assert_eq!(OIrrep::trivial(6).dim(), Int::one());
        assert_eq!(tau(2, &[3], 0).dim(), Int::from(2));
    }

    #[test]
    fn det_twist_and_dual() {
        assert_eq!(tau(3, &[1], 1).det_twist(), tau(3, &[1], -1));
        assert_eq!(tau(4, &[1, 1], 0).det_twist(), tau(4, &[1, 1], 0));
        assert_eq!(tau(4, &[2, 0], -1).dual(), tau(4, &[2, 0], -1));
    }

    #[test]
    fn partition_dictionary_round_trips() {
        for conv in [Convention::A, Convention::B] {
            for n in 1..=7 {
                for t in catalog(n, 3) {
                    let p = t.to_partition(conv);
                    assert!(p.valid_o_label(n));
                    assert_eq!(OIrrep::from_partition(&p, n, conv), t, "n={n} conv={conv}");
                }
            }
        }
    }

    #[test]
    fn branch_examples_standard() {
        // O(3) (2),+1 -> sigma_(2),0 ; sigma_(1),0 ; sigma_(0),+1
        let b = tau(3, &[2], 1).branch(Embedding::Standard, Convention::A);
        assert_eq!(
            b.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            vec!["tau[2;(0);+1]", "tau[2;(1);0]", "tau[2;(2);0]"]
        );
        let b = tau(3, &[2], -1).branch(Embedding::Standard, Convention::A);
        assert_eq!(
            b.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            vec!["tau[2;(0);-1]", "tau[2;(1);0]", "tau[2;(2);0]"]
        );
        // O(4) merged (1,1) -> both sign classes of the O(3) vector weight
        let b = tau(4, &[1, 1], 0).branch(Embedding::Standard, Convention::A);
        assert_eq!(
            b.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            vec!["tau[3;(1);+1]", "tau[3;(1);-1]"]
        );
        // trivial restricts to trivial
        assert_eq!(
            OIrrep::trivial(5).branch(Embedding::Standard, Convention::A),
            vec![OIrrep::trivial(4)]
        );
    }

    #[test]
    fn branch_dimension_bookkeeping() {
        let b = tau(3, &[2], 1).branch(Embedding::Standard, Convention::A);
        let total: Int = b.iter().map(|s| s.dim()).sum();
        assert_eq!(total, Int::from(5));
        for conv in [Convention::A, Convention::B] {
            for emb in [Embedding::Standard, Embedding::DetCompensated] {
                for n in 2..=6 {
                    for t in catalog(n, 3) {
                        let total: Int = t.branch(emb, conv).iter().map(|s| s.dim()).sum();
                        assert_eq!(total, t.dim(), "{t} emb={emb:?} conv={conv}");
                    }
                }
            }
        }
    }

    #[test]
    fn standard_branching_is_multiplicity_free() {
        for n in 2..=6 {
            for t in catalog(n, 3) {
                let b = t.branch(Embedding::Standard, Convention::A);
                let set: std::collections::BTreeSet<_> = b.iter().cloned().collect();
                assert_eq!(set.len(), b.len(), "{t}");
            }
        }
    }

    #[test]
    fn det_compensated_can_double() {
        // the merged O(2) class restricted to {±I} is twice the sign character
        let t = tau(2, &[1], 0);
        let b = t.branch(Embedding::DetCompensated, Convention::A);
        assert_eq!(b, vec![tau(1, &[], -1), tau(1, &[], -1)]);
        assert_eq!(
            t.restriction_mult(&tau(1, &[], -1), Embedding::DetCompensated, Convention::A),
            2
        );
        // standard embedding stays multiplicity free
        assert_eq!(
            t.restriction_mult(&tau(1, &[], -1), Embedding::Standard, Convention::A),
            1
        );
    }

    #[test]
    fn restriction_mult_examples() {
        assert_eq!(
            tau(4, &[1, 1], 0).restriction_mult(&tau(3, &[1], 1), Embedding::Standard, Convention::A),
            1
        );
        assert_eq!(
            tau(3, &[2], 1).restriction_mult(&tau(2, &[3], 0), Embedding::Standard, Convention::A),
            0
        );
        assert_eq!(
            OIrrep::trivial(3).restriction_mult(
                &OIrrep::trivial(2),
                Embedding::DetCompensated,
                Convention::A
            ),
            1
        );
    }

    #[test]
    fn convention_b_swaps_even_labels() {
        let t = tau(4, &[2, 0], 1);
        let pa = t.to_partition(Convention::A);
        let pb = t.to_partition(Convention::B);
        assert_eq!(pb, pa.associated(4));
        // merged classes and odd groups are convention independent
        let merged = tau(4, &[1, 1], 0);
        assert_eq!(
            merged.to_partition(Convention::A),
            merged.to_partition(Convention::B)
        );
        let odd = tau(3, &[2], -1);
        assert_eq!(odd.to_partition(Convention::A), odd.to_partition(Convention::B));
    }
}
