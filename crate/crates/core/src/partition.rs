//! Weyl's partition parameterization of the irreducible representations of
//! the full orthogonal group O(n).
//!
//! Irreducibles of O(n) correspond to partitions λ whose first two column
//! lengths satisfy λ′₁ + λ′₂ ≤ n. Tensoring with det swaps a partition with
//! its associate (first column length replaced by n − λ′₁); self-associated
//! partitions (only possible for even n) are fixed. Restriction to O(n−1)
//! picks out the partitions interleaving λ that remain valid labels. This
//! coordinate system assigns the sign labels in branching canonically, which
//! is what makes the character recursion and the multiplicity bookkeeping
//! downstream convention-safe.

/// A partition: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u64>);

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Partition {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "parts must be weakly decreasing"
        );
        Partition(parts)
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn part(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Number of nonzero parts (rows).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts.
    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let rows = self.part(0) as usize;
        let cols = (0..rows)
            .map(|i| self.0.iter().filter(|&&p| p > i as u64).count() as u64)
            .collect();
        Partition(cols)
    }

    /// Valid as a label of an O(n) irreducible: λ′₁ + λ′₂ ≤ n.
    pub fn valid_o_label(&self, n: usize) -> bool {
        let c = self.conjugate();
        c.part(0) + c.part(1) <= n as u64
    }

    /// The det-twisted partner inside O(n): first column length λ′₁ ↦ n − λ′₁.
    pub fn associated(&self, n: usize) -> Partition {
        debug_assert!(self.valid_o_label(n));
        let mut c = self.conjugate().0;
        let first = c.first().copied().unwrap_or(0);
        let new_first = n as u64 - first;
        if c.is_empty() {
            if new_first > 0 {
                c.push(new_first);
            }
        } else {
            c[0] = new_first;
        }
        // new first column dominates the second by validity of the label
        if c.first() == Some(&0) {
            c.remove(0);
        }
        Partition::new(c).conjugate()
    }

    pub fn is_self_associated(&self, n: usize) -> bool {
        *self == self.associated(n)
    }

    /// All partitions μ with λ₁ ≥ μ₁ ≥ λ₂ ≥ μ₂ ≥ …, i.e. one-row interleaving.
    pub fn interleavings(&self) -> Vec<Partition> {
        let k = self.len();
        let mut out = Vec::new();
        let mut cur: Vec<u64> = Vec::with_capacity(k);
        fn rec(lam: &Partition, i: usize, cur: &mut Vec<u64>, out: &mut Vec<Partition>) {
            if i == lam.len() {
                out.push(Partition::new(cur.clone()));
                return;
            }
            let hi = lam.part(i);
            let lo = lam.part(i + 1);
            for v in lo..=hi {
                cur.push(v);
                rec(lam, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(self, 0, &mut cur, &mut out);
        out.sort();
        out.dedup();
        debug_assert_eq!(out.len(), {
            let mut prod = 1usize;
            for i in 0..k {
                prod *= (self.part(i) - self.part(i + 1) + 1) as usize;
            }
            prod
        });
        out
    }

    /// Restriction constituents of the O(n) irreducible labeled by `self`
    /// to a standardly embedded O(n−1): interleavings that remain valid.
    pub fn branch(&self, n: usize) -> Vec<Partition> {
        self.interleavings()
            .into_iter()
            .filter(|mu| mu.valid_o_label(n - 1))
            .collect()
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}
