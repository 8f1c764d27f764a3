//! Dominant integral weights of SO(n), their partial order and enumeration.
//!
//! Weights are integer tuples (a₁,…,a_m). For SO(2m+1) dominance means
//! a₁ ≥ … ≥ a_m ≥ 0; for SO(2m) it means a₁ ≥ … ≥ a_{m−1} ≥ |a_m|, so the
//! last coordinate may be negative. The `less` preorder and the level
//! function `ell` drive the multiplicity reconstruction; `enumerate_weights`
//! produces weights in the fixed processing order that the reconstruction's
//! triangular elimination relies on.

use num::{Signed, Zero};

use crate::error::CoreError;
use crate::Int;

/// Which family of special orthogonal groups a weight parameterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    /// SO(2m+1); all coordinates nonnegative.
    Odd,
    /// SO(2m); the last coordinate may be negative.
    Even,
}

impl Parity {
    pub fn of_group_dim(n: usize) -> Parity {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// A dominant integral weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    parity: Parity,
    coords: Vec<Int>,
}

impl Weight {
    /// Validate the dominance chain and build a weight.
    pub fn validate(coords: Vec<Int>, rank: usize, parity: Parity) -> Result<Weight, CoreError> {
        if coords.len() != rank {
            return Err(CoreError::WeightLength {
                expected: rank,
                got: coords.len(),
            });
        }
        for i in 0..rank.saturating_sub(1) {
            let bound = if parity == Parity::Even && i + 2 == rank {
                coords[i + 1].abs()
            } else {
                coords[i + 1].clone()
            };
            if coords[i] < bound {
                return Err(CoreError::NotDominant(format!(
                    "a{} = {} < {} required by a{}",
                    i + 1,
                    coords[i],
                    bound,
                    i + 2
                )));
            }
        }
        if parity == Parity::Odd {
            if let Some(last) = coords.last() {
                if last.is_negative() {
                    return Err(CoreError::NotDominant(format!(
                        "a{} = {} must be nonnegative",
                        rank, last
                    )));
                }
            }
        }
        Ok(Weight { parity, coords })
    }

    pub fn from_i64(coords: &[i64], parity: Parity) -> Result<Weight, CoreError> {
        Self::validate(coords.iter().map(|&c| Int::from(c)).collect(), coords.len(), parity)
    }

    pub fn zero(rank: usize, parity: Parity) -> Weight {
        Weight {
            parity,
            coords: vec![Int::zero(); rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Largest coordinate in absolute value (a₁ for a dominant weight).
    pub fn head(&self) -> Int {
        self.coords.first().map(|c| c.abs()).unwrap_or_else(Int::zero)
    }

    /// Negate the last coordinate (even parity only). An involution.
    pub fn bar(&self) -> Result<Weight, CoreError> {
        if self.parity != Parity::Even {
            return Err(CoreError::OddParity);
        }
        let mut coords = self.coords.clone();
        if let Some(last) = coords.last_mut() {
            *last = -last.clone();
        }
        Ok(Weight {
            parity: self.parity,
            coords,
        })
    }

    /// Representative with nonnegative last coordinate (identity for odd parity).
    pub fn abs_normalized(&self) -> Weight {
        let mut coords = self.coords.clone();
        if let Some(last) = coords.last_mut() {
            if last.is_negative() {
                *last = -last.clone();
            }
        }
        Weight {
            parity: self.parity,
            coords,
        }
    }

    /// Index of the last nonzero coordinate; 0 for the zero weight.
    pub fn ell(&self) -> usize {
        self.coords
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |p| p + 1)
    }

    /// The reconstruction preorder: self ≤ other iff the coordinate
    /// differences (other − self) form a weakly decreasing nonnegative chain.
    /// Only defined when both last coordinates are nonnegative.
    pub fn less(&self, other: &Weight) -> Result<bool, CoreError> {
        if self.parity != other.parity || self.rank() != other.rank() {
            return Err(CoreError::WeightMismatch);
        }
        for w in [self, other] {
            if w.coords.last().map_or(false, |c| c.is_negative()) {
                return Err(CoreError::NegativeLastCoordinate(w.to_string()));
            }
        }
        let diffs: Vec<Int> = other
            .coords
            .iter()
            .zip(&self.coords)
            .map(|(c, b)| c - b)
            .collect();
        let chain_ok = diffs.windows(2).all(|w| w[0] >= w[1])
            && diffs.last().map_or(true, |d| !d.is_negative());
        Ok(chain_ok)
    }

    /// `less` with equality excluded.
    pub fn strictly_less(&self, other: &Weight) -> Result<bool, CoreError> {
        Ok(self.less(other)? && self != other)
    }

    /// Key for the canonical processing order: level ℓ ascending, then the
    /// magnitude of the last nonzero coordinate, then coordinates by absolute
    /// value lexicographically, with the nonnegative bar-representative first.
    fn order_key(&self) -> (usize, Int, Vec<Int>, Vec<u8>) {
        let ell = self.ell();
        let lastval = if ell == 0 {
            Int::zero()
        } else {
            self.coords[ell - 1].abs()
        };
        let abs: Vec<Int> = self.coords.iter().map(|c| c.abs()).collect();
        let signs: Vec<u8> = self
            .coords
            .iter()
            .map(|c| if c.is_negative() { 1 } else { 0 })
            .collect();
        (ell, lastval, abs, signs)
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.parity, self.order_key()).cmp(&(other.parity, other.order_key()))
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All dominant weights with a₁ ≤ bound, in the canonical processing order.
pub fn enumerate_weights(rank: usize, parity: Parity, bound: u32) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut coords: Vec<i64> = Vec::with_capacity(rank);
    fn rec(rank: usize, parity: Parity, max: i64, coords: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if coords.len() == rank {
            let w = Weight::from_i64(coords, parity).expect("chain is dominant by construction");
            if parity == Parity::Even && coords.last().map_or(false, |&c| c > 0) {
                out.push(w.bar().unwrap());
            }
            out.push(w);
            return;
        }
        for v in 0..=max {
            coords.push(v);
            rec(rank, parity, v, coords, out);
            coords.pop();
        }
    }
    rec(rank, parity, i64::from(bound), &mut coords, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(coords: &[i64], parity: Parity) -> Weight {
        Weight::from_i64(coords, parity).unwrap()
    }

    #[test]
    fn validation_accepts_dominant_chains() {
        assert!(Weight::from_i64(&[2, 1, 0], Parity::Odd).is_ok());
        assert!(Weight::from_i64(&[2, 1, -1], Parity::Even).is_ok());
    }

    #[test]
    fn validation_rejects_non_dominant() {
        let err = Weight::from_i64(&[1, 2, 0], Parity::Odd).unwrap_err();
        assert!(err.to_string().contains("a1"));
        assert!(Weight::from_i64(&[2, 1, -2], Parity::Even).is_err());
        assert!(Weight::from_i64(&[1, -1], Parity::Odd).is_err());
    }

    #[test]
    fn bar_is_an_involution() {
        let a = w(&[2, 1], Parity::Even);
        assert_eq!(a.bar().unwrap(), w(&[2, -1], Parity::Even));
        assert_eq!(a.bar().unwrap().bar().unwrap(), a);
        let fixed = w(&[2, 0], Parity::Even);
        assert_eq!(fixed.bar().unwrap(), fixed);
        let odd = w(&[3, 2, 1], Parity::Odd);
        assert_eq!(odd.bar().unwrap_err().to_string(), CoreError::OddParity.to_string());
        assert_eq!(
            w(&[3, 2, -1], Parity::Even).bar().unwrap(),
            w(&[3, 2, 1], Parity::Even)
        );
    }

    #[test]
    fn less_examples() {
        let p = Parity::Even;
        assert!(w(&[1, 0], p).less(&w(&[2, 1], p)).unwrap());
        assert!(!w(&[1, 0], p).less(&w(&[2, 2], p)).unwrap());
        assert!(w(&[3, 1], p).less(&w(&[3, 1], p)).unwrap());
        assert!(!w(&[3, 1], p).strictly_less(&w(&[3, 1], p)).unwrap());
        assert!(w(&[1, -1], p).less(&w(&[2, 1], p)).is_err());
    }

    #[test]
    fn ell_examples() {
        assert_eq!(w(&[2, 1, 0], Parity::Odd).ell(), 2);
        assert_eq!(w(&[0, 0, 0], Parity::Odd).ell(), 0);
        assert_eq!(w(&[1, 1, 1], Parity::Odd).ell(), 3);
    }

    #[test]
    fn enumeration_matches_expected_order() {
        let odd1: Vec<String> = enumerate_weights(1, Parity::Odd, 2)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(odd1, vec!["(0)", "(1)", "(2)"]);

        let even2: Vec<String> = enumerate_weights(2, Parity::Even, 1)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(even2, vec!["(0,0)", "(1,0)", "(1,1)", "(1,-1)"]);

        let odd2: Vec<String> = enumerate_weights(2, Parity::Odd, 1)
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(odd2, vec!["(0,0)", "(1,0)", "(1,1)"]);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_bar_closed() {
        for (rank, parity) in [(2, Parity::Even), (3, Parity::Odd), (3, Parity::Even)] {
            let ws = enumerate_weights(rank, parity, 3);
            let set: std::collections::HashSet<_> = ws.iter().cloned().collect();
            assert_eq!(set.len(), ws.len());
            if parity == Parity::Even {
                for w in &ws {
                    assert!(set.contains(&w.bar().unwrap()));
                }
            }
        }
    }

    #[test]
    fn less_is_a_partial_order_on_nonnegative_weights() {
        let ws: Vec<Weight> = enumerate_weights(2, Parity::Even, 3)
            .into_iter()
            .filter(|w| !w.coords().last().unwrap().is_negative())
            .collect();
        for a in &ws {
            assert!(a.less(a).unwrap(), "reflexive at {a}");
            for b in &ws {
                if a.less(b).unwrap() && b.less(a).unwrap() {
                    assert_eq!(a, b, "antisymmetry {a} {b}");
                }
                for c in &ws {
                    if a.less(b).unwrap() && b.less(c).unwrap() {
                        assert!(a.less(c).unwrap(), "transitivity {a} {b} {c}");
                    }
                }
            }
        }
    }
}
