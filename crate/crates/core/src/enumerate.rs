//! Exact enumeration of lattice vectors below a quadratic-form bound.
//!
//! Given a positive definite rational Gram matrix G, lists every integer
//! vector k with kᵀGk ≤ bound, grouped into shells by exact norm. The bound
//! propagation uses the rational LDLᵀ factorization, so no point near the
//! cutoff is ever missed or spuriously included.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::error::CoreError;
use crate::linalg::RatMat;
use crate::{Int, Rat};

/// Lattice points grouped by exact squared norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shells {
    pub by_norm: BTreeMap<Rat, Vec<Vec<Int>>>,
}

impl Shells {
    pub fn count_at(&self, nu: &Rat) -> usize {
        self.by_norm.get(nu).map_or(0, |v| v.len())
    }

    pub fn total_points(&self) -> usize {
        self.by_norm.values().map(|v| v.len()).sum()
    }
}

/// Sanity cap on the shell enumeration; past this the cutoff is a mistake.
const POINT_CAP: usize = 4_000_000;

/// All k ∈ ℤⁿ with kᵀ G k ≤ bound, shelled by exact norm (includes k = 0).
pub fn shells_of_form(gram: &RatMat, bound: &Rat) -> Result<Shells, CoreError> {
    let n = gram.nrows();
    let mut by_norm: BTreeMap<Rat, Vec<Vec<Int>>> = BTreeMap::new();
    if bound.is_negative() {
        return Ok(Shells { by_norm });
    }
    let (d, u) = gram.ldlt()?;

    // level i contributes d_i (k_i + Σ_{j>i} u_ij k_j)²; assign from the last
    // coordinate down so each center is known when needed
    struct State<'a> {
        d: &'a [Rat],
        u: &'a [Vec<Rat>],
        bound: &'a Rat,
        k: Vec<Int>,
        total: usize,
        overflow: bool,
        by_norm: BTreeMap<Rat, Vec<Vec<Int>>>,
    }

    fn descend(st: &mut State<'_>, level: isize, used: Rat) {
        if st.overflow {
            return;
        }
        if level < 0 {
            st.total += 1;
            if st.total > POINT_CAP {
                st.overflow = true;
                return;
            }
            let norm = used;
            st.by_norm.entry(norm).or_default().push(st.k.clone());
            return;
        }
        let i = level as usize;
        let center: Rat = (i + 1..st.k.len())
            .map(|j| &st.u[i][j] * Rat::from_integer(st.k[j].clone()))
            .sum();
        let budget = st.bound - &used;
        // nearest integer to −center: from there the level term is monotone
        // along both probe directions, so breaking on overflow is safe
        let start: Int = (-center.clone() + Rat::new(Int::from(1), Int::from(2)))
            .floor()
            .to_integer();
        let probe = |mut v: Int, step: i64, st: &mut State<'_>| loop {
            let shifted = Rat::from_integer(v.clone()) + &center;
            let term = &st.d[i] * &shifted * &shifted;
            if term > budget {
                break;
            }
            st.k[i] = v.clone();
            descend(st, level - 1, used.clone() + term);
            v += Int::from(step);
        };
        probe(start.clone(), 1, st);
        probe(start - 1, -1, st);
    }

    let mut st = State {
        d: &d,
        u: &u,
        bound,
        k: vec![Int::zero(); n],
        total: 0,
        overflow: false,
        by_norm: BTreeMap::new(),
    };
    descend(&mut st, n as isize - 1, Rat::zero());
    if st.overflow {
        return Err(CoreError::EnumerationTooLarge { cap: POINT_CAP });
    }
    by_norm = st.by_norm;
    for shell in by_norm.values_mut() {
        shell.sort();
    }
    Ok(Shells { by_norm })
}
