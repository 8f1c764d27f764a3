//! Characters of O(n) irreducibles at finite-order orthogonal elements.
//!
//! An orthogonal matrix of finite order is determined up to conjugacy by its
//! eigenvalue multiset, a collection of roots of unity. We certify finite
//! order and extract exact rotation angles by factoring the characteristic
//! polynomial into cyclotomics, so confluent angles are detected by exact
//! rational equality rather than a floating threshold.
//!
//! On the rotation subgroup the character is a ratio of generalized
//! Vandermonde determinants (sin type for odd n, cos type for even n).
//! At non-regular elements both determinants vanish; the limit is taken by
//! replacing the rows of a confluent angle class with successive derivative
//! rows, skipping derivative orders that vanish identically by parity at the
//! special angles 0 and π. The same row recipe applies to numerator and
//! denominator, so the combinatorial factors cancel and the plain ratio of
//! the modified determinants is the character value.
//!
//! Off the rotation subgroup: for odd n the central element −Id reduces to
//! the rotation case; for even n a determinant −1 element fixes a vector, so
//! the trace is the sum of the branched O(n−1) characters at the element with
//! one +1 eigenvalue removed.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num::{One, Zero};
use once_cell::sync::Lazy;

use crate::error::CoreError;
use crate::linalg::RatMat;
use crate::orthogonal::OIrrep;
use crate::partition::Partition;
use crate::{Convention, Int, Rat};

/// An element of O(n), possibly expressed in lattice coordinates where
/// orthogonality is with respect to a Gram form.
#[derive(Debug, Clone)]
pub struct OrthogonalElement {
    mat: RatMat,
}

impl OrthogonalElement {
    /// Matrix orthogonal for the standard inner product: MᵀM = I.
    pub fn new(mat: RatMat) -> Result<Self, CoreError> {
        if mat.nrows() != mat.ncols() || !mat.transpose().mul(&mat).is_identity() {
            return Err(CoreError::NotOrthogonal);
        }
        Ok(OrthogonalElement { mat })
    }

    /// Matrix in lattice coordinates, orthogonal for the Gram form G:
    /// MᵀGM = G with G symmetric positive definite.
    pub fn with_gram(mat: RatMat, gram: RatMat) -> Result<Self, CoreError> {
        if mat.nrows() != mat.ncols() {
            return Err(CoreError::NotOrthogonal);
        }
        let lhs = mat.transpose().mul(&gram).mul(&mat);
        if lhs != gram {
            return Err(CoreError::NotOrthogonal);
        }
        Ok(OrthogonalElement { mat })
    }

    pub fn matrix(&self) -> &RatMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn det(&self) -> Rat {
        self.mat.det()
    }

    /// Exact conjugacy invariant: the eigenvalue signature.
    pub fn signature(&self) -> Result<ElementSignature, CoreError> {
        ElementSignature::of_matrix(&self.mat)
    }
}

/// Eigenvalue data of a finite-order orthogonal transformation: counts of
/// the eigenvalues ±1 and rotation angle fractions f ∈ (0, ½) with
/// multiplicities, each fraction standing for a conjugate pair e^{±2πif}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSignature {
    n: usize,
    plus: usize,
    minus: usize,
    pairs: Vec<(Rat, usize)>,
}

impl ElementSignature {
    pub fn identity(n: usize) -> Self {
        ElementSignature {
            n,
            plus: n,
            minus: 0,
            pairs: Vec::new(),
        }
    }

    /// Signature of a square rational matrix of finite multiplicative order.
    pub fn of_matrix(mat: &RatMat) -> Result<Self, CoreError> {
        let n = mat.nrows();
        let coeffs = char_poly(mat);
        let int_coeffs: Option<Vec<Int>> = coeffs
            .iter()
            .map(|c| c.denom().is_one().then(|| c.numer().clone()))
            .collect();
        let Some(mut poly) = int_coeffs else {
            return Err(CoreError::NotFiniteOrder(
                "characteristic polynomial is not integral".into(),
            ));
        };
        let mut mult: BTreeMap<u64, usize> = BTreeMap::new();
        for d in cyclotomic_orders(n) {
            let phi = cyclotomic(d);
            loop {
                match poly_divide_exact(&poly, &phi) {
                    Some(q) => {
                        *mult.entry(d).or_insert(0) += 1;
                        poly = q;
                    }
                    None => break,
                }
            }
        }
        if poly.len() != 1 || !poly[0].is_one() {
            return Err(CoreError::NotFiniteOrder(format!(
                "characteristic polynomial has a non-cyclotomic factor of degree {}",
                poly.len().saturating_sub(1)
            )));
        }
        let mut sig = ElementSignature {
            n,
            plus: mult.get(&1).copied().unwrap_or(0),
            minus: mult.get(&2).copied().unwrap_or(0),
            pairs: Vec::new(),
        };
        for (&d, &m) in &mult {
            if d <= 2 {
                continue;
            }
            for k in 1..d {
                if 2 * k < d && num::Integer::gcd(&k, &d) == 1 {
                    sig.pairs.push((Rat::new(Int::from(k), Int::from(d)), m));
                }
            }
        }
        sig.pairs.sort();
        debug_assert_eq!(
            sig.plus + sig.minus + 2 * sig.pairs.iter().map(|(_, m)| m).sum::<usize>(),
            n
        );
        // a cyclotomic characteristic polynomial is not enough (unipotent
        // blocks would slip through); certify M^order = I
        let order = u64::try_from(sig.order())
            .map_err(|_| CoreError::NotFiniteOrder("order exceeds u64".into()))?;
        if !mat_pow(mat, order).is_identity() {
            return Err(CoreError::NotFiniteOrder(format!(
                "matrix is not semisimple: M^{order} differs from the identity"
            )));
        }
        Ok(sig)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn det(&self) -> i8 {
        if self.minus % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Multiplicative order of the underlying transformation.
    pub fn order(&self) -> Int {
        let mut ord = Int::one();
        if self.minus > 0 {
            ord = Int::from(2);
        }
        for (f, _) in &self.pairs {
            ord = num::Integer::lcm(&ord, f.denom());
        }
        ord
    }

    /// Signature of −B: eigenvalues negate, fractions reflect about ¼.
    pub fn negated(&self) -> ElementSignature {
        let half = Rat::new(Int::one(), Int::from(2));
        let mut pairs: Vec<(Rat, usize)> = self
            .pairs
            .iter()
            .map(|(f, m)| (&half - f, *m))
            .collect();
        pairs.sort();
        // merge fractions that collide (f and ½−f both present)
        let mut merged: Vec<(Rat, usize)> = Vec::new();
        for (f, m) in pairs {
            match merged.last_mut() {
                Some((g, c)) if *g == f => *c += m,
                _ => merged.push((f, m)),
            }
        }
        ElementSignature {
            n: self.n,
            plus: self.minus,
            minus: self.plus,
            pairs: merged,
        }
    }

    /// Remove one +1 eigenvalue: the signature of the fixed-vector complement.
    fn drop_plus_one(&self) -> ElementSignature {
        assert!(self.plus >= 1, "no +1 eigenvalue to drop");
        ElementSignature {
            n: self.n - 1,
            plus: self.plus - 1,
            minus: self.minus,
            pairs: self.pairs.clone(),
        }
    }

    /// Rotation angle fractions (m = ⌊n/2⌋ of them) for an element of SO(n),
    /// each in [0, ½]: explicit pairs, then paired +1s and paired −1s.
    fn rotation_angles(&self) -> Vec<Rat> {
        assert_eq!(self.det(), 1, "rotation angles need det +1");
        let m = self.n / 2;
        let mut out = Vec::with_capacity(m);
        for (f, mult) in &self.pairs {
            for _ in 0..*mult {
                out.push(f.clone());
            }
        }
        let zero_pairs = if self.n % 2 == 1 {
            (self.plus - 1) / 2
        } else {
            self.plus / 2
        };
        out.extend(std::iter::repeat(Rat::zero()).take(zero_pairs));
        out.extend(
            std::iter::repeat(Rat::new(Int::one(), Int::from(2))).take(self.minus / 2),
        );
        assert_eq!(out.len(), m);
        out.sort();
        out
    }

    fn cache_key(&self) -> String {
        let pairs: Vec<String> = self
            .pairs
            .iter()
            .map(|(f, m)| format!("{}/{}*{}", f.numer(), f.denom(), m))
            .collect();
        format!("{}:{}:{}:{}", self.n, self.plus, self.minus, pairs.join(","))
    }
}

impl std::fmt::Display for ElementSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "sig[{}]", self.cache_key())
    }
}

/// Trace of the irreducible `tau` at a finite-order element with the given
/// eigenvalue signature. Orthogonal characters are real.
pub fn character(tau: &OIrrep, sig: &ElementSignature, conv: Convention) -> f64 {
    assert_eq!(tau.group_dim(), sig.dim(), "element and irrep dimensions differ");
    character_partition(&tau.to_partition(conv), sig.dim(), sig)
}

/// Character evaluated directly at an orthogonal matrix.
pub fn character_at(
    tau: &OIrrep,
    element: &OrthogonalElement,
    conv: Convention,
) -> Result<f64, CoreError> {
    Ok(character(tau, &element.signature()?, conv))
}

static CHAR_CACHE: Lazy<RwLock<HashMap<(Partition, usize, ElementSignature), f64>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Snapshot of the memo table, keys rendered as stable strings.
pub fn cache_dump() -> Vec<(String, f64)> {
    let guard = CHAR_CACHE.read().unwrap();
    let mut out: Vec<(String, f64)> = guard
        .iter()
        .map(|((p, n, sig), v)| (format!("{}|{}|{}", p, n, sig.cache_key()), *v))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Restore memo entries previously produced by [`cache_dump`]; malformed
/// entries are skipped.
pub fn cache_load(entries: &[(String, f64)]) {
    let mut guard = CHAR_CACHE.write().unwrap();
    for (key, value) in entries {
        if let Some(parsed) = parse_cache_key(key) {
            guard.insert(parsed, *value);
        }
    }
}

fn parse_cache_key(key: &str) -> Option<(Partition, usize, ElementSignature)> {
    let mut it = key.splitn(3, '|');
    let ptxt = it.next()?;
    let n: usize = it.next()?.parse().ok()?;
    let sig_txt = it.next()?;
    let parts: Vec<u64> = if ptxt == "[]" {
        Vec::new()
    } else {
        ptxt.strip_prefix('[')?
            .strip_suffix(']')?
            .split(',')
            .map(|s| s.parse().ok())
            .collect::<Option<_>>()?
    };
    let mut sit = sig_txt.split(':');
    let sn: usize = sit.next()?.parse().ok()?;
    let plus: usize = sit.next()?.parse().ok()?;
    let minus: usize = sit.next()?.parse().ok()?;
    let pair_txt = sit.next()?;
    let mut pairs = Vec::new();
    if !pair_txt.is_empty() {
        for chunk in pair_txt.split(',') {
            let (frac, mult) = chunk.split_once('*')?;
            let (num, den) = frac.split_once('/')?;
            pairs.push((
                Rat::new(num.parse::<i64>().ok()?.into(), den.parse::<i64>().ok()?.into()),
                mult.parse().ok()?,
            ));
        }
    }
    Some((
        Partition::new(parts),
        n,
        ElementSignature {
            n: sn,
            plus,
            minus,
            pairs,
        },
    ))
}

fn character_partition(lambda: &Partition, n: usize, sig: &ElementSignature) -> f64 {
    let key = (lambda.clone(), n, sig.clone());
    if let Some(v) = CHAR_CACHE.read().unwrap().get(&key) {
        return *v;
    }
    let value = character_partition_uncached(lambda, n, sig);
    CHAR_CACHE.write().unwrap().insert(key, value);
    value
}

fn character_partition_uncached(lambda: &Partition, n: usize, sig: &ElementSignature) -> f64 {
    let m = n / 2;
    if sig.det() == 1 {
        let small = if lambda.len() > m {
            lambda.associated(n)
        } else {
            lambda.clone()
        };
        let weight: Vec<u64> = (0..m).map(|i| small.part(i)).collect();
        let merged = n % 2 == 0 && small.len() == m;
        let base = so_character(n, &weight, &sig.rotation_angles());
        if merged {
            2.0 * base
        } else {
            base
        }
    } else if n % 2 == 1 {
        // −Id is central: the value at B is (−1)^{|λ|} times the SO value at −B
        let small = if lambda.len() > m {
            lambda.associated(n)
        } else {
            lambda.clone()
        };
        let weight: Vec<u64> = (0..m).map(|i| small.part(i)).collect();
        let sign = if lambda.size() % 2 == 0 { 1.0 } else { -1.0 };
        sign * so_character(n, &weight, &sig.negated().rotation_angles())
    } else {
        // even n, det −1: the −1 eigenvalue count is odd, so a +1 exists;
        // split off the fixed vector and branch to O(n−1)
        assert!(sig.plus >= 1, "det -1 element of O(even) must fix a vector");
        let reduced = sig.drop_plus_one();
        lambda
            .branch(n)
            .iter()
            .map(|mu| character_partition(mu, n - 1, &reduced))
            .sum()
    }
}

/// Confluence class of equal angles with a parity constraint at 0 and π.
struct AngleClass {
    fraction: Rat,
    size: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum TrigKind {
    /// sin(Lθ/2) with L odd: odd about θ=0, even about θ=π.
    HalfSin,
    /// cos(Lθ) with L integer: even about both.
    Cos,
}

/// Character of the SO(n) content at a rotation element with the given angle
/// fractions. For even n with a positive last weight coordinate this is the
/// character of V_Λ ⊕ V_Λ̄, i.e. the caller doubles; here we always evaluate
/// the cos-type determinant which already is (χ_Λ + χ_Λ̄)/… correctly for the
/// single class (the sin-type part cancels between the pair).
fn so_character(n: usize, weight: &[u64], fractions: &[Rat]) -> f64 {
    let m = n / 2;
    assert_eq!(weight.len(), m);
    assert_eq!(fractions.len(), m);
    if m == 0 {
        return 1.0;
    }
    let (kind, num_l, den_l): (TrigKind, Vec<i64>, Vec<i64>) = if n % 2 == 1 {
        (
            TrigKind::HalfSin,
            (0..m)
                .map(|j| 2 * weight[j] as i64 + 2 * (m - j - 1) as i64 + 1)
                .collect(),
            (0..m).map(|j| 2 * (m - j - 1) as i64 + 1).collect(),
        )
    } else {
        (
            TrigKind::Cos,
            (0..m).map(|j| weight[j] as i64 + (m - j - 1) as i64).collect(),
            (0..m).map(|j| (m - j - 1) as i64).collect(),
        )
    };
    let classes = confluence_classes(fractions);
    let num = confluent_det(&classes, &num_l, kind);
    let den = confluent_det(&classes, &den_l, kind);
    assert!(
        den.abs() > 1e-9,
        "degenerate Weyl denominator at fractions {:?}",
        fractions
    );
    num / den
}

fn confluence_classes(fractions: &[Rat]) -> Vec<AngleClass> {
    let mut classes: Vec<AngleClass> = Vec::new();
    for f in fractions {
        match classes.last_mut() {
            Some(c) if c.fraction == *f => c.size += 1,
            _ => classes.push(AngleClass {
                fraction: f.clone(),
                size: 1,
            }),
        }
    }
    classes
}

/// Derivative orders to use for a confluent class, respecting the parity of
/// the entry functions about the special angles 0 and π.
fn derivative_orders(kind: TrigKind, fraction: &Rat, size: usize) -> Vec<u32> {
    let zero = fraction.is_zero();
    let half = *fraction == Rat::new(Int::one(), Int::from(2));
    match kind {
        TrigKind::HalfSin if zero => (0..size).map(|s| 2 * s as u32 + 1).collect(),
        TrigKind::HalfSin if half => (0..size).map(|s| 2 * s as u32).collect(),
        TrigKind::Cos if zero || half => (0..size).map(|s| 2 * s as u32).collect(),
        _ => (0..size).map(|s| s as u32).collect(),
    }
}

/// Build the confluent determinant: one row per (class, derivative order),
/// columns indexed by the L parameters.
fn confluent_det(classes: &[AngleClass], ls: &[i64], kind: TrigKind) -> f64 {
    let m = ls.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for class in classes {
        for s in derivative_orders(kind, &class.fraction, class.size) {
            let row: Vec<f64> = ls.iter().map(|&l| trig_entry(kind, l, &class.fraction, s)).collect();
            rows.push(row);
        }
    }
    assert_eq!(rows.len(), m);
    det_f64(rows)
}

/// s-th derivative of the entry function at θ = 2πf:
///   HalfSin: dᵈ/dθᵈ sin(Lθ/2) = (L/2)ˢ sin(πLf + sπ/2)
///   Cos:     dᵈ/dθᵈ cos(Lθ)  = Lˢ cos(2πLf + sπ/2)
fn trig_entry(kind: TrigKind, l: i64, fraction: &Rat, s: u32) -> f64 {
    let two = Rat::from_integer(Int::from(2));
    match kind {
        TrigKind::HalfSin => {
            // argument in units of π: L·f + s/2, reduced mod 2
            let arg = Rat::from_integer(Int::from(l)) * fraction
                + Rat::new(Int::from(s), Int::from(2));
            let t = rat_mod(&arg, &two);
            (l as f64 / 2.0).powi(s as i32) * (std::f64::consts::PI * t).sin()
        }
        TrigKind::Cos => {
            // cos(2πLf + sπ/2) = sin(2πLf + (s+1)π/2); π-units: 2Lf + (s+1)/2
            let arg = Rat::from_integer(Int::from(2 * l)) * fraction
                + Rat::new(Int::from(s + 1), Int::from(2));
            let t = rat_mod(&arg, &two);
            (l as f64).powi(s as i32) * (std::f64::consts::PI * t).sin()
        }
    }
}

/// x mod m for rationals, result in [0, m).
fn rat_mod(x: &Rat, m: &Rat) -> f64 {
    let q = (x / m).floor();
    let r = x - q * m;
    let num = r.numer();
    let den = r.denom();
    // exact-to-f64 conversion of a small reduced fraction
    int_to_f64(num) / int_to_f64(den)
}

fn int_to_f64(x: &Int) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("rational component exceeds f64 range")
}

fn det_f64(mut rows: Vec<Vec<f64>>) -> f64 {
    let n = rows.len();
    let mut det = 1.0;
    for c in 0..n {
        let (pivot, _) = (c..n)
            .map(|r| (r, rows[r][c].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if rows[pivot][c].abs() < 1e-300 {
            return 0.0;
        }
        if pivot != c {
            rows.swap(pivot, c);
            det = -det;
        }
        det *= rows[c][c];
        for r in c + 1..n {
            let f = rows[r][c] / rows[c][c];
            for j in c..n {
                rows[r][j] -= f * rows[c][j];
            }
        }
    }
    det
}

fn mat_pow(mat: &RatMat, mut e: u64) -> RatMat {
    let mut base = mat.clone();
    let mut acc = RatMat::identity(mat.nrows());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// Characteristic polynomial coefficients, constant term first, by the
/// Faddeev–LeVerrier recursion over exact rationals.
fn char_poly(mat: &RatMat) -> Vec<Rat> {
    let n = mat.nrows();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut work = mat.clone();
    for k in 1..=n {
        let trace: Rat = (0..n).map(|i| work.at(i, i).clone()).sum();
        let c = -trace / Rat::from_integer(Int::from(k as i64));
        coeffs[n - k] = c.clone();
        if k < n {
            let mut shifted = work.clone();
            for i in 0..n {
                *shifted.at_mut(i, i) += &c;
            }
            work = mat.mul(&shifted);
        }
    }
    coeffs
}

/// Orders d whose primitive roots can appear among eigenvalues of an n×n
/// rational matrix: φ(d) ≤ n.
fn cyclotomic_orders(n: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    let mut gap = 0;
    // φ(d) > n for all d beyond a bounded stretch; stop after a safe run
    while gap < 64 {
        if euler_phi(d) <= n as u64 {
            out.push(d);
            gap = 0;
        } else {
            gap += 1;
        }
        d += 1;
    }
    out
}

fn euler_phi(mut d: u64) -> u64 {
    let mut result = d;
    let mut p = 2;
    while p * p <= d {
        if d % p == 0 {
            while d % p == 0 {
                d /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if d > 1 {
        result -= result / d;
    }
    result
}

/// Φ_d as integer coefficients, constant term first.
fn cyclotomic(d: u64) -> Vec<Int> {
    // (x^d − 1) divided by all proper cyclotomic factors
    let mut poly = vec![Int::zero(); d as usize + 1];
    poly[0] = -Int::one();
    poly[d as usize] = Int::one();
    for e in 1..d {
        if d % e == 0 {
            poly = poly_divide_exact(&poly, &cyclotomic(e))
                .expect("cyclotomic division is exact");
        }
    }
    poly
}

/// Exact division of integer polynomials; None if not divisible.
fn poly_divide_exact(num: &[Int], den: &[Int]) -> Option<Vec<Int>> {
    let dn = num.len().checked_sub(1)?;
    let dd = den.len() - 1;
    if dn < dd {
        return None;
    }
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<Int> = num.to_vec();
    let mut quot = vec![Int::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        quot[k] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            rem[k + j] = &rem[k + j] - &c * &den[j];
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(quot)
    } else {
        None
    }
}
