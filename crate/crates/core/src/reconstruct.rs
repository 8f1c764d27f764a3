//! Recovering right-regular-representation multiplicities from τ-spectra,
//! deciding representation equivalence, and searching for distinguishing
//! bundles.
//!
//! The inversion is triangular. The λ = 0 rows of the spectra determine the
//! τ̃ multiplicities outright. For the continuous families, each weight μ₀ of
//! the frequency-stabilizer group O(n−1) is lifted to the weight of O(n) with
//! the same coordinates; the branched constituents of the lifted bundles
//! consist of the two sign classes over μ₀ itself plus constituents at
//! weights that precede μ₀ in the processing order (level ℓ ascending, then
//! last nonzero coordinate, then lexicographically). Subtracting the already
//! determined terms from the lifted spectrum rows isolates n_Γ(π_{σ,√ν}).
//! Negative intermediates mean inconsistent input and abort the run.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;

use num::{Signed, Zero};
use once_cell::sync::OnceCell;

use crate::bieberbach::{AffineRep, BieberbachGroup};
use crate::enumerate::Shells;
use crate::error::CoreError;
use crate::linalg::RatMat;
use crate::motion::MotionRep;
use crate::orthogonal::{catalog, Embedding, OIrrep};
use crate::spectra::{
    dual_shells, tau_spectrum_from_multiplicities, tau_spectrum_oracle_with_shells,
    are_tau_isospectral, MultiplicityTable, Parallelism, SpectrumTable, TauVerdict,
};
use crate::weights::{enumerate_weights, Parity, Weight};
use crate::{format_rat, Convention, Int, Rat};

/// Source of τ-spectra: oracle-backed for real groups, table-backed for
/// synthetic data. Implementations must be pure in the sense that repeated
/// queries agree.
pub trait SpectraProvider {
    fn group_dim(&self) -> usize;
    fn nu_max(&self) -> &Rat;
    fn spectrum(&self, tau: &OIrrep) -> Result<SpectrumTable, CoreError>;
}

/// Oracle-backed provider with a shared lattice enumeration and a memo of
/// finished tables.
pub struct OracleProvider<'a> {
    group: &'a BieberbachGroup,
    nu_max: Rat,
    conv: Convention,
    mode: Parallelism,
    shells: OnceCell<Shells>,
    memo: Mutex<HashMap<OIrrep, SpectrumTable>>,
}

impl<'a> OracleProvider<'a> {
    pub fn new(
        group: &'a BieberbachGroup,
        nu_max: Rat,
        conv: Convention,
        mode: Parallelism,
    ) -> Self {
        OracleProvider {
            group,
            nu_max,
            conv,
            mode,
            shells: OnceCell::new(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl SpectraProvider for OracleProvider<'_> {
    fn group_dim(&self) -> usize {
        self.group.dim()
    }

    fn nu_max(&self) -> &Rat {
        &self.nu_max
    }

    fn spectrum(&self, tau: &OIrrep) -> Result<SpectrumTable, CoreError> {
        if let Some(hit) = self.memo.lock().unwrap().get(tau) {
            return Ok(hit.clone());
        }
        let shells = self
            .shells
            .get_or_try_init(|| dual_shells(self.group, &self.nu_max))?;
        let table = tau_spectrum_oracle_with_shells(
            self.group,
            shells,
            tau,
            &self.nu_max,
            self.conv,
            self.mode,
        )?;
        self.memo.lock().unwrap().insert(tau.clone(), table.clone());
        Ok(table)
    }
}

/// Provider synthesizing spectra from a multiplicity table; used to test the
/// reconstruction without any group.
pub struct TableProvider {
    pub table: MultiplicityTable,
    pub conv: Convention,
}

impl SpectraProvider for TableProvider {
    fn group_dim(&self) -> usize {
        self.table.n
    }

    fn nu_max(&self) -> &Rat {
        &self.table.nu_max
    }

    fn spectrum(&self, tau: &OIrrep) -> Result<SpectrumTable, CoreError> {
        tau_spectrum_from_multiplicities(&self.table, tau, &self.table.nu_max.clone(), self.conv)
    }
}

/// λ = 0 rows across the catalog: n_Γ(τ̃) for every τ with a₁ ≤ weight_bound.
/// Zero rows are left implicit so that table equality is structural.
pub fn zero_multiplicities(
    provider: &dyn SpectraProvider,
    weight_bound: u32,
) -> Result<BTreeMap<OIrrep, u64>, CoreError> {
    let mut out = BTreeMap::new();
    for tau in catalog(provider.group_dim(), weight_bound) {
        let d0 = provider.spectrum(&tau)?.zero_row();
        if d0 > 0 {
            out.insert(tau, d0);
        }
    }
    Ok(out)
}

fn lift_weight(mu0: &Weight, n: usize) -> Weight {
    let m = n / 2;
    let mut coords: Vec<Int> = mu0.coords().to_vec();
    coords.resize(m, Int::zero());
    Weight::validate(coords, m, Parity::of_group_dim(n))
        .expect("padded dominant chain stays dominant")
}

/// Recover the full multiplicity table below the cutoffs.
pub fn reconstruct_multiplicities(
    provider: &dyn SpectraProvider,
    weight_bound: u32,
    conv: Convention,
) -> Result<MultiplicityTable, CoreError> {
    let n = provider.group_dim();
    if n < 2 {
        return Err(CoreError::DimensionMismatch(
            "reconstruction needs dimension at least 2".into(),
        ));
    }
    let zero_part = zero_multiplicities(provider, weight_bound)?;
    let mut continuous: BTreeMap<(OIrrep, Rat), u64> = BTreeMap::new();
    let mut processed: BTreeSet<OIrrep> = BTreeSet::new();

    let rank_m = (n - 1) / 2;
    let parity_m = Parity::of_group_dim(n - 1);
    for mu0 in enumerate_weights(rank_m, parity_m, weight_bound) {
        if mu0.coords().last().map_or(false, |c| c.is_negative()) {
            continue; // bar partner names the same merged class
        }
        let lift = lift_weight(&mu0, n);
        for delta in [1i8, -1] {
            let tau = OIrrep::new(n, lift.clone(), delta)?;
            let lifted = provider.spectrum(&tau)?;
            let partners = tau.branch(Embedding::Standard, conv);
            let top_idx = partners
                .iter()
                .position(|s| s.weight() == &mu0)
                .expect("the lifted bundle contains a constituent over its own weight");
            let top = partners[top_idx].clone();
            let others: Vec<&OIrrep> = partners
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != top_idx)
                .map(|(_, s)| s)
                .collect();
            for s in &others {
                if !processed.contains(*s) {
                    return Err(CoreError::ProviderGap(format!(
                        "processing order violated: {s} needed before {top}"
                    )));
                }
            }
            let verify = processed.contains(&top);

            // candidate eigenvalues: rows of the lifted spectrum plus the
            // support of every already-known term (to catch inconsistencies)
            let mut nus: BTreeSet<Rat> = lifted
                .entries
                .keys()
                .filter(|nu| !nu.is_zero())
                .cloned()
                .collect();
            for ((sigma, nu), _) in &continuous {
                if others.iter().any(|s| *s == sigma) || (verify && *sigma == top) {
                    nus.insert(nu.clone());
                }
            }

            for nu in nus {
                let mut value = lifted.multiplicity(&nu) as i64;
                for s in &others {
                    value -= continuous
                        .get(&((*s).clone(), nu.clone()))
                        .copied()
                        .unwrap_or(0) as i64;
                }
                if value < 0 {
                    return Err(CoreError::NegativeMultiplicity {
                        sigma: top.to_string(),
                        nu: format_rat(&nu),
                        value,
                    });
                }
                if verify {
                    let existing = continuous
                        .get(&(top.clone(), nu.clone()))
                        .copied()
                        .unwrap_or(0) as i64;
                    if existing != value {
                        return Err(CoreError::InconsistentReconstruction {
                            sigma: top.to_string(),
                            nu: format_rat(&nu),
                            a: existing,
                            b: value,
                        });
                    }
                } else if value > 0 {
                    continuous.insert((top.clone(), nu.clone()), value as u64);
                }
            }
            processed.insert(top);
        }
    }

    Ok(MultiplicityTable {
        n,
        weight_bound,
        nu_max: provider.nu_max().clone(),
        zero_part,
        continuous_part: continuous,
    })
}

/// Outcome of a representation-equivalence comparison at cutoffs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    EquivalentUpToCutoffs,
    Distinguished {
        witness: MotionRep,
        n1: u64,
        n2: u64,
    },
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::EquivalentUpToCutoffs)
    }
}

impl std::fmt::Display for EquivalenceVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EquivalenceVerdict::EquivalentUpToCutoffs => {
                write!(f, "representation equivalent up to cutoffs")
            }
            EquivalenceVerdict::Distinguished { witness, n1, n2 } => {
                write!(f, "distinguished at {witness}: {n1} vs {n2}")
            }
        }
    }
}

/// Compare reconstructed multiplicity tables; the witness is the first
/// differing representation in the canonical order (τ̃ families first).
pub fn compare_multiplicity_tables(
    t1: &MultiplicityTable,
    t2: &MultiplicityTable,
) -> EquivalenceVerdict {
    let taus: BTreeSet<&OIrrep> = t1.zero_part.keys().chain(t2.zero_part.keys()).collect();
    for tau in taus {
        let (a, b) = (t1.zero_mult(tau), t2.zero_mult(tau));
        if a != b {
            return EquivalenceVerdict::Distinguished {
                witness: MotionRep::TauTilde(tau.clone()),
                n1: a,
                n2: b,
            };
        }
    }
    let keys: BTreeSet<&(OIrrep, Rat)> = t1
        .continuous_part
        .keys()
        .chain(t2.continuous_part.keys())
        .collect();
    for (sigma, nu) in keys {
        let (a, b) = (t1.continuous_mult(sigma, nu), t2.continuous_mult(sigma, nu));
        if a != b {
            return EquivalenceVerdict::Distinguished {
                witness: MotionRep::PiSigmaR {
                    sigma: sigma.clone(),
                    nu: nu.clone(),
                },
                n1: a,
                n2: b,
            };
        }
    }
    EquivalenceVerdict::EquivalentUpToCutoffs
}

/// Reconstruct both groups and compare.
pub fn are_representation_equivalent(
    g1: &BieberbachGroup,
    g2: &BieberbachGroup,
    weight_bound: u32,
    nu_max: &Rat,
    conv: Convention,
    mode: Parallelism,
) -> Result<(EquivalenceVerdict, MultiplicityTable, MultiplicityTable), CoreError> {
    if g1.dim() != g2.dim() {
        return Err(CoreError::DimensionMismatch(
            "groups act on spaces of different dimension".into(),
        ));
    }
    let p1 = OracleProvider::new(g1, nu_max.clone(), conv, mode);
    let p2 = OracleProvider::new(g2, nu_max.clone(), conv, mode);
    let t1 = reconstruct_multiplicities(&p1, weight_bound, conv)?;
    let t2 = reconstruct_multiplicities(&p2, weight_bound, conv)?;
    let verdict = compare_multiplicity_tables(&t1, &t2);
    Ok((verdict, t1, t2))
}

/// Full verdict vector over the bundle catalog plus the equivalence verdict.
#[derive(Debug, Clone)]
pub struct StrongIsospectralityReport {
    pub weight_bound: u32,
    pub nu_max: Rat,
    pub per_tau: Vec<(OIrrep, TauVerdict)>,
    pub first_distinguishing_tau: Option<OIrrep>,
    pub equivalence: EquivalenceVerdict,
    /// τ-isospectrality for every cataloged bundle must coincide with
    /// representation equivalence at compatible cutoffs.
    pub consistent: bool,
}

impl StrongIsospectralityReport {
    pub fn all_tau_isospectral(&self) -> bool {
        self.per_tau.iter().all(|(_, v)| v.is_equal())
    }
}

pub fn strong_isospectrality_report(
    g1: &BieberbachGroup,
    g2: &BieberbachGroup,
    weight_bound: u32,
    nu_max: &Rat,
    conv: Convention,
    mode: Parallelism,
) -> Result<StrongIsospectralityReport, CoreError> {
    let mut per_tau = Vec::new();
    let mut first = None;
    for tau in catalog(g1.dim(), weight_bound) {
        let verdict = are_tau_isospectral(g1, g2, &tau, nu_max, conv, mode)?;
        if first.is_none() && !verdict.is_equal() {
            first = Some(tau.clone());
        }
        per_tau.push((tau, verdict));
    }
    let (equivalence, _, _) =
        are_representation_equivalent(g1, g2, weight_bound, nu_max, conv, mode)?;
    let all_equal = per_tau.iter().all(|(_, v)| v.is_equal());
    let consistent = all_equal == equivalence.is_equivalent();
    Ok(StrongIsospectralityReport {
        weight_bound,
        nu_max: nu_max.clone(),
        per_tau,
        first_distinguishing_tau: first,
        equivalence,
        consistent,
    })
}

/// Parameter space for the diagonal-holonomy search: groups on ℤⁿ whose
/// rotations are diagonal ±1 matrices, with translation coordinates k/d.
#[derive(Debug, Clone)]
pub struct DiagonalFamily {
    pub n: usize,
    pub max_point_group: usize,
    pub denominator: u32,
}

#[derive(Debug, Clone)]
pub struct DistinguishedPair {
    pub left: String,
    pub right: String,
    pub tau: OIrrep,
    pub nu: Rat,
    pub d1: u64,
    pub d2: u64,
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub candidates: usize,
    pub groups: Vec<BieberbachGroup>,
    pub buckets: usize,
    pub pairs: Vec<DistinguishedPair>,
}

fn diagonal_matrix(n: usize, mask: usize) -> RatMat {
    let mut m = RatMat::identity(n);
    for i in 0..n {
        if mask & (1 << i) != 0 {
            *m.at_mut(i, i) = -Rat::from_integer(Int::from(1));
        }
    }
    m
}

fn translations(n: usize, denominator: u32) -> Vec<Vec<Rat>> {
    let d = denominator.max(1) as i64;
    let mut out: Vec<Vec<Rat>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for k in 0..d {
                let mut v = prefix.clone();
                v.push(Rat::new(Int::from(k), Int::from(d)));
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Enumerate the family, bucket by trivial-bundle spectrum, and report pairs
/// distinguished by a higher bundle. Pure data exploration: nothing about
/// the outcome is assumed in advance.
pub fn search_distinguishing_pairs(
    family: &DiagonalFamily,
    weight_bound: u32,
    nu_max: &Rat,
    cap: usize,
    conv: Convention,
    mode: Parallelism,
) -> Result<SearchOutcome, CoreError> {
    let n = family.n;
    let masks: Vec<usize> = (1..(1usize << n)).collect();
    let trans = translations(n, family.denominator);
    let mut candidates: Vec<Vec<AffineRep>> = vec![vec![]];
    if family.max_point_group >= 2 {
        for &m1 in &masks {
            for t1 in &trans {
                candidates.push(vec![AffineRep::new(diagonal_matrix(n, m1), t1.clone())]);
            }
        }
    }
    if family.max_point_group >= 4 {
        for (i, &m1) in masks.iter().enumerate() {
            for &m2 in &masks[i + 1..] {
                for t1 in &trans {
                    for t2 in &trans {
                        candidates.push(vec![
                            AffineRep::new(diagonal_matrix(n, m1), t1.clone()),
                            AffineRep::new(diagonal_matrix(n, m2), t2.clone()),
                        ]);
                    }
                }
            }
        }
    }
    if candidates.len() > cap {
        return Err(CoreError::FamilyTooLarge {
            got: candidates.len(),
            cap,
        });
    }

    let mut groups: Vec<BieberbachGroup> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for gens in candidates.iter() {
        let Ok(group) = BieberbachGroup::from_generators(
            format!("fam{:04}", groups.len()),
            RatMat::identity(n),
            gens.clone(),
        ) else {
            continue;
        };
        if group.point_group_order() > family.max_point_group {
            continue;
        }
        if !group.validate().is_valid() {
            continue;
        }
        let key: String = group
            .reps()
            .iter()
            .map(|r| {
                let rot: Vec<String> = (0..n)
                    .flat_map(|i| r.rotation.row(i).iter().map(|x| x.to_string()))
                    .collect();
                let tr: Vec<String> = r.translation.iter().map(|x| x.to_string()).collect();
                format!("{}|{}", rot.join(","), tr.join(","))
            })
            .collect::<Vec<_>>()
            .join(";");
        if seen.insert(key) {
            groups.push(group);
        }
    }

    // bucket by the trivial-bundle spectrum
    let trivial = OIrrep::trivial(n);
    let mut buckets: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut spectra: Vec<HashMap<OIrrep, SpectrumTable>> = Vec::new();
    for (idx, group) in groups.iter().enumerate() {
        let s = crate::spectra::tau_spectrum_oracle(group, &trivial, nu_max, conv, mode)?;
        let key = s.to_csv();
        let mut memo = HashMap::new();
        memo.insert(trivial.clone(), s);
        spectra.push(memo);
        buckets.entry(key).or_default().push(idx);
    }

    let mut pairs = Vec::new();
    let higher: Vec<OIrrep> = catalog(n, weight_bound)
        .into_iter()
        .filter(|t| *t != trivial)
        .collect();
    for indices in buckets.values() {
        for (a_pos, &a) in indices.iter().enumerate() {
            for &b in &indices[a_pos + 1..] {
                'tau: for tau in &higher {
                    for idx in [a, b] {
                        if !spectra[idx].contains_key(tau) {
                            let s = crate::spectra::tau_spectrum_oracle(
                                &groups[idx],
                                tau,
                                nu_max,
                                conv,
                                mode,
                            )?;
                            spectra[idx].insert(tau.clone(), s);
                        }
                    }
                    let sa = &spectra[a][tau];
                    let sb = &spectra[b][tau];
                    if let Some((nu, d1, d2)) = sa.first_difference(sb) {
                        pairs.push(DistinguishedPair {
                            left: groups[a].name().to_string(),
                            right: groups[b].name().to_string(),
                            tau: tau.clone(),
                            nu,
                            d1,
                            d2,
                        });
                        break 'tau;
                    }
                }
            }
        }
    }

    Ok(SearchOutcome {
        candidates: candidates.len(),
        buckets: buckets.len(),
        groups,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bieberbach::preset;

    fn r(v: i64) -> Rat {
        Rat::from_integer(Int::from(v))
    }

    fn oracle_provider<'a>(
        g: &'a BieberbachGroup,
        nu_max: i64,
    ) -> OracleProvider<'a> {
        OracleProvider::new(g, r(nu_max), Convention::A, Parallelism::Sequential)
    }

    #[test]
    fn zero_multiplicities_of_klein_and_torus() {
        let klein = preset("klein-bottle").unwrap();
        let p = oracle_provider(&klein, 3);
        let zeros = zero_multiplicities(&p, 2).unwrap();
        assert_eq!(zeros[&OIrrep::trivial(2)], 1);
        // the det bundle has no harmonic sections on a non-orientable quotient
        assert!(!zeros.contains_key(&OIrrep::det_rep(2)));

        let torus = preset("torus-z2").unwrap();
        let p = oracle_provider(&torus, 3);
        let zeros = zero_multiplicities(&p, 2).unwrap();
        for (tau, d0) in &zeros {
            assert_eq!(Int::from(*d0), tau.dim(), "{tau}");
        }
    }

    #[test]
    fn square_torus_first_reconstruction_step() {
        let torus = preset("torus-z2").unwrap();
        let p = oracle_provider(&torus, 4);
        let table = reconstruct_multiplicities(&p, 1, Convention::A).unwrap();
        // the trivial continuous family carries the lattice point counts
        assert_eq!(table.continuous_mult(&OIrrep::trivial(1), &r(1)), 4);
        assert_eq!(table.continuous_mult(&OIrrep::trivial(1), &r(2)), 4);
        assert_eq!(table.continuous_mult(&OIrrep::det_rep(1), &r(1)), 4);
    }

    #[test]
    fn klein_bottle_round_trip() {
        let klein = preset("klein-bottle").unwrap();
        let p = oracle_provider(&klein, 6);
        let table = reconstruct_multiplicities(&p, 2, Convention::A).unwrap();
        // regenerate every cataloged spectrum and compare with the oracle
        for tau in catalog(2, 2) {
            let regenerated =
                tau_spectrum_from_multiplicities(&table, &tau, &r(6), Convention::A).unwrap();
            let direct = p.spectrum(&tau).unwrap();
            assert_eq!(regenerated.entries, direct.entries, "{tau}");
        }
    }

    #[test]
    fn equivalence_verdicts() {
        let klein = preset("klein-bottle").unwrap();
        let torus = preset("torus-z2").unwrap();
        let (verdict, _, _) = are_representation_equivalent(
            &klein,
            &torus,
            2,
            &r(4),
            Convention::A,
            Parallelism::Sequential,
        )
        .unwrap();
        match verdict {
            EquivalenceVerdict::Distinguished { witness, n1, n2 } => {
                assert_eq!(
                    witness,
                    MotionRep::TauTilde(OIrrep::det_rep(2)),
                    "orientability shows up in the det-bundle harmonic sections"
                );
                assert_eq!((n1, n2), (0, 1));
            }
            other => panic!("expected distinction, got {other}"),
        }
    }

    #[test]
    fn isometric_conjugate_is_equivalent() {
        let g = preset("halfturn-3").unwrap();
        let q = RatMat::from_rows(vec![
            vec![r(0), r(-1), r(0)],
            vec![r(1), r(0), r(0)],
            vec![r(0), r(0), r(1)],
        ]);
        let t = vec![Rat::new(Int::from(2), Int::from(7)), r(0), r(1)];
        let conj = g.conjugated(&q, &t).unwrap();
        let report = strong_isospectrality_report(
            &g,
            &conj,
            2,
            &r(4),
            Convention::A,
            Parallelism::Sequential,
        )
        .unwrap();
        assert!(report.all_tau_isospectral());
        assert!(report.equivalence.is_equivalent());
        assert!(report.consistent);
        assert!(report.first_distinguishing_tau.is_none());
    }

    #[test]
    fn torus_rect_witness_is_the_quarter_frequency() {
        let z2 = preset("torus-z2").unwrap();
        let rect = preset("torus-rect2").unwrap();
        let (verdict, _, _) = are_representation_equivalent(
            &z2,
            &rect,
            1,
            &r(2),
            Convention::A,
            Parallelism::Sequential,
        )
        .unwrap();
        match verdict {
            EquivalenceVerdict::Distinguished { witness, .. } => match witness {
                MotionRep::PiSigmaR { sigma, nu } => {
                    assert_eq!(sigma, OIrrep::trivial(1));
                    assert_eq!(nu, Rat::new(Int::from(1), Int::from(4)));
                }
                other => panic!("expected a continuous witness, got {other}"),
            },
            other => panic!("expected distinction, got {other}"),
        }
    }

    #[test]
    fn synthetic_table_round_trip() {
        // a hand-made multiplicity table on O(3) data
        let mut table = MultiplicityTable {
            n: 3,
            weight_bound: 2,
            nu_max: r(5),
            ..Default::default()
        };
        for tau in catalog(3, 2) {
            table.zero_part.insert(tau, 2);
        }
        let entries = [
            (OIrrep::trivial(2), r(1), 3u64),
            (OIrrep::det_rep(2), r(2), 1),
            (OIrrep::from_i64(2, &[1], 0).unwrap(), r(1), 2),
            (OIrrep::from_i64(2, &[2], 0).unwrap(), r(5), 7),
        ];
        for (sigma, nu, v) in entries {
            table.continuous_part.insert((sigma, nu), v);
        }
        let provider = TableProvider {
            table: table.clone(),
            conv: Convention::A,
        };
        let rebuilt = reconstruct_multiplicities(&provider, 2, Convention::A).unwrap();
        assert_eq!(rebuilt.zero_part, table.zero_part);
        assert_eq!(rebuilt.continuous_part, table.continuous_part);
    }

    struct MapProvider {
        n: usize,
        nu_max: Rat,
        tables: HashMap<OIrrep, SpectrumTable>,
    }

    impl SpectraProvider for MapProvider {
        fn group_dim(&self) -> usize {
            self.n
        }
        fn nu_max(&self) -> &Rat {
            &self.nu_max
        }
        fn spectrum(&self, tau: &OIrrep) -> Result<SpectrumTable, CoreError> {
            self.tables
                .get(tau)
                .cloned()
                .ok_or_else(|| CoreError::ProviderGap(tau.to_string()))
        }
    }

    fn handmade_table(tau: &OIrrep, rows: &[(i64, u64)]) -> SpectrumTable {
        let mut entries: BTreeMap<Rat, u64> = rows
            .iter()
            .map(|&(nu, d)| (r(nu), d))
            .collect();
        entries.entry(Rat::zero()).or_insert(0);
        SpectrumTable {
            tau: tau.clone(),
            group: "handmade".into(),
            nu_max: r(4),
            entries,
        }
    }

    #[test]
    fn inconsistent_spectra_abort_with_negative_multiplicity() {
        // the trivial family already carries 3 at nu=1, but the lifted
        // vector bundle shows nothing there: the subtraction goes negative
        let mut tables = HashMap::new();
        for (coords, delta, rows) in [
            (vec![0i64], 1i8, vec![(1i64, 3u64)]),
            (vec![0], -1, vec![(1, 3)]),
            (vec![1], 1, vec![]),
            (vec![1], -1, vec![]),
        ] {
            let tau = OIrrep::from_i64(3, &coords, delta).unwrap();
            tables.insert(tau.clone(), handmade_table(&tau, &rows));
        }
        let provider = MapProvider {
            n: 3,
            nu_max: r(4),
            tables,
        };
        let err = reconstruct_multiplicities(&provider, 1, Convention::A).unwrap_err();
        assert!(
            matches!(err, CoreError::NegativeMultiplicity { .. }),
            "got {err}"
        );
    }

    #[test]
    fn merged_class_disagreement_is_detected() {
        // the two sign lifts of the merged stabilizer class must agree; a
        // doctored pair of vector-bundle spectra trips the cross-check
        let mut tables = HashMap::new();
        for (coords, delta, rows) in [
            (vec![0i64], 1i8, vec![(1i64, 3u64)]),
            (vec![0], -1, vec![(1, 3)]),
            (vec![1], 1, vec![(1, 8)]),
            (vec![1], -1, vec![(1, 7)]),
        ] {
            let tau = OIrrep::from_i64(3, &coords, delta).unwrap();
            tables.insert(tau.clone(), handmade_table(&tau, &rows));
        }
        let provider = MapProvider {
            n: 3,
            nu_max: r(4),
            tables,
        };
        let err = reconstruct_multiplicities(&provider, 1, Convention::A).unwrap_err();
        assert!(
            matches!(err, CoreError::InconsistentReconstruction { .. }),
            "got {err}"
        );
    }

    #[test]
    fn five_dimensional_round_trip() {
        // rank-2 stabilizer weights appear first in dimension five, including
        // merged O(4) classes; exercise the full chain on two small groups
        let torus5 = BieberbachGroup::from_generators("torus-z5", RatMat::identity(5), vec![])
            .unwrap();
        let mut flip = RatMat::identity(5);
        *flip.at_mut(3, 3) = -r(1);
        *flip.at_mut(4, 4) = -r(1);
        let halfturn5 = BieberbachGroup::from_generators(
            "halfturn-5",
            RatMat::identity(5),
            vec![AffineRep::new(
                flip,
                vec![
                    Rat::new(Int::from(1), Int::from(2)),
                    r(0),
                    r(0),
                    r(0),
                    r(0),
                ],
            )],
        )
        .unwrap();
        assert!(halfturn5.validate().is_valid());
        for g in [&torus5, &halfturn5] {
            let p = OracleProvider::new(g, r(4), Convention::A, Parallelism::Sequential);
            let table = reconstruct_multiplicities(&p, 2, Convention::A).unwrap();
            for tau in catalog(5, 2) {
                let regenerated =
                    tau_spectrum_from_multiplicities(&table, &tau, &r(4), Convention::A)
                        .unwrap();
                assert_eq!(
                    regenerated.entries,
                    p.spectrum(&tau).unwrap().entries,
                    "{} {tau}",
                    g.name()
                );
            }
        }
    }

    #[test]
    fn torus_only_family_has_no_distinguished_pairs() {
        let family = DiagonalFamily {
            n: 2,
            max_point_group: 1,
            denominator: 2,
        };
        let out = search_distinguishing_pairs(
            &family,
            1,
            &r(3),
            100,
            Convention::A,
            Parallelism::Sequential,
        )
        .unwrap();
        assert_eq!(out.groups.len(), 1);
        assert!(out.pairs.is_empty());
    }

    #[test]
    fn search_cap_guard() {
        let family = DiagonalFamily {
            n: 3,
            max_point_group: 4,
            denominator: 2,
        };
        assert!(matches!(
            search_distinguishing_pairs(
                &family,
                1,
                &r(2),
                10,
                Convention::A,
                Parallelism::Sequential
            ),
            Err(CoreError::FamilyTooLarge { .. })
        ));
    }

    #[test]
    fn diagonal_search_runs_on_the_plane() {
        let family = DiagonalFamily {
            n: 2,
            max_point_group: 2,
            denominator: 2,
        };
        let out = search_distinguishing_pairs(
            &family,
            2,
            &r(4),
            1000,
            Convention::A,
            Parallelism::Sequential,
        )
        .unwrap();
        // the plane admits the torus and the Klein bottle in this family
        assert!(out.groups.len() >= 2);
        for pair in &out.pairs {
            assert_ne!(pair.left, pair.right);
        }
    }
}
