//! Machine-readable report shapes. Field order is emission order, so the
//! JSON output is stable byte for byte.

use num::ToPrimitive;
use serde::Serialize;

use flatspec_core::motion::MotionRepRepr;
use flatspec_core::orthogonal::OIrrepRepr;
use flatspec_core::reconstruct::{EquivalenceVerdict, StrongIsospectralityReport};
use flatspec_core::spectra::{MultiplicityTable, SpectrumTable, TauVerdict};
use flatspec_core::{format_rat, Convention};

#[derive(Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub manifest_sha256: String,
    pub convention: String,
}

impl Provenance {
    pub fn new(hash: String, conv: Convention) -> Self {
        Provenance {
            tool: concat!("flatspec ", env!("CARGO_PKG_VERSION")),
            manifest_sha256: hash,
            convention: conv.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct SpectrumRow {
    pub nu: String,
    pub lambda: f64,
    pub multiplicity: u64,
}

#[derive(Serialize)]
pub struct SpectrumReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub group: String,
    pub tau: OIrrepRepr,
    pub nu_max: String,
    pub entries: Vec<SpectrumRow>,
}

pub fn lambda_of(nu: &flatspec_core::Rat) -> f64 {
    4.0 * std::f64::consts::PI * std::f64::consts::PI * nu.to_f64().expect("nu fits in f64")
}

pub fn spectrum_report(
    table: &SpectrumTable,
    hash: String,
    conv: Convention,
) -> SpectrumReport {
    SpectrumReport {
        provenance: Provenance::new(hash, conv),
        group: table.group.clone(),
        tau: (&table.tau).into(),
        nu_max: format_rat(&table.nu_max),
        entries: table
            .entries
            .iter()
            .map(|(nu, d)| SpectrumRow {
                nu: format_rat(nu),
                lambda: lambda_of(nu),
                multiplicity: *d,
            })
            .collect(),
    }
}

/// CSV emission with provenance comment lines ahead of the header.
pub fn spectrum_csv(table: &SpectrumTable, hash: &str, conv: Convention) -> String {
    let mut out = String::new();
    out.push_str(&format!("# manifest_sha256: {hash}\n"));
    out.push_str(&format!("# group: {}\n", table.group));
    out.push_str(&format!("# tau: {}\n", table.tau));
    out.push_str(&format!("# convention: {conv}\n"));
    out.push_str(&format!("# nu_max: {}\n", format_rat(&table.nu_max)));
    out.push_str(&table.to_csv());
    out
}

#[derive(Serialize)]
pub struct ZeroRow {
    pub tau: OIrrepRepr,
    pub multiplicity: u64,
}

#[derive(Serialize)]
pub struct ContinuousRow {
    pub sigma: OIrrepRepr,
    pub nu: String,
    pub multiplicity: u64,
}

#[derive(Serialize)]
pub struct RoundTrip {
    pub bundles_checked: usize,
    pub ok: bool,
}

#[derive(Serialize)]
pub struct ReconstructReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub group: String,
    pub weight_bound: u32,
    pub nu_max: String,
    pub zero_part: Vec<ZeroRow>,
    pub continuous_part: Vec<ContinuousRow>,
    pub round_trip: RoundTrip,
}

pub fn reconstruct_report(
    group: &str,
    table: &MultiplicityTable,
    round_trip: RoundTrip,
    hash: String,
    conv: Convention,
) -> ReconstructReport {
    ReconstructReport {
        provenance: Provenance::new(hash, conv),
        group: group.to_string(),
        weight_bound: table.weight_bound,
        nu_max: format_rat(&table.nu_max),
        zero_part: table
            .zero_part
            .iter()
            .map(|(tau, d)| ZeroRow {
                tau: tau.into(),
                multiplicity: *d,
            })
            .collect(),
        continuous_part: table
            .continuous_part
            .iter()
            .map(|((sigma, nu), d)| ContinuousRow {
                sigma: sigma.into(),
                nu: format_rat(nu),
                multiplicity: *d,
            })
            .collect(),
        round_trip,
    }
}

#[derive(Serialize)]
pub struct TauVerdictRow {
    pub tau: OIrrepRepr,
    pub isospectral: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<MismatchRow>,
}

#[derive(Serialize)]
pub struct MismatchRow {
    pub nu: String,
    pub d1: u64,
    pub d2: u64,
}

#[derive(Serialize)]
pub struct WitnessRow {
    pub pi: MotionRepRepr,
    pub n1: u64,
    pub n2: u64,
}

#[derive(Serialize)]
pub struct CompareReport {
    #[serde(flatten)]
    pub provenance: Provenance,
    pub group1: String,
    pub group2: String,
    pub weight_bound: u32,
    pub nu_max: String,
    pub per_tau: Vec<TauVerdictRow>,
    pub all_tau_isospectral: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_distinguishing_tau: Option<OIrrepRepr>,
    pub representation_equivalent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRow>,
    pub consistent: bool,
    pub exit_code: i32,
}

pub fn compare_report(
    group1: &str,
    group2: &str,
    report: &StrongIsospectralityReport,
    hash: String,
    conv: Convention,
) -> CompareReport {
    let witness = match &report.equivalence {
        EquivalenceVerdict::EquivalentUpToCutoffs => None,
        EquivalenceVerdict::Distinguished { witness, n1, n2 } => Some(WitnessRow {
            pi: witness.into(),
            n1: *n1,
            n2: *n2,
        }),
    };
    let all = report.all_tau_isospectral();
    let equivalent = report.equivalence.is_equivalent();
    CompareReport {
        provenance: Provenance::new(hash, conv),
        group1: group1.to_string(),
        group2: group2.to_string(),
        weight_bound: report.weight_bound,
        nu_max: format_rat(&report.nu_max),
        per_tau: report
            .per_tau
            .iter()
            .map(|(tau, verdict)| TauVerdictRow {
                tau: tau.into(),
                isospectral: verdict.is_equal(),
                first_mismatch: match verdict {
                    TauVerdict::EqualUpTo(_) => None,
                    TauVerdict::FirstMismatch { nu, d1, d2 } => Some(MismatchRow {
                        nu: format_rat(nu),
                        d1: *d1,
                        d2: *d2,
                    }),
                },
            })
            .collect(),
        all_tau_isospectral: all,
        first_distinguishing_tau: report.first_distinguishing_tau.as_ref().map(|t| t.into()),
        representation_equivalent: equivalent,
        witness,
        consistent: report.consistent,
        exit_code: if all && equivalent { 0 } else { 1 },
    }
}

pub fn compare_text(report: &CompareReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "comparing {} vs {} (weight bound {}, nu_max {}, convention {})\n",
        report.group1, report.group2, report.weight_bound, report.nu_max,
        report.provenance.convention
    ));
    for row in &report.per_tau {
        let coords: Vec<String> = row.tau.weight.iter().map(|c| c.to_string()).collect();
        let delta = match row.tau.delta {
            1 => "+1",
            -1 => "-1",
            _ => "0",
        };
        let tau = format!("tau[{};({});{}]", row.tau.n, coords.join(","), delta);
        match &row.first_mismatch {
            None => out.push_str(&format!("  {tau}: isospectral up to cutoff\n")),
            Some(m) => out.push_str(&format!(
                "  {tau}: first mismatch at nu={} ({} vs {})\n",
                m.nu, m.d1, m.d2
            )),
        }
    }
    if report.representation_equivalent {
        out.push_str("representation equivalent up to cutoffs\n");
    } else if let Some(w) = &report.witness {
        out.push_str(&format!(
            "NOT representation equivalent: witness {} ({} vs {})\n",
            serde_json::to_string(&w.pi).unwrap_or_default(),
            w.n1,
            w.n2
        ));
    }
    out.push_str(&format!(
        "consistency (all tau-isospectral iff representation equivalent): {}\n",
        if report.consistent { "ok" } else { "VIOLATED" }
    ));
    out
}
