//! Batch tool for twisted Laplace spectra of compact flat manifolds:
//! catalogs and branching of orthogonal-group bundles, exact spectra from
//! manifest-defined Bieberbach groups, multiplicity reconstruction, and
//! isospectrality comparisons.

mod manifest;
mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use flatspec_core::bieberbach::presets;
use flatspec_core::character::{cache_dump, cache_load, character_at, OrthogonalElement};
use flatspec_core::linalg::RatMat;
use flatspec_core::orthogonal::{catalog, Embedding, OIrrep};
use flatspec_core::reconstruct::{
    reconstruct_multiplicities, search_distinguishing_pairs, strong_isospectrality_report,
    DiagonalFamily, OracleProvider, SpectraProvider,
};
use flatspec_core::spectra::{
    tau_spectrum_from_multiplicities, tau_spectrum_oracle, Parallelism,
};
use flatspec_core::{format_rat, parse_rat, Convention, Rat};

use manifest::{presets_manifest, resolve_group, LoadedManifest};
use report::RoundTrip;

#[derive(Parser)]
#[command(
    name = "flatspec",
    version,
    about = "Twisted Laplace spectra of compact flat manifolds"
)]
struct Cli {
    /// Sign convention for labeling det-twisted pairs on even orthogonal groups.
    #[arg(long, global = true, default_value = "A")]
    convention: String,

    /// Cap the worker pool for parallel shell sums.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the irreducible representations of O(n) up to a weight bound.
    Catalog {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        weight_bound: u32,
    },
    /// Print the restriction of one irreducible to O(n−1), both embeddings.
    Branch {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "")]
        weight: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: i8,
    },
    /// Evaluate the character of an irreducible at an orthogonal matrix.
    Character {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "")]
        weight: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: i8,
        /// Rows separated by ';', entries by ',', rational entries allowed.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
    },
    /// Compute one τ-spectrum table.
    Spectrum {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "")]
        weight: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        delta: i8,
        #[arg(long)]
        nu_max: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recover the right-regular multiplicity table from spectra.
    Reconstruct {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 3)]
        weight_bound: u32,
        #[arg(long)]
        nu_max: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare two groups: τ-isospectrality vector and representation
    /// equivalence at the cutoffs. Exit code 1 when distinguished.
    Compare {
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        group1: String,
        #[arg(long)]
        group2: String,
        #[arg(long, default_value_t = 2)]
        weight_bound: u32,
        #[arg(long)]
        nu_max: String,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Enumerate a diagonal-holonomy family and report pairs with equal
    /// trivial-bundle spectra distinguished by a higher bundle.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_point_group: usize,
        #[arg(long, default_value_t = 2)]
        denominator: u32,
        #[arg(long, default_value_t = 2)]
        weight_bound: u32,
        #[arg(long)]
        nu_max: String,
        #[arg(long, default_value_t = 60000)]
        cap: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the built-in groups, or emit them as a manifest.
    Presets {
        #[arg(long)]
        emit_manifest: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    });
}

fn run(cli: Cli) -> Result<i32, String> {
    let conv: Convention = cli.convention.parse().map_err(|e| format!("{e}"))?;
    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        flatspec_core::configure_thread_pool(threads)?;
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads.is_some() {
        eprintln!("note: built without the parallel feature; --threads ignored");
    }
    let cache_dir = std::env::var_os("FLATSPEC_CACHE").map(PathBuf::from);
    if let Some(dir) = &cache_dir {
        load_character_cache(dir);
    }
    let code = dispatch(cli, conv).map_err(|e| e.to_string())?;
    if let Some(dir) = &cache_dir {
        save_character_cache(dir);
    }
    Ok(code)
}

fn dispatch(cli: Cli, conv: Convention) -> Result<i32, Box<dyn std::error::Error>> {
    let mode = Parallelism::default();
    match cli.command {
        Command::Catalog { n, weight_bound } => {
            for tau in catalog(n, weight_bound) {
                println!("{tau} dim={}", tau.dim());
            }
            Ok(0)
        }
        Command::Branch { n, weight, delta } => {
            let tau = parse_irrep(n, &weight, delta)?;
            println!("{tau} dim={}", tau.dim());
            println!("restriction to the standard O({})", n - 1);
            for sigma in tau.branch(Embedding::Standard, conv) {
                println!("  {sigma} dim={}", sigma.dim());
            }
            println!("restriction to the det-compensated O({}) inside SO({n})", n - 1);
            for sigma in tau.branch(Embedding::DetCompensated, conv) {
                println!("  {sigma} dim={}", sigma.dim());
            }
            Ok(0)
        }
        Command::Character {
            n,
            weight,
            delta,
            matrix,
        } => {
            let tau = parse_irrep(n, &weight, delta)?;
            let mat = parse_matrix(&matrix, n)?;
            let element = OrthogonalElement::new(mat)?;
            let sig = element.signature()?;
            let value = character_at(&tau, &element, conv)?;
            println!("element signature: {sig} order={}", sig.order());
            println!("character of {tau}: {value:.12}");
            Ok(0)
        }
        Command::Spectrum {
            manifest,
            group,
            weight,
            delta,
            nu_max,
            format,
            output,
        } => {
            let loaded = load_manifest(manifest.as_deref())?;
            let (g, hash) = resolve_group(loaded.as_ref(), &group)?;
            ensure_valid(&g)?;
            let tau = parse_irrep(g.dim(), &weight, delta)?;
            let nu_max = parse_rat(&nu_max)?;
            let table = tau_spectrum_oracle(&g, &tau, &nu_max, conv, mode)?;
            let text = match format.as_str() {
                "csv" => report::spectrum_csv(&table, &hash, conv),
                "json" => {
                    let rep = report::spectrum_report(&table, hash, conv);
                    serde_json::to_string_pretty(&rep)? + "\n"
                }
                other => return Err(format!("unknown format {other:?}").into()),
            };
            emit(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Reconstruct {
            manifest,
            group,
            weight_bound,
            nu_max,
            output,
        } => {
            let loaded = load_manifest(manifest.as_deref())?;
            let (g, hash) = resolve_group(loaded.as_ref(), &group)?;
            ensure_valid(&g)?;
            let nu_max = parse_rat(&nu_max)?;
            let provider = OracleProvider::new(&g, nu_max.clone(), conv, mode);
            let table = reconstruct_multiplicities(&provider, weight_bound, conv)?;
            let mut checked = 0;
            let mut ok = true;
            for tau in catalog(g.dim(), weight_bound) {
                let regenerated =
                    tau_spectrum_from_multiplicities(&table, &tau, &nu_max, conv)?;
                let direct = provider.spectrum(&tau)?;
                ok &= regenerated.entries == direct.entries;
                checked += 1;
            }
            let rep = report::reconstruct_report(
                g.name(),
                &table,
                RoundTrip {
                    bundles_checked: checked,
                    ok,
                },
                hash,
                conv,
            );
            emit(
                output.as_deref(),
                &(serde_json::to_string_pretty(&rep)? + "\n"),
            )?;
            Ok(if ok { 0 } else { 2 })
        }
        Command::Compare {
            manifest,
            group1,
            group2,
            weight_bound,
            nu_max,
            format,
            output,
        } => {
            let loaded = load_manifest(manifest.as_deref())?;
            let (g1, hash) = resolve_group(loaded.as_ref(), &group1)?;
            let (g2, _) = resolve_group(loaded.as_ref(), &group2)?;
            ensure_valid(&g1)?;
            ensure_valid(&g2)?;
            let nu_max = parse_rat(&nu_max)?;
            let result =
                strong_isospectrality_report(&g1, &g2, weight_bound, &nu_max, conv, mode)?;
            let rep = report::compare_report(g1.name(), g2.name(), &result, hash, conv);
            let text = match format.as_str() {
                "json" => serde_json::to_string_pretty(&rep)? + "\n",
                "text" => format!(
                    "# manifest_sha256: {}\n{}",
                    rep.provenance.manifest_sha256,
                    report::compare_text(&rep)
                ),
                other => return Err(format!("unknown format {other:?}").into()),
            };
            emit(output.as_deref(), &text)?;
            Ok(rep.exit_code)
        }
        Command::Search {
            n,
            max_point_group,
            denominator,
            weight_bound,
            nu_max,
            cap,
            output,
        } => {
            let nu_max = parse_rat(&nu_max)?;
            let family = DiagonalFamily {
                n,
                max_point_group,
                denominator,
            };
            let outcome =
                search_distinguishing_pairs(&family, weight_bound, &nu_max, cap, conv, mode)?;
            #[derive(serde::Serialize)]
            struct SearchReport {
                candidates: usize,
                valid_groups: usize,
                buckets: usize,
                convention: String,
                weight_bound: u32,
                nu_max: String,
                groups: std::collections::BTreeMap<String, manifest::GroupDef>,
                pairs: Vec<PairRow>,
            }
            #[derive(serde::Serialize)]
            struct PairRow {
                left: String,
                right: String,
                tau: flatspec_core::orthogonal::OIrrepRepr,
                nu: String,
                d1: u64,
                d2: u64,
            }
            let rep = SearchReport {
                candidates: outcome.candidates,
                valid_groups: outcome.groups.len(),
                buckets: outcome.buckets,
                convention: conv.to_string(),
                weight_bound,
                nu_max: format_rat(&nu_max),
                groups: outcome
                    .groups
                    .iter()
                    .map(|g| (g.name().to_string(), manifest::group_to_def(g)))
                    .collect(),
                pairs: outcome
                    .pairs
                    .iter()
                    .map(|p| PairRow {
                        left: p.left.clone(),
                        right: p.right.clone(),
                        tau: (&p.tau).into(),
                        nu: format_rat(&p.nu),
                        d1: p.d1,
                        d2: p.d2,
                    })
                    .collect(),
            };
            emit(
                output.as_deref(),
                &(serde_json::to_string_pretty(&rep)? + "\n"),
            )?;
            Ok(0)
        }
        Command::Presets { emit_manifest } => {
            if emit_manifest {
                let (doc, _) = presets_manifest();
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                for g in presets() {
                    let report = g.validate();
                    println!(
                        "{} n={} |F|={} {}",
                        g.name(),
                        g.dim(),
                        g.point_group_order(),
                        report
                    );
                }
            }
            Ok(0)
        }
    }
}

fn load_manifest(
    path: Option<&std::path::Path>,
) -> Result<Option<LoadedManifest>, Box<dyn std::error::Error>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read manifest {}: {e}", p.display()))?;
            Ok(Some(manifest::parse_manifest(&text)?))
        }
    }
}

fn ensure_valid(group: &flatspec_core::bieberbach::BieberbachGroup) -> Result<(), String> {
    let report = group.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(format!("group {}: {report}", group.name()))
    }
}

fn parse_irrep(n: usize, weight: &str, delta: i8) -> Result<OIrrep, String> {
    let coords: Vec<i64> = if weight.trim().is_empty() {
        Vec::new()
    } else {
        weight
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|e| format!("bad weight entry {s:?}: {e}")))
            .collect::<Result<_, _>>()?
    };
    OIrrep::from_i64(n, &coords, delta).map_err(|e| e.to_string())
}

fn parse_matrix(text: &str, n: usize) -> Result<RatMat, String> {
    let rows: Result<Vec<Vec<Rat>>, String> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|s| parse_rat(s).map_err(|e| e.to_string()))
                .collect()
        })
        .collect();
    let rows = rows?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix must be {n}x{n}"));
    }
    Ok(RatMat::from_rows(rows))
}

fn emit(path: Option<&std::path::Path>, text: &str) -> Result<(), Box<dyn std::error::Error>> {
    match path {
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(())
        }
    }
}

fn load_character_cache(dir: &std::path::Path) {
    let file = dir.join("characters.json");
    if let Ok(text) = std::fs::read_to_string(&file) {
        if let Ok(entries) = serde_json::from_str::<Vec<(String, f64)>>(&text) {
            cache_load(&entries);
        }
    }
}

fn save_character_cache(dir: &std::path::Path) {
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let entries = cache_dump();
    if let Ok(text) = serde_json::to_string(&entries) {
        let _ = std::fs::write(dir.join("characters.json"), text);
    }
}
