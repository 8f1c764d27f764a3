//! Manifest ingestion: group definitions in a structured JSON document.
//!
//! Rationals are strings `p/q` (or plain integers) and parse exactly. Basis
//! entries are the lattice basis vectors (columns of the basis matrix).
//! Generator matrices come either in lattice coordinates (must be integral)
//! or in ambient coordinates, selected per generator by `coords`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use flatspec_core::bieberbach::{AffineRep, BieberbachGroup};
use flatspec_core::linalg::RatMat;
use flatspec_core::{parse_rat, CoreError, Rat};

pub const MANIFEST_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestDoc {
    pub version: String,
    pub groups: BTreeMap<String, GroupDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jobs: Vec<JobDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupDef {
    pub n: usize,
    /// Lattice basis vectors; column j of the basis matrix.
    pub basis: Vec<Vec<String>>,
    #[serde(default)]
    pub generators: Vec<GeneratorDef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorDef {
    pub matrix: Vec<Vec<String>>,
    #[serde(default = "default_coords")]
    pub coords: String,
    pub translation: Vec<String>,
}

fn default_coords() -> String {
    "lattice".into()
}

/// Optional batch descriptors; names must resolve against `groups`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobDef {
    pub command: String,
    #[serde(default)]
    pub groups: Vec<String>,
    #[serde(default)]
    pub tau: Option<TauDef>,
    #[serde(default)]
    pub nu_max: Option<String>,
    #[serde(default)]
    pub weight_bound: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauDef {
    pub weight: Vec<i64>,
    pub delta: i8,
}

pub struct LoadedManifest {
    pub doc: ManifestDoc,
    pub hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

pub fn parse_manifest(text: &str) -> Result<LoadedManifest, CoreError> {
    let doc: ManifestDoc = serde_json::from_str(text)
        .map_err(|e| CoreError::Manifest(format!("invalid JSON: {e}")))?;
    for job in &doc.jobs {
        for name in &job.groups {
            if !doc.groups.contains_key(name) {
                return Err(CoreError::Manifest(format!(
                    "job {:?} references unknown group {name:?}",
                    job.command
                )));
            }
        }
        if let Some(nu) = &job.nu_max {
            parse_rat(nu)?;
        }
    }
    Ok(LoadedManifest {
        doc,
        hash: sha256_hex(text.as_bytes()),
    })
}

fn parse_rat_matrix(rows: &[Vec<String>], n: usize, what: &str) -> Result<RatMat, CoreError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CoreError::Manifest(format!("{what} must be {n}x{n}")));
    }
    let parsed: Result<Vec<Vec<Rat>>, CoreError> = rows
        .iter()
        .map(|r| r.iter().map(|s| parse_rat(s)).collect())
        .collect();
    Ok(RatMat::from_rows(parsed?))
}

fn parse_rat_vec(items: &[String], n: usize, what: &str) -> Result<Vec<Rat>, CoreError> {
    if items.len() != n {
        return Err(CoreError::Manifest(format!("{what} must have length {n}")));
    }
    items.iter().map(|s| parse_rat(s)).collect()
}

pub fn build_group(name: &str, def: &GroupDef) -> Result<BieberbachGroup, CoreError> {
    let n = def.n;
    // basis vectors arrive as columns
    let cols = parse_rat_matrix(&def.basis, n, "basis")?;
    let mut basis = RatMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            *basis.at_mut(i, j) = cols.at(j, i).clone();
        }
    }
    let basis_inv = basis
        .inverse()
        .map_err(|_| CoreError::Manifest(format!("group {name:?} has a singular basis")))?;
    let mut generators = Vec::new();
    for (k, g) in def.generators.iter().enumerate() {
        let mat = parse_rat_matrix(&g.matrix, n, "generator matrix")?;
        let translation = parse_rat_vec(&g.translation, n, "generator translation")?;
        let (rotation, translation) = match g.coords.as_str() {
            "lattice" => (mat, translation),
            "ambient" => (
                basis_inv.mul(&mat).mul(&basis),
                basis_inv.matvec(&translation),
            ),
            other => {
                return Err(CoreError::Manifest(format!(
                    "generator {k} of group {name:?}: unknown coords {other:?}"
                )))
            }
        };
        generators.push(AffineRep::new(rotation, translation));
    }
    BieberbachGroup::from_generators(name, basis, generators)
}

/// Render a group as a manifest entry (lattice coordinates).
pub fn group_to_def(group: &BieberbachGroup) -> GroupDef {
    let n = group.dim();
    let basis = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| flatspec_core::format_rat(group.basis().at(i, j)))
                .collect()
        })
        .collect();
    let generators = group
        .reps()
        .iter()
        .filter(|r| !r.is_identity_rotation() || r.translation.iter().any(|t| !num::Zero::is_zero(t)))
        .map(|r| GeneratorDef {
            matrix: (0..n)
                .map(|i| {
                    r.rotation
                        .row(i)
                        .iter()
                        .map(flatspec_core::format_rat)
                        .collect()
                })
                .collect(),
            coords: "lattice".into(),
            translation: r.translation.iter().map(flatspec_core::format_rat).collect(),
        })
        .collect();
    GroupDef {
        n,
        basis,
        generators,
    }
}

/// The built-in corpus rendered as a manifest document; its serialization is
/// the hashed provenance for preset-backed reports.
pub fn presets_manifest() -> (ManifestDoc, String) {
    let mut groups = BTreeMap::new();
    for g in flatspec_core::bieberbach::presets() {
        groups.insert(g.name().to_string(), group_to_def(&g));
    }
    let doc = ManifestDoc {
        version: MANIFEST_VERSION.into(),
        groups,
        jobs: Vec::new(),
    };
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    let hash = sha256_hex(text.as_bytes());
    (doc, hash)
}

/// Resolve a group by name from an optional manifest, falling back to the
/// built-in presets. Returns the group and the provenance hash.
pub fn resolve_group(
    manifest: Option<&LoadedManifest>,
    name: &str,
) -> Result<(BieberbachGroup, String), CoreError> {
    if let Some(m) = manifest {
        if let Some(def) = m.doc.groups.get(name) {
            return Ok((build_group(name, def)?, m.hash.clone()));
        }
        return Err(CoreError::Manifest(format!(
            "group {name:?} not found in manifest"
        )));
    }
    if let Some(g) = flatspec_core::bieberbach::preset(name) {
        let (_, hash) = presets_manifest();
        return Ok((g, hash));
    }
    Err(CoreError::Manifest(format!(
        "group {name:?} is not a preset and no manifest was given"
    )))
}
