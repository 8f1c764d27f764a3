//! The unitary dual of the Euclidean motion group G = O(n)⋉ℝⁿ.
//!
//! Up to equivalence the irreducibles are the finite-dimensional extensions
//! τ̃ of K-types (trivial on translations) and, for each radius r > 0 and
//! each irreducible σ of the stabilizer O(n−1) of a frequency vector, the
//! induced representation π_{σ,r}. We store ν = r² as an exact rational so
//! that spectrum keys stay exact; the Laplace eigenvalue attached to π_{σ,r}
//! is 4π²ν.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::orthogonal::{Embedding, OIrrep, OIrrepRepr};
use crate::{format_rat, Convention, Rat};

/// An irreducible unitary representation of the motion group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MotionRep {
    /// Extension of a K-type; acts trivially on translations.
    TauTilde(OIrrep),
    /// Induced from σ ⊗ (unitary character of squared radius ν).
    PiSigmaR { sigma: OIrrep, nu: Rat },
}

impl MotionRep {
    /// Scalar by which the quadratic Casimir element acts, in units of 4π².
    /// Zero on the τ̃ family and −ν on π_{σ,r}; the corresponding Laplace
    /// eigenvalue on sections is the nonnegative value 4π²ν.
    pub fn casimir_scalar(&self) -> Rat {
        match self {
            MotionRep::TauTilde(_) => Rat::zero(),
            MotionRep::PiSigmaR { nu, .. } => -nu.clone(),
        }
    }
}

impl std::fmt::Display for MotionRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MotionRep::TauTilde(t) => write!(f, "tilde({t})"),
            MotionRep::PiSigmaR { sigma, nu } => write!(f, "pi({sigma};nu={})", format_rat(nu)),
        }
    }
}

/// Serialized form of a motion-group representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum MotionRepRepr {
    #[serde(rename = "tau")]
    Tau { tau: OIrrepRepr },
    #[serde(rename = "pi")]
    Pi { sigma: OIrrepRepr, nu: String },
}

impl From<&MotionRep> for MotionRepRepr {
    fn from(m: &MotionRep) -> Self {
        match m {
            MotionRep::TauTilde(t) => MotionRepRepr::Tau { tau: t.into() },
            MotionRep::PiSigmaR { sigma, nu } => MotionRepRepr::Pi {
                sigma: sigma.into(),
                nu: format_rat(nu),
            },
        }
    }
}

/// The K-type support of the τ-spectral problem: τ̃ together with every
/// family Ĝ(σ) whose σ occurs in τ restricted to the frequency stabilizer.
/// By Frobenius reciprocity [τ : π_{σ,r}|_K] = [σ : τ|_{O(n−1)}], and the
/// standard-embedding branching is multiplicity free, so the support is a
/// plain list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhatTau {
    pub tau_tilde: OIrrep,
    pub continuous: Vec<OIrrep>,
}

pub fn ghat_tau(tau: &OIrrep, conv: Convention) -> GhatTau {
    GhatTau {
        tau_tilde: tau.clone(),
        continuous: tau.branch(Embedding::Standard, conv),
    }
}
