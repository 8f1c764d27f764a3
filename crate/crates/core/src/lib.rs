//! Exact computation of twisted Laplace spectra of compact flat manifolds.
//!
//! A compact flat manifold is a quotient Γ\ℝⁿ by a Bieberbach group Γ, a
//! discrete, cocompact, torsion-free subgroup of the Euclidean motion group
//! G = O(n)⋉ℝⁿ. Every irreducible representation τ of K = O(n) induces a
//! vector bundle over the quotient, and the flat Laplacian acts on its
//! sections. This crate computes those spectra two independent ways:
//!
//! * a Fourier-mode oracle over the dual lattice (exact eigenvalues,
//!   character-weighted orbit sums), and
//! * the motion-group route: eigenvalue multiplicities expressed through the
//!   multiplicities n_Γ(π) of the right regular representation on L²(Γ\G),
//!   which can in turn be *reconstructed* from the family of τ-spectra by a
//!   triangular elimination along a well-order on highest weights.
//!
//! Agreement of the two routes on every bundle, together with the
//! reconstruction round trip, gives a desk-scale check that τ-isospectrality
//! for all τ pins down the full representation equivalence class of Γ.

pub mod bieberbach;
pub mod character;
pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod motion;
pub mod orthogonal;
pub mod partition;
pub mod reconstruct;
pub mod spectra;
pub mod weights;

pub use error::CoreError;

/// Arbitrary-precision integer used for weight coordinates and lattice data.
pub type Int = num::BigInt;
/// Exact rational scalar used for lattice bases, norms and eigenvalue keys.
pub type Rat = num::BigRational;

/// Parse a rational from a `p/q` or plain integer string.
pub fn parse_rat(s: &str) -> Result<Rat, CoreError> {
    use std::str::FromStr;
    Rat::from_str(s.trim()).map_err(|_| CoreError::ParseRational(s.to_string()))
}

/// Render a rational as `p/q`, or just `p` when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    use num::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign conventions for labeling the two det-twisted classes of an even
/// orthogonal group. Observable output (spectra multisets, verdicts) does not
/// depend on the choice; only the δ = ±1 labels on O(2m) classes permute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Convention {
    /// δ = +1 names the class whose Weyl partition has fewer than m rows.
    #[default]
    A,
    /// The global relabeling δ ↔ −δ of convention A.
    B,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::A => write!(f, "A"),
            Convention::B => write!(f, "B"),
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Convention::A),
            "B" | "b" => Ok(Convention::B),
            other => Err(CoreError::ParseConvention(other.to_string())),
        }
    }
}

/// Cap the global worker pool used by the parallel shell sums. Must run
/// before the first parallel computation; later calls fail.
#[cfg(feature = "parallel")]
pub fn configure_thread_pool(threads: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}
