//! Spectral operators: Chebyshev polynomial filters, a dense eigendecomposition
//! oracle for desk-scale validation, and randomized coherence estimation.
//!
//! The estimation path never forms an eigendecomposition. Everything is built
//! from sparse Laplacian matvecs: a degree-`d` Chebyshev approximation of the
//! ideal low-pass step `1_{λ ≤ λ_c}`, random-projection eigenvalue counting,
//! and a dichotomy on the cutoff that brackets the `s`-th eigenvalue.

mod chebyshev;
mod coherence;
mod oracle;

pub use chebyshev::{apply_filter, design_lowpass, ChebyshevPoly, LowPassFilter};
pub use coherence::{
    eigencount_below, eigencount_below_with_degree, estimate_coherence, estimate_coherence_with,
    CoherenceOptions, CoherenceProfile, ProjectionDistribution,
};
pub use oracle::{exact_filtered_delta, EigenOracle};

/// Default Chebyshev degree used wherever filtering is needed.
pub const DEFAULT_FILTER_DEGREE: usize = 30;

/// Default projection constant `c` for coherence estimation (`⌈c·s·ln s⌉` vectors).
pub const DEFAULT_PROJECTION_CONSTANT: f64 = 10.0;

/// Default dichotomy tolerance for the cutoff search.
pub const DEFAULT_DICHOTOMY_EPSILON: f64 = 0.1;

/// Default number of random vectors for eigenvalue counting: `⌈10·ln n⌉`.
pub fn default_eigencount_projections(n: usize) -> usize {
    (10.0 * (n.max(2) as f64).ln()).ceil() as usize
}
