//! Self-contained dense complex linear algebra for small matrices.
//!
//! Everything here works on heap-allocated row-major storage and is sized for
//! the few-level systems this crate simulates (dimension <= 64). No external
//! linear-algebra backend is used.

mod eig;
mod expm;
mod lu;
mod matrix;
mod quad;

pub use eig::{eig, eigh};
pub use expm::expm;
pub use lu::Lu;
pub use matrix::{ComplexMatrix, ComplexVector};
pub use quad::integrate_matrix;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension {dim} exceeds supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("quadrature subdivision count must be even and at least 2, got {n}")]
    BadPanelCount { n: usize },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error(
        "QR iteration did not converge after {iterations} steps \
         ({remaining} eigenvalues unresolved)"
    )]
    NoConvergence { iterations: usize, remaining: usize },
    #[error(
        "matrix is near-defective: eigenpair {index} residual {residual:.3e} \
         exceeds tolerance {tolerance:.3e}"
    )]
    NearDefective {
        index: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("singular matrix in {context}")]
    Singular { context: String },
}
