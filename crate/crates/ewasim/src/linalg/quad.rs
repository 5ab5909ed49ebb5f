//! Composite Simpson quadrature for matrix-valued integrands.

use super::matrix::ComplexMatrix;
use super::{C64, LinalgError};

/// Approximate `int_a^b f(s) ds` entrywise with composite Simpson on `n`
/// panels (`n` even, at least 2). The error is O((b-a)^5 / n^4) per panel for
/// smooth integrands; exact for cubics.
pub fn integrate_matrix(
    f: impl Fn(f64) -> ComplexMatrix,
    a: f64,
    b: f64,
    n: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(LinalgError::BadInterval { a, b });
    }
    if n < 2 || n % 2 != 0 {
        return Err(LinalgError::BadPanelCount { n });
    }
    let h = (b - a) / n as f64;
    let mut acc = f(a);
    let (rows, cols) = (acc.rows(), acc.cols());
    for k in 1..n {
        let s = a + h * k as f64;
        let fk = f(s);
        if (fk.rows(), fk.cols()) != (rows, cols) {
            return Err(LinalgError::Dimension {
                context: format!(
                    "integrand changed shape at s = {s}: {}x{} vs {rows}x{cols}",
                    fk.rows(),
                    fk.cols()
                ),
            });
        }
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc = acc.add(&fk.scale(C64::new(w, 0.0)));
    }
    let fb = f(b);
    if (fb.rows(), fb.cols()) != (rows, cols) {
        return Err(LinalgError::Dimension {
            context: "integrand changed shape at the upper endpoint".into(),
        });
    }
    acc = acc.add(&fb);
    let result = acc.scale(C64::new(h / 3.0, 0.0));
    result.ensure_finite()?;
    Ok(result)
}
