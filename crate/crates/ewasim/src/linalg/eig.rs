//! Eigendecomposition for small dense complex matrices.
//!
//! General matrices go through complex Householder reduction to Hessenberg
//! form followed by explicitly shifted QR with Givens rotations; eigenvectors
//! are recovered by inverse iteration on the original matrix with a residual
//! check. Hermitian matrices get a cyclic Jacobi routine ([`eigh`]) used for
//! positivity tests and trace distances.

use super::lu::Lu;
use super::matrix::{ComplexMatrix, ComplexVector};
use super::{C64, LinalgError};

const MAX_QR_STEPS_PER_EIGENVALUE: usize = 60;
const CLUSTER_REL: f64 = 1e-8;

/// Eigenvalues and unit-norm right eigenvectors (as matrix columns) of a
/// square complex matrix.
///
/// Each returned pair satisfies `||M v - lambda v|| <= 1e-9 * max(1, ||M||_1)`;
/// a pair that cannot reach that residual makes the whole call fail with
/// [`LinalgError::NearDefective`].
pub fn eig(m: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix), LinalgError> {
    m.ensure_square()?;
    m.ensure_supported_dim()?;
    m.ensure_finite()?;
    let n = m.rows();
    if n == 1 {
        return Ok((vec![m.get(0, 0)], ComplexMatrix::identity(1)));
    }

    let values = qr_eigenvalues(m)?;
    let scale = m.one_norm().max(1.0);
    let res_tol = 1e-9 * scale;

    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut found: Vec<ComplexVector> = Vec::with_capacity(n);
    for (k, &lambda) in values.iter().enumerate() {
        let cluster: Vec<&ComplexVector> = values[..k]
            .iter()
            .zip(found.iter())
            .filter(|(lj, _)| (*lj - lambda).norm() <= CLUSTER_REL * scale)
            .map(|(_, v)| v)
            .collect();
        let (v, residual) = inverse_iteration(m, lambda, &cluster, k);
        if residual > res_tol {
            return Err(LinalgError::NearDefective {
                index: k,
                residual,
                tolerance: res_tol,
            });
        }
        for i in 0..n {
            vectors.set(i, k, v.get(i));
        }
        found.push(v);
    }
    Ok((values, vectors))
}

/// Eigenvalues only, via Hessenberg reduction and shifted QR.
fn qr_eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>, LinalgError> {
    let n = m.rows();
    let mut h = hessenberg(m);
    let scale = m.one_norm().max(f64::MIN_POSITIVE);
    let mut values = vec![C64::ZERO; n];

    let mut hi = n;
    let mut steps_this_window = 0usize;
    let mut total_steps = 0usize;
    let budget = MAX_QR_STEPS_PER_EIGENVALUE * n;
    while hi > 0 {
        if hi == 1 {
            values[0] = h.get(0, 0);
            hi = 0;
            continue;
        }
        let sub = h.get(hi - 1, hi - 2).norm();
        let local = h.get(hi - 1, hi - 1).norm() + h.get(hi - 2, hi - 2).norm();
        let threshold = f64::EPSILON * if local > 0.0 { local } else { scale };
        if sub <= threshold {
            values[hi - 1] = h.get(hi - 1, hi - 1);
            hi -= 1;
            steps_this_window = 0;
            continue;
        }
        if total_steps > budget {
            return Err(LinalgError::NoConvergence {
                iterations: total_steps,
                remaining: hi,
            });
        }

        // Start of the active unreduced window.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h.get(lo - 1, lo - 1).norm() + h.get(lo, lo).norm();
            if h.get(lo, lo - 1).norm() <= f64::EPSILON * s.max(1e-300) {
                h.set(lo, lo - 1, C64::ZERO);
                break;
            }
            lo -= 1;
        }

        let shift = if steps_this_window > 0 && steps_this_window % 12 == 0 {
            // Exceptional shift to break symmetric stalls.
            h.get(hi - 1, hi - 1) + C64::new(1.5 * h.get(hi - 1, hi - 2).norm(), 0.0)
        } else {
            wilkinson_shift(
                h.get(hi - 2, hi - 2),
                h.get(hi - 2, hi - 1),
                h.get(hi - 1, hi - 2),
                h.get(hi - 1, hi - 1),
            )
        };
        qr_step(&mut h, lo, hi, shift);
        steps_this_window += 1;
        total_steps += 1;
    }
    Ok(values)
}

/// Reduce to upper Hessenberg form by complex Householder reflections.
/// The accumulated transform is discarded; callers only need eigenvalues.
fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let norm_x: f64 = (k + 1..n)
            .map(|i| h.get(i, k).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm_x < 1e-300 {
            continue;
        }
        let x0 = h.get(k + 1, k);
        let phase = if x0 == C64::ZERO {
            C64::ONE
        } else {
            x0 / C64::new(x0.norm(), 0.0)
        };
        let alpha = -phase * C64::new(norm_x, 0.0);
        // v = x - alpha e1, beta = 2 / ||v||^2
        let mut v: Vec<C64> = (k + 1..n).map(|i| h.get(i, k)).collect();
        v[0] -= alpha;
        let v_norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sqr < 1e-300 {
            continue;
        }
        let beta = 2.0 / v_norm_sqr;
        // Left: H <- (I - beta v v^H) H on rows k+1..n
        for j in k..n {
            let mut s = C64::ZERO;
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * h.get(k + 1 + idx, j);
            }
            s *= C64::new(beta, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                let val = h.get(k + 1 + idx, j) - s * vi;
                h.set(k + 1 + idx, j, val);
            }
        }
        // Right: H <- H (I - beta v v^H) on cols k+1..n
        for i in 0..n {
            let mut s = C64::ZERO;
            for (idx, vi) in v.iter().enumerate() {
                s += h.get(i, k + 1 + idx) * vi;
            }
            s *= C64::new(beta, 0.0);
            for (idx, vi) in v.iter().enumerate() {
                let val = h.get(i, k + 1 + idx) - s * vi.conj();
                h.set(i, k + 1 + idx, val);
            }
        }
        h.set(k + 1, k, alpha);
        for i in k + 2..n {
            h.set(i, k, C64::ZERO);
        }
    }
    h
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let mid = (a + d) * C64::new(0.5, 0.0);
    let det = a * d - b * c;
    let disc = (mid * mid - det).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens rotation G = [[c, s], [-conj(s), c]] with real c, zeroing the second
/// component of (a, b).
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == C64::ZERO {
        return (1.0, C64::ZERO);
    }
    if a == C64::ZERO {
        return (0.0, C64::ONE);
    }
    let t = a.norm();
    let r = (t * t + b.norm_sqr()).sqrt();
    let c = t / r;
    let s = (a / C64::new(t, 0.0)) * b.conj() / C64::new(r, 0.0);
    (c, s)
}

/// One explicit shifted QR step restricted to the window `[lo, hi)`.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for d in lo..hi {
        let v = h.get(d, d) - shift;
        h.set(d, d, v);
    }
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let (c, s) = givens(h.get(k, k), h.get(k + 1, k));
        for j in k..hi {
            let x = h.get(k, j);
            let y = h.get(k + 1, j);
            h.set(k, j, C64::new(c, 0.0) * x + s * y);
            h.set(k + 1, j, -s.conj() * x + C64::new(c, 0.0) * y);
        }
        rots.push((c, s));
    }
    for (offset, (c, s)) in rots.iter().enumerate() {
        let k = lo + offset;
        for i in lo..(k + 2).min(hi) {
            let x = h.get(i, k);
            let y = h.get(i, k + 1);
            h.set(i, k, C64::new(*c, 0.0) * x + s.conj() * y);
            h.set(i, k + 1, -s * x + C64::new(*c, 0.0) * y);
        }
    }
    for d in lo..hi {
        let v = h.get(d, d) + shift;
        h.set(d, d, v);
    }
}

/// Inverse iteration for the eigenvector of `lambda`, orthogonalized against
/// previously found vectors of (numerically) equal eigenvalues. Returns the
/// best vector and its residual.
fn inverse_iteration(
    m: &ComplexMatrix,
    lambda: C64,
    cluster: &[&ComplexVector],
    index: usize,
) -> (ComplexVector, f64) {
    let n = m.rows();
    let scale = m.one_norm().max(1.0);
    let shifted = {
        let mut s = m.clone();
        for i in 0..n {
            let v = s.get(i, i) - lambda;
            s.set(i, i, v);
        }
        s
    };
    let floor = f64::EPSILON * scale;
    let lu = match Lu::factor(&shifted, floor) {
        Ok(lu) => lu,
        Err(_) => unreachable!("floored LU cannot fail"),
    };

    let mut best: Option<(ComplexVector, f64)> = None;
    for attempt in 0..3u64 {
        let mut v = seeded_vector(n, index as u64, attempt);
        orthogonalize(&mut v, cluster);
        if let Some(u) = v.normalized() {
            v = u;
        }
        for _ in 0..5 {
            let mut w = lu.solve_vec(&v);
            let pre_norm = w.norm();
            orthogonalize(&mut w, cluster);
            // If projecting out the already-found eigenvectors annihilates
            // the solve output, the shift has no independent eigendirection
            // left (a defective cluster); such iterates must not be accepted.
            let collapsed = !cluster.is_empty() && w.norm() <= 1e-8 * pre_norm;
            match w.normalized() {
                Some(u) => v = u,
                None => break,
            }
            if collapsed {
                continue;
            }
            let residual = m.mul_vec(&v).sub(&v.scale(lambda)).norm();
            let better = best.as_ref().is_none_or(|(_, r)| residual < *r);
            if better {
                best = Some((v.clone(), residual));
            }
            if residual <= 1e-13 * scale {
                return best.unwrap();
            }
        }
        if let Some((_, r)) = &best {
            if *r <= 1e-11 * scale {
                break;
            }
        }
    }
    best.unwrap_or_else(|| {
        let v = ComplexVector::basis(n, index % n);
        let r = m.mul_vec(&v).sub(&v.scale(lambda)).norm();
        (v, r)
    })
}

fn orthogonalize(v: &mut ComplexVector, against: &[&ComplexVector]) {
    for u in against {
        let coeff = u.inner(v);
        *v = v.sub(&u.scale(coeff));
    }
}

fn seeded_vector(n: usize, index: u64, attempt: u64) -> ComplexVector {
    let mut state = (index + 1)
        .wrapping_mul(0x9E3779B97F4A7C15)
        .wrapping_add(attempt.wrapping_mul(0xD1B54A32D192ED03));
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    ComplexVector::new((0..n).map(|_| C64::new(next(), next())).collect())
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi rotations.
pub fn eigh(m: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    m.ensure_square()?;
    m.ensure_supported_dim()?;
    m.ensure_finite()?;
    let n = m.rows();
    let scale = m.max_norm().max(f64::MIN_POSITIVE);
    let defect = m.hermiticity_defect();
    if defect > 1e-9 * scale.max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }

    let mut a = m.clone();
    // Symmetrize roundoff so the rotations see an exactly Hermitian input.
    for i in 0..n {
        a.set(i, i, C64::new(a.get(i, i).re, 0.0));
        for j in i + 1..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * C64::new(0.5, 0.0);
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }

    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a.get(i, j).norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sigma = apq / C64::new(apq.norm() / s, 0.0);
                // J = [[c, sigma], [-conj(sigma), c]] on the (p, q) plane.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * C64::new(c, 0.0) - akq * sigma.conj());
                    a.set(k, q, akp * sigma + akq * C64::new(c, 0.0));
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, C64::new(c, 0.0) * apk - sigma * aqk);
                    a.set(q, k, sigma.conj() * apk + C64::new(c, 0.0) * aqk);
                }
                a.set(p, q, C64::ZERO);
                a.set(q, p, C64::ZERO);
            }
        }
    }

    let mut vals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn eigen_residuals(m: &ComplexMatrix, vals: &[C64], vecs: &ComplexMatrix) -> f64 {
        let n = m.rows();
        let mut worst = 0.0f64;
        for k in 0..n {
            let v = ComplexVector::new((0..n).map(|i| vecs.get(i, k)).collect());
            let r = m.mul_vec(&v).sub(&v.scale(vals[k])).norm();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn diagonal_matrix_gives_basis_vectors() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, -3.0)]);
        let (vals, vecs) = eig(&m).unwrap();
        let mut sorted: Vec<C64> = vals.clone();
        sorted.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((sorted[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((sorted[1] - c(2.0, -3.0)).norm() < 1e-12);
        // Eigenvectors are the standard basis up to phase.
        for k in 0..2 {
            let col: Vec<f64> = (0..2).map(|i| vecs.get(i, k).norm()).collect();
            assert!(col.iter().any(|&x| (x - 1.0).abs() < 1e-12));
            assert!(col.iter().any(|&x| x < 1e-12));
        }
    }

    #[test]
    fn symmetric_coupling_pair() {
        let g = 0.7;
        let m = ComplexMatrix::from_rows(vec![
            vec![C64::ZERO, c(g, 0.0)],
            vec![c(g, 0.0), C64::ZERO],
        ])
        .unwrap();
        let (vals, vecs) = eig(&m).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + g).abs() < 1e-12);
        assert!((re[1] - g).abs() < 1e-12);
        assert!(vals.iter().all(|z| z.im.abs() < 1e-12));
        assert!(eigen_residuals(&m, &vals, &vecs) < 1e-12);
    }

    #[test]
    fn random_5x5_residuals_below_contract() {
        let mut state = 42u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..10 {
            let m = ComplexMatrix::from_fn(5, 5, |_, _| c(next(), next()));
            let (vals, vecs) = eig(&m).unwrap();
            let worst = eigen_residuals(&m, &vals, &vecs);
            assert!(worst < 1e-9, "residual {worst}");
        }
    }

    #[test]
    fn degenerate_diagonalizable_matrix_is_handled() {
        // Repeated eigenvalue with a full eigenspace.
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let (vals, vecs) = eig(&m).unwrap();
        assert!(eigen_residuals(&m, &vals, &vecs) < 1e-10);
        // The two vectors of the degenerate pair must be independent.
        let idx: Vec<usize> = (0..3).filter(|&k| (vals[k] - C64::ONE).norm() < 1e-8).collect();
        assert_eq!(idx.len(), 2);
        let u = ComplexVector::new((0..3).map(|i| vecs.get(i, idx[0])).collect());
        let v = ComplexVector::new((0..3).map(|i| vecs.get(i, idx[1])).collect());
        assert!(u.inner(&v).norm() < 1e-6);
    }

    #[test]
    fn jordan_block_reports_near_defective() {
        let m = ComplexMatrix::from_rows(vec![
            vec![C64::ZERO, C64::ONE],
            vec![C64::ZERO, C64::ZERO],
        ])
        .unwrap();
        assert!(matches!(eig(&m), Err(LinalgError::NearDefective { .. })));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(
            eig(&ComplexMatrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { .. })
        ));
    }

    #[test]
    fn eigh_two_level_coupling() {
        let g = 0.35;
        let m = ComplexMatrix::from_rows(vec![
            vec![C64::ZERO, c(g, 0.0)],
            vec![c(g, 0.0), C64::ZERO],
        ])
        .unwrap();
        let vals = eigh(&m).unwrap();
        assert!((vals[0] + g).abs() < 1e-13);
        assert!((vals[1] - g).abs() < 1e-13);
    }

    #[test]
    fn eigh_matches_general_eig_on_random_hermitian() {
        let mut state = 7u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..6 {
            let raw = ComplexMatrix::from_fn(5, 5, |_, _| c(next(), next()));
            let herm = raw.add(&raw.adjoint()).scale(c(0.5, 0.0));
            let jac = eigh(&herm).unwrap();
            let (mut gen, _) = eig(&herm).unwrap();
            gen.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
            for (a, b) in jac.iter().zip(gen.iter()) {
                assert!((a - b.re).abs() < 1e-9, "{a} vs {}", b.re);
                assert!(b.im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(vec![
            vec![C64::ZERO, C64::ONE],
            vec![C64::ZERO, C64::ZERO],
        ])
        .unwrap();
        assert!(matches!(eigh(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn eig_expm_consistency() {
        // For diagonalizable M, expm(M) V = V diag(e^lambda).
        let mut state = 99u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for n in 2..=5usize {
            let m = ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()));
            let (vals, vecs) = eig(&m).unwrap();
            let e = super::super::expm(&m).unwrap();
            let lhs = e.mul(&vecs);
            let rhs = vecs.mul(&ComplexMatrix::diagonal(
                &vals.iter().map(|l| l.exp()).collect::<Vec<_>>(),
            ));
            let dev = lhs.max_abs_diff(&rhs);
            assert!(dev < 1e-8, "n = {n}: deviation {dev:.3e}");
        }
    }
}
