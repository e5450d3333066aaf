//! Hermitian eigendecomposition, singular value decomposition and von Neumann
//! entropy.
//!
//! Both decompositions are cyclic Jacobi methods with a fixed `(p, q)` sweep
//! order, so results are bit-reproducible for identical input. Matrices here
//! are small (marginals of at most a few dozen dimensions), where Jacobi is
//! accurate and fast enough.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tensor::{hermitian_defect, CMatrix, DensityMatrix, C64};

/// Sweep budget for both Jacobi solvers.
pub const MAX_SWEEPS: usize = 100;

/// Default clipping tolerance for slightly negative density eigenvalues.
pub const CLIP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }

    /// Converts an entropy in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
        }
    }
}

/// Real eigenvalues sorted descending, with the tolerance used when clipping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
    tolerance: f64,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, tolerance: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values, tolerance }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in `[-tolerance, 0)` become 0; anything lower is an error.
    pub fn clipped(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|&v| {
                if v >= 0.0 {
                    Ok(v)
                } else if v >= -self.tolerance {
                    Ok(0.0)
                } else {
                    Err(Error::NegativeEigenvalue {
                        value: v,
                        tol: self.tolerance,
                    })
                }
            })
            .collect()
    }

    /// `-Σ p log p` over the clipped values, with `0 log 0 = 0`.
    pub fn entropy(&self, base: LogBase) -> Result<f64> {
        Ok(shannon(&self.clipped()?, base))
    }
}

/// `-Σ p log p` over nonnegative weights, skipping zeros.
pub fn shannon(probabilities: &[f64], base: LogBase) -> f64 {
    let nats: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    // + 0.0 turns -0.0 (from p = 1) into 0.0
    base.from_nats(nats) + 0.0
}

/// 2×2 unitary `G` (entries `[g_pp, g_pq, g_qp, g_qq]`) such that
/// `G† [[a_pp, a_pq], [a_pq*, a_qq]] G` is diagonal.
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let mag = apq.norm();
    let w = apq.conj() / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    [C64::new(c, 0.0), C64::new(s, 0.0), w * (-s), w * c]
}

/// Columns `p, q` of `m` ← `[m_p, m_q] G`.
fn rotate_columns(m: &mut CMatrix, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..m.nrows() {
        let (x, y) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = x * g[0] + y * g[2];
        m[(k, q)] = x * g[1] + y * g[3];
    }
}

/// Rows `p, q` of `m` ← `G† [m_p; m_q]`.
fn rotate_rows(m: &mut CMatrix, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..m.ncols() {
        let (x, y) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g[0].conj() * x + g[2].conj() * y;
        m[(q, k)] = g[1].conj() * x + g[3].conj() * y;
    }
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn jacobi_eigen(m: &CMatrix, tol: f64, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(invalid(format!("{}x{} matrix is not square", n, m.ncols())));
    }
    let defect = hermitian_defect(m);
    if defect > tol {
        return Err(invalid(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let mut a = (m + m.adjoint()).scale(0.5);
    let mut v = want_vectors.then(|| CMatrix::identity(n, n));
    let floor = f64::EPSILON * 1e-3 * frobenius(&a);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let mag = apq.norm();
                if mag <= floor || mag <= f64::EPSILON * 0.5 * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(app, aqq, apq);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows(&mut a, p, q, &g);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, &g);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "hermitian eigensolver",
            sweeps: MAX_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok((values, vectors))
}

/// Eigendecomposition of a Hermitian matrix: values sorted descending and
/// the matching orthonormal eigenvectors as columns, so `M = V diag(values) V†`.
///
/// `tol` bounds the accepted Hermiticity defect `max |M - M†|` and becomes
/// the clipping tolerance of the returned [`Spectrum`].
pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<(Spectrum, CMatrix)> {
    let (values, vectors) = jacobi_eigen(m, tol, true)?;
    Ok((
        Spectrum {
            values,
            tolerance: tol,
        },
        vectors.expect("vectors requested"),
    ))
}

/// Eigenvalues only; skips eigenvector accumulation.
pub fn hermitian_eigenvalues(m: &CMatrix, tol: f64) -> Result<Spectrum> {
    let (values, _) = jacobi_eigen(m, tol, false)?;
    Ok(Spectrum {
        values,
        tolerance: tol,
    })
}

/// Thin singular value decomposition `M = U diag(σ) V†`, with
/// `k = min(rows, cols)` columns in `u` and `v`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.clone();
        for j in 0..k {
            let s = self.singular_values[j];
            us.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        us * self.v.adjoint()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &CMatrix) -> Result<Svd> {
    if m.nrows() < m.ncols() {
        let t = svd_tall(&m.adjoint())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    svd_tall(m)
}

fn svd_tall(m: &CMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    let null = f64::EPSILON * frobenius(m);
    let orth_tol = f64::EPSILON * rows.max(1) as f64;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for k in 0..rows {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if alpha.sqrt() <= null || beta.sqrt() <= null {
                    continue;
                }
                if gamma.norm() <= orth_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "singular value decomposition",
            sweeps: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = CMatrix::zeros(rows, cols);
    let mut filled = Vec::with_capacity(cols);
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > null {
            let col = a.column(j) / C64::new(norms[j], 0.0);
            u.set_column(slot, &col);
            filled.push(slot);
        }
    }
    complete_orthonormal(&mut u, &filled);

    Ok(Svd {
        u,
        singular_values: order.iter().map(|&j| norms[j]).collect(),
        v: CMatrix::from_fn(cols, cols, |r, c| v[(r, order[c])]),
    })
}

/// Fills the columns of `u` not listed in `filled` with unit vectors
/// orthogonal to everything already present (Gram-Schmidt on the
/// computational basis, two passes).
fn complete_orthonormal(u: &mut CMatrix, filled: &[usize]) {
    let (rows, cols) = u.shape();
    let mut done: Vec<usize> = filled.to_vec();
    let mut candidate = 0;
    for slot in 0..cols {
        if filled.contains(&slot) {
            continue;
        }
        while candidate < rows {
            let mut x = nalgebra::DVector::<C64>::zeros(rows);
            x[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for &k in &done {
                    let col = u.column(k);
                    let overlap = col.dotc(&x);
                    x -= col * overlap;
                }
            }
            let norm = x.norm();
            if norm > 0.5 {
                u.set_column(slot, &(x / C64::new(norm, 0.0)));
                done.push(slot);
                break;
            }
        }
    }
}

/// `S(ρ) = -Σ p log p` over the eigenvalues of `rho`.
///
/// Eigenvalues in `[-clip_tol, 0)` are treated as zero; anything more
/// negative is reported as [`Error::NegativeEigenvalue`].
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase, clip_tol: f64) -> Result<f64> {
    let spectrum = hermitian_eigenvalues(rho.matrix(), crate::tensor::DENSITY_TOL)?;
    Spectrum {
        values: spectrum.values,
        tolerance: clip_tol,
    }
    .entropy(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::FactorShape;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Deterministic pseudo-random complex matrix; no RNG crate needed here.
    fn lcg_matrix(rows: usize, cols: usize, mut seed: u64) -> CMatrix {
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    fn check_eigen(m: &CMatrix) {
        let (spec, v) = hermitian_eigen(m, 1e-10).unwrap();
        let n = m.nrows();
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            spec.values().iter().map(|&x| c(x, 0.0)),
        ));
        let scale = frobenius(m).max(1.0);
        assert!(max_abs(&(&v * d * v.adjoint() - m)) <= 1e-10 * scale);
        assert!(max_abs(&(v.adjoint() * &v - CMatrix::identity(n, n))) <= 1e-10);
        assert!(spec.values().windows(2).all(|w| w[0] >= w[1]));
    }

    fn check_svd(m: &CMatrix) {
        let s = svd(m).unwrap();
        let k = m.nrows().min(m.ncols());
        let scale = frobenius(m).max(1.0);
        assert_eq!(s.singular_values.len(), k);
        assert!(max_abs(&(s.reconstruct() - m)) <= 1e-10 * scale);
        assert!(max_abs(&(s.u.adjoint() * &s.u - CMatrix::identity(k, k))) <= 1e-10);
        assert!(max_abs(&(s.v.adjoint() * &s.v - CMatrix::identity(k, k))) <= 1e-10);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn eigen_of_diagonal_inputs() {
        let m = CMatrix::identity(2, 2).scale(0.5);
        let (spec, _) = hermitian_eigen(&m, 1e-10).unwrap();
        assert_eq!(spec.values(), &[0.5, 0.5]);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.25, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.75, 0.0)],
        );
        let (spec, _) = hermitian_eigen(&m, 1e-10).unwrap();
        assert_eq!(spec.values(), &[0.75, 0.25]);
    }

    #[test]
    fn eigen_reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (5, 4), (8, 5), (16, 6), (36, 7)] {
            let g = lcg_matrix(n, n, seed);
            check_eigen(&(&g + g.adjoint()));
        }
    }

    #[test]
    fn eigen_handles_degenerate_and_zero() {
        check_eigen(&CMatrix::zeros(4, 4));
        let v = lcg_matrix(6, 1, 9);
        check_eigen(&(&v * v.adjoint()));
        // off-diagonal only, zero diagonal
        let m =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]);
        check_eigen(&m);
    }

    #[test]
    fn eigen_rejects_bad_input() {
        let m =
            CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            hermitian_eigen(&m, 1e-10),
            Err(Error::InvalidInput(_))
        ));
        assert!(hermitian_eigen(&CMatrix::zeros(2, 3), 1e-10).is_err());
    }

    #[test]
    fn svd_examples() {
        let s = svd(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 1.0]);

        let u = lcg_matrix(4, 1, 11);
        let u = &u / C64::new(u.norm(), 0.0);
        let w = lcg_matrix(3, 1, 12);
        let w = &w / C64::new(w.norm(), 0.0);
        let s = svd(&(&u * w.adjoint())).unwrap();
        assert!((s.singular_values[0] - 1.0).abs() < 1e-14);
        assert!(s.singular_values[1..].iter().all(|&x| x < 1e-14));
        check_svd(&(&u * w.adjoint()));
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        for (r, k, seed) in [
            (4, 4, 21),
            (1, 1, 22),
            (4, 16, 23),
            (16, 4, 24),
            (6, 6, 25),
            (9, 9, 26),
            (3, 7, 27),
        ] {
            check_svd(&lcg_matrix(r, k, seed));
        }
        check_svd(&CMatrix::zeros(3, 3));
    }

    #[test]
    fn entropy_examples() {
        let two = FactorShape::new(vec![2]).unwrap();
        let pure =
            DensityMatrix::projector(&crate::tensor::PureState::basis(two.clone(), 1).unwrap());
        assert!(
            von_neumann_entropy(&pure, LogBase::Natural, CLIP_TOL)
                .unwrap()
                .abs()
                < 1e-15
        );

        let mixed = DensityMatrix::maximally_mixed(two.clone());
        let s = von_neumann_entropy(&mixed, LogBase::Natural, CLIP_TOL).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-15);
        let s2 = von_neumann_entropy(&mixed, LogBase::Two, CLIP_TOL).unwrap();
        assert!((s2 - 1.0).abs() < 1e-15);

        // -(3/4) ln(3/4) - (1/4) ln(1/4), evaluated by hand: 0.5623351446188083
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.75, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
        );
        let rho = DensityMatrix::new(m, two).unwrap();
        let s = von_neumann_entropy(&rho, LogBase::Natural, CLIP_TOL).unwrap();
        assert!((s - 0.5623351446188083).abs() < 1e-15);
    }

    #[test]
    fn clipping_policy() {
        let spec = Spectrum::new(vec![1.0, -5e-13], CLIP_TOL);
        assert_eq!(spec.clipped().unwrap(), vec![1.0, 0.0]);
        assert_eq!(spec.entropy(LogBase::Natural).unwrap(), 0.0);
        let bad = Spectrum::new(vec![1.0 + 1e-9, -1e-9], CLIP_TOL);
        assert!(matches!(
            bad.entropy(LogBase::Natural),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }
}
