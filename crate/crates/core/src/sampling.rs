//! Seeded Haar-random states and unitaries, and batch scans of the
//! inequality over random four-factor states.
//!
//! Every random object comes from a `ChaCha8Rng` seeded with a `u64`, so a
//! `(shape, seed)` pair always yields the same amplitudes. Scan samples get
//! their seeds from [`derive_seed`], which depends only on the master seed
//! and the sample index; samples can therefore run in any order or in
//! parallel without changing the report.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::inequality::{gap_with_tol, DecompositionSource, FourFactorState};
use crate::schmidt::{schmidt_decompose, RANK_TOL};
use crate::spectra::LogBase;
use crate::tensor::{CMatrix, FactorShape, PureState, C64};

/// Gaps below `-VIOLATION_TOL` count as violations.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Reconstruction gate applied to every scanned sample.
pub const SCAN_RESIDUAL_TOL: f64 = 1e-9;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-sample seed: `splitmix64(master ^ splitmix64(index))`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-random pure state: i.i.d. standard complex Gaussian amplitudes,
/// normalized.
pub fn haar_state(shape: &FactorShape, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = (0..shape.total())
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    PureState::normalized(shape.clone(), amplitudes)
}

/// Haar-random `n × n` unitary: QR of a complex Gaussian matrix with the
/// columns of `Q` rephased by `R_jj / |R_jj|`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    if n == 0 {
        return Err(invalid("unitary size must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // fill row by row so the draw order does not depend on storage layout
    let mut z = DMatrix::<C64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            z[(r, c)] = complex_gaussian(&mut rng);
        }
    }
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub sample_index: usize,
    pub derived_seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanFailure {
    pub sample_index: usize,
    pub derived_seed: u64,
    pub error: String,
}

/// Aggregates over a seeded batch. Min/max/mean are `None` when every
/// sample failed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub n_samples: usize,
    pub shape: FactorShape,
    pub master_seed: u64,
    pub log_base: LogBase,
    pub min_gap: Option<f64>,
    pub max_gap: Option<f64>,
    pub mean_gap: Option<f64>,
    pub violation_count: usize,
    pub failed_count: usize,
    pub per_sample: Vec<ScanRow>,
    pub failures: Vec<ScanFailure>,
}

impl ScanReport {
    /// Builds aggregates from rows, which are sorted by sample index first.
    pub fn from_rows(
        n_samples: usize,
        shape: FactorShape,
        master_seed: u64,
        log_base: LogBase,
        mut per_sample: Vec<ScanRow>,
        mut failures: Vec<ScanFailure>,
    ) -> Self {
        per_sample.sort_by_key(|r| r.sample_index);
        failures.sort_by_key(|f| f.sample_index);
        let gaps = per_sample.iter().map(|r| r.gap);
        let (min_gap, max_gap, mean_gap) = if per_sample.is_empty() {
            (None, None, None)
        } else {
            (
                Some(gaps.clone().fold(f64::INFINITY, f64::min)),
                Some(gaps.clone().fold(f64::NEG_INFINITY, f64::max)),
                Some(gaps.sum::<f64>() / per_sample.len() as f64),
            )
        };
        ScanReport {
            n_samples,
            shape,
            master_seed,
            log_base,
            min_gap,
            max_gap,
            mean_gap,
            violation_count: per_sample.iter().filter(|r| r.gap < -VIOLATION_TOL).count(),
            failed_count: failures.len(),
            per_sample,
            failures,
        }
    }
}

/// Evaluates one scan sample.
pub fn scan_sample(
    shape: &FactorShape,
    seed: u64,
    log_base: LogBase,
    residual_tol: f64,
) -> Result<(f64, f64, f64)> {
    let state = FourFactorState::new(haar_state(shape, seed)?)?;
    let dec = schmidt_decompose(state.state(), &FourFactorState::pair_split(), RANK_TOL)?;
    let report = gap_with_tol(
        &state,
        &dec,
        log_base,
        DecompositionSource::Svd,
        residual_tol,
    )?;
    Ok((report.lhs, report.rhs, report.gap))
}

/// [`scan_with_tol`] with the default reconstruction gate.
pub fn scan(
    n_samples: usize,
    shape: &FactorShape,
    master_seed: u64,
    log_base: LogBase,
) -> Result<ScanReport> {
    scan_with_tol(n_samples, shape, master_seed, log_base, SCAN_RESIDUAL_TOL)
}

/// Evaluates the inequality on `n_samples` Haar states with their SVD
/// decompositions. Samples that fail (numerically, or at the reconstruction
/// gate) are listed in `failures` and left out of the aggregates.
pub fn scan_with_tol(
    n_samples: usize,
    shape: &FactorShape,
    master_seed: u64,
    log_base: LogBase,
    residual_tol: f64,
) -> Result<ScanReport> {
    if n_samples == 0 {
        return Err(invalid("scan needs at least one sample"));
    }
    if shape.n_factors() != 4 {
        return Err(invalid(format!(
            "scan needs a 4-factor shape, got {:?}",
            shape.dims()
        )));
    }
    #[allow(clippy::type_complexity)]
    let outcomes: Vec<(usize, u64, Result<(f64, f64, f64)>)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, i as u64);
            (i, seed, scan_sample(shape, seed, log_base, residual_tol))
        })
        .collect();

    let mut rows = Vec::with_capacity(n_samples);
    let mut failures = Vec::new();
    for (sample_index, derived_seed, outcome) in outcomes {
        match outcome {
            Ok((lhs, rhs, gap)) => rows.push(ScanRow {
                sample_index,
                derived_seed,
                lhs,
                rhs,
                gap,
            }),
            Err(e) => failures.push(ScanFailure {
                sample_index,
                derived_seed,
                error: e.to_string(),
            }),
        }
    }
    Ok(ScanReport::from_rows(
        n_samples,
        shape.clone(),
        master_seed,
        log_base,
        rows,
        failures,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::unitarity_defect;

    #[test]
    fn haar_state_is_normalized_and_deterministic() {
        let shape = FactorShape::new(vec![2, 3, 2]).unwrap();
        for seed in 0..100 {
            let s = haar_state(&shape, seed).unwrap();
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            haar_state(&shape, 7).unwrap(),
            haar_state(&shape, 7).unwrap()
        );
        assert_ne!(
            haar_state(&shape, 7).unwrap(),
            haar_state(&shape, 8).unwrap()
        );
    }

    #[test]
    fn haar_state_mean_weight() {
        // E|ψ_i|² = 1/N; per-draw variance of |ψ_0|² is (N-1)/(N²(N+1)).
        let shape = FactorShape::new(vec![2, 2, 2]).unwrap();
        let n = shape.total() as f64;
        let draws = 10_000;
        let mean: f64 = (0..draws)
            .map(|s| haar_state(&shape, s).unwrap().amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / draws as f64;
        let se = ((n - 1.0) / (n * n * (n + 1.0)) / draws as f64).sqrt();
        assert!((mean - 1.0 / n).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(1, 3).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-14);
        for seed in 0..50 {
            assert!(unitarity_defect(&haar_unitary(4, seed).unwrap()) < 1e-10);
        }
        assert_eq!(haar_unitary(3, 5).unwrap(), haar_unitary(3, 5).unwrap());
        assert!(haar_unitary(0, 1).is_err());
    }

    #[test]
    fn rotated_product_basis_stays_orthonormal() {
        let u = haar_unitary(4, 42).unwrap();
        let g = u.adjoint() * &u;
        assert!((g - CMatrix::identity(4, 4))
            .iter()
            .all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn derive_seed_spreads() {
        let a = derive_seed(1, 0);
        assert_ne!(a, derive_seed(1, 1));
        assert_ne!(a, derive_seed(2, 0));
        assert_eq!(a, derive_seed(1, 0));
    }

    #[test]
    fn single_sample_scan_matches_direct_evaluation() {
        let shape = FactorShape::uniform(2, 4).unwrap();
        let report = scan(1, &shape, 99, LogBase::Natural).unwrap();
        let seed = derive_seed(99, 0);
        let (lhs, rhs, gap) =
            scan_sample(&shape, seed, LogBase::Natural, SCAN_RESIDUAL_TOL).unwrap();
        assert_eq!(
            report.per_sample,
            vec![ScanRow {
                sample_index: 0,
                derived_seed: seed,
                lhs,
                rhs,
                gap
            }]
        );
        assert_eq!(report.min_gap, Some(gap));
        assert_eq!(report.mean_gap, Some(gap));
    }

    #[test]
    fn scan_validation() {
        let shape = FactorShape::uniform(2, 4).unwrap();
        assert!(scan(0, &shape, 1, LogBase::Natural).is_err());
        let three = FactorShape::uniform(2, 3).unwrap();
        assert!(scan(3, &three, 1, LogBase::Natural).is_err());
    }

    #[test]
    fn impossible_gate_fails_every_sample() {
        let shape = FactorShape::uniform(2, 4).unwrap();
        let report = scan_with_tol(5, &shape, 1, LogBase::Natural, 1e-300).unwrap();
        assert_eq!(report.failed_count, 5);
        assert!(report.per_sample.is_empty());
        assert_eq!(report.mean_gap, None);
    }
}
