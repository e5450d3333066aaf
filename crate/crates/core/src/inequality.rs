//! Both sides of the entropy inequality, the counterexample family, and the
//! search over degenerate Schmidt blocks that maximizes the right-hand side.
//!
//! Factor roles on a four-factor state (0-based): Alice holds `[0, 2]`, Bob
//! holds `[1, 3]`, and Schmidt decompositions are taken across `[0, 1] | [2, 3]`.
//!
//! - `lhs(Ψ) = S(tr_{Bob} |Ψ⟩⟨Ψ|)`
//! - `rhs(dec) = Σ_α λ_α [S(tr_1 |Φ_α⟩⟨Φ_α|) + S(tr_3 |Φ'_α⟩⟨Φ'_α|)]`
//! - `gap = lhs − rhs`, negative for a violation.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::sampling::{derive_seed, haar_unitary};
use crate::schmidt::{
    decomposition_from_basis, degenerate_blocks, rotate_block, schmidt_decompose,
    verify_decomposition, BipartiteSplit, SchmidtDecomposition, BLOCK_TOL, RANK_TOL,
};
use crate::spectra::{hermitian_eigenvalues, shannon, von_neumann_entropy, LogBase, CLIP_TOL};
use crate::tensor::{CMatrix, FactorShape, PureState, C64};

/// Alice's factors.
pub const ALICE: [usize; 2] = [0, 2];
/// Bob's factors.
pub const BOB: [usize; 2] = [1, 3];
/// Left side of the split used for Schmidt decompositions.
pub const PAIR_LEFT: [usize; 2] = [0, 1];
/// Right side of the split used for Schmidt decompositions.
pub const PAIR_RIGHT: [usize; 2] = [2, 3];

/// Largest accepted reconstruction residual in [`gap`].
pub const GAP_RESIDUAL_TOL: f64 = 1e-8;

/// A pure state on exactly four factors.
#[derive(Clone, Debug, PartialEq)]
pub struct FourFactorState {
    state: PureState,
}

impl FourFactorState {
    pub fn new(state: PureState) -> Result<Self> {
        if state.n_factors() != 4 {
            return Err(invalid(format!(
                "expected 4 factors, state has {}",
                state.n_factors()
            )));
        }
        Ok(FourFactorState { state })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn into_state(self) -> PureState {
        self.state
    }

    pub fn shape(&self) -> &FactorShape {
        self.state.shape()
    }

    /// The `[0, 1] | [2, 3]` split.
    pub fn pair_split() -> BipartiteSplit {
        BipartiteSplit::new(&PAIR_LEFT, &PAIR_RIGHT, 4).expect("fixed split is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionSource {
    Svd,
    Product,
    Entangled,
    Deformed,
    Rotated,
    Custom,
}

impl DecompositionSource {
    pub fn label(self) -> &'static str {
        match self {
            DecompositionSource::Svd => "svd",
            DecompositionSource::Product => "product",
            DecompositionSource::Entangled => "entangled",
            DecompositionSource::Deformed => "deformed",
            DecompositionSource::Rotated => "rotated",
            DecompositionSource::Custom => "custom",
        }
    }
}

/// One evaluation of the inequality for a state and one of its decompositions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub log_base: LogBase,
    pub decomposition_source: DecompositionSource,
    pub state_descriptor: String,
    /// Reconstruction residual of the decomposition against the state.
    pub residual: f64,
}

impl GapReport {
    pub fn is_violation(&self, tol: f64) -> bool {
        self.gap < -tol
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.state_descriptor = descriptor.into();
        self
    }
}

/// Entropy of Alice's marginal.
pub fn lhs(s: &FourFactorState, base: LogBase) -> Result<f64> {
    let rho = s.state.partial_trace(&ALICE)?;
    von_neumann_entropy(&rho, base, CLIP_TOL)
}

/// Entropy of the first-factor marginal of a two-factor vector, taken from
/// the raw amplitudes (`ρ = M M†` with `M` the `d1 × d2` reshape).
fn pair_entropy(amplitudes: &[C64], d1: usize, d2: usize, base: LogBase) -> Result<f64> {
    let rho = CMatrix::from_fn(d1, d1, |i, j| {
        (0..d2)
            .map(|k| amplitudes[i * d2 + k] * amplitudes[j * d2 + k].conj())
            .sum()
    });
    let spectrum = hermitian_eigenvalues(&rho, 1e-10)?;
    let values = crate::spectra::Spectrum::new(spectrum.values().to_vec(), CLIP_TOL).clipped()?;
    Ok(shannon(&values, base))
}

fn check_pair_split(dec: &SchmidtDecomposition) -> Result<()> {
    if dec.shape().n_factors() != 4 || dec.split() != &FourFactorState::pair_split() {
        return Err(invalid(
            "right-hand side needs a decomposition across [0, 1] | [2, 3]",
        ));
    }
    Ok(())
}

/// `Σ_α λ_α [S(left_α marginal on its first factor) + S(right_α marginal on its first factor)]`.
pub fn rhs(dec: &SchmidtDecomposition, base: LogBase) -> Result<f64> {
    check_pair_split(dec)?;
    let dims = dec.shape().dims();
    let mut total = 0.0;
    for ((&lambda, l), r) in dec
        .coefficients()
        .iter()
        .zip(dec.left_vectors())
        .zip(dec.right_vectors())
    {
        let sl = pair_entropy(l.amplitudes(), dims[0], dims[1], base)?;
        let sr = pair_entropy(r.amplitudes(), dims[2], dims[3], base)?;
        total += lambda * (sl + sr);
    }
    Ok(total)
}

/// Evaluates both sides, after checking that `dec` reproduces the state
/// within `residual_tol`.
pub fn gap_with_tol(
    s: &FourFactorState,
    dec: &SchmidtDecomposition,
    base: LogBase,
    source: DecompositionSource,
    residual_tol: f64,
) -> Result<GapReport> {
    let residual = verify_decomposition(&s.state, dec)?.residual;
    // NaN residuals must fail the gate too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(residual <= residual_tol) {
        return Err(Error::DecompositionMismatch {
            residual,
            tol: residual_tol,
        });
    }
    let lhs = lhs(s, base)?;
    let rhs = rhs(dec, base)?;
    Ok(GapReport {
        lhs,
        rhs,
        gap: lhs - rhs,
        log_base: base,
        decomposition_source: source,
        state_descriptor: String::new(),
        residual,
    })
}

/// [`gap_with_tol`] at [`GAP_RESIDUAL_TOL`].
pub fn gap(
    s: &FourFactorState,
    dec: &SchmidtDecomposition,
    base: LogBase,
    source: DecompositionSource,
) -> Result<GapReport> {
    gap_with_tol(s, dec, base, source, GAP_RESIDUAL_TOL)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(invalid(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// `(1/d) Σ_{i,k} e_i ⊗ e_k ⊗ e_i ⊗ e_k` on `(d, d, d, d)`: a maximally
/// entangled pair for Alice tensored with the same for Bob.
pub fn canonical_counterexample(d: usize) -> Result<FourFactorState> {
    check_dim(d)?;
    let shape = FactorShape::uniform(d, 4)?;
    let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total()];
    let a = C64::new(1.0 / d as f64, 0.0);
    for i in 0..d {
        for k in 0..d {
            amplitudes[shape.flatten(&[i, k, i, k])?] = a;
        }
    }
    FourFactorState::new(PureState::new(shape, amplitudes)?)
}

/// Clock-and-shift basis of `C^d ⊗ C^d`:
/// `Φ_(m,n) = (1/√d) Σ_j ω^{jm} e_j ⊗ e_{(j+n) mod d}`, `ω = e^{2πi/d}`,
/// listed with `α = m·d + n`.
pub fn bell_basis(d: usize) -> Result<Vec<PureState>> {
    check_dim(d)?;
    let shape = FactorShape::uniform(d, 2)?;
    let amp = 1.0 / (d as f64).sqrt();
    let mut out = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            let mut amplitudes = vec![C64::new(0.0, 0.0); d * d];
            for j in 0..d {
                // reduce jm mod d first so the phase argument stays small
                let phase = 2.0 * PI * ((j * m) % d) as f64 / d as f64;
                amplitudes[j * d + (j + n) % d] = C64::from_polar(amp, phase);
            }
            out.push(PureState::new(shape.clone(), amplitudes)?);
        }
    }
    Ok(out)
}

/// The decomposition of [`canonical_counterexample`] into `e_i ⊗ e_k`
/// product vectors on both sides.
pub fn product_decomposition(d: usize) -> Result<SchmidtDecomposition> {
    let s = canonical_counterexample(d)?;
    let left = FactorShape::uniform(d, 2)?;
    let basis = (0..d * d)
        .map(|i| PureState::basis(left.clone(), i))
        .collect::<Result<Vec<_>>>()?;
    decomposition_from_basis(&s.state, &FourFactorState::pair_split(), &basis)
}

/// The decomposition of [`canonical_counterexample`] into
/// `(1/d) Σ_α Φ_α ⊗ conj(Φ_α)` over [`bell_basis`].
pub fn entangled_decomposition(d: usize) -> Result<SchmidtDecomposition> {
    let s = canonical_counterexample(d)?;
    decomposition_from_basis(&s.state, &FourFactorState::pair_split(), &bell_basis(d)?)
}

/// Tilted coefficients `λ_α = (1 + ε t_α)/D` with `t_α = (2α − D + 1)/D`,
/// in ascending order of `α`.
pub fn deformed_coefficients(d: usize, eps: f64) -> Result<Vec<f64>> {
    check_dim(d)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!(
            "deformation must lie in (0, 1), got {eps}"
        )));
    }
    let big_d = (d * d) as f64;
    Ok((0..d * d)
        .map(|a| {
            let t = (2.0 * a as f64 - big_d + 1.0) / big_d;
            (1.0 + eps * t) / big_d
        })
        .collect())
}

/// `Σ_α √λ_α Φ_α ⊗ conj(Φ_α)` with the tilted coefficients of
/// [`deformed_coefficients`]. The spectrum is strictly monotone, so the
/// returned decomposition (sorted descending) is unique up to phases.
pub fn deformed_counterexample(
    d: usize,
    eps: f64,
) -> Result<(FourFactorState, SchmidtDecomposition)> {
    let lambdas = deformed_coefficients(d, eps)?;
    let basis = bell_basis(d)?;
    let shape = FactorShape::uniform(d, 4)?;
    let dd = d * d;
    let mut amplitudes = vec![C64::new(0.0, 0.0); shape.total()];
    for (lambda, phi) in lambdas.iter().zip(&basis) {
        let w = lambda.sqrt();
        for (i, a) in phi.amplitudes().iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in phi.amplitudes().iter().enumerate() {
                amplitudes[i * dd + j] += a * b.conj() * w;
            }
        }
    }
    let state = FourFactorState::new(PureState::normalized(shape.clone(), amplitudes)?)?;

    let order: Vec<usize> = (0..dd).rev().collect();
    let dec = SchmidtDecomposition::from_parts(
        shape,
        FourFactorState::pair_split(),
        order.iter().map(|&a| lambdas[a]).collect(),
        order.iter().map(|&a| basis[a].clone()).collect(),
        order.iter().map(|&a| basis[a].conjugate()).collect(),
    )?;
    Ok((state, dec))
}

/// Budget and settings for [`maximize_rhs`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaximizeOptions {
    pub restarts: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub log_base: LogBase,
    pub block_tol: f64,
    /// Reconstruction gate for the returned decomposition.
    pub residual_tol: f64,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            restarts: 20,
            sweeps: 50,
            seed: 0,
            log_base: LogBase::Natural,
            block_tol: BLOCK_TOL,
            residual_tol: GAP_RESIDUAL_TOL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MaximizeOutcome {
    pub decomposition: SchmidtDecomposition,
    pub report: GapReport,
    pub initial_rhs: f64,
    pub blocks: Vec<Vec<usize>>,
    /// Objective evaluations across all starts (pair-local evaluations count once each).
    pub evaluations: u64,
    /// Sweeps actually run, summed over starts.
    pub sweeps_run: usize,
    /// Start that produced the best result; 0 is the unrotated decomposition.
    pub best_start: usize,
}

/// Working copy of the Schmidt vectors during local search.
struct Search<'a> {
    dims: &'a [usize],
    base: LogBase,
    left: Vec<Vec<C64>>,
    right: Vec<Vec<C64>>,
    /// Per-term `S(left) + S(right)`.
    term: Vec<f64>,
    evaluations: u64,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const THETA_GRID: usize = 12;
const PHI_GRID: usize = 8;
const GOLDEN_STEPS: usize = 30;

impl<'a> Search<'a> {
    fn new(dec: &SchmidtDecomposition, dims: &'a [usize], base: LogBase) -> Result<Self> {
        let left: Vec<Vec<C64>> = dec
            .left_vectors()
            .iter()
            .map(|v| v.amplitudes().to_vec())
            .collect();
        let right: Vec<Vec<C64>> = dec
            .right_vectors()
            .iter()
            .map(|v| v.amplitudes().to_vec())
            .collect();
        let mut s = Search {
            dims,
            base,
            left,
            right,
            term: Vec::new(),
            evaluations: 0,
        };
        s.term = (0..s.left.len())
            .map(|a| s.term_value(&s.left[a], &s.right[a]))
            .collect::<Result<_>>()?;
        Ok(s)
    }

    fn term_value(&self, l: &[C64], r: &[C64]) -> Result<f64> {
        Ok(pair_entropy(l, self.dims[0], self.dims[1], self.base)?
            + pair_entropy(r, self.dims[2], self.dims[3], self.base)?)
    }

    /// Pair rotation `G(θ, φ) = [[cos θ, −e^{iφ} sin θ], [e^{−iφ} sin θ, cos θ]]`
    /// applied as in [`rotate_block`]: left by `G`, right by `conj(G)`.
    fn rotated(&self, p: usize, q: usize, theta: f64, phi: f64) -> [Vec<C64>; 4] {
        let (s, c) = theta.sin_cos();
        let g_pp = C64::new(c, 0.0);
        let g_qq = g_pp;
        let g_pq = -C64::from_polar(s, phi);
        let g_qp = C64::from_polar(s, -phi);
        let mix = |x: &[C64], y: &[C64], a: C64, b: C64| -> Vec<C64> {
            x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
        };
        [
            mix(&self.left[p], &self.left[q], g_pp, g_qp),
            mix(&self.left[p], &self.left[q], g_pq, g_qq),
            mix(&self.right[p], &self.right[q], g_pp.conj(), g_qp.conj()),
            mix(&self.right[p], &self.right[q], g_pq.conj(), g_qq.conj()),
        ]
    }

    fn pair_objective(&mut self, p: usize, q: usize, theta: f64, phi: f64) -> Result<f64> {
        self.evaluations += 1;
        let [lp, lq, rp, rq] = self.rotated(p, q, theta, phi);
        Ok(self.term_value(&lp, &rp)? + self.term_value(&lq, &rq)?)
    }

    /// Golden-section maximization of `f` on `[lo, hi]`.
    fn golden(
        &mut self,
        mut lo: f64,
        mut hi: f64,
        mut f: impl FnMut(&mut Self, f64) -> Result<f64>,
    ) -> Result<(f64, f64)> {
        let mut x1 = hi - GOLDEN * (hi - lo);
        let mut x2 = lo + GOLDEN * (hi - lo);
        let mut f1 = f(self, x1)?;
        let mut f2 = f(self, x2)?;
        for _ in 0..GOLDEN_STEPS {
            if f1 >= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - GOLDEN * (hi - lo);
                f1 = f(self, x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + GOLDEN * (hi - lo);
                f2 = f(self, x2)?;
            }
        }
        Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
    }

    /// Best pair rotation: coarse `(θ, φ)` grid, then alternating golden-section
    /// refinement in `θ` and `φ`. Applied only if it improves the pair's value.
    fn improve_pair(&mut self, p: usize, q: usize) -> Result<f64> {
        let current = self.term[p] + self.term[q];
        let theta_step = PI / THETA_GRID as f64;
        let phi_step = 2.0 * PI / PHI_GRID as f64;
        let (mut theta, mut phi, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
        for i in 0..THETA_GRID {
            let t = -PI / 2.0 + (i as f64 + 0.5) * theta_step;
            for j in 0..PHI_GRID {
                let ph = j as f64 * phi_step;
                let v = self.pair_objective(p, q, t, ph)?;
                if v > best {
                    (theta, phi, best) = (t, ph, v);
                }
            }
        }
        for _ in 0..2 {
            let ph = phi;
            let (t, v) = self.golden(theta - theta_step, theta + theta_step, |s, x| {
                s.pair_objective(p, q, x, ph)
            })?;
            if v > best {
                (theta, best) = (t, v);
            }
            let th = theta;
            let (ph, v) = self.golden(phi - phi_step, phi + phi_step, |s, x| {
                s.pair_objective(p, q, th, x)
            })?;
            if v > best {
                (phi, best) = (ph, v);
            }
        }
        if best > current + 1e-14 {
            let [lp, lq, rp, rq] = self.rotated(p, q, theta, phi);
            self.term[p] = self.term_value(&lp, &rp)?;
            self.term[q] = self.term_value(&lq, &rq)?;
            self.left[p] = lp;
            self.left[q] = lq;
            self.right[p] = rp;
            self.right[q] = rq;
            Ok(self.term[p] + self.term[q] - current)
        } else {
            Ok(0.0)
        }
    }

    fn into_decomposition(self, template: &SchmidtDecomposition) -> Result<SchmidtDecomposition> {
        let lshape = template.left_vectors()[0].shape().clone();
        let rshape = template.right_vectors()[0].shape().clone();
        SchmidtDecomposition::from_parts(
            template.shape().clone(),
            template.split().clone(),
            template.coefficients().to_vec(),
            self.left
                .into_iter()
                .map(|v| PureState::new_unchecked(lshape.clone(), v))
                .collect::<Result<_>>()?,
            self.right
                .into_iter()
                .map(|v| PureState::new_unchecked(rshape.clone(), v))
                .collect::<Result<_>>()?,
        )
    }
}

struct StartResult {
    decomposition: SchmidtDecomposition,
    rhs: f64,
    evaluations: u64,
    sweeps: usize,
}

fn run_start(
    start: SchmidtDecomposition,
    blocks: &[Vec<usize>],
    opts: &MaximizeOptions,
) -> Result<StartResult> {
    let dims = start.shape().dims().to_vec();
    let mut search = Search::new(&start, &dims, opts.log_base)?;
    let mut sweeps = 0;
    for _ in 0..opts.sweeps {
        sweeps += 1;
        let mut gained = 0.0;
        for block in blocks {
            for (i, &p) in block.iter().enumerate() {
                for &q in &block[i + 1..] {
                    gained += start.coefficients()[p] * search.improve_pair(p, q)?;
                }
            }
        }
        if gained <= 1e-13 {
            break;
        }
    }
    let evaluations = search.evaluations;
    let decomposition = search.into_decomposition(&start)?;
    let rhs = rhs(&decomposition, opts.log_base)?;
    Ok(StartResult {
        decomposition,
        rhs,
        evaluations,
        sweeps,
    })
}

/// Searches the unitary freedom inside degenerate Schmidt blocks for the
/// decomposition with the largest right-hand side.
///
/// Start 0 is the SVD decomposition itself; starts `1..=restarts` mix every
/// degenerate block by a Haar unitary seeded from `derive_seed(seed, start)`.
/// Each start is then refined by up to `sweeps` cyclic passes of pair
/// rotations. Starts run in parallel; the winner is the largest rhs, ties
/// going to the lowest start index, so the result depends only on the
/// options. Never returns less than the initial rhs.
pub fn maximize_rhs(s: &FourFactorState, opts: &MaximizeOptions) -> Result<MaximizeOutcome> {
    let split = FourFactorState::pair_split();
    let initial = schmidt_decompose(&s.state, &split, RANK_TOL)?;
    let initial_rhs = rhs(&initial, opts.log_base)?;
    let blocks = degenerate_blocks(initial.coefficients(), opts.block_tol);
    let active: Vec<Vec<usize>> = blocks.iter().filter(|b| b.len() > 1).cloned().collect();

    let finish = |dec: SchmidtDecomposition, source, evaluations, sweeps_run, best_start| {
        let report = gap_with_tol(s, &dec, opts.log_base, source, opts.residual_tol)?;
        Ok(MaximizeOutcome {
            decomposition: dec,
            report,
            initial_rhs,
            blocks: blocks.clone(),
            evaluations,
            sweeps_run,
            best_start,
        })
    };

    if active.is_empty() || (opts.restarts == 0 && opts.sweeps == 0) {
        return finish(initial, DecompositionSource::Svd, 0, 0, 0);
    }

    let results: Vec<Result<StartResult>> = (0..=opts.restarts)
        .into_par_iter()
        .map(|start| {
            let mut dec = initial.clone();
            if start > 0 {
                let start_seed = derive_seed(opts.seed, start as u64);
                for (b, block) in active.iter().enumerate() {
                    let u = haar_unitary(block.len(), derive_seed(start_seed, b as u64))?;
                    dec = rotate_block(&dec, block, &u)?;
                }
            }
            run_start(dec, &active, opts)
        })
        .collect();

    let mut evaluations = 0;
    let mut sweeps_run = 0;
    let mut best: Option<(usize, StartResult)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        evaluations += r.evaluations;
        sweeps_run += r.sweeps;
        if best.as_ref().is_none_or(|(_, b)| r.rhs > b.rhs) {
            best = Some((i, r));
        }
    }
    let (best_start, best) = best.expect("at least one start");
    if best.rhs < initial_rhs {
        return finish(
            initial,
            DecompositionSource::Svd,
            evaluations,
            sweeps_run,
            0,
        );
    }
    finish(
        best.decomposition,
        DecompositionSource::Rotated,
        evaluations,
        sweeps_run,
        best_start,
    )
}
