//! Schmidt decompositions across a bipartite split of the factor set.
//!
//! A decomposition `Ψ = Σ_α √λ_α u_α ⊗ v_α` is stored with its coefficients
//! sorted descending. When coefficients repeat, any unitary mixing inside the
//! repeated block (left vectors by `U`, right vectors by `U*`) yields another
//! valid decomposition; [`degenerate_blocks`] finds those blocks and
//! [`rotate_block`] applies the mixing.

use crate::error::{invalid, Error, Result};
use crate::spectra::svd;
use crate::tensor::{normalize_factor_set, CMatrix, DensityMatrix, FactorShape, PureState, C64};

/// Default cutoff below which Schmidt terms are dropped.
pub const RANK_TOL: f64 = 1e-12;

/// Default relative tolerance for grouping equal coefficients.
pub const BLOCK_TOL: f64 = 1e-8;

/// Unitarity tolerance for block rotations.
pub const UNITARY_TOL: f64 = 1e-10;

/// Maximal-mixedness tolerance for [`decomposition_from_basis`].
pub const MIXEDNESS_TOL: f64 = 1e-8;

/// Orthonormality tolerance for a user-supplied basis.
pub const BASIS_TOL: f64 = 1e-10;

/// Two disjoint, nonempty factor sets that together cover every factor.
/// Both sides are kept sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteSplit {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BipartiteSplit {
    pub fn new(left: &[usize], right: &[usize], n_factors: usize) -> Result<Self> {
        let left = normalize_factor_set(left, n_factors)?;
        let right = normalize_factor_set(right, n_factors)?;
        if left.iter().any(|f| right.contains(f)) {
            return Err(invalid("split sides overlap"));
        }
        if left.len() + right.len() != n_factors {
            return Err(invalid(format!(
                "split covers {} of {n_factors} factors",
                left.len() + right.len()
            )));
        }
        Ok(BipartiteSplit { left, right })
    }

    /// `left` against everything else.
    pub fn from_left(left: &[usize], n_factors: usize) -> Result<Self> {
        let sorted = normalize_factor_set(left, n_factors)?;
        let right: Vec<usize> = (0..n_factors).filter(|f| !sorted.contains(f)).collect();
        BipartiteSplit::new(&sorted, &right, n_factors)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_factors(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// Permutation taking the `left ++ right` factor order back to the
    /// original one (new factor `k` is concatenated factor `perm[k]`).
    fn restore_order(&self) -> Vec<usize> {
        let mut perm = vec![0; self.n_factors()];
        for (pos, &f) in self.left.iter().chain(&self.right).enumerate() {
            perm[f] = pos;
        }
        perm
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtDecomposition {
    shape: FactorShape,
    split: BipartiteSplit,
    coefficients: Vec<f64>,
    left_vectors: Vec<PureState>,
    right_vectors: Vec<PureState>,
}

impl SchmidtDecomposition {
    /// Assembles a decomposition of a state on `shape` from its parts.
    ///
    /// Only structure is checked here (lengths and vector shapes); whether
    /// the parts actually form a Schmidt decomposition of some state is
    /// the job of [`verify_decomposition`].
    pub fn from_parts(
        shape: FactorShape,
        split: BipartiteSplit,
        coefficients: Vec<f64>,
        left_vectors: Vec<PureState>,
        right_vectors: Vec<PureState>,
    ) -> Result<Self> {
        if split.n_factors() != shape.n_factors() {
            return Err(Error::ShapeMismatch(format!(
                "split over {} factors for a {}-factor shape",
                split.n_factors(),
                shape.n_factors()
            )));
        }
        if coefficients.len() != left_vectors.len() || coefficients.len() != right_vectors.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients, {} left and {} right vectors",
                coefficients.len(),
                left_vectors.len(),
                right_vectors.len()
            )));
        }
        let left_shape = shape.select(&split.left)?;
        let right_shape = shape.select(&split.right)?;
        if left_vectors.iter().any(|v| v.shape() != &left_shape)
            || right_vectors.iter().any(|v| v.shape() != &right_shape)
        {
            return Err(Error::ShapeMismatch(
                "Schmidt vector shape does not match its side of the split".into(),
            ));
        }
        Ok(SchmidtDecomposition {
            shape,
            split,
            coefficients,
            left_vectors,
            right_vectors,
        })
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn split(&self) -> &BipartiteSplit {
        &self.split
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn left_vectors(&self) -> &[PureState] {
        &self.left_vectors
    }

    pub fn right_vectors(&self) -> &[PureState] {
        &self.right_vectors
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `Σ_α √λ_α left_α ⊗ right_α`, back in the original factor order.
    /// Not renormalized.
    pub fn reconstruct(&self) -> Result<PureState> {
        let concat = self
            .shape
            .select(&self.split.left)?
            .concat(&self.shape.select(&self.split.right)?)?;
        let mut acc = vec![C64::new(0.0, 0.0); concat.total()];
        for ((&lambda, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            let w = lambda.max(0.0).sqrt();
            let rd = r.dim();
            for (i, a) in l.amplitudes().iter().enumerate() {
                let wa = a * w;
                for (j, b) in r.amplitudes().iter().enumerate() {
                    acc[i * rd + j] += wa * b;
                }
            }
        }
        PureState::new_unchecked(concat, acc)?.permute_factors(&self.split.restore_order())
    }
}

/// Schmidt decomposition of `state` via SVD of its `left × right` reshape.
///
/// With `M = U Σ V†`, the state is `Σ σ_α U_α ⊗ conj(V_α)`, so right vectors
/// are the conjugated right singular vectors. Terms with `σ² ≤ rank_tol`
/// are dropped.
pub fn schmidt_decompose(
    state: &PureState,
    split: &BipartiteSplit,
    rank_tol: f64,
) -> Result<SchmidtDecomposition> {
    let shape = state.shape().clone();
    if split.n_factors() != shape.n_factors() {
        return Err(Error::ShapeMismatch("split does not match state".into()));
    }
    let left_shape = shape.select(&split.left)?;
    let right_shape = shape.select(&split.right)?;
    let m = state.bipartite_matrix(&split.left)?;
    let dec = svd(&m)?;

    let mut coefficients = Vec::new();
    let mut left_vectors = Vec::new();
    let mut right_vectors = Vec::new();
    for (k, &sigma) in dec.singular_values.iter().enumerate() {
        let lambda = sigma * sigma;
        if lambda <= rank_tol {
            continue;
        }
        coefficients.push(lambda);
        left_vectors.push(PureState::new_unchecked(
            left_shape.clone(),
            dec.u.column(k).iter().copied().collect(),
        )?);
        right_vectors.push(PureState::new_unchecked(
            right_shape.clone(),
            dec.v.column(k).iter().map(|z| z.conj()).collect(),
        )?);
    }
    SchmidtDecomposition::from_parts(
        shape,
        split.clone(),
        coefficients,
        left_vectors,
        right_vectors,
    )
}

/// How far a decomposition is from being a valid Schmidt decomposition of
/// a given state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionCheck {
    /// `‖ψ − Σ √λ u ⊗ v‖`.
    pub residual: f64,
    /// Worst of `|‖v‖ − 1|` and `|⟨v_α, v_β⟩|` over both vector families.
    pub orthonormality: f64,
    /// `|Σ λ − 1|`, or the most negative coefficient's magnitude if larger.
    pub normalization: f64,
}

impl DecompositionCheck {
    pub fn worst(&self) -> f64 {
        self.residual
            .max(self.orthonormality)
            .max(self.normalization)
    }
}

fn orthonormality_defect(vectors: &[PureState]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, u) in vectors.iter().enumerate() {
        worst = worst.max((u.norm() - 1.0).abs());
        for w in &vectors[a + 1..] {
            worst = worst.max(u.inner(w)?.norm());
        }
    }
    Ok(worst)
}

pub fn verify_decomposition(
    state: &PureState,
    dec: &SchmidtDecomposition,
) -> Result<DecompositionCheck> {
    if state.shape() != dec.shape() {
        return Err(Error::ShapeMismatch(format!(
            "state has dims {:?}, decomposition {:?}",
            state.shape().dims(),
            dec.shape().dims()
        )));
    }
    let residual = state.distance(&dec.reconstruct()?)?;
    let orthonormality =
        orthonormality_defect(&dec.left_vectors)?.max(orthonormality_defect(&dec.right_vectors)?);
    let sum: f64 = dec.coefficients.iter().sum();
    let most_negative = dec.coefficients.iter().fold(0.0f64, |m, &l| m.max(-l));
    Ok(DecompositionCheck {
        residual,
        orthonormality,
        normalization: (sum - 1.0).abs().max(most_negative),
    })
}

/// Groups consecutive coefficients whose neighbours differ by at most
/// `block_tol · max(1, λ_max)`.
pub fn degenerate_blocks(coefficients: &[f64], block_tol: f64) -> Vec<Vec<usize>> {
    let scale = coefficients.iter().copied().fold(1.0f64, f64::max);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &c) in coefficients.iter().enumerate() {
        match blocks.last_mut() {
            Some(block) if (coefficients[i - 1] - c).abs() <= block_tol * scale => block.push(i),
            _ => blocks.push(vec![i]),
        }
    }
    blocks
}

pub(crate) fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Mixes the Schmidt vectors of `block` by `unitary`:
/// `left_α ← Σ_β U_{βα} left_β`, `right_α ← Σ_β conj(U_{βα}) right_β`,
/// with `α, β` running over positions within the block.
///
/// The block's coefficients must agree within [`BLOCK_TOL`]; otherwise the
/// mixing would change the state and is rejected.
pub fn rotate_block(
    dec: &SchmidtDecomposition,
    block: &[usize],
    unitary: &CMatrix,
) -> Result<SchmidtDecomposition> {
    let k = block.len();
    if k == 0 {
        return Err(invalid("empty block"));
    }
    if block.iter().any(|&i| i >= dec.len()) {
        return Err(invalid(format!(
            "block {block:?} out of range for {} terms",
            dec.len()
        )));
    }
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k {
        return Err(invalid(format!("block {block:?} repeats an index")));
    }
    if unitary.nrows() != k || unitary.ncols() != k {
        return Err(invalid(format!(
            "{}x{} matrix for a block of size {k}",
            unitary.nrows(),
            unitary.ncols()
        )));
    }
    let defect = unitarity_defect(unitary);
    if defect > UNITARY_TOL {
        return Err(invalid(format!(
            "matrix is not unitary (defect {defect:e})"
        )));
    }
    let lambdas: Vec<f64> = block.iter().map(|&i| dec.coefficients[i]).collect();
    let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = dec.coefficients.iter().copied().fold(1.0f64, f64::max);
    if hi - lo > BLOCK_TOL * scale {
        return Err(invalid(format!(
            "block {block:?} is not degenerate (coefficients span {lo}..{hi})"
        )));
    }

    let mut out = dec.clone();
    for (a, &target) in block.iter().enumerate() {
        let mut left = vec![C64::new(0.0, 0.0); dec.left_vectors[target].dim()];
        let mut right = vec![C64::new(0.0, 0.0); dec.right_vectors[target].dim()];
        for (b, &src) in block.iter().enumerate() {
            let w = unitary[(b, a)];
            for (acc, x) in left.iter_mut().zip(dec.left_vectors[src].amplitudes()) {
                *acc += w * x;
            }
            let wc = w.conj();
            for (acc, x) in right.iter_mut().zip(dec.right_vectors[src].amplitudes()) {
                *acc += wc * x;
            }
        }
        out.left_vectors[target] =
            PureState::new_unchecked(dec.left_vectors[target].shape().clone(), left)?;
        out.right_vectors[target] =
            PureState::new_unchecked(dec.right_vectors[target].shape().clone(), right)?;
    }
    Ok(out)
}

/// Builds the decomposition of a state whose left marginal is maximally
/// mixed, using `basis` as the left Schmidt vectors.
///
/// For a flat spectrum every orthonormal basis of the left space is a valid
/// choice of left vectors; the partner of `b_α` is `√D ⟨b_α|ψ⟩` (contracted
/// on the left factors) and all coefficients equal `1/D`.
pub fn decomposition_from_basis(
    state: &PureState,
    split: &BipartiteSplit,
    basis: &[PureState],
) -> Result<SchmidtDecomposition> {
    let shape = state.shape().clone();
    if split.n_factors() != shape.n_factors() {
        return Err(Error::ShapeMismatch("split does not match state".into()));
    }
    let left_shape = shape.select(&split.left)?;
    let right_shape = shape.select(&split.right)?;
    let dl = left_shape.total();

    let marginal = state.partial_trace(&split.left)?;
    let deviation = marginal.max_deviation(&DensityMatrix::maximally_mixed(left_shape.clone()));
    if deviation > MIXEDNESS_TOL {
        return Err(invalid(format!(
            "left marginal is not maximally mixed (deviation {deviation:e})"
        )));
    }
    if basis.len() != dl {
        return Err(invalid(format!(
            "basis has {} vectors, left space has dimension {dl}",
            basis.len()
        )));
    }
    if basis.iter().any(|b| b.shape() != &left_shape) {
        return Err(Error::ShapeMismatch("basis vector shape".into()));
    }
    let defect = orthonormality_defect(basis)?;
    if defect > BASIS_TOL {
        return Err(invalid(format!(
            "basis is not orthonormal (defect {defect:e})"
        )));
    }

    let m = state.bipartite_matrix(&split.left)?;
    let root = (dl as f64).sqrt();
    let right_vectors = basis
        .iter()
        .map(|b| {
            let amps = (0..m.ncols())
                .map(|j| {
                    b.amplitudes()
                        .iter()
                        .enumerate()
                        .map(|(i, x)| x.conj() * m[(i, j)])
                        .sum::<C64>()
                        * root
                })
                .collect();
            PureState::new_unchecked(right_shape.clone(), amps)
        })
        .collect::<Result<Vec<_>>>()?;
    SchmidtDecomposition::from_parts(
        shape,
        split.clone(),
        vec![1.0 / dl as f64; dl],
        basis.to_vec(),
        right_vectors,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::{bell_basis, canonical_counterexample, rhs};
    use crate::sampling::{haar_state, haar_unitary};
    use crate::spectra::{hermitian_eigenvalues, LogBase};

    fn shape(d: &[usize]) -> FactorShape {
        FactorShape::new(d.to_vec()).unwrap()
    }

    fn split12_34() -> BipartiteSplit {
        BipartiteSplit::new(&[0, 1], &[2, 3], 4).unwrap()
    }

    #[test]
    fn split_validation() {
        assert!(BipartiteSplit::new(&[0], &[0, 1], 2).is_err());
        assert!(BipartiteSplit::new(&[0], &[2], 3).is_err());
        assert!(BipartiteSplit::new(&[], &[0, 1], 2).is_err());
        let s = BipartiteSplit::from_left(&[2, 0], 4).unwrap();
        assert_eq!(s.left(), &[0, 2]);
        assert_eq!(s.right(), &[1, 3]);
    }

    #[test]
    fn product_state_has_one_term() {
        let a = haar_state(&shape(&[2, 3]), 1).unwrap();
        let b = haar_state(&shape(&[2, 2]), 2).unwrap();
        let psi = a.kron(&b).unwrap();
        let dec = schmidt_decompose(&psi, &split12_34(), RANK_TOL).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.coefficients()[0] - 1.0).abs() < 1e-12);
        assert!(verify_decomposition(&psi, &dec).unwrap().worst() < 1e-12);
    }

    #[test]
    fn bell_state_is_flat() {
        let phi = PureState::max_entangled(2).unwrap();
        let split = BipartiteSplit::new(&[0], &[1], 2).unwrap();
        let dec = schmidt_decompose(&phi, &split, RANK_TOL).unwrap();
        assert_eq!(dec.len(), 2);
        for &l in dec.coefficients() {
            assert!((l - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn canonical_counterexample_is_flat_across_12_34() {
        let psi = canonical_counterexample(2).unwrap();
        let dec = schmidt_decompose(psi.state(), &split12_34(), RANK_TOL).unwrap();
        assert_eq!(dec.len(), 4);
        for &l in dec.coefficients() {
            assert!((l - 0.25).abs() < 1e-14);
        }
        assert!(verify_decomposition(psi.state(), &dec).unwrap().worst() < 1e-12);
    }

    #[test]
    fn random_state_round_trip_on_a_non_contiguous_split() {
        let s = shape(&[2, 3, 2, 2]);
        for seed in 0..10 {
            let psi = haar_state(&s, seed).unwrap();
            let split = BipartiteSplit::new(&[1, 3], &[0, 2], 4).unwrap();
            let dec = schmidt_decompose(&psi, &split, RANK_TOL).unwrap();
            assert!(verify_decomposition(&psi, &dec).unwrap().worst() < 1e-9);
            // coefficients equal the marginal spectrum
            let rho = psi.partial_trace(&[1, 3]).unwrap();
            let spec = hermitian_eigenvalues(rho.matrix(), 1e-10).unwrap();
            for (k, &ev) in spec.values().iter().enumerate() {
                let c = dec.coefficients().get(k).copied().unwrap_or(0.0);
                assert!((c - ev).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scaled_vector_reports_orthonormality_defect() {
        let psi = canonical_counterexample(2).unwrap();
        let dec = schmidt_decompose(psi.state(), &split12_34(), RANK_TOL).unwrap();
        let mut left = dec.left_vectors().to_vec();
        let doubled: Vec<C64> = left[0].amplitudes().iter().map(|a| a * 2.0).collect();
        left[0] = PureState::new_unchecked(left[0].shape().clone(), doubled).unwrap();
        let bad = SchmidtDecomposition::from_parts(
            dec.shape().clone(),
            dec.split().clone(),
            dec.coefficients().to_vec(),
            left,
            dec.right_vectors().to_vec(),
        )
        .unwrap();
        let check = verify_decomposition(psi.state(), &bad).unwrap();
        assert!((check.orthonormality - 1.0).abs() < 1e-12);
        assert!(check.residual > 0.1);
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let psi = canonical_counterexample(2).unwrap();
        let dec = schmidt_decompose(psi.state(), &split12_34(), RANK_TOL).unwrap();
        let other = haar_state(&shape(&[2, 2, 2, 3]), 3).unwrap();
        assert!(matches!(
            verify_decomposition(&other, &dec),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn block_partition_examples() {
        assert_eq!(
            degenerate_blocks(&[0.25; 4], BLOCK_TOL),
            vec![vec![0, 1, 2, 3]]
        );
        assert_eq!(
            degenerate_blocks(&[0.4, 0.3, 0.2, 0.1], BLOCK_TOL),
            vec![vec![0], vec![1], vec![2], vec![3]]
        );
        assert_eq!(
            degenerate_blocks(&[0.5, 0.5, 0.3, 0.2], BLOCK_TOL),
            vec![vec![0, 1], vec![2], vec![3]]
        );
        assert!(degenerate_blocks(&[], BLOCK_TOL).is_empty());
    }

    #[test]
    fn identity_rotation_is_a_no_op() {
        let psi = canonical_counterexample(2).unwrap();
        let dec = schmidt_decompose(psi.state(), &split12_34(), RANK_TOL).unwrap();
        let same = rotate_block(&dec, &[0, 1, 2, 3], &CMatrix::identity(4, 4)).unwrap();
        assert_eq!(same, dec);
    }

    #[test]
    fn random_rotations_keep_reconstruction() {
        let psi = canonical_counterexample(2).unwrap();
        let dec = schmidt_decompose(psi.state(), &split12_34(), RANK_TOL).unwrap();
        let base = verify_decomposition(psi.state(), &dec).unwrap().residual;
        for seed in 0..20 {
            let u = haar_unitary(4, seed).unwrap();
            let rotated = rotate_block(&dec, &[0, 1, 2, 3], &u).unwrap();
            let check = verify_decomposition(psi.state(), &rotated).unwrap();
            assert!(check.worst() <= 1e-9);
            assert!((check.residual - base).abs() <= 1e-9);
        }
    }

    #[test]
    fn phase_on_singleton_keeps_rhs() {
        let s = shape(&[2, 2, 2, 2]);
        let psi = haar_state(&s, 17).unwrap();
        let dec = schmidt_decompose(&psi, &split12_34(), RANK_TOL).unwrap();
        let before = rhs(&dec, LogBase::Natural).unwrap();
        let phase = CMatrix::from_element(1, 1, C64::from_polar(1.0, 0.7));
        let after = rotate_block(&dec, &[2], &phase).unwrap();
        assert!((rhs(&after, LogBase::Natural).unwrap() - before).abs() <= 1e-10);
    }

    #[test]
    fn rotate_block_rejects_bad_input() {
        let s = shape(&[2, 2, 2, 2]);
        let psi = haar_state(&s, 5).unwrap();
        let dec = schmidt_decompose(&psi, &split12_34(), RANK_TOL).unwrap();
        let u = haar_unitary(2, 1).unwrap();
        // distinct coefficients
        assert!(rotate_block(&dec, &[0, 1], &u).is_err());
        // not unitary
        let canon = canonical_counterexample(2).unwrap();
        let flat = schmidt_decompose(canon.state(), &split12_34(), RANK_TOL).unwrap();
        assert!(rotate_block(&flat, &[0, 1], &u.scale(2.0)).is_err());
        // size mismatch, out of range, repeats
        assert!(rotate_block(&flat, &[0, 1, 2], &u).is_err());
        assert!(rotate_block(&flat, &[3, 4], &u).is_err());
        assert!(rotate_block(&flat, &[1, 1], &u).is_err());
    }

    #[test]
    fn basis_decomposition_with_product_basis() {
        for d in [2, 3] {
            let psi = canonical_counterexample(d).unwrap();
            let left_shape = shape(&[d, d]);
            let basis: Vec<PureState> = (0..d * d)
                .map(|i| PureState::basis(left_shape.clone(), i).unwrap())
                .collect();
            let dec = decomposition_from_basis(psi.state(), &split12_34(), &basis).unwrap();
            for (b, r) in basis.iter().zip(dec.right_vectors()) {
                assert!(b.distance(r).unwrap() < 1e-12);
            }
            for &l in dec.coefficients() {
                assert!((l - 1.0 / (d * d) as f64).abs() < 1e-15);
            }
            assert!(verify_decomposition(psi.state(), &dec).unwrap().worst() <= 1e-9);
        }
    }

    #[test]
    fn basis_decomposition_with_bell_basis_conjugates() {
        for d in [2, 3] {
            let psi = canonical_counterexample(d).unwrap();
            let basis = bell_basis(d).unwrap();
            let dec = decomposition_from_basis(psi.state(), &split12_34(), &basis).unwrap();
            for (b, r) in basis.iter().zip(dec.right_vectors()) {
                assert!(b.conjugate().distance(r).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn basis_decomposition_gates() {
        let psi = haar_state(&shape(&[2, 2, 2, 2]), 4).unwrap();
        let basis = bell_basis(2).unwrap();
        assert!(matches!(
            decomposition_from_basis(&psi, &split12_34(), &basis),
            Err(Error::InvalidInput(_))
        ));
        let canon = canonical_counterexample(2).unwrap();
        assert!(decomposition_from_basis(canon.state(), &split12_34(), &basis[..3]).is_err());
        let mut dup = basis.clone();
        dup[1] = dup[0].clone();
        assert!(decomposition_from_basis(canon.state(), &split12_34(), &dup).is_err());
    }
}
