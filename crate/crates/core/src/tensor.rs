//! Multi-factor pure states over `C^{d_1} ⊗ ... ⊗ C^{d_n}`.
//!
//! Amplitudes are stored row-major with factor 0 most significant, so the
//! linear index of `(i_0, ..., i_{n-1})` is `Σ_j i_j · stride_j` where
//! `stride_{n-1} = 1`. Factor positions are 0-based throughout the API.
//!
//! Marginals come out as [`DensityMatrix`] values via [`PureState::partial_trace`].

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest total dimension a [`FactorShape`] may describe.
pub const MAX_TOTAL_DIM: usize = 1_000_000;

/// Norm tolerance enforced on every constructed [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// Norm tolerance applied when loading a state file.
pub const FILE_NORM_TOL: f64 = 1e-9;

/// Hermiticity and trace tolerance for [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;

/// Ordered local dimensions of a tensor product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl TryFrom<Vec<usize>> for FactorShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        FactorShape::new(dims)
    }
}

impl From<FactorShape> for Vec<usize> {
    fn from(shape: FactorShape) -> Self {
        shape.dims
    }
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("a shape needs at least one factor"));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(invalid(format!("factor {pos} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or(Error::SizeCap {
                    total: dims.iter().fold(1usize, |a, &b| a.saturating_mul(b)),
                    cap: MAX_TOTAL_DIM,
                })?;
        }
        Ok(FactorShape { dims })
    }

    /// `n` factors of dimension `d` each.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        FactorShape::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides, factor 0 most significant.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * self.dims[j + 1];
        }
        strides
    }

    pub fn flatten(&self, multi_index: &[usize]) -> Result<usize> {
        if multi_index.len() != self.dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "multi-index has {} components, shape has {} factors",
                multi_index.len(),
                self.dims.len()
            )));
        }
        let mut linear = 0;
        for (j, (&i, &d)) in multi_index.iter().zip(&self.dims).enumerate() {
            if i >= d {
                return Err(invalid(format!(
                    "index component {j} = {i} out of range for dimension {d}"
                )));
            }
            linear = linear * d + i;
        }
        Ok(linear)
    }

    pub fn unflatten(&self, linear: usize) -> Result<Vec<usize>> {
        let total = self.total();
        if linear >= total {
            return Err(invalid(format!(
                "linear index {linear} out of range for total dimension {total}"
            )));
        }
        let mut rest = linear;
        let mut out = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            out[j] = rest % self.dims[j];
            rest /= self.dims[j];
        }
        Ok(out)
    }

    /// Shape of the listed factors, in the listed order.
    pub fn select(&self, factors: &[usize]) -> Result<FactorShape> {
        let dims = factors
            .iter()
            .map(|&f| {
                self.dims
                    .get(f)
                    .copied()
                    .ok_or_else(|| invalid(format!("factor {f} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        FactorShape::new(dims)
    }

    pub fn concat(&self, other: &FactorShape) -> Result<FactorShape> {
        FactorShape::new(self.dims.iter().chain(&other.dims).copied().collect())
    }

    /// For each linear index of the permuted shape (new factor `k` is old
    /// factor `perm[k]`), the linear index it reads from in `self`.
    fn gather(&self, perm: &[usize]) -> Vec<usize> {
        let old_strides = self.strides();
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let total = self.total();
        let mut out = Vec::with_capacity(total);
        let mut counter = vec![0usize; perm.len()];
        let mut offset = 0usize;
        for _ in 0..total {
            out.push(offset);
            // odometer increment, last factor fastest
            for k in (0..perm.len()).rev() {
                counter[k] += 1;
                offset += src_strides[k];
                if counter[k] < new_dims[k] {
                    break;
                }
                offset -= src_strides[k] * new_dims[k];
                counter[k] = 0;
            }
        }
        out
    }
}

pub fn flatten_index(multi_index: &[usize], shape: &FactorShape) -> Result<usize> {
    shape.flatten(multi_index)
}

pub fn unflatten_index(linear: usize, shape: &FactorShape) -> Result<Vec<usize>> {
    shape.unflatten(linear)
}

/// Checks that `perm` is a permutation of `0..n`.
pub fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(invalid(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(invalid(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Sorted, deduplicated-checked factor set.
pub(crate) fn normalize_factor_set(factors: &[usize], n: usize) -> Result<Vec<usize>> {
    if factors.is_empty() {
        return Err(invalid("factor set is empty"));
    }
    let mut sorted = factors.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(invalid(format!("factor {} listed twice", w[0])));
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= n {
            return Err(invalid(format!(
                "factor {last} out of range for {n} factors"
            )));
        }
    }
    Ok(sorted)
}

fn complement(sorted: &[usize], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|f| sorted.binary_search(f).is_err())
        .collect()
}

/// A normalized amplitude vector on a [`FactorShape`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    shape: FactorShape,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps `amplitudes`; fails unless the norm is 1 within [`NORM_TOL`].
    pub fn new(shape: FactorShape, amplitudes: Vec<C64>) -> Result<Self> {
        let state = PureState::new_unchecked(shape, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(shape: FactorShape, amplitudes: Vec<C64>) -> Result<Self> {
        let mut state = PureState::new_unchecked(shape, amplitudes)?;
        let norm = state.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    /// Length-checked only. Used for hand-built vectors that may violate
    /// normalization on purpose (defect injection, verification tests).
    pub(crate) fn new_unchecked(shape: FactorShape, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != shape.total() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                shape.total()
            )));
        }
        Ok(PureState { shape, amplitudes })
    }

    /// Computational basis vector `e_index`.
    pub fn basis(shape: FactorShape, index: usize) -> Result<Self> {
        let total = shape.total();
        if index >= total {
            return Err(invalid(format!(
                "basis index {index} out of range for dimension {total}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); total];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(PureState { shape, amplitudes })
    }

    /// `(1/√d) Σ_j e_j ⊗ e_j` on dims `(d, d)`.
    pub fn max_entangled(d: usize) -> Result<Self> {
        let shape = FactorShape::uniform(d, 2)?;
        let amp = 1.0 / (d as f64).sqrt();
        let mut amplitudes = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            amplitudes[j * d + j] = C64::new(amp, 0.0);
        }
        Ok(PureState { shape, amplitudes })
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn n_factors(&self) -> usize {
        self.shape.n_factors()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "inner product of {:?} and {:?}",
                self.shape.dims(),
                other.shape.dims()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance between amplitude vectors of equal shape.
    pub fn distance(&self, other: &PureState) -> Result<f64> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "distance between {:?} and {:?}",
                self.shape.dims(),
                other.shape.dims()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `self ⊗ other`; the factor list is the concatenation of both.
    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let shape = self.shape.concat(&other.shape)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(PureState { shape, amplitudes })
    }

    /// Reorders factors so that new factor `k` is old factor `perm[k]`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<PureState> {
        validate_permutation(perm, self.n_factors())?;
        let shape = FactorShape {
            dims: perm.iter().map(|&p| self.shape.dims[p]).collect(),
        };
        let amplitudes = self
            .shape
            .gather(perm)
            .into_iter()
            .map(|src| self.amplitudes[src])
            .collect();
        Ok(PureState { shape, amplitudes })
    }

    /// Applies the `d × d` matrix `op` to factor `factor` (identity elsewhere).
    pub fn apply_on_factor(&self, factor: usize, op: &CMatrix) -> Result<PureState> {
        let d = *self
            .shape
            .dims
            .get(factor)
            .ok_or_else(|| invalid(format!("factor {factor} out of range")))?;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} operator on a factor of dimension {d}",
                op.nrows(),
                op.ncols()
            )));
        }
        let stride = self.shape.strides()[factor];
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (base, _) in self.amplitudes.iter().enumerate() {
            if !(base / stride).is_multiple_of(d) {
                continue;
            }
            for i in 0..d {
                out[base + i * stride] = (0..d)
                    .map(|j| op[(i, j)] * self.amplitudes[base + j * stride])
                    .sum();
            }
        }
        Ok(PureState {
            shape: self.shape.clone(),
            amplitudes: out,
        })
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugate(&self) -> PureState {
        PureState {
            shape: self.shape.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(),
        }
    }

    /// Reshapes into a `D_left × D_right` matrix, where the row index runs
    /// over the `left` factors (in the given order) and the column index
    /// over the remaining factors in their original order.
    pub fn bipartite_matrix(&self, left: &[usize]) -> Result<CMatrix> {
        let n = self.n_factors();
        let mut perm = left.to_vec();
        let sorted = normalize_factor_set(left, n)?;
        perm.extend(complement(&sorted, n));
        validate_permutation(&perm, n)?;
        let rows: usize = left.iter().map(|&f| self.shape.dims[f]).product();
        let cols = self.dim() / rows;
        let src = self.shape.gather(&perm);
        Ok(CMatrix::from_fn(rows, cols, |r, c| {
            self.amplitudes[src[r * cols + c]]
        }))
    }

    /// `tr_{complement}(|ψ⟩⟨ψ|)` on the `keep` factors, in their original
    /// relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_factor_set(keep, self.n_factors())?;
        let shape = self.shape.select(&keep)?;
        let a = self.bipartite_matrix(&keep)?;
        let rho = &a * a.adjoint();
        let rho = (&rho + rho.adjoint()).scale(0.5);
        DensityMatrix::new(rho, shape)
    }

    /// Brute-force partial trace: sums `ψ_i ψ_j^*` over every pair of
    /// full multi-indices that agree on the traced factors. Quadratic in
    /// the total dimension; meant as a cross-check for [`Self::partial_trace`].
    pub fn partial_trace_naive(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_factor_set(keep, self.n_factors())?;
        let traced = complement(&keep, self.n_factors());
        let shape = self.shape.select(&keep)?;
        let kd = shape.total();
        let mut rho = CMatrix::zeros(kd, kd);
        let multis: Vec<Vec<usize>> = (0..self.dim())
            .map(|i| self.shape.unflatten(i))
            .collect::<Result<_>>()?;
        let kept_index = |m: &[usize]| {
            keep.iter()
                .fold(0, |acc, &f| acc * self.shape.dims[f] + m[f])
        };
        for (i, mi) in multis.iter().enumerate() {
            for (j, mj) in multis.iter().enumerate() {
                if traced.iter().all(|&f| mi[f] == mj[f]) {
                    rho[(kept_index(mi), kept_index(mj))] +=
                        self.amplitudes[i] * self.amplitudes[j].conj();
                }
            }
        }
        DensityMatrix::new(rho, shape)
    }

    pub fn from_json_str(text: &str) -> Result<PureState> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))?;
        file.into_state()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&StateFile::from(self)).expect("state file serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PureState> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
        PureState::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string())
            .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))
    }
}

/// On-disk form of a [`PureState`]: `{"dims": [...], "amplitudes": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    /// Validates dims, length, finiteness and the norm (within
    /// [`FILE_NORM_TOL`]), then rescales to unit norm.
    pub fn into_state(self) -> Result<PureState> {
        let shape = FactorShape::new(self.dims).map_err(|e| Error::StateFile(e.to_string()))?;
        if self.amplitudes.len() != shape.total() {
            return Err(Error::StateFile(format!(
                "{} amplitudes for dims {:?} (expected {})",
                self.amplitudes.len(),
                shape.dims(),
                shape.total()
            )));
        }
        if self.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::StateFile("non-finite amplitude".into()));
        }
        let amplitudes: Vec<C64> = self
            .amplitudes
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > FILE_NORM_TOL {
            return Err(Error::StateFile(format!(
                "amplitudes have norm {norm}, expected 1 within {FILE_NORM_TOL:e}"
            )));
        }
        PureState::normalized(shape, amplitudes)
    }
}

impl From<&PureState> for StateFile {
    fn from(state: &PureState) -> Self {
        StateFile {
            dims: state.shape.dims.clone(),
            amplitudes: state.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Hermitian, unit-trace operator on a set of factors.
///
/// Construction checks Hermiticity and trace; positivity is checked by the
/// entropy routine, which owns the clipping policy.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    shape: FactorShape,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix, shape: FactorShape) -> Result<Self> {
        let n = shape.total();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix for dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = hermitian_defect(&matrix);
        if asym > DENSITY_TOL {
            return Err(invalid(format!(
                "matrix is not Hermitian (defect {asym:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DENSITY_TOL || trace.im.abs() > DENSITY_TOL {
            return Err(invalid(format!("trace is {trace}, expected 1")));
        }
        Ok(DensityMatrix { matrix, shape })
    }

    /// `I / n` on `shape`.
    pub fn maximally_mixed(shape: FactorShape) -> Self {
        let n = shape.total();
        let matrix = CMatrix::identity(n, n).scale(1.0 / n as f64);
        DensityMatrix { matrix, shape }
    }

    pub fn projector(state: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        DensityMatrix {
            matrix: &v * v.adjoint(),
            shape: state.shape.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(
            self.matrix.kronecker(&other.matrix),
            self.shape.concat(&other.shape)?,
        )
    }

    /// `U ρ U†` for a unitary `U` of matching size.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::ShapeMismatch("unitary size".into()));
        }
        let m = unitary * &self.matrix * unitary.adjoint();
        let m = (&m + m.adjoint()).scale(0.5);
        DensityMatrix::new(m, self.shape.clone())
    }

    /// Largest absolute entrywise difference.
    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        max_entry_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    max_entry_diff(m, &m.adjoint())
}

pub(crate) fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &[usize]) -> FactorShape {
        FactorShape::new(d.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(
            flatten_index(&[1, 0, 1, 0], &shape(&[2, 2, 2, 2])).unwrap(),
            10
        );
        assert_eq!(flatten_index(&[0, 0, 0], &shape(&[3, 5, 2])).unwrap(), 0);
        assert_eq!(flatten_index(&[1, 2], &shape(&[2, 3])).unwrap(), 5);
        assert!(flatten_index(&[2, 0], &shape(&[2, 3])).is_err());
        assert!(flatten_index(&[1], &shape(&[2, 3])).is_err());
    }

    #[test]
    fn unflatten_examples() {
        assert_eq!(
            unflatten_index(10, &shape(&[2, 2, 2, 2])).unwrap(),
            vec![1, 0, 1, 0]
        );
        assert_eq!(unflatten_index(0, &shape(&[4, 3])).unwrap(), vec![0, 0]);
        assert_eq!(unflatten_index(5, &shape(&[2, 3])).unwrap(), vec![1, 2]);
        assert!(unflatten_index(6, &shape(&[2, 3])).is_err());
    }

    #[test]
    fn flatten_unflatten_exhaustive() {
        for dims in [
            vec![2, 2, 2, 2],
            vec![3, 2, 3, 2],
            vec![4, 4, 4, 4, 4, 4],
            vec![7],
            vec![1, 5, 1],
        ] {
            let s = shape(&dims);
            assert!(s.total() <= 4096);
            for i in 0..s.total() {
                let m = s.unflatten(i).unwrap();
                assert_eq!(s.flatten(&m).unwrap(), i);
            }
        }
    }

    #[test]
    fn shape_validation() {
        assert!(FactorShape::new(vec![]).is_err());
        assert!(FactorShape::new(vec![2, 0]).is_err());
        assert!(matches!(
            FactorShape::new(vec![1001, 1000]),
            Err(Error::SizeCap { .. })
        ));
        assert!(FactorShape::new(vec![1000, 1000]).is_ok());
        assert!(matches!(
            FactorShape::new(vec![usize::MAX, 4]),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn kron_of_basis_vectors() {
        let e0 = PureState::basis(shape(&[2]), 0).unwrap();
        let e1 = PureState::basis(shape(&[2]), 1).unwrap();
        let k = e0.kron(&e1).unwrap();
        assert_eq!(k, PureState::basis(shape(&[2, 2]), 1).unwrap());
    }

    #[test]
    fn kron_preserves_norm() {
        let phi = PureState::max_entangled(2).unwrap();
        let k = phi.kron(&phi).unwrap();
        assert_eq!(k.shape().dims(), &[2, 2, 2, 2]);
        assert!((k.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn permute_swaps_factors() {
        let e01 = PureState::basis(shape(&[2, 2]), 1).unwrap();
        let e10 = PureState::basis(shape(&[2, 2]), 2).unwrap();
        assert_eq!(e01.permute_factors(&[1, 0]).unwrap(), e10);
        assert_eq!(e01.permute_factors(&[0, 1]).unwrap(), e01);
        assert!(e01.permute_factors(&[0, 0]).is_err());
        assert!(e01.permute_factors(&[0]).is_err());
    }

    #[test]
    fn permute_moves_dims() {
        // e_(1,2) on (2,3) becomes e_(2,1) on (3,2)
        let s = PureState::basis(shape(&[2, 3]), 5).unwrap();
        let p = s.permute_factors(&[1, 0]).unwrap();
        assert_eq!(p.shape().dims(), &[3, 2]);
        assert_eq!(p, PureState::basis(shape(&[3, 2]), 5).unwrap());
        let s = PureState::basis(shape(&[2, 3]), 4).unwrap(); // (1,1)
        let p = s.permute_factors(&[1, 0]).unwrap();
        assert_eq!(p, PureState::basis(shape(&[3, 2]), 3).unwrap()); // (1,1)
    }

    #[test]
    fn apply_on_factor_flips_a_qubit() {
        let x =
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s = PureState::basis(shape(&[2, 3, 2]), 0).unwrap();
        let flipped = s.apply_on_factor(2, &x).unwrap();
        assert_eq!(flipped, PureState::basis(shape(&[2, 3, 2]), 1).unwrap());
        let flipped = s.apply_on_factor(0, &x).unwrap();
        assert_eq!(flipped, PureState::basis(shape(&[2, 3, 2]), 6).unwrap());
        assert!(s.apply_on_factor(1, &x).is_err());
        assert!(s.apply_on_factor(3, &x).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let r = 1.0 / 2f64.sqrt();
        let s = PureState::new(shape(&[2]), vec![c(0.0, r), c(r, 0.0)]).unwrap();
        let cs = s.conjugate();
        assert_eq!(cs.amplitudes(), &[c(0.0, -r), c(r, 0.0)]);
        let real = PureState::max_entangled(3).unwrap();
        assert_eq!(real.conjugate(), real);
    }

    #[test]
    fn partial_trace_of_product_is_projector() {
        let r = 1.0 / 2f64.sqrt();
        let a = PureState::new(shape(&[2]), vec![c(r, 0.0), c(0.0, r)]).unwrap();
        let b = PureState::basis(shape(&[3]), 2).unwrap();
        let rho = a.kron(&b).unwrap().partial_trace(&[0]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::projector(&a)) < 1e-15);
        let naive = a.kron(&b).unwrap().partial_trace_naive(&[0]).unwrap();
        assert!(naive.max_deviation(&DensityMatrix::projector(&a)) < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_is_mixed() {
        let phi = PureState::max_entangled(2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(shape(&[2]));
        for keep in [[0], [1]] {
            assert!(phi.partial_trace(&keep).unwrap().max_deviation(&mixed) < 1e-15);
            assert!(
                phi.partial_trace_naive(&keep)
                    .unwrap()
                    .max_deviation(&mixed)
                    < 1e-15
            );
        }
    }

    #[test]
    fn partial_trace_keep_all_is_projector() {
        let phi = PureState::max_entangled(3).unwrap();
        let rho = phi.partial_trace(&[1, 0]).unwrap();
        assert!(rho.max_deviation(&DensityMatrix::projector(&phi)) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let phi = PureState::max_entangled(2).unwrap();
        assert!(phi.partial_trace(&[]).is_err());
        assert!(phi.partial_trace(&[2]).is_err());
        assert!(phi.partial_trace(&[0, 0]).is_err());
        assert!(phi.partial_trace_naive(&[]).is_err());
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            PureState::new(shape(&[2]), vec![c(0.5, 0.0), c(0.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(PureState::new(shape(&[2]), vec![c(1.0, 0.0)]).is_err());
        assert!(PureState::normalized(shape(&[2]), vec![c(0.0, 0.0); 2]).is_err());
    }

    #[test]
    fn state_file_round_trip_and_gates() {
        let phi = PureState::max_entangled(2).unwrap();
        let back = PureState::from_json_str(&phi.to_json_string()).unwrap();
        assert!(back.distance(&phi).unwrap() < 1e-15);

        let half = r#"{"dims":[2],"amplitudes":[[0.5,0.0],[0.0,0.0]]}"#;
        assert!(matches!(
            PureState::from_json_str(half),
            Err(Error::StateFile(_))
        ));
        let bad_len = r#"{"dims":[2,2],"amplitudes":[[1.0,0.0]]}"#;
        assert!(PureState::from_json_str(bad_len).is_err());
        let bad_dims = r#"{"dims":[0],"amplitudes":[]}"#;
        assert!(PureState::from_json_str(bad_dims).is_err());
        assert!(PureState::from_json_str("not json").is_err());
        // slightly off but within the file tolerance: accepted and renormalized
        let near = r#"{"dims":[1],"amplitudes":[[1.0000000001,0.0]]}"#;
        let s = PureState::from_json_str(near).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let s = shape(&[2]);
        let mut m = CMatrix::identity(2, 2).scale(0.5);
        assert!(DensityMatrix::new(m.clone(), s.clone()).is_ok());
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone(), s.clone()).is_err());
        let m = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(m, s.clone()).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(3, 3).scale(1.0 / 3.0), s).is_err());
    }
}
