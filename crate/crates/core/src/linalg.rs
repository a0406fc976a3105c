//! Dense operator algebra on truncated multi-mode Fock spaces.
//!
//! Basis states are ordered row-major over the modes: mode 0 is the most
//! significant digit, so `tensor(a, b)` places the modes of `a` first.
//!
//! Hermitian eigendecompositions first split the matrix into the connected
//! components of its exact nonzero pattern. Fock-basis operators built from
//! thermal states and photon-number superpositions are mostly block diagonal,
//! and the split keeps the cost proportional to the blocks rather than the
//! full dimension.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default capacity guard on the total dimension of any constructed operator.
pub const DEFAULT_MAX_TOTAL_DIM: usize = 4096;

/// Hermiticity tolerance (max absolute elementwise deviation).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in `[-PSD_TOL, 0)` are treated as roundoff.
pub const PSD_TOL: f64 = 1e-12;

/// Eigenvalues below this are clamped to zero before fractional powers.
pub const EIGEN_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeSpace {
    dims: Vec<usize>,
}

impl ModeSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::arg("a mode space needs at least one mode"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::arg(format!("mode dimensions must be >= 1, got {dims:?}")));
        }
        Ok(ModeSpace { dims })
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn concat(&self, other: &ModeSpace) -> ModeSpace {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        ModeSpace { dims }
    }

    /// Flat basis index of a list of per-mode occupations.
    pub fn index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.dims.len() {
            return Err(Error::arg(format!(
                "expected {} occupations, got {}",
                self.dims.len(),
                occupations.len()
            )));
        }
        let mut idx = 0;
        for (&n, &d) in occupations.iter().zip(&self.dims) {
            if n >= d {
                return Err(Error::arg(format!("occupation {n} outside mode dimension {d}")));
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    /// Inverse of [`ModeSpace::index`].
    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for (slot, &d) in occ.iter_mut().zip(&self.dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        occ
    }

    fn check_capacity(&self, limit: usize) -> Result<()> {
        // saturating product so absurd requests still report instead of overflowing
        let requested = self.dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d));
        if requested > limit {
            return Err(Error::Capacity { requested, limit });
        }
        Ok(())
    }
}

/// Normalized pure state on a [`ModeSpace`].
#[derive(Clone, Debug)]
pub struct StateVector {
    space: ModeSpace,
    amplitudes: DVector<C64>,
    norm_deficit: f64,
}

impl StateVector {
    /// Renormalizes `amplitudes` and records `1 - ||amplitudes||^2` as the deficit.
    pub fn normalized(space: ModeSpace, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::arg(format!(
                "amplitude vector has length {}, space has dimension {}",
                amplitudes.len(),
                space.total_dim()
            )));
        }
        let norm_sq = amplitudes.norm_squared();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::arg("cannot normalize a zero or non-finite vector"));
        }
        let amplitudes = amplitudes.unscale(norm_sq.sqrt());
        Ok(StateVector { space, amplitudes, norm_deficit: 1.0 - norm_sq })
    }

    /// Basis state with the given per-mode occupations.
    pub fn basis(space: ModeSpace, occupations: &[usize]) -> Result<Self> {
        let idx = space.index(occupations)?;
        let mut amps = DVector::zeros(space.total_dim());
        amps[idx] = C64::new(1.0, 0.0);
        Ok(StateVector { space, amplitudes: amps, norm_deficit: 0.0 })
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// Squared-norm mass removed by renormalization at construction.
    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_space(&self.space, &other.space)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> Operator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Operator { space: self.space.clone(), matrix: m }
    }

    /// Mean photon number of one mode.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        check_mode(&self.space, mode)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * self.space.occupations(i)[mode] as f64)
            .sum())
    }
}

#[derive(Clone, Debug)]
pub struct Operator {
    space: ModeSpace,
    matrix: DMatrix<C64>,
}

/// Diagnostics of the density-operator invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_deficit: f64,
}

impl Operator {
    pub fn new(space: ModeSpace, matrix: DMatrix<C64>) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::arg(format!(
                "matrix is {}x{}, space has dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: ModeSpace) -> Self {
        let n = space.total_dim();
        Operator { space, matrix: DMatrix::identity(n, n) }
    }

    pub fn diagonal(space: ModeSpace, entries: &[f64]) -> Result<Self> {
        if entries.len() != space.total_dim() {
            return Err(Error::arg("diagonal length does not match the space dimension"));
        }
        let d = DVector::from_iterator(entries.len(), entries.iter().map(|&x| C64::new(x, 0.0)));
        Ok(Operator { space, matrix: DMatrix::from_diagonal(&d) })
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                let d = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        same_space(&self.space, &other.space)?;
        Ok(Operator { space: self.space.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator { space: self.space.clone(), matrix: self.matrix.scale(factor) }
    }

    /// `U ρ U†` for a unitary (or any square) `u` on the same space.
    pub fn conjugate_by(&self, u: &Operator) -> Result<Operator> {
        same_space(&self.space, &u.space)?;
        Ok(Operator { space: self.space.clone(), matrix: &u.matrix * &self.matrix * u.matrix.adjoint() })
    }

    pub fn apply(&self, psi: &StateVector) -> Result<DVector<C64>> {
        same_space(&self.space, &psi.space)?;
        Ok(&self.matrix * &psi.amplitudes)
    }

    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        check_mode(&self.space, mode)?;
        Ok((0..self.dim())
            .map(|i| self.matrix[(i, i)].re * self.space.occupations(i)[mode] as f64)
            .sum())
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::arg(format!("operator is not Hermitian (defect {defect:e})")));
        }
        Ok(HermitianEigen::new(&self.matrix))
    }

    /// Checks Hermiticity, positivity and trace against `trace_budget`.
    pub fn check_density(&self, trace_budget: f64) -> Result<DensityReport> {
        let hermiticity_defect = self.hermiticity_defect();
        if hermiticity_defect > HERMITIAN_TOL {
            return Err(Error::arg(format!(
                "density operator is not Hermitian (defect {hermiticity_defect:e})"
            )));
        }
        let min_eigenvalue = HermitianEigen::new(&self.matrix).min_value();
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        let trace_deficit = 1.0 - self.trace().re;
        if trace_deficit.abs() > trace_budget {
            return Err(Error::Consistency(format!(
                "density trace deficit {trace_deficit:e} exceeds budget {trace_budget:e}"
            )));
        }
        Ok(DensityReport { hermiticity_defect, min_eigenvalue, trace_deficit })
    }
}

/// Eigendecomposition of a Hermitian matrix, split into independent blocks.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    dim: usize,
    blocks: Vec<EigenBlock>,
}

/// One invariant block: basis `indices`, and eigenvectors as columns over them.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// The input is assumed Hermitian; only the upper triangle's pattern and the
    /// symmetrized blocks are used.
    pub fn new(matrix: &DMatrix<C64>) -> Self {
        let n = matrix.nrows();
        let zero = C64::new(0.0, 0.0);
        let mut uf = UnionFind::new(n);
        for j in 0..n {
            for i in 0..j {
                if matrix[(i, j)] != zero || matrix[(j, i)] != zero {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            let root = uf.find(i);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(i);
        }

        let blocks = groups
            .into_iter()
            .map(|indices| {
                if indices.len() == 1 {
                    let i = indices[0];
                    return EigenBlock {
                        indices,
                        values: vec![matrix[(i, i)].re],
                        vectors: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
                    };
                }
                let k = indices.len();
                let sub = DMatrix::from_fn(k, k, |a, b| {
                    let (i, j) = (indices[a], indices[b]);
                    (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5
                });
                let eig = SymmetricEigen::new(sub);
                EigenBlock { indices, values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors }
            })
            .collect();
        HermitianEigen { dim: n, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[EigenBlock] {
        &self.blocks
    }

    pub fn values(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Reassembles `V f(Λ) V†`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for block in &self.blocks {
            let k = block.indices.len();
            let fv: Vec<C64> = block.values.iter().map(|&x| f(x)).collect();
            for a in 0..k {
                for b in 0..k {
                    let mut acc = C64::new(0.0, 0.0);
                    for (e, w) in fv.iter().enumerate() {
                        if *w != C64::new(0.0, 0.0) {
                            acc += block.vectors[(a, e)] * w * block.vectors[(b, e)].conj();
                        }
                    }
                    out[(block.indices[a], block.indices[b])] = acc;
                }
            }
        }
        out
    }
}

/// Eigenvalue after clamping roundoff: errors below `-PSD_TOL`, zero below `EIGEN_FLOOR`.
pub fn clamp_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: lambda });
    }
    Ok(if lambda < EIGEN_FLOOR { 0.0 } else { lambda })
}

/// `λ^s` with `0^s := 0` for every `s`, including `s = 0`.
pub fn support_power(lambda: f64, s: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        lambda.powf(s)
    }
}

/// A pair of clamped, strictly positive eigenvalues with the squared overlap
/// of their eigenvectors.
#[derive(Clone, Copy, Debug)]
pub struct OverlapTerm {
    pub lambda: f64,
    pub mu: f64,
    pub weight: f64,
}

/// All `(λ_i, μ_j, |⟨a_i|b_j⟩|²)` with `λ_i, μ_j > 0` after clamping.
///
/// `Tr[ρ^s σ^(1-s)] = Σ λ^s μ^(1-s) w` over these terms.
pub fn overlap_terms(a: &HermitianEigen, b: &HermitianEigen) -> Result<Vec<OverlapTerm>> {
    if a.dim != b.dim {
        return Err(Error::arg("eigendecompositions live on different dimensions"));
    }
    // basis index -> (block of b, row within block)
    let mut locate = vec![(usize::MAX, 0usize); b.dim];
    for (bi, block) in b.blocks.iter().enumerate() {
        for (row, &idx) in block.indices.iter().enumerate() {
            locate[idx] = (bi, row);
        }
    }
    let mut terms = Vec::new();
    for ablock in &a.blocks {
        let avals: Vec<f64> = ablock.values.iter().map(|&x| clamp_eigenvalue(x)).collect::<Result<_>>()?;
        if avals.iter().all(|&x| x == 0.0) {
            continue;
        }
        let mut touched: Vec<usize> = ablock.indices.iter().map(|&i| locate[i].0).collect();
        touched.sort_unstable();
        touched.dedup();
        for bi in touched {
            let bblock = &b.blocks[bi];
            let bvals: Vec<f64> = bblock.values.iter().map(|&x| clamp_eigenvalue(x)).collect::<Result<_>>()?;
            let shared: Vec<(usize, usize)> = ablock
                .indices
                .iter()
                .enumerate()
                .filter(|(_, &idx)| locate[idx].0 == bi)
                .map(|(ra, &idx)| (ra, locate[idx].1))
                .collect();
            for (ea, &lambda) in avals.iter().enumerate() {
                if lambda == 0.0 {
                    continue;
                }
                for (eb, &mu) in bvals.iter().enumerate() {
                    if mu == 0.0 {
                        continue;
                    }
                    let amp: C64 = shared
                        .iter()
                        .map(|&(ra, rb)| ablock.vectors[(ra, ea)].conj() * bblock.vectors[(rb, eb)])
                        .sum();
                    let weight = amp.norm_sqr();
                    if weight > 0.0 {
                        terms.push(OverlapTerm { lambda, mu, weight });
                    }
                }
            }
        }
    }
    Ok(terms)
}

pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    tensor_with_limit(a, b, DEFAULT_MAX_TOTAL_DIM)
}

pub fn tensor_with_limit(a: &Operator, b: &Operator, max_total_dim: usize) -> Result<Operator> {
    let space = a.space.concat(&b.space);
    space.check_capacity(max_total_dim)?;
    Ok(Operator { space, matrix: a.matrix.kronecker(&b.matrix) })
}

pub fn tensor_states(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let space = a.space.concat(&b.space);
    space.check_capacity(DEFAULT_MAX_TOTAL_DIM)?;
    StateVector::normalized(space, a.amplitudes.kronecker(&b.amplitudes))
}

/// Traces out every mode not listed in `keep`; kept modes retain their order.
pub fn partial_trace(rho: &Operator, keep: &[usize]) -> Result<Operator> {
    let nmodes = rho.space.num_modes();
    if keep.is_empty() {
        return Err(Error::arg("partial trace needs a nonempty set of kept modes"));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&m| m >= nmodes) {
        return Err(Error::arg(format!("mode {bad} out of range for {nmodes} modes")));
    }
    if keep.len() == nmodes {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..nmodes).filter(|m| !keep.contains(m)).collect();
    let dims = rho.space.dims();
    let kept_space = ModeSpace::new(keep.iter().map(|&m| dims[m]).collect())?;
    let traced_space = ModeSpace::new(traced.iter().map(|&m| dims[m]).collect())?;

    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); traced_space.total_dim()];
    for full in 0..rho.dim() {
        let occ = rho.space.occupations(full);
        let k_occ: Vec<usize> = keep.iter().map(|&m| occ[m]).collect();
        let t_occ: Vec<usize> = traced.iter().map(|&m| occ[m]).collect();
        let ki = kept_space.index(&k_occ)?;
        let ti = traced_space.index(&t_occ)?;
        groups[ti].push((ki, full));
    }
    let nk = kept_space.total_dim();
    let mut out = DMatrix::zeros(nk, nk);
    for group in &groups {
        for &(ki, fi) in group {
            for &(kj, fj) in group {
                out[(ki, kj)] += rho.matrix[(fi, fj)];
            }
        }
    }
    Ok(Operator { space: kept_space, matrix: out })
}

/// `ρ^s` through the eigendecomposition, with `0^s := 0`.
pub fn fractional_power(rho: &Operator, s: f64) -> Result<Operator> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::arg(format!("exponent {s} outside [0, 1]")));
    }
    let eig = rho.eigen()?;
    for v in eig.values() {
        clamp_eigenvalue(v)?;
    }
    let matrix = eig.map(|x| {
        let x = clamp_eigenvalue(x).unwrap_or(0.0);
        C64::new(support_power(x, s), 0.0)
    });
    Ok(Operator { space: rho.space.clone(), matrix })
}

/// Sum of absolute eigenvalues; Hermitian arguments only.
pub fn trace_norm(a: &Operator) -> Result<f64> {
    Ok(a.eigen()?.values().iter().map(|x| x.abs()).sum())
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(psi: &StateVector, rho: &Operator) -> Result<f64> {
    same_space(&psi.space, &rho.space)?;
    let v = &rho.matrix * &psi.amplitudes;
    Ok(psi.amplitudes.dotc(&v).re)
}

/// `exp(t G)` for an anti-Hermitian generator `G`, via the Hermitian `iG`.
pub fn exp_anti_hermitian(generator: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let h = generator * C64::new(0.0, 1.0);
    let eig = HermitianEigen::new(&h);
    // exp(tG) = exp(-i t H)
    eig.map(|lambda| C64::from_polar(1.0, -t * lambda))
}

/// Truncated annihilation operator on `dim` levels.
pub fn annihilation(dim: usize) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    Ok(0.5 * trace_norm(&a.sub(b)?)?)
}

fn same_space(a: &ModeSpace, b: &ModeSpace) -> Result<()> {
    if a != b {
        return Err(Error::arg(format!("mode spaces differ: {:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(())
}

fn check_mode(space: &ModeSpace, mode: usize) -> Result<()> {
    if mode >= space.num_modes() {
        return Err(Error::arg(format!("mode {mode} out of range for {} modes", space.num_modes())));
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
