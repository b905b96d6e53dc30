//! Bloch hypermatrix representation of multipartite operators.
//!
//! Each local operator space `End(ℂ^d)` gets a basis of Hermitian matrices
//! `σ_0 = I, σ_1, …, σ_{d²-1}` with `tr(σ_i σ_j) = d δ_ij`. A density operator
//! expands as `ρ = Σ a_{i_1⋯i_n} σ_{i_1} ⊗ ⋯ ⊗ σ_{i_n}`, so
//! `a_I = tr(ρ σ_{i_1} ⊗ ⋯ ⊗ σ_{i_n}) / (d_1⋯d_n)` and the coefficient tensor has
//! format `d_1² × ⋯ × d_n²`.
//!
//! A local operation `ρ ↦ (A_1⊗⋯⊗A_n) ρ (A_1⊗⋯⊗A_n)†` acts on that tensor as
//! `B_1 *_1 ⋯ B_n *_n`, where `B_k` is the real matrix of `X ↦ A_k X A_k†` in the
//! chosen basis (column convention: `A σ_j A† = Σ_i B_ij σ_i`).

use num_complex::Complex64;

use crate::error::{dim_err, invalid, Result};
use crate::hypermatrix::{chain_multiply, format_string, HyperMatrix};
use crate::matrix::Matrix;

/// Hermiticity tolerance for [`DensityState::new`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance for group membership of local operators.
pub const GROUP_TOL: f64 = 1e-10;
/// Imaginary residue allowed in Bloch coefficients, relative to the input scale.
pub const IMAG_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct BlochBasis {
    d: usize,
    ops: Vec<Matrix>,
}

impl BlochBasis {
    /// Generalized Gell-Mann basis rescaled to `tr(σ_i σ_j) = d δ_ij`.
    ///
    /// Order: identity, then the symmetric matrices `E_jk + E_kj`, the antisymmetric
    /// ones `-i E_jk + i E_kj` (both over pairs `j < k` in lexicographic order), then
    /// the diagonal ones. For `d = 2` this is `I, X, Y, Z`.
    pub fn gell_mann(d: usize) -> Result<Self> {
        if d < 2 {
            return invalid(format!("local dimension must be at least 2, got {d}"));
        }
        let scale = (d as f64 / 2.0).sqrt();
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
        let mut ops = Vec::with_capacity(d * d);
        ops.push(Matrix::identity(d));
        for &(j, k) in &pairs {
            let mut m = Matrix::zeros(d, d);
            m[(j, k)] = Complex64::new(scale, 0.0);
            m[(k, j)] = Complex64::new(scale, 0.0);
            ops.push(m);
        }
        for &(j, k) in &pairs {
            let mut m = Matrix::zeros(d, d);
            m[(j, k)] = Complex64::new(0.0, -scale);
            m[(k, j)] = Complex64::new(0.0, scale);
            ops.push(m);
        }
        for l in 1..d {
            let norm = scale * (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut m = Matrix::zeros(d, d);
            for j in 0..l {
                m[(j, j)] = Complex64::new(norm, 0.0);
            }
            m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            ops.push(m);
        }
        Ok(Self { d, ops })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &Matrix {
        &self.ops[i]
    }

    /// Hilbert-Schmidt products `tr(σ_i σ_j)`.
    pub fn gram(&self) -> Matrix {
        let n = self.ops.len();
        Matrix::from_fn(n, n, |i, j| hs_product(&self.ops[i], &self.ops[j]))
    }

    /// New basis `σ'_i = Σ_j R_ij σ_j` for a real orthogonal `R` that fixes index 0.
    pub fn rotate(&self, r: &Matrix) -> Result<Self> {
        let n = self.ops.len();
        if r.rows() != n || r.cols() != n {
            return dim_err(format!("rotation must be {n}x{n}, got {}x{}", r.rows(), r.cols()));
        }
        if !r.is_real(0.0) {
            return invalid("rotation must be real");
        }
        if (&r.transpose() * r).max_abs_diff(&Matrix::identity(n)) > GROUP_TOL {
            return invalid("rotation is not orthogonal");
        }
        let fixes_zero = (r[(0, 0)] - ONE).norm() <= GROUP_TOL
            && (1..n).all(|j| r[(0, j)].norm() <= GROUP_TOL && r[(j, 0)].norm() <= GROUP_TOL);
        if !fixes_zero {
            return invalid("rotation must fix the identity element (index 0)");
        }
        let mut ops = Vec::with_capacity(n);
        ops.push(Matrix::identity(self.d));
        for i in 1..n {
            let mut m = Matrix::zeros(self.d, self.d);
            for j in 1..n {
                let rij = r[(i, j)];
                if rij != ZERO {
                    m = m.add(&self.ops[j].scale(rij))?;
                }
            }
            ops.push(m);
        }
        Ok(Self { d: self.d, ops })
    }

    /// Row `i` holds `σ_i[c, r] / d` at column `r·d + c`, so applying it to the
    /// row-major flattening of `X` gives `tr(X σ_i) / d`.
    fn analysis(&self) -> Matrix {
        let d = self.d;
        Matrix::from_fn(d * d, d * d, |i, p| self.ops[i][(p % d, p / d)] / d as f64)
    }

    /// Column `i` is the row-major flattening of `σ_i`.
    fn synthesis(&self) -> Matrix {
        let d = self.d;
        Matrix::from_fn(d * d, d * d, |p, i| self.ops[i][(p / d, p % d)])
    }
}

/// `gell_mann_basis(d)`.
pub fn gell_mann_basis(d: usize) -> Result<BlochBasis> {
    BlochBasis::gell_mann(d)
}

fn hs_product(a: &Matrix, b: &Matrix) -> Complex64 {
    let d = a.rows();
    let mut s = ZERO;
    for r in 0..d {
        for c in 0..d {
            s += a[(r, c)] * b[(c, r)];
        }
    }
    s
}

/// A Hermitian operator on `ℂ^{d_1} ⊗ ⋯ ⊗ ℂ^{d_n}`. Positivity and unit trace
/// are not required.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    dims: Vec<usize>,
    matrix: Matrix,
}

impl DensityState {
    pub fn new(dims: Vec<usize>, matrix: Matrix) -> Result<Self> {
        Self::with_tolerance(dims, matrix, HERMITIAN_TOL)
    }

    /// Accepts `matrix` if it is Hermitian within `tol` and stores its Hermitian part.
    pub fn with_tolerance(dims: Vec<usize>, matrix: Matrix, tol: f64) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if matrix.rows() != total || matrix.cols() != total {
            return dim_err(format!(
                "dims {} need a {total}x{total} matrix, got {}x{}",
                format_string(&dims),
                matrix.rows(),
                matrix.cols()
            ));
        }
        if !matrix.is_hermitian(tol) {
            return invalid(format!("matrix is not Hermitian within {tol:e}"));
        }
        Ok(Self { dims, matrix: matrix.hermitian_part()? })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return invalid("at least one party is required");
    }
    if dims.iter().any(|&d| d < 2) {
        return invalid(format!("local dimensions must be ≥ 2, got {}", format_string(dims)));
    }
    Ok(())
}

/// A pure state `|φ⟩ = Σ a_{i_1⋯i_n} |i_1⋯i_n⟩` kept as its amplitude tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: HyperMatrix,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        Ok(Self { amplitudes: HyperMatrix::new(dims, amplitudes)? })
    }

    pub fn from_tensor(amplitudes: HyperMatrix) -> Result<Self> {
        check_dims(amplitudes.format())?;
        Ok(Self { amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        self.amplitudes.format()
    }

    pub fn amplitudes(&self) -> &HyperMatrix {
        &self.amplitudes
    }

    /// `|φ⟩⟨φ|`.
    pub fn to_density(&self) -> DensityState {
        let v = self.amplitudes.entries();
        let n = v.len();
        let m = Matrix::from_fn(n, n, |i, j| v[i] * v[j].conj());
        DensityState { dims: self.dims().to_vec(), matrix: m }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Density(DensityState),
    Pure(PureState),
}

impl State {
    pub fn dims(&self) -> &[usize] {
        match self {
            State::Density(s) => s.dims(),
            State::Pure(s) => s.dims(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupTag {
    Unitary,
    SpecialLinear,
    GeneralLinear,
}

/// Local operators `A_1, …, A_n`, standing for `g = A_1 ⊗ ⋯ ⊗ A_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperatorChain {
    ops: Vec<Matrix>,
    tag: GroupTag,
}

impl LocalOperatorChain {
    /// Validates squareness and membership in the tagged group (within 1e-10).
    pub fn new(ops: Vec<Matrix>, tag: GroupTag) -> Result<Self> {
        if ops.is_empty() {
            return invalid("empty operator chain");
        }
        for (k, a) in ops.iter().enumerate() {
            a.dim()?;
            let ok = match tag {
                GroupTag::Unitary => a.is_unitary(GROUP_TOL),
                GroupTag::SpecialLinear => (a.det()? - ONE).norm() <= GROUP_TOL,
                GroupTag::GeneralLinear => a.det()?.norm() > 0.0,
            };
            if !ok {
                return invalid(format!("operator {k} is not in the {tag:?} group"));
            }
        }
        Ok(Self { ops, tag })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { ops: dims.iter().map(|&d| Matrix::identity(d)).collect(), tag: GroupTag::Unitary }
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn dims(&self) -> Vec<usize> {
        self.ops.iter().map(Matrix::rows).collect()
    }

    /// `A_1 ⊗ ⋯ ⊗ A_n`.
    pub fn kron(&self) -> Matrix {
        self.ops[1..].iter().fold(self.ops[0].clone(), |acc, a| acc.kronecker(a))
    }

    /// Induced matrices in the Gell-Mann basis of each party.
    pub fn induced(&self) -> Result<Vec<Matrix>> {
        self.ops.iter().map(|a| induced_matrix(a).map(InducedMatrix::into_matrix)).collect()
    }

    fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if self.dims() != dims {
            return dim_err(format!(
                "operators act on {}, state has dims {}",
                format_string(&self.dims()),
                format_string(dims)
            ));
        }
        Ok(())
    }
}

/// The real `d² × d²` matrix of `X ↦ A X A†` in a Bloch basis.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMatrix {
    d: usize,
    b: Matrix,
    residue: f64,
}

impl InducedMatrix {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &Matrix {
        &self.b
    }

    pub fn into_matrix(self) -> Matrix {
        self.b
    }

    /// Largest imaginary part dropped during construction.
    pub fn residue(&self) -> f64 {
        self.residue
    }
}

/// Induced matrix in the Gell-Mann basis: `B_ij = tr((A σ_j A†) σ_i) / d`.
pub fn induced_matrix(a: &Matrix) -> Result<InducedMatrix> {
    induced_matrix_in(a, &BlochBasis::gell_mann(a.dim()?)?)
}

pub fn induced_matrix_in(a: &Matrix, basis: &BlochBasis) -> Result<InducedMatrix> {
    let d = a.dim()?;
    if d != basis.dim() {
        return dim_err(format!("operator is {d}x{d}, basis is for d = {}", basis.dim()));
    }
    let n = d * d;
    let adj = a.adjoint();
    let analysis = basis.analysis();
    let mut b = Matrix::zeros(n, n);
    let mut residue: f64 = 0.0;
    for j in 0..n {
        let conj = &(a * basis.op(j)) * &adj;
        let col = analysis.mul_vec(conj.as_slice())?;
        for (i, z) in col.into_iter().enumerate() {
            residue = residue.max(z.im.abs());
            b[(i, j)] = Complex64::new(z.re, 0.0);
        }
    }
    Ok(InducedMatrix { d, b, residue })
}

/// Bloch tensor of `ρ` in the Gell-Mann basis of every party.
pub fn represent(rho: &DensityState) -> Result<HyperMatrix> {
    let bases = gell_mann_bases(rho.dims())?;
    represent_with(rho, &bases)
}

/// Bloch tensor of `ρ` with one basis per party.
pub fn represent_with(rho: &DensityState, bases: &[BlochBasis]) -> Result<HyperMatrix> {
    check_bases(rho.dims(), bases)?;
    let dims = rho.dims();
    let paired = paired_layout(rho.matrix(), dims)?;
    let analysis: Vec<Matrix> = bases.iter().map(BlochBasis::analysis).collect();
    let a = chain_multiply(&analysis, &paired)?;
    let tol = IMAG_TOL * rho.matrix().max_abs().max(1.0);
    let worst = a.entries().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > tol {
        return invalid(format!("Bloch coefficients have imaginary residue {worst:e}"));
    }
    Ok(a.map(|z| Complex64::new(z.re, 0.0)))
}

/// Inverse of [`represent`]: `ρ = Σ a_I σ_{i_1} ⊗ ⋯ ⊗ σ_{i_n}`.
pub fn reconstruct(a: &HyperMatrix, dims: &[usize]) -> Result<DensityState> {
    let bases = gell_mann_bases(dims)?;
    reconstruct_with(a, &bases)
}

pub fn reconstruct_with(a: &HyperMatrix, bases: &[BlochBasis]) -> Result<DensityState> {
    let dims: Vec<usize> = bases.iter().map(BlochBasis::dim).collect();
    check_dims(&dims)?;
    let want: Vec<usize> = dims.iter().map(|d| d * d).collect();
    if a.format() != want.as_slice() {
        return dim_err(format!(
            "tensor format {} does not match dims {} (expected {})",
            format_string(a.format()),
            format_string(&dims),
            format_string(&want)
        ));
    }
    let synthesis: Vec<Matrix> = bases.iter().map(BlochBasis::synthesis).collect();
    let paired = chain_multiply(&synthesis, a)?;
    let matrix = unpair_layout(&paired, &dims);
    DensityState::new(dims, matrix)
}

pub fn gell_mann_bases(dims: &[usize]) -> Result<Vec<BlochBasis>> {
    dims.iter().map(|&d| BlochBasis::gell_mann(d)).collect()
}

fn check_bases(dims: &[usize], bases: &[BlochBasis]) -> Result<()> {
    let got: Vec<usize> = bases.iter().map(BlochBasis::dim).collect();
    if got != dims {
        return dim_err(format!("bases for {} do not match dims {}", format_string(&got), format_string(dims)));
    }
    Ok(())
}

/// Rearranges `ρ[(r_1…r_n), (c_1…c_n)]` into a tensor indexed by `p_k = r_k d_k + c_k`.
fn paired_layout(m: &Matrix, dims: &[usize]) -> Result<HyperMatrix> {
    let strides = crate::hypermatrix::strides(dims);
    let format: Vec<usize> = dims.iter().map(|d| d * d).collect();
    HyperMatrix::from_fn(format, |p| {
        let (mut r, mut c) = (0, 0);
        for ((&pk, &d), &s) in p.iter().zip(dims).zip(&strides) {
            r += (pk / d) * s;
            c += (pk % d) * s;
        }
        m[(r, c)]
    })
}

fn unpair_layout(t: &HyperMatrix, dims: &[usize]) -> Matrix {
    let total: usize = dims.iter().product();
    let strides = crate::hypermatrix::strides(dims);
    let mut m = Matrix::zeros(total, total);
    for (off, &z) in t.entries().iter().enumerate() {
        let p = t.unravel(off);
        let (mut r, mut c) = (0, 0);
        for ((&pk, &d), &s) in p.iter().zip(dims).zip(&strides) {
            r += (pk / d) * s;
            c += (pk % d) * s;
        }
        m[(r, c)] = z;
    }
    m
}

/// `g ρ g†`.
pub fn apply_local(rho: &DensityState, g: &LocalOperatorChain) -> Result<DensityState> {
    g.check_dims(rho.dims())?;
    let k = g.kron();
    let out = &(&k * rho.matrix()) * &k.adjoint();
    Ok(DensityState { dims: rho.dims.clone(), matrix: out.hermitian_part()? })
}

/// `(A_1 ⊗ ⋯ ⊗ A_n)|φ⟩`.
pub fn apply_local_pure(phi: &PureState, g: &LocalOperatorChain) -> Result<PureState> {
    g.check_dims(phi.dims())?;
    PureState::from_tensor(chain_multiply(g.ops(), phi.amplitudes())?)
}

pub fn apply_local_state(state: &State, g: &LocalOperatorChain) -> Result<State> {
    Ok(match state {
        State::Density(rho) => State::Density(apply_local(rho, g)?),
        State::Pure(phi) => State::Pure(apply_local_pure(phi, g)?),
    })
}

/// `rotate_basis(basis, R)`.
pub fn rotate_basis(basis: &BlochBasis, r: &Matrix) -> Result<BlochBasis> {
    basis.rotate(r)
}
