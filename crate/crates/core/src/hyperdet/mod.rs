//! Cayley hyperdeterminants and characteristic polynomials.
//!
//! The first hyperdeterminant of a cubical hypermatrix with an even number `m` of
//! directions and side `N` is
//!
//! ```text
//! hdet(A) = 1/N! Σ_{σ_1,…,σ_m ∈ S_N} Π_k sgn(σ_k) Π_i A[σ_1(i), …, σ_m(i)].
//! ```
//!
//! Substituting `τ_k = σ_k σ_1⁻¹` maps each term to one with `σ_1 = id`, and with `m`
//! even the product of signs is unchanged, so the `N!` copies cancel the prefactor:
//!
//! ```text
//! hdet(A) = Σ_{τ_2,…,τ_m ∈ S_N} Π_k sgn(τ_k) Π_i A[i, τ_2(i), …, τ_m(i)].
//! ```
//!
//! That reduced sum is evaluated by a pruned depth-first search (see `search`).
//! The unreduced form is kept as [`hdet_unreduced`] for cross-checking.

mod charpoly;
mod search;
mod second;

use num_complex::Complex64;

pub use charpoly::{charpoly_coeffs, principal_minor_sum, LambdaPolynomial};
pub use second::{det222, det222_epsilon};

use crate::error::{invalid, Error, Result};
use crate::hypermatrix::{paired_identity, HyperMatrix};
use search::{Affine, Candidates};

/// Default bound on the nominal number of leaf products, `(N!)^{m-1}`.
pub const DEFAULT_BUDGET: f64 = 1e9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HdetConfig {
    /// Largest admissible `(N!)^{m-1}` (or `(N!)^m` for the unreduced sum).
    pub budget: f64,
    /// Split the outermost level of the search across the rayon pool.
    pub parallel: bool,
    /// Evaluate the full, unreduced permutation sum instead of the pruned search.
    pub unreduced: bool,
}

impl Default for HdetConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, parallel: true, unreduced: false }
    }
}

impl HdetConfig {
    pub fn with_budget(budget: f64) -> Self {
        Self { budget, ..Self::default() }
    }

    pub fn serial(self) -> Self {
        Self { parallel: false, ..self }
    }
}

/// Side length and direction count of an admissible hdet argument.
fn shape(a: &HyperMatrix) -> Result<(usize, usize)> {
    let m = a.order();
    if m < 2 || !m.is_multiple_of(2) {
        return invalid(format!("hdet needs an even number of directions, got {m}"));
    }
    let n = a.cubical_side().ok_or_else(|| {
        Error::Invalid(format!("hdet needs a cubical format, got {}", crate::hypermatrix::format_string(a.format())))
    })?;
    Ok((n, m))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Nominal leaf count `(N!)^{m-1}` of the reduced sum.
pub fn leaf_count(side: usize, directions: usize) -> f64 {
    factorial(side).powi(directions as i32 - 1)
}

fn check_budget(required: f64, budget: f64) -> Result<()> {
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

/// First hyperdeterminant with the default configuration.
pub fn hdet(a: &HyperMatrix) -> Result<Complex64> {
    hdet_with(a, &HdetConfig::default())
}

pub fn hdet_with(a: &HyperMatrix, cfg: &HdetConfig) -> Result<Complex64> {
    if cfg.unreduced {
        return hdet_unreduced(a, cfg.budget);
    }
    let (n, m) = shape(a)?;
    check_budget(leaf_count(n, m), cfg.budget)?;
    let entries = a.entries();
    let cands = Candidates::build(n, m, |off, _| {
        let z = entries[off];
        (z != ZERO).then_some(z)
    });
    Ok(cands.evaluate(cfg.parallel))
}

/// The defining sum over all `m`-tuples of permutations, divided by `N!`.
///
/// Costs `(N!)^m · N` multiplications; meant as an oracle for small formats.
pub fn hdet_unreduced(a: &HyperMatrix, budget: f64) -> Result<Complex64> {
    let (n, m) = shape(a)?;
    check_budget(factorial(n).powi(m as i32), budget)?;
    let perms = permutations(n);
    let strides = a.strides();
    let entries = a.entries();
    let mut choice = vec![0usize; m];
    let mut total = ZERO;
    loop {
        let negative = choice.iter().filter(|&&c| perms[c].1).count() % 2 == 1;
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..n {
            let off: usize = choice.iter().zip(&strides).map(|(&c, &s)| perms[c].0[i] * s).sum();
            prod *= entries[off];
        }
        if negative {
            total -= prod;
        } else {
            total += prod;
        }
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(total / factorial(n));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// All permutations of `0..n` with a flag that is set for odd ones.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, bool)>) {
        if rest.is_empty() {
            let inversions = (0..prefix.len())
                .flat_map(|i| (i + 1..prefix.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), inversions % 2 == 1));
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Coefficients of `hdet(λ·I_paired − A)` with the default configuration.
pub fn hyper_charpoly(a: &HyperMatrix) -> Result<LambdaPolynomial> {
    hyper_charpoly_with(a, &HdetConfig::default())
}

/// Coefficients of `hdet(λ·I_paired − A)` in `λ`, where `I_paired` is the paired
/// identity tensor. Each entry is the affine term `λ·δ − a`; products along a
/// search path are accumulated as coefficient arrays, so the result is exact up to
/// rounding (no sampling in `λ`).
pub fn hyper_charpoly_with(a: &HyperMatrix, cfg: &HdetConfig) -> Result<LambdaPolynomial> {
    let (n, m) = shape(a)?;
    check_budget(leaf_count(n, m), cfg.budget)?;
    let entries = a.entries();
    let cands = Candidates::build(n, m, |off, rest| {
        // rest[k] is index k+1; the first index is the slice, paired with rest[0]
        let slice = off / n.pow(rest.len() as u32);
        let on = slice == rest[0] && rest[1..].chunks_exact(2).all(|p| p[0] == p[1]);
        let term = Affine { constant: -entries[off], slope: Complex64::new(if on { 1.0 } else { 0.0 }, 0.0) };
        (term.constant != ZERO || term.slope != ZERO).then_some(term)
    });
    Ok(LambdaPolynomial::new(cands.evaluate(cfg.parallel)))
}

/// Cross-check for [`hyper_charpoly`]: samples `hdet(λ_j I_paired − A)` at `N + 1`
/// Chebyshev nodes scaled by `1 + max|A|` and interpolates.
pub fn hyper_charpoly_interpolated(a: &HyperMatrix, cfg: &HdetConfig) -> Result<LambdaPolynomial> {
    let (n, m) = shape(a)?;
    check_budget(leaf_count(n, m) * (n + 1) as f64, cfg.budget)?;
    let ident = paired_identity(n, m)?;
    let scale = 1.0 + a.max_abs();
    let nodes: Vec<f64> =
        (0..=n).map(|j| scale * (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * (n + 1)) as f64).cos()).collect();
    let values = nodes
        .iter()
        .map(|&x| hdet_with(&ident.scale(Complex64::new(x, 0.0)).sub(a)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(LambdaPolynomial::new(interpolate(&nodes, &values)))
}

/// Monomial coefficients of the interpolating polynomial (Newton form, expanded).
fn interpolate(xs: &[f64], ys: &[Complex64]) -> Vec<Complex64> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut poly = vec![dd[n - 1]];
    for k in (0..n - 1).rev() {
        // poly ← poly·(λ − x_k) + dd[k]
        let mut next = vec![ZERO; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * xs[k];
        }
        next[0] += dd[k];
        poly = next;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn lcg_tensor(format: Vec<usize>, seed: u64) -> HyperMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        HyperMatrix::from_fn(format, |_| c64(next(), next())).unwrap()
    }

    #[test]
    fn permutation_parities() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().filter(|(_, odd)| *odd).count(), 3);
        assert_eq!(p[0], (vec![0, 1, 2], false));
    }

    #[test]
    fn paired_identity_values() {
        assert_eq!(hdet(&paired_identity(2, 4).unwrap()).unwrap(), c64(2.0, 0.0));
        assert_eq!(hdet(&paired_identity(4, 4).unwrap()).unwrap(), c64(24.0, 0.0));
        assert_eq!(hdet_unreduced(&paired_identity(2, 4).unwrap(), 1e9).unwrap(), c64(2.0, 0.0));
    }

    #[test]
    fn matrix_case_is_determinant() {
        let a = lcg_tensor(vec![5, 5], 7);
        let want = a.to_matrix().unwrap().det().unwrap();
        let got = hdet(&a).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn zero_slice_gives_zero() {
        let mut a = lcg_tensor(vec![3, 3, 3, 3], 3);
        for j in 0..27 {
            let idx = [j / 9, 1, (j / 3) % 3, j % 3];
            a.set(&idx, c64(0.0, 0.0)).unwrap();
        }
        assert_eq!(hdet(&a).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn shape_and_budget_errors() {
        assert!(matches!(hdet(&HyperMatrix::zeros(vec![2, 2, 2]).unwrap()), Err(Error::Invalid(_))));
        assert!(matches!(hdet(&HyperMatrix::zeros(vec![2, 3]).unwrap()), Err(Error::Invalid(_))));
        let big = HyperMatrix::zeros(vec![9, 9, 9, 9]).unwrap();
        assert!(matches!(hdet(&big), Err(Error::Budget { .. })));
        assert!(matches!(hyper_charpoly(&big), Err(Error::Budget { .. })));
        let small = HyperMatrix::zeros(vec![4, 4, 4, 4]).unwrap();
        assert!(matches!(hdet_with(&small, &HdetConfig::with_budget(1e3)), Err(Error::Budget { .. })));
    }

    #[test]
    fn reduced_matches_unreduced() {
        let a = lcg_tensor(vec![3, 3, 3, 3], 11);
        let r = hdet(&a).unwrap();
        let u = hdet_unreduced(&a, 1e9).unwrap();
        assert!((r - u).norm() < 1e-12 * r.norm().max(1.0));
        let b = lcg_tensor(vec![2; 6], 5);
        let r = hdet(&b).unwrap();
        let u = hdet_unreduced(&b, 1e9).unwrap();
        assert!((r - u).norm() < 1e-12 * r.norm().max(1.0));
    }

    #[test]
    fn serial_and_parallel_agree_bitwise() {
        let a = lcg_tensor(vec![4, 4, 4, 4], 21);
        let cfg = HdetConfig::default();
        assert_eq!(hdet_with(&a, &cfg).unwrap(), hdet_with(&a, &cfg.serial()).unwrap());
        assert_eq!(hyper_charpoly_with(&a, &cfg).unwrap(), hyper_charpoly_with(&a, &cfg.serial()).unwrap());
    }

    #[test]
    fn charpoly_of_paired_identity() {
        // hdet((λ-1) I) = 2 (λ-1)^2 for N = 2
        let p = hyper_charpoly(&paired_identity(2, 4).unwrap()).unwrap();
        assert_eq!(p.coeffs(), &[c64(2.0, 0.0), c64(-4.0, 0.0), c64(2.0, 0.0)]);
    }

    #[test]
    fn charpoly_matrix_case_matches_faddeev() {
        let a = lcg_tensor(vec![4, 4], 9);
        let p = hyper_charpoly(&a).unwrap();
        let q = charpoly_coeffs(&a.to_matrix().unwrap()).unwrap();
        for k in 0..=4 {
            assert!((p.coeff(k) - q.coeff(k)).norm() < 1e-12, "k = {k}");
        }
        let tr = a.to_matrix().unwrap().trace().unwrap();
        assert!((p.coeff(3) + tr).norm() < 1e-12);
    }

    #[test]
    fn charpoly_evaluation_matches_direct_hdet() {
        let a = lcg_tensor(vec![3, 3, 3, 3], 2);
        let p = hyper_charpoly(&a).unwrap();
        let ident = paired_identity(3, 4).unwrap();
        for lam in [-1.3, 0.0, 0.4, 2.0] {
            let direct = hdet(&ident.scale(c64(lam, 0.0)).sub(&a).unwrap()).unwrap();
            let via = p.eval(c64(lam, 0.0));
            assert!((direct - via).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn interpolation_reproduces_cubic() {
        let xs = [-1.0, 0.5, 2.0, 3.0];
        let f = |x: f64| c64(2.0 - x + 0.5 * x * x * x, x);
        let ys: Vec<_> = xs.iter().map(|&x| f(x)).collect();
        let c = interpolate(&xs, &ys);
        let want = [c64(2.0, 0.0), c64(-1.0, 1.0), c64(0.0, 0.0), c64(0.5, 0.0)];
        for (g, w) in c.iter().zip(want) {
            assert!((g - w).norm() < 1e-12);
        }
    }
}
