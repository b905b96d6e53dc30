use itertools::Itertools;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::Matrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `p(λ) = Σ_k c_k λ^k`, coefficients in ascending order with exact trailing
/// zeros trimmed. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPolynomial {
    coeffs: Vec<Complex64>,
}

impl LambdaPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `λ^k`; zero past the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    /// `F_i` in the descending convention `p(λ) = Σ_i F_i λ^{n-i}` for a polynomial
    /// of nominal degree `n`.
    pub fn descending(&self, n: usize, i: usize) -> Complex64 {
        if i > n {
            ZERO
        } else {
            self.coeff(n - i)
        }
    }
}

/// `det(λI − A)` by the Faddeev–LeVerrier recurrence:
/// `M_k = A M_{k-1} + c_{n-k+1} I`, `c_{n-k} = −tr(A M_k) / k`, with `M_0 = 0`, `c_n = 1`.
///
/// Only matrix products and traces are used, so every coefficient is a polynomial
/// in the entries.
pub fn charpoly_coeffs(a: &Matrix) -> Result<LambdaPolynomial> {
    let n = a.dim()?;
    let mut c = vec![ZERO; n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    let mut m = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += c[n - k + 1];
        }
        m = next;
        c[n - k] = -(a * &m).trace()? / k as f64;
    }
    Ok(LambdaPolynomial::new(c))
}

/// Sum of all `k × k` principal minors.
pub fn principal_minor_sum(a: &Matrix, k: usize) -> Result<Complex64> {
    let n = a.dim()?;
    if k == 0 || k > n {
        return invalid(format!("minor order {k} outside 1..={n}"));
    }
    (0..n).combinations(k).map(|idx| a.principal_submatrix(&idx).det()).sum()
}
