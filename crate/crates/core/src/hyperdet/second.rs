//! Cayley's second hyperdeterminant for the 2×2×2 format.

use num_complex::Complex64;

use crate::error::{dim_err, Result};
use crate::hypermatrix::{format_string, HyperMatrix};

fn entries222(a: &HyperMatrix) -> Result<&[Complex64]> {
    if a.format() != [2, 2, 2] {
        return dim_err(format!("expected format 2x2x2, got {}", format_string(a.format())));
    }
    Ok(a.entries())
}

/// The explicit quartic, term by term.
pub fn det222(a: &HyperMatrix) -> Result<Complex64> {
    let e = entries222(a)?;
    let x = |i: usize, j: usize, k: usize| e[4 * i + 2 * j + k];
    let (a000, a001, a010, a011) = (x(0, 0, 0), x(0, 0, 1), x(0, 1, 0), x(0, 1, 1));
    let (a100, a101, a110, a111) = (x(1, 0, 0), x(1, 0, 1), x(1, 1, 0), x(1, 1, 1));
    let sq = |z: Complex64| z * z;
    Ok(sq(a000) * sq(a111) + sq(a001) * sq(a110) + sq(a010) * sq(a101) + sq(a100) * sq(a011)
        - 2.0 * a000 * a001 * a110 * a111
        - 2.0 * a000 * a010 * a101 * a111
        - 2.0 * a000 * a011 * a100 * a111
        - 2.0 * a001 * a010 * a101 * a110
        - 2.0 * a001 * a011 * a110 * a100
        - 2.0 * a010 * a011 * a101 * a100
        + 4.0 * a000 * a011 * a101 * a110
        + 4.0 * a001 * a010 * a100 * a111)
}

/// Levi-Civita contraction form.
///
/// `b_kn = ½ ε^{il} ε^{jm} a_ijk a_lmn` is a symmetric 2×2 matrix and
/// `ε^{il} ε^{jm} b_ij b_lm = 2 det(b)`. The quartic above equals `-4 det(b)`,
/// so the contraction is scaled by `-2`.
pub fn det222_epsilon(a: &HyperMatrix) -> Result<Complex64> {
    let e = entries222(a)?;
    let x = |i: usize, j: usize, k: usize| e[4 * i + 2 * j + k];
    let eps = |i: usize, l: usize| -> f64 {
        match (i, l) {
            (0, 1) => 1.0,
            (1, 0) => -1.0,
            _ => 0.0,
        }
    };
    let mut b = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (k, row) in b.iter_mut().enumerate() {
        for (n, bkn) in row.iter_mut().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for l in 0..2 {
                    for j in 0..2 {
                        for m in 0..2 {
                            let w = eps(i, l) * eps(j, m);
                            if w != 0.0 {
                                s += w * x(i, j, k) * x(l, m, n);
                            }
                        }
                    }
                }
            }
            *bkn = 0.5 * s;
        }
    }
    let mut contraction = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for l in 0..2 {
            for j in 0..2 {
                for m in 0..2 {
                    let w = eps(i, l) * eps(j, m);
                    if w != 0.0 {
                        contraction += w * b[i][j] * b[l][m];
                    }
                }
            }
        }
    }
    Ok(-2.0 * contraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn tensor(nonzero: &[(usize, f64)]) -> HyperMatrix {
        let mut v = vec![c64(0.0, 0.0); 8];
        for &(off, x) in nonzero {
            v[off] = c64(x, 0.0);
        }
        HyperMatrix::new(vec![2, 2, 2], v).unwrap()
    }

    #[test]
    fn ghz_w_and_product() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = tensor(&[(0, s), (7, s)]);
        assert!((det222(&ghz).unwrap() - c64(0.25, 0.0)).norm() < 1e-15);
        assert!((det222_epsilon(&ghz).unwrap() - c64(0.25, 0.0)).norm() < 1e-15);
        let t = 1.0 / 3f64.sqrt();
        let w = tensor(&[(1, t), (2, t), (4, t)]);
        assert_eq!(det222(&w).unwrap(), c64(0.0, 0.0));
        assert_eq!(det222_epsilon(&w).unwrap().norm(), 0.0);
        assert_eq!(det222(&tensor(&[(0, 1.0)])).unwrap(), c64(0.0, 0.0));
        assert_eq!(det222_epsilon(&tensor(&[])).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn wrong_format_rejected() {
        let a = HyperMatrix::zeros(vec![2, 2]).unwrap();
        assert!(det222(&a).is_err());
        assert!(det222_epsilon(&HyperMatrix::zeros(vec![2, 2, 3]).unwrap()).is_err());
    }
}
