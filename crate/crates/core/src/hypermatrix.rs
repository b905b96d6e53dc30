//! Dense hypermatrices of format `f_1 × ⋯ × f_n`.
//!
//! Entries are stored row-major with the last index fastest. A 2-direction
//! hypermatrix and a [`Matrix`] share the same layout, so the conversions between
//! them are copies.

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{dim_err, invalid, Result};
use crate::matrix::Matrix;

/// Largest admissible side length in any direction.
pub const MAX_SIDE: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct HyperMatrix {
    format: Vec<usize>,
    entries: Vec<Complex64>,
}

impl HyperMatrix {
    pub fn new(format: Vec<usize>, entries: Vec<Complex64>) -> Result<Self> {
        validate_format(&format)?;
        let len: usize = format.iter().product();
        if entries.len() != len {
            return dim_err(format!("format {} needs {len} entries, got {}", format_string(&format), entries.len()));
        }
        Ok(Self { format, entries })
    }

    pub fn zeros(format: Vec<usize>) -> Result<Self> {
        validate_format(&format)?;
        let len = format.iter().product();
        Ok(Self { format, entries: vec![Complex64::new(0.0, 0.0); len] })
    }

    /// Builds a hypermatrix by evaluating `f` at every multi-index, in storage order.
    pub fn from_fn(format: Vec<usize>, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        validate_format(&format)?;
        let len: usize = format.iter().product();
        let mut entries = Vec::with_capacity(len);
        let mut idx = vec![0; format.len()];
        for _ in 0..len {
            entries.push(f(&idx));
            advance(&mut idx, &format);
        }
        Ok(Self { format, entries })
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        Self { format: vec![m.rows(), m.cols()], entries: m.as_slice().to_vec() }
    }

    /// The 2-direction hypermatrix as a matrix.
    pub fn to_matrix(&self) -> Result<Matrix> {
        match self.format[..] {
            [r, c] => Matrix::new(r, c, self.entries.clone()),
            _ => dim_err(format!("format {} is not a matrix", format_string(&self.format))),
        }
    }

    pub fn format(&self) -> &[usize] {
        &self.format
    }

    /// Number of directions.
    pub fn order(&self) -> usize {
        self.format.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Side length when every direction has the same size.
    pub fn cubical_side(&self) -> Option<usize> {
        let first = *self.format.first()?;
        self.format.iter().all(|&f| f == first).then_some(first)
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.format)
    }

    pub fn offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.format.len() {
            return dim_err(format!("{} indices for {} directions", idx.len(), self.format.len()));
        }
        let mut off = 0;
        for (k, (&i, &f)) in idx.iter().zip(&self.format).enumerate() {
            if i >= f {
                return dim_err(format!("index {i} out of range {f} in direction {k}"));
            }
            off = off * f + i;
        }
        Ok(off)
    }

    pub fn get(&self, idx: &[usize]) -> Result<Complex64> {
        Ok(self.entries[self.offset(idx)?])
    }

    pub fn set(&mut self, idx: &[usize], value: Complex64) -> Result<()> {
        let off = self.offset(idx)?;
        self.entries[off] = value;
        Ok(())
    }

    /// Multi-index of a storage offset.
    pub fn unravel(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.format.len()];
        for k in (0..self.format.len()).rev() {
            idx[k] = offset % self.format[k];
            offset /= self.format[k];
        }
        idx
    }

    /// `(multi-index, value)` pairs of the entries that are not exactly zero.
    pub fn nonzeros(&self) -> impl Iterator<Item = (Vec<usize>, Complex64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
            .map(|(off, &z)| (self.unravel(off), z))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { format: self.format.clone(), entries: self.entries.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn sub(&self, other: &HyperMatrix) -> Result<Self> {
        self.same_format(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect();
        Ok(Self { format: self.format.clone(), entries })
    }

    pub fn add(&self, other: &HyperMatrix) -> Result<Self> {
        self.same_format(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Ok(Self { format: self.format.clone(), entries })
    }

    fn same_format(&self, other: &HyperMatrix) -> Result<()> {
        if self.format != other.format {
            return dim_err(format!(
                "formats {} and {} differ",
                format_string(&self.format),
                format_string(&other.format)
            ));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`; infinite on format mismatch.
    pub fn max_abs_diff(&self, other: &HyperMatrix) -> f64 {
        self.sub(other).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Moves direction `from` to position `to`, shifting the others.
    pub fn move_direction(&self, from: usize, to: usize) -> Result<Self> {
        let n = self.order();
        if from >= n || to >= n {
            return dim_err(format!("direction out of range for order {n}"));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let d = perm.remove(from);
        perm.insert(to, d);
        self.permute(&perm)
    }

    /// Result direction `k` is input direction `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return invalid(format!("{perm:?} is not a permutation of {n} directions"));
        }
        let format: Vec<usize> = perm.iter().map(|&p| self.format[p]).collect();
        let src_strides = self.strides();
        HyperMatrix::from_fn(format, |idx| {
            let off: usize = idx.iter().zip(perm).map(|(&i, &p)| i * src_strides[p]).sum();
            self.entries[off]
        })
    }

    pub fn mode_multiply(&self, b: &Matrix, k: usize) -> Result<Self> {
        mode_multiply(b, k, self)
    }
}

impl Index<&[usize]> for HyperMatrix {
    type Output = Complex64;

    fn index(&self, idx: &[usize]) -> &Complex64 {
        match self.offset(idx) {
            Ok(off) => &self.entries[off],
            Err(e) => panic!("{e}"),
        }
    }
}

fn validate_format(format: &[usize]) -> Result<()> {
    if format.is_empty() {
        return invalid("a hypermatrix needs at least one direction");
    }
    if let Some(&f) = format.iter().find(|&&f| f == 0 || f > MAX_SIDE) {
        return invalid(format!("side length {f} outside 1..={MAX_SIDE}"));
    }
    Ok(())
}

pub(crate) fn strides(format: &[usize]) -> Vec<usize> {
    let mut s = vec![1; format.len()];
    for k in (0..format.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * format[k + 1];
    }
    s
}

/// Row-major odometer step; wraps to all zeros after the last index.
pub(crate) fn advance(idx: &mut [usize], format: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < format[k] {
            return;
        }
        idx[k] = 0;
    }
}

pub fn format_string(format: &[usize]) -> String {
    format.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// Mode-`k` product `C = B *_k A`, `C_{…i_k…} = Σ_j B_{i_k j} A_{…j…}`.
pub fn mode_multiply(b: &Matrix, k: usize, a: &HyperMatrix) -> Result<HyperMatrix> {
    let n = a.order();
    if k >= n {
        return dim_err(format!("direction {k} out of range for order {n}"));
    }
    let f = a.format[k];
    if b.rows() != f || b.cols() != f {
        return dim_err(format!("direction {k} has size {f}, matrix is {}x{}", b.rows(), b.cols()));
    }
    let inner: usize = a.format[k + 1..].iter().product();
    let outer: usize = a.format[..k].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); a.entries.len()];
    for o in 0..outer {
        let base = o * f * inner;
        for i in 0..f {
            let dst = &mut out[base + i * inner..base + (i + 1) * inner];
            for j in 0..f {
                let bij = b[(i, j)];
                if bij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = &a.entries[base + j * inner..base + (j + 1) * inner];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += bij * s;
                }
            }
        }
    }
    Ok(HyperMatrix { format: a.format.clone(), entries: out })
}

/// `(B_1 *_1 ⋯ B_n *_n) A`, one matrix per direction.
pub fn chain_multiply(bs: &[Matrix], a: &HyperMatrix) -> Result<HyperMatrix> {
    if bs.len() != a.order() {
        return dim_err(format!("{} matrices for {} directions", bs.len(), a.order()));
    }
    bs.iter().enumerate().try_fold(a.clone(), |acc, (k, b)| mode_multiply(b, k, &acc))
}

/// The multilinear form `f_A(x⁽¹⁾, …, x⁽ⁿ⁾) = Σ a_{i_1⋯i_n} x⁽¹⁾_{i_1} ⋯ x⁽ⁿ⁾_{i_n}`.
pub fn evaluate_form(a: &HyperMatrix, xs: &[Vec<Complex64>]) -> Result<Complex64> {
    if xs.len() != a.order() {
        return dim_err(format!("{} vectors for {} directions", xs.len(), a.order()));
    }
    for (k, (x, &f)) in xs.iter().zip(&a.format).enumerate() {
        if x.len() != f {
            return dim_err(format!("vector {k} has length {}, direction size is {f}", x.len()));
        }
    }
    // Contract the last direction repeatedly.
    let mut cur = a.entries.clone();
    for x in xs.iter().rev() {
        let f = x.len();
        cur = cur.chunks_exact(f).map(|chunk| chunk.iter().zip(x).map(|(&c, &v)| c * v).sum()).collect();
    }
    Ok(cur[0])
}

/// The tensor `Π_k δ_{i_{2k-1} i_{2k}}` of format `N^m`, `m` even.
pub fn paired_identity(side: usize, directions: usize) -> Result<HyperMatrix> {
    if directions < 2 || !directions.is_multiple_of(2) {
        return invalid(format!("paired identity needs an even number of directions ≥ 2, got {directions}"));
    }
    HyperMatrix::from_fn(vec![side; directions], |idx| {
        let on = idx.chunks_exact(2).all(|p| p[0] == p[1]);
        Complex64::new(if on { 1.0 } else { 0.0 }, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn identity_mode_product_is_exact_noop() {
        let a = HyperMatrix::from_fn(vec![2, 3, 2], |i| c64(i[0] as f64, (i[1] * i[2]) as f64)).unwrap();
        for k in 0..3 {
            let b = Matrix::identity(a.format()[k]);
            assert_eq!(mode_multiply(&b, k, &a).unwrap(), a);
        }
    }

    #[test]
    fn mode_products_of_matrix_are_ba_and_abt() {
        let a = Matrix::from_fn(2, 3, |i, j| c64((i * 3 + j) as f64, 1.0));
        let b1 = Matrix::from_fn(2, 2, |i, j| c64(i as f64 - j as f64, 0.5));
        let b2 = Matrix::from_fn(3, 3, |i, j| c64((i + 2 * j) as f64, -0.25));
        let h = HyperMatrix::from_matrix(&a);
        let left = mode_multiply(&b1, 0, &h).unwrap().to_matrix().unwrap();
        assert!(left.max_abs_diff(&(&b1 * &a)) < 1e-14);
        let right = mode_multiply(&b2, 1, &h).unwrap().to_matrix().unwrap();
        assert!(right.max_abs_diff(&(&a * &b2.transpose())) < 1e-14);
    }

    #[test]
    fn upper_shear_on_ones_tensor() {
        let a = HyperMatrix::from_fn(vec![2, 2, 2], |_| c64(1.0, 0.0)).unwrap();
        let b = Matrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let c = mode_multiply(&b, 0, &a).unwrap();
        for (idx, z) in (0..8).map(|o| (c.unravel(o), c.entries()[o])) {
            let want = if idx[0] == 0 { 2.0 } else { 1.0 };
            assert_eq!(z, c64(want, 0.0), "at {idx:?}");
        }
    }

    #[test]
    fn mode_multiply_rejects_bad_shapes() {
        let a = HyperMatrix::zeros(vec![2, 3]).unwrap();
        assert!(mode_multiply(&Matrix::identity(2), 1, &a).is_err());
        assert!(mode_multiply(&Matrix::identity(2), 2, &a).is_err());
        assert!(chain_multiply(&[Matrix::identity(2)], &a).is_err());
    }

    #[test]
    fn form_on_basis_vectors_reads_entry() {
        let a = HyperMatrix::from_fn(vec![2, 3, 2], |i| c64((i[0] * 6 + i[1] * 2 + i[2]) as f64, 0.0)).unwrap();
        let e = |n: usize, j: usize| (0..n).map(|k| c64((k == j) as u8 as f64, 0.0)).collect::<Vec<_>>();
        let v = evaluate_form(&a, &[e(2, 1), e(3, 2), e(2, 0)]).unwrap();
        assert_eq!(v, a.get(&[1, 2, 0]).unwrap());
        assert!(evaluate_form(&a, &[e(2, 1), e(2, 1), e(2, 0)]).is_err());
    }

    #[test]
    fn form_on_basis_tensor_is_coordinate_product() {
        let mut a = HyperMatrix::zeros(vec![3, 2]).unwrap();
        a.set(&[2, 1], c64(1.0, 0.0)).unwrap();
        let x = vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 1.0)];
        let y = vec![c64(5.0, 0.0), c64(-1.5, 0.0)];
        assert_eq!(evaluate_form(&a, &[x.clone(), y.clone()]).unwrap(), x[2] * y[1]);
    }

    #[test]
    fn paired_identity_shapes() {
        assert_eq!(paired_identity(3, 2).unwrap().to_matrix().unwrap(), Matrix::identity(3));
        let p = paired_identity(2, 4).unwrap();
        let nz: Vec<_> = p.nonzeros().collect();
        assert_eq!(nz.len(), 4);
        assert!(nz.iter().all(|(_, v)| *v == c64(1.0, 0.0)));
        assert!(paired_identity(2, 3).is_err());
    }

    #[test]
    fn bounds_are_checked() {
        let a = HyperMatrix::zeros(vec![2, 2]).unwrap();
        assert!(a.get(&[2, 0]).is_err());
        assert!(a.get(&[0]).is_err());
        assert!(HyperMatrix::new(vec![2, 2], vec![c64(0.0, 0.0); 3]).is_err());
        assert!(HyperMatrix::zeros(vec![65]).is_err());
    }

    #[test]
    fn permute_roundtrip() {
        let a = HyperMatrix::from_fn(vec![2, 3, 4], |i| c64((i[0] * 12 + i[1] * 4 + i[2]) as f64, 0.0)).unwrap();
        let p = a.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.format(), &[4, 2, 3]);
        assert_eq!(p.get(&[3, 1, 2]).unwrap(), a.get(&[1, 2, 3]).unwrap());
        assert_eq!(p.permute(&[1, 2, 0]).unwrap(), a);
    }
}
