//! Depth-first evaluation of the reduced permutation sum
//!
//! `Σ_{τ_2,…,τ_m ∈ S_N} Π_k sgn(τ_k) Π_i w(i, τ_2(i), …, τ_m(i))`.
//!
//! Position `i` picks one value per permutation `τ_2..τ_m` among those not used
//! at earlier positions. Only entries with a nonzero weight are ever offered, so
//! sparse tensors prune whole subtrees. The sign is tracked incrementally: a value
//! `v` placed after values `u > v` adds one inversion per such `u`.
//!
//! The top level is split over the candidates of slice 0. Their partial sums are
//! collected in candidate order and added pairwise, so the result does not depend
//! on how many workers ran them.

use num_complex::Complex64;
use rayon::prelude::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A per-entry weight that can be multiplied along a path and summed over leaves.
pub(crate) trait Term: Copy + Send + Sync {
    type Acc: Clone + Send + Sync;

    fn unit(side: usize) -> Self::Acc;
    fn zero(side: usize) -> Self::Acc;
    fn is_zero(acc: &Self::Acc) -> bool;
    /// `out = prev · term`, where `prev` is a product of `depth` terms.
    fn extend(prev: &Self::Acc, term: Self, depth: usize, out: &mut Self::Acc);
    fn add_signed(total: &mut Self::Acc, leaf: &Self::Acc, negative: bool);
    fn sum(a: &Self::Acc, b: &Self::Acc) -> Self::Acc;
}

impl Term for Complex64 {
    type Acc = Complex64;

    fn unit(_: usize) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn zero(_: usize) -> Complex64 {
        ZERO
    }

    fn is_zero(acc: &Complex64) -> bool {
        *acc == ZERO
    }

    fn extend(prev: &Complex64, term: Complex64, _: usize, out: &mut Complex64) {
        *out = prev * term;
    }

    fn add_signed(total: &mut Complex64, leaf: &Complex64, negative: bool) {
        if negative {
            *total -= leaf;
        } else {
            *total += leaf;
        }
    }

    fn sum(a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }
}

/// The affine entry `constant + slope·λ`; products are polynomials in `λ`
/// stored as ascending coefficient vectors of length `side + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Affine {
    pub constant: Complex64,
    pub slope: Complex64,
}

impl Term for Affine {
    type Acc = Vec<Complex64>;

    fn unit(side: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; side + 1];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    fn zero(side: usize) -> Vec<Complex64> {
        vec![ZERO; side + 1]
    }

    fn is_zero(acc: &Vec<Complex64>) -> bool {
        acc.iter().all(|z| *z == ZERO)
    }

    fn extend(prev: &Vec<Complex64>, term: Affine, depth: usize, out: &mut Vec<Complex64>) {
        out[0] = prev[0] * term.constant;
        for k in 1..=depth {
            out[k] = prev[k] * term.constant + prev[k - 1] * term.slope;
        }
        out[depth + 1] = prev[depth] * term.slope;
    }

    fn add_signed(total: &mut Vec<Complex64>, leaf: &Vec<Complex64>, negative: bool) {
        for (t, l) in total.iter_mut().zip(leaf) {
            if negative {
                *t -= l;
            } else {
                *t += l;
            }
        }
    }

    fn sum(a: &Vec<Complex64>, b: &Vec<Complex64>) -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
}

/// Nonzero entries of each first-index slice: the trailing `m - 1` indices
/// (flattened, stride `arity`) and the weight.
pub(crate) struct Candidates<T> {
    side: usize,
    arity: usize,
    slices: Vec<(Vec<u8>, Vec<T>)>,
}

impl<T: Term> Candidates<T> {
    /// `weight` maps a storage offset and its trailing indices to an optional term.
    pub fn build(side: usize, order: usize, mut weight: impl FnMut(usize, &[usize]) -> Option<T>) -> Self {
        let arity = order - 1;
        let per_slice = side.pow(arity as u32);
        let mut slices = Vec::with_capacity(side);
        let mut idx = vec![0usize; arity];
        let trailing = vec![side; arity];
        for i in 0..side {
            let (mut cols, mut terms) = (Vec::new(), Vec::new());
            idx.iter_mut().for_each(|x| *x = 0);
            for j in 0..per_slice {
                if let Some(t) = weight(i * per_slice + j, &idx) {
                    cols.extend(idx.iter().map(|&x| x as u8));
                    terms.push(t);
                }
                crate::hypermatrix::advance(&mut idx, &trailing);
            }
            slices.push((cols, terms));
        }
        Self { side, arity, slices }
    }

    pub fn evaluate(&self, parallel: bool) -> T::Acc {
        let n = self.side;
        let (cols0, terms0) = &self.slices[0];
        let run = |c: usize| -> T::Acc {
            let mut used = vec![0u64; self.arity];
            let mut parity = false;
            let idx = &cols0[c * self.arity..(c + 1) * self.arity];
            for (u, &v) in used.iter_mut().zip(idx) {
                *u |= 1 << v;
            }
            let mut stack = vec![T::unit(n); n + 1];
            let (head, tail) = stack.split_at_mut(1);
            T::extend(&head[0], terms0[c], 0, &mut tail[0]);
            let mut total = T::zero(n);
            if !T::is_zero(&stack[1]) {
                self.descend(1, &mut used, &mut parity, &mut stack, &mut total);
            }
            total
        };
        let partials: Vec<T::Acc> = if parallel {
            (0..terms0.len()).into_par_iter().map(run).collect()
        } else {
            (0..terms0.len()).map(run).collect()
        };
        pairwise_sum::<T>(&partials, n)
    }

    fn descend(&self, pos: usize, used: &mut [u64], parity: &mut bool, stack: &mut [T::Acc], total: &mut T::Acc) {
        if pos == self.side {
            T::add_signed(total, &stack[pos], *parity);
            return;
        }
        let (cols, terms) = &self.slices[pos];
        let ar = self.arity;
        'cand: for (c, &term) in terms.iter().enumerate() {
            let idx = &cols[c * ar..(c + 1) * ar];
            let mut flips = 0u32;
            for (&u, &v) in used.iter().zip(idx) {
                if u & (1 << v) != 0 {
                    continue 'cand;
                }
                flips += u.checked_shr(v as u32 + 1).unwrap_or(0).count_ones();
            }
            let (lo, hi) = stack.split_at_mut(pos + 1);
            T::extend(&lo[pos], term, pos, &mut hi[0]);
            if T::is_zero(&hi[0]) {
                continue;
            }
            for (u, &v) in used.iter_mut().zip(idx) {
                *u |= 1 << v;
            }
            let flip = flips % 2 == 1;
            *parity ^= flip;
            self.descend(pos + 1, used, parity, stack, total);
            *parity ^= flip;
            for (u, &v) in used.iter_mut().zip(idx) {
                *u &= !(1 << v);
            }
        }
    }
}

fn pairwise_sum<T: Term>(parts: &[T::Acc], side: usize) -> T::Acc {
    match parts {
        [] => T::zero(side),
        [one] => one.clone(),
        _ => {
            let mid = parts.len() / 2;
            T::sum(&pairwise_sum::<T>(&parts[..mid], side), &pairwise_sum::<T>(&parts[mid..], side))
        }
    }
}
