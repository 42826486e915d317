#![allow(dead_code)]

use std::sync::Arc;

use iwafit_core::{BaseRing, RMatrix, Ring, RingElem};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Denominators prime to both test primes 3 and 5.
pub const DENS: [i64; 3] = [1, 2, 7];

/// Element from the first `rank` coefficient pairs `(num, den index)`.
pub fn elem<B: BaseRing>(ring: &Arc<Ring<B>>, coeffs: &[(i64, usize)]) -> RingElem<B> {
    let base = ring.base();
    let v: Vec<B::Elem> = coeffs
        .iter()
        .cycle()
        .take(ring.rank())
        .map(|&(n, d)| base.from_ratio(&BigInt::from(n), &BigInt::from(DENS[d % DENS.len()])).unwrap())
        .collect();
    ring.from_vector(&v)
}

/// Square matrix with entries built from consecutive coefficient windows.
pub fn matrix<B: BaseRing>(ring: &Arc<Ring<B>>, rows: usize, cols: usize, coeffs: &[(i64, usize)]) -> RMatrix<B> {
    let r = ring.rank().max(1);
    let entries = (0..rows * cols)
        .map(|k| {
            let window: Vec<(i64, usize)> = coeffs.iter().cycle().skip(k * r % coeffs.len().max(1)).take(r).copied().collect();
            elem(ring, &window)
        })
        .collect();
    RMatrix::from_entries(ring, rows, cols, entries).unwrap()
}

/// Coefficient pairs; mostly small, sometimes zero.
pub fn coeffs(len: usize) -> impl Strategy<Value = Vec<(i64, usize)>> {
    prop::collection::vec((prop_oneof![3 => -9i64..=9, 1 => Just(0i64)], 0usize..3), len)
}

/// `p^k * (unit)`, a non-zero-divisor in every test ring.
pub fn nzd<B: BaseRing>(ring: &Arc<Ring<B>>, k: u32, tail: &[(i64, usize)]) -> RingElem<B> {
    let p = ring.prime() as i64;
    let shifted: Vec<(i64, usize)> = tail.iter().map(|&(n, d)| (n * p, d)).collect();
    let unit = &ring.one() + &elem(ring, &shifted);
    &ring.scalar(p.pow(k)) * &unit
}

/// Unitriangular matrix (upper if `upper`) with off-diagonal entries from `c`.
pub fn unitriangular<B: BaseRing>(ring: &Arc<Ring<B>>, n: usize, upper: bool, c: &[(i64, usize)]) -> RMatrix<B> {
    let mut m = RMatrix::identity(ring, n);
    let mut k = 0;
    for i in 0..n {
        for j in 0..n {
            if (upper && j > i) || (!upper && j < i) {
                let window: Vec<(i64, usize)> = c.iter().cycle().skip(k).take(2).copied().collect();
                m.set(i, j, elem(ring, &window));
                k += 2;
            }
        }
    }
    m
}

/// `L * diag(p^k_i * unit) * U`: a presentation with pd <= 1 whose Fitting
/// ideal is `(prod p^k_i)`.
pub fn pd1_presentation<B: BaseRing>(ring: &Arc<Ring<B>>, exps: &[u32], c: &[(i64, usize)]) -> RMatrix<B> {
    let n = exps.len();
    let diag: Vec<RingElem<B>> = exps.iter().enumerate().map(|(i, &k)| nzd(ring, k, &c[i..])).collect();
    let l = unitriangular(ring, n, false, c);
    let u = unitriangular(ring, n, true, &c[1..]);
    l.mul(&RMatrix::scalar_diag(ring, &diag)).unwrap().mul(&u).unwrap()
}

pub fn exps(n: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..3, n)
}
