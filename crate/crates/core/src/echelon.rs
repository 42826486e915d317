//! Canonical echelon forms over a [`BaseRing`].
//!
//! Over `Z/p^N` this is the Howell form: reduced echelon form whose row span
//! satisfies the Howell property, so that greedy reduction decides
//! membership. Over `Z_(p)` the same procedure (minus the annihilator rows)
//! yields the Hermite form with p-power pivots. Both are unique for a given
//! row span, which makes lattice equality a plain comparison.

use crate::scalar::BaseRing;

/// Dense row-major matrix of base scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, fill: E) -> Self {
        Self { rows, cols, data: vec![fill; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }
}

pub fn mat_mul<B: BaseRing>(base: &B, a: &Mat<B::Elem>, b: &Mat<B::Elem>) -> Mat<B::Elem> {
    assert_eq!(a.cols, b.rows, "inner dimensions");
    let mut out = Mat::filled(a.rows, b.cols, base.zero());
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if base.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = b.get(k, j);
                if base.is_zero(y) {
                    continue;
                }
                let cur = base.add(out.get(i, j), &base.mul(x, y));
                out.set(i, j, cur);
            }
        }
    }
    out
}

pub fn mat_vec<B: BaseRing>(base: &B, a: &Mat<B::Elem>, x: &[B::Elem]) -> Vec<B::Elem> {
    assert_eq!(a.cols, x.len());
    (0..a.rows)
        .map(|i| {
            let mut acc = base.zero();
            for (aij, xj) in a.row(i).iter().zip(x) {
                if !base.is_zero(aij) && !base.is_zero(xj) {
                    acc = base.add(&acc, &base.mul(aij, xj));
                }
            }
            acc
        })
        .collect()
}

fn is_zero_row<B: BaseRing>(base: &B, row: &[B::Elem]) -> bool {
    row.iter().all(|x| base.is_zero(x))
}

/// `row -= q * other`, touching columns `from..`.
fn axpy<B: BaseRing>(base: &B, row: &mut [B::Elem], q: &B::Elem, other: &[B::Elem], from: usize) {
    for k in from..row.len() {
        if !base.is_zero(&other[k]) {
            row[k] = base.sub(&row[k], &base.mul(q, &other[k]));
        }
    }
}

/// Reduced echelon basis of a row span.
#[derive(Clone, Debug, PartialEq)]
pub struct Echelon<B: BaseRing> {
    pub width: usize,
    pub rows: Vec<Vec<B::Elem>>,
    /// `(column, valuation)` of each row's pivot; the pivot entry is `p^valuation`.
    pub pivots: Vec<(usize, u32)>,
}

impl<B: BaseRing> Echelon<B> {
    pub fn new(base: &B, rows: Vec<Vec<B::Elem>>, width: usize) -> Self {
        let mut active: Vec<Vec<B::Elem>> = rows
            .into_iter()
            .filter(|r| {
                debug_assert_eq!(r.len(), width);
                !is_zero_row(base, r)
            })
            .map(|mut r| {
                base.tidy_row(&mut r);
                r
            })
            .collect();
        let mut out_rows = Vec::new();
        let mut pivots = Vec::new();

        for c in 0..width {
            if active.is_empty() {
                break;
            }
            let mut best: Option<(u32, usize)> = None;
            for (idx, r) in active.iter().enumerate() {
                if let Some(v) = base.valuation(&r[c]) {
                    if best.is_none_or(|(bv, _)| v < bv) {
                        best = Some((v, idx));
                    }
                }
            }
            let Some((v, idx)) = best else { continue };
            let mut prow = active.remove(idx);
            let pv = base.p_power(v);
            let unit = base.divide(&prow[c], &pv).expect("pivot divisible by its own valuation");
            let unit_inv = base.inverse(&unit).expect("unit part invertible");
            for x in prow.iter_mut().skip(c) {
                if !base.is_zero(x) {
                    *x = base.mul(x, &unit_inv);
                }
            }
            for r in active.iter_mut() {
                if base.is_zero(&r[c]) {
                    continue;
                }
                let q = base.divide(&r[c], &pv).expect("minimal valuation pivot divides");
                axpy(base, r, &q, &prow, c);
                base.tidy_row(r);
            }
            if let Some(n) = base.modulus_exponent() {
                if v > 0 && v < n {
                    let factor = base.p_power(n - v);
                    let extra: Vec<B::Elem> = prow.iter().map(|x| base.mul(x, &factor)).collect();
                    if !is_zero_row(base, &extra) {
                        active.push(extra);
                    }
                }
            }
            active.retain(|r| !is_zero_row(base, r));
            out_rows.push(prow);
            pivots.push((c, v));
        }

        // reduce entries above each pivot to canonical residues
        for j in 0..out_rows.len() {
            let (c, v) = pivots[j];
            let (head, tail) = out_rows.split_at_mut(j);
            let pivot_row = &tail[0];
            for r in head.iter_mut() {
                let (q, _) = base.split_mod_p_power(&r[c], v);
                if !base.is_zero(&q) {
                    axpy(base, r, &q, pivot_row, c);
                }
            }
        }

        Self { width, rows: out_rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Greedy reduction of `v` restricted to columns `< limit`. Returns the
    /// reduced vector and the multipliers used, or `None` if some column
    /// below `limit` cannot be cleared.
    pub fn reduce_prefix(
        &self,
        base: &B,
        v: &[B::Elem],
        limit: usize,
    ) -> Option<(Vec<B::Elem>, Vec<(usize, B::Elem)>)> {
        let mut v = v.to_vec();
        let mut coeffs = Vec::new();
        let mut next = 0;
        for c in 0..limit.min(self.width) {
            let pivot_here = next < self.pivots.len() && self.pivots[next].0 == c;
            if base.is_zero(&v[c]) {
                if pivot_here {
                    next += 1;
                }
                continue;
            }
            if !pivot_here {
                return None;
            }
            let (_, pv) = self.pivots[next];
            let q = base.divide(&v[c], &base.p_power(pv))?;
            axpy(base, &mut v, &q, &self.rows[next], c);
            coeffs.push((next, q));
            next += 1;
        }
        Some((v, coeffs))
    }

    pub fn contains(&self, base: &B, v: &[B::Elem]) -> bool {
        match self.reduce_prefix(base, v, self.width) {
            Some((rest, _)) => is_zero_row(base, &rest),
            None => false,
        }
    }

    pub fn contains_all(&self, base: &B, other: &Echelon<B>) -> bool {
        other.rows.iter().all(|r| self.contains(base, r))
    }
}

/// Generators of `{x : a x = 0}` (column vectors).
pub fn kernel<B: BaseRing>(base: &B, a: &Mat<B::Elem>) -> Vec<Vec<B::Elem>> {
    let (m, n) = (a.rows, a.cols);
    let rows: Vec<Vec<B::Elem>> = (0..n)
        .map(|i| {
            let mut r = a.column(i);
            r.extend((0..n).map(|j| if i == j { base.one() } else { base.zero() }));
            r
        })
        .collect();
    let ech = Echelon::new(base, rows, m + n);
    ech.rows
        .iter()
        .zip(&ech.pivots)
        .filter(|(_, (c, _))| *c >= m)
        .map(|(r, _)| r[m..].to_vec())
        .collect()
}

/// Some `x` with `a x = b`, if one exists.
pub fn solve<B: BaseRing>(base: &B, a: &Mat<B::Elem>, b: &[B::Elem]) -> Option<Vec<B::Elem>> {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    let rows: Vec<Vec<B::Elem>> = (0..n)
        .map(|i| {
            let mut r = a.column(i);
            r.extend((0..n).map(|j| if i == j { base.one() } else { base.zero() }));
            r
        })
        .collect();
    let ech = Echelon::new(base, rows, m + n);
    let mut target = b.to_vec();
    target.extend((0..n).map(|_| base.zero()));
    let (rest, _) = ech.reduce_prefix(base, &target, m)?;
    if !is_zero_row(base, &rest[..m]) {
        return None;
    }
    Some(rest[m..].iter().map(|x| base.neg(x)).collect())
}
