//! Matrices over R, reduced to base-scalar linear algebra by restriction of
//! scalars.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::echelon::{self, Echelon, Mat};
use crate::error::{Error, Result};
use crate::ring::{Precision, Ring, RingElem};
use crate::scalar::BaseRing;

/// Dense matrix with entries in R.
#[derive(Clone)]
pub struct RMatrix<B: BaseRing> {
    ring: Arc<Ring<B>>,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem<B>>,
}

impl<B: BaseRing> PartialEq for RMatrix<B> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<B: BaseRing> fmt::Debug for RMatrix<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<B: BaseRing> RMatrix<B> {
    pub fn from_entries(ring: &Arc<Ring<B>>, rows: usize, cols: usize, entries: Vec<RingElem<B>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        if entries.iter().any(|e| !e.ring().same_as(ring)) {
            return Err(Error::MixedRings);
        }
        Ok(Self { ring: ring.clone(), rows, cols, entries })
    }

    pub fn from_rows(ring: &Arc<Ring<B>>, rows: Vec<Vec<RingElem<B>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_entries(ring, r, c, rows.into_iter().flatten().collect())
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(ring: &Arc<Ring<B>>, rows: usize, cols: &[Vec<RingElem<B>>]) -> Self {
        let mut m = Self::zeros(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, e) in c.iter().enumerate() {
                m.set(i, j, e.clone());
            }
        }
        m
    }

    pub fn zeros(ring: &Arc<Ring<B>>, rows: usize, cols: usize) -> Self {
        Self { ring: ring.clone(), rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Arc<Ring<B>>, n: usize) -> Self {
        Self::scalar_diag(ring, &vec![ring.one(); n])
    }

    pub fn scalar_diag(ring: &Arc<Ring<B>>, diag: &[RingElem<B>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(ring, n, n);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn ring(&self) -> &Arc<Ring<B>> {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElem<B> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem<B>) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[RingElem<B>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<RingElem<B>> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<RingElem<B>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<RingElem<B>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let entries = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Self { ring: self.ring.clone(), rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &cols)
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring.same_as(&other.ring) {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j) + &(a * b);
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("cannot add matrices of different shapes".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: &RingElem<B>) -> Self {
        Self {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| -e).collect() }
    }

    pub fn apply(&self, v: &[RingElem<B>]) -> Vec<RingElem<B>> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack needs equal row counts".into()));
        }
        let mut m = Self::zeros(&self.ring, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        Ok(self.transpose().hstack(&other.transpose())?.transpose())
    }

    pub fn block_diag(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut m = Self::zeros(&self.ring, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// Entrywise image under a map into another ring.
    pub fn map_entries<C: BaseRing>(
        &self,
        target: &Arc<Ring<C>>,
        f: impl Fn(&RingElem<B>) -> RingElem<C>,
    ) -> RMatrix<C> {
        RMatrix { ring: target.clone(), rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// The base-scalar matrix of the R-linear map on the
    /// rank-`rows * rank(R)` lattice; block `(i, j)` is the regular
    /// representation of entry `(i, j)`.
    pub fn expand(&self) -> Mat<B::Elem> {
        let r = self.ring.rank();
        let base = self.ring.base();
        let mut out = Mat::filled(self.rows * r, self.cols * r, base.zero());
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let block = e.mult_matrix();
                for a in 0..r {
                    for b in 0..r {
                        let v = block.get(a, b);
                        if !base.is_zero(v) {
                            out.set(i * r + a, j * r + b, v.clone());
                        }
                    }
                }
            }
        }
        out
    }

    /// Splits a base-scalar vector of length `k * rank(R)` into `k` ring elements.
    pub fn vector_from_base(ring: &Arc<Ring<B>>, v: &[B::Elem]) -> Vec<RingElem<B>> {
        let r = ring.rank();
        v.chunks(r).map(|c| ring.from_vector(c)).collect()
    }

    pub fn vector_to_base(v: &[RingElem<B>]) -> Vec<B::Elem> {
        v.iter().flat_map(|e| e.to_vector()).collect()
    }

    /// Generators of the syzygy module `{x in R^cols : A x = 0}`, as the
    /// columns of the returned matrix.
    pub fn kernel(&self) -> Self {
        let base_ker = echelon::kernel(self.ring.base(), &self.expand());
        let vecs: Vec<Vec<RingElem<B>>> =
            base_ker.iter().map(|v| Self::vector_from_base(&self.ring, v)).collect();
        let pruned = prune_generators(&self.ring, self.cols, vecs);
        Self::from_columns(&self.ring, self.cols, &pruned)
    }

    /// Base-lattice generators of `{x : A x = 0 mod (p^a, deg >= b)}`.
    pub fn kernel_at(&self, prec: Precision) -> Vec<Vec<B::Elem>> {
        let r = self.ring.rank();
        let base = self.ring.base();
        let extra = self.ring.precision_ideal_rows(prec);
        let a = self.expand();
        let width = self.cols * r;
        let mut m = Mat::filled(self.rows * r, width + self.rows * extra.len(), base.zero());
        for i in 0..a.rows {
            for j in 0..width {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for blk in 0..self.rows {
            for (k, e) in extra.iter().enumerate() {
                for (t, c) in e.iter().enumerate() {
                    m.set(blk * r + t, width + blk * extra.len() + k, c.clone());
                }
            }
        }
        echelon::kernel(base, &m).into_iter().map(|mut v| {
            v.truncate(width);
            v
        }).collect()
    }

    /// Some `x` with `A x = b`, if one exists over R.
    pub fn solve(&self, b: &[RingElem<B>]) -> Option<Vec<RingElem<B>>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let x = echelon::solve(self.ring.base(), &self.expand(), &Self::vector_to_base(b))?;
        Some(Self::vector_from_base(&self.ring, &x))
    }

    /// Some `X` with `A X = B`, if every column is solvable.
    pub fn solve_matrix(&self, b: &Self) -> Option<Self> {
        let cols: Option<Vec<Vec<RingElem<B>>>> = (0..b.cols).map(|j| self.solve(&b.column(j))).collect();
        Some(Self::from_columns(&self.ring, self.cols, &cols?))
    }

    /// Base-scalar lattice spanned by the R-span of the columns.
    pub fn column_lattice(&self) -> Echelon<B> {
        span_lattice(&self.ring, self.rows, &self.columns())
    }

    pub fn det(&self) -> Result<RingElem<B>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("det of a {}x{} matrix", self.rows, self.cols)));
        }
        let cols: Vec<usize> = (0..self.cols).collect();
        let mut memo = HashMap::new();
        Ok(self.minor_memo(&cols, full_mask(self.cols), &mut memo))
    }

    /// Laplace expansion along the last of the first `popcount(mask)` rows,
    /// memoized on the column subset.
    fn minor_memo(&self, rows: &[usize], mask: u64, memo: &mut HashMap<u64, RingElem<B>>) -> RingElem<B> {
        let k = mask.count_ones() as usize;
        if k == 0 {
            return self.ring.one();
        }
        if let Some(v) = memo.get(&mask) {
            return v.clone();
        }
        let row = rows[k - 1];
        let mut acc = self.ring.zero();
        let mut pos = 0;
        for j in 0..64 {
            if mask & (1u64 << j) == 0 {
                continue;
            }
            let a = self.get(row, j);
            if !a.is_zero() {
                let sub = self.minor_memo(rows, mask & !(1u64 << j), memo);
                if !sub.is_zero() {
                    let term = a * &sub;
                    acc = if (k - 1 + pos).is_multiple_of(2) { &acc + &term } else { &acc - &term };
                }
            }
            pos += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> RingElem<B> {
        self.submatrix(rows, cols).det().expect("square by construction")
    }

    /// All `k x k` minors, ordered by (row subset, column subset) in
    /// lexicographic order. Empty if `k` exceeds a dimension.
    pub fn minors(&self, k: usize) -> Vec<RingElem<B>> {
        if k > self.rows || k > self.cols {
            return Vec::new();
        }
        let row_sets = subsets(self.rows, k);
        let col_sets = subsets(self.cols, k);
        row_sets
            .par_iter()
            .flat_map_iter(|rs| {
                let sub = self.select_rows(rs);
                let mut memo = HashMap::new();
                let rows: Vec<usize> = (0..k).collect();
                col_sets
                    .iter()
                    .map(|cs| sub.minor_memo(&rows, mask_of(cs), &mut memo))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Visits `k x k` minors in the order of [`Self::minors`], stopping early
    /// when the visitor returns `false`.
    pub fn for_each_minor(&self, k: usize, mut visit: impl FnMut(&[usize], &[usize], RingElem<B>) -> bool) {
        if k > self.rows || k > self.cols {
            return;
        }
        let col_sets = subsets(self.cols, k);
        let rows_k: Vec<usize> = (0..k).collect();
        for rs in subsets(self.rows, k) {
            let sub = self.select_rows(&rs);
            let mut memo = HashMap::new();
            for cs in &col_sets {
                let m = sub.minor_memo(&rows_k, mask_of(cs), &mut memo);
                if !visit(&rs, cs, m) {
                    return;
                }
            }
        }
    }

    /// Classical adjugate of a square matrix: `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut out = Self::zeros(&self.ring, n, n);
        if n == 1 {
            out.set(0, 0, self.ring.one());
            return Ok(out);
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let m = self.minor(&rows, &cols);
                out.set(i, j, if (i + j) % 2 == 0 { m } else { -&m });
            }
        }
        Ok(out)
    }
}

fn full_mask(n: usize) -> u64 {
    assert!(n <= 64, "matrices wider than 64 columns are not supported");
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_of(cols: &[usize]) -> u64 {
    cols.iter().fold(0, |m, &c| m | (1u64 << c))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Base rows spanning the R-module generated by the given R-vectors.
fn r_multiples<B: BaseRing>(ring: &Arc<Ring<B>>, v: &[RingElem<B>]) -> Vec<Vec<B::Elem>> {
    (0..ring.rank())
        .map(|b| {
            let e = ring.basis_element(b);
            v.iter().flat_map(|x| (&e * x).to_vector()).collect()
        })
        .collect()
}

pub(crate) fn span_lattice<B: BaseRing>(ring: &Arc<Ring<B>>, len: usize, gens: &[Vec<RingElem<B>>]) -> Echelon<B> {
    let rows: Vec<Vec<B::Elem>> = gens.iter().flat_map(|g| r_multiples(ring, g)).collect();
    Echelon::new(ring.base(), rows, len * ring.rank())
}

/// Greedily drops vectors already in the R-span of the earlier kept ones.
pub(crate) fn prune_generators<B: BaseRing>(
    ring: &Arc<Ring<B>>,
    len: usize,
    vecs: Vec<Vec<RingElem<B>>>,
) -> Vec<Vec<RingElem<B>>> {
    let width = len * ring.rank();
    let base = ring.base();
    let mut ech = Echelon::new(base, Vec::new(), width);
    let mut kept = Vec::new();
    for v in vecs {
        if v.iter().all(|x| x.is_zero()) || ech.contains(base, &RMatrix::vector_to_base(&v)) {
            continue;
        }
        let mut rows = ech.rows.clone();
        rows.extend(r_multiples(ring, &v));
        ech = Echelon::new(base, rows, width);
        kept.push(v);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;

    #[test]
    fn expand_examples() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        let m = RMatrix::from_rows(&r, vec![vec![g]]).unwrap().expand();
        let b = r.base();
        assert_eq!(m.data, vec![b.zero(), b.one(), b.one(), b.zero()]);

        let t = Ring::truncated(3, &[], 1, 2, 2).unwrap();
        let m = RMatrix::from_rows(&t, vec![vec![t.gamma(0)]]).unwrap().expand();
        assert_eq!(m.data, vec![1, 0, 1, 1]);
    }

    #[test]
    fn kernel_of_g_minus_one() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        let a = RMatrix::from_rows(&r, vec![vec![&g - &r.one()]]).unwrap();
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        let v = k.get(0, 0).clone();
        // generated by g + 1 up to a unit
        let target = &g + &r.one();
        let lat = RMatrix::from_rows(&r, vec![vec![v]]).unwrap().column_lattice();
        let lat2 = RMatrix::from_rows(&r, vec![vec![target]]).unwrap().column_lattice();
        assert_eq!(lat, lat2);
        assert_eq!(RMatrix::from_rows(&r, vec![vec![r.scalar(3)]]).unwrap().kernel().cols(), 0);
    }

    #[test]
    fn solve_examples() {
        let r = Ring::exact(3, &[2]).unwrap();
        let a = RMatrix::from_rows(&r, vec![vec![r.scalar(3)]]).unwrap();
        assert_eq!(a.solve(&[r.scalar(6)]).unwrap(), vec![r.scalar(2)]);
        let g = r.group_generator(0);
        let a = RMatrix::from_rows(&r, vec![vec![&g - &r.one()]]).unwrap();
        assert!(a.solve(&[r.one()]).is_none());
    }

    #[test]
    fn det_and_adjugate() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        let gm1 = &g - &r.one();
        let d = RMatrix::scalar_diag(&r, &[r.scalar(3), gm1.clone()]);
        assert_eq!(d.det().unwrap(), &r.scalar(3) * &gm1);
        assert!(RMatrix::identity(&r, 4).det().unwrap().is_one());
        let a = RMatrix::from_rows(&r, vec![vec![r.scalar(2), g.clone()], vec![r.one(), r.scalar(5)]]).unwrap();
        let prod = a.mul(&a.adjugate().unwrap()).unwrap();
        let det = a.det().unwrap();
        assert_eq!(prod, RMatrix::scalar_diag(&r, &[det.clone(), det]));
    }

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 3), Vec::<Vec<usize>>::new());
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}
