//! Finitely presented R-modules `coker(A : R^m -> R^n)`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::echelon::Echelon;
use crate::error::{Error, Result};
use crate::hom::RingHom;
use crate::matrix::{span_lattice, subsets, RMatrix};
use crate::ring::{Precision, Ring, RingElem};
use crate::scalar::BaseRing;

/// Random column combinations tried by [`FPModule::pd_le_1_witness`].
pub const PD_WITNESS_ATTEMPTS: usize = 64;

#[derive(Clone)]
pub struct FPModule<B: BaseRing> {
    ring: Arc<Ring<B>>,
    rel: RMatrix<B>,
    precision: Option<Precision>,
}

impl<B: BaseRing> fmt::Debug for FPModule<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FPModule(n = {}) {:?}", self.generators(), self.rel)
    }
}

/// The result of removing generators that a relation expresses through the
/// others.
#[derive(Clone, Debug)]
pub struct Minimized<B: BaseRing> {
    pub module: FPModule<B>,
    /// `n' x n`: image of each original generator in the minimized module.
    pub to_min: RMatrix<B>,
    /// `n x n'`: each minimized generator as an original generator.
    pub from_min: RMatrix<B>,
}

/// Kernel of a surjection `S -> T` together with its inclusion into `S`.
#[derive(Clone, Debug)]
pub struct KernelData<B: BaseRing> {
    pub module: FPModule<B>,
    /// `n_S x k`: the kernel generators in the generators of `S`.
    pub inclusion: RMatrix<B>,
}

/// The precision ideal in each of `n` coordinates, as base rows.
pub(crate) fn block_precision_rows<B: BaseRing>(ring: &Arc<Ring<B>>, n: usize, p: Precision) -> Vec<Vec<B::Elem>> {
    let r = ring.rank();
    let rows = ring.precision_ideal_rows(p);
    let mut out = Vec::with_capacity(n * rows.len());
    for k in 0..n {
        for e in &rows {
            let mut row = vec![ring.base().zero(); n * r];
            row[k * r..(k + 1) * r].clone_from_slice(e);
            out.push(row);
        }
    }
    out
}

pub(crate) type LossKey = (u32, u32, u32, std::cmp::Reverse<(u32, u32, u32)>);

/// Ordering key for candidate killing elements, smaller is better: adic
/// order (products of killers must survive truncation), then the Newton
/// loss, then the precision left after dividing by `f`.
pub(crate) fn loss_key<B: BaseRing>(f: &RingElem<B>) -> LossKey {
    let (la, ld) = f.precision_loss().unwrap_or((u32::MAX / 4, u32::MAX / 4));
    let p = f.ring().precision().and_then(|cap| f.annihilator_precision(cap));
    let rank = p.map_or((0, 0, 0), |p| (p.p_adic + p.degree, p.p_adic.min(p.degree), p.degree));
    (f.adic_order(), la + ld, la, std::cmp::Reverse(rank))
}

/// Whether an echelon lattice is all of the base lattice of width `width`.
pub(crate) fn lattice_is_full<B: BaseRing>(ech: &Echelon<B>, width: usize) -> bool {
    ech.rank() == width && ech.pivots.iter().all(|(_, v)| *v == 0)
}

impl<B: BaseRing> FPModule<B> {
    /// The cokernel of `rel` (an `n x m` matrix; columns are relations).
    pub fn new(rel: RMatrix<B>) -> Self {
        let ring = rel.ring().clone();
        let precision = ring.precision();
        Self { ring, rel, precision }
    }

    /// `n` generators subject to the given relation vectors.
    pub fn from_relations(ring: &Arc<Ring<B>>, n: usize, relations: &[Vec<RingElem<B>>]) -> Self {
        Self::new(RMatrix::from_columns(ring, n, relations))
    }

    /// `R / (f_1, ..., f_k)`.
    pub fn cyclic(ring: &Arc<Ring<B>>, fs: &[RingElem<B>]) -> Self {
        let cols: Vec<Vec<RingElem<B>>> = fs.iter().map(|f| vec![f.clone()]).collect();
        Self::from_relations(ring, 1, &cols)
    }

    pub fn free(ring: &Arc<Ring<B>>, n: usize) -> Self {
        Self::new(RMatrix::zeros(ring, n, 0))
    }

    pub fn zero(ring: &Arc<Ring<B>>) -> Self {
        Self::free(ring, 0)
    }

    pub fn ring(&self) -> &Arc<Ring<B>> {
        &self.ring
    }

    pub fn relations(&self) -> &RMatrix<B> {
        &self.rel
    }

    pub fn generators(&self) -> usize {
        self.rel.rows()
    }

    pub fn precision(&self) -> Option<Precision> {
        self.precision
    }

    /// Adds relation vectors.
    pub fn with_relations(&self, extra: &[Vec<RingElem<B>>]) -> Result<Self> {
        let m = RMatrix::from_columns(&self.ring, self.generators(), extra);
        Ok(Self { rel: self.rel.hstack(&m)?, ..self.clone() })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(Self { ring: self.ring.clone(), rel: self.rel.block_diag(&other.rel)?, precision: self.precision })
    }

    pub fn base_change(&self, h: &RingHom<B>) -> Result<Self> {
        Ok(Self::new(h.apply_matrix(&self.rel)?))
    }

    /// Base lattice of the relation submodule of `R^n`.
    pub fn relation_lattice(&self) -> Echelon<B> {
        span_lattice(&self.ring, self.generators(), &self.rel.columns())
    }

    pub fn is_zero(&self) -> bool {
        let n = self.generators();
        n == 0 || lattice_is_full(&self.relation_lattice(), n * self.ring.rank())
    }

    /// Eliminates generators killed modulo the others by a unit entry.
    pub fn minimize(&self) -> Minimized<B> {
        let ring = &self.ring;
        let mut a = self.rel.clone();
        let mut to_min = RMatrix::identity(ring, self.generators());
        let mut from_min = RMatrix::identity(ring, self.generators());
        loop {
            let keep: Vec<usize> = (0..a.cols()).filter(|&j| (0..a.rows()).any(|i| !a.get(i, j).is_zero())).collect();
            if keep.len() < a.cols() {
                a = a.select_columns(&keep);
            }
            let mut pivot = None;
            'search: for j in 0..a.cols() {
                for i in 0..a.rows() {
                    let e = a.get(i, j);
                    if !e.is_zero() && e.is_unit() {
                        pivot = Some((i, j, e.inverse().expect("unit")));
                        break 'search;
                    }
                }
            }
            let Some((i, j, uinv)) = pivot else { break };
            let n = a.rows();
            let rows: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let cols: Vec<usize> = (0..a.cols()).filter(|&k| k != j).collect();
            let mut next = a.submatrix(&rows, &cols);
            for (ni, &oi) in rows.iter().enumerate() {
                let f = &a.get(oi, j).clone() * &uinv;
                if f.is_zero() {
                    continue;
                }
                for (nj, &oj) in cols.iter().enumerate() {
                    let v = next.get(ni, nj) - &(&f * a.get(i, oj));
                    next.set(ni, nj, v);
                }
            }
            // e_i = -u^{-1} sum_{k != i} a_kj e_k
            let mut p = RMatrix::zeros(ring, n - 1, n);
            for (ni, &oi) in rows.iter().enumerate() {
                p.set(ni, oi, ring.one());
                p.set(ni, i, -&(a.get(oi, j) * &uinv));
            }
            to_min = p.mul(&to_min).expect("shapes");
            from_min = from_min.select_columns(&rows);
            a = next;
        }
        Minimized { module: Self { ring: ring.clone(), rel: a, precision: self.precision }, to_min, from_min }
    }

    /// Torsion test. Exact mode: the module is finite, i.e. the relations
    /// have full rank over Q. Truncated mode: the Fitting ideal contains an
    /// element regular to precision.
    pub fn is_torsion(&self) -> bool {
        let n = self.generators();
        if n == 0 {
            return true;
        }
        if B::EXACT {
            return self.relation_lattice().rank() == n * self.ring.rank();
        }
        self.torsion_witness().is_some()
    }

    /// An element of the Fitting ideal that is a non-zero-divisor (regular to
    /// precision in truncated mode), preferring small precision loss.
    pub fn torsion_witness(&self) -> Option<RingElem<B>> {
        let m = self.minimize().module;
        let n = m.generators();
        if n == 0 {
            return Some(self.ring.one());
        }
        let minors = m.rel.minors(n);
        let mut best: Option<(RingElem<B>, LossKey)> = None;
        for f in minors.iter().filter(|f| !f.is_zero()) {
            if !f.is_regular_to_precision() {
                continue;
            }
            let loss = if B::EXACT { (0, 0, 0, std::cmp::Reverse((0, 0, 0))) } else { loss_key(f) };
            if best.as_ref().is_none_or(|(_, l)| loss < *l) {
                best = Some((f.clone(), loss));
            }
        }
        if let Some((f, _)) = best {
            return Some(f);
        }
        let nonzero: Vec<&RingElem<B>> = minors.iter().filter(|f| !f.is_zero()).collect();
        if nonzero.is_empty() {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let gs = self.ring.group_size();
        for _ in 0..PD_WITNESS_ATTEMPTS {
            let mut f = self.ring.zero();
            for x in &nonzero {
                let c: i64 = rng.gen_range(-3..=3);
                let h = self.ring.basis_element(rng.gen_range(0..gs) * self.ring.monomial_count());
                f = &f + &(&h * x).scale(&self.ring.base().from_i64(c));
            }
            if !f.is_zero() && f.is_regular_to_precision() {
                return Some(f);
            }
        }
        None
    }

    /// A non-zero-divisor killing generator `j`, of least precision loss
    /// among the annihilator generators; falls back to [`Self::torsion_witness`].
    pub fn generator_annihilator(&self, j: usize) -> Option<RingElem<B>> {
        let n = self.generators();
        let mut e = RMatrix::zeros(&self.ring, n, 1);
        e.set(j, 0, self.ring.one());
        let k = e.hstack(&self.rel).ok()?.kernel();
        // relations supported on generator j alone are annihilators too
        let single = (0..self.rel.cols())
            .filter(|&c| (0..n).all(|i| i == j || self.rel.get(i, c).is_zero()))
            .map(|c| self.rel.get(j, c).clone());
        let best = (0..k.cols())
            .map(|c| k.get(0, c).clone())
            .chain(single)
            .filter(|f| !f.is_zero() && f.is_regular_to_precision())
            .min_by_key(|f| loss_key(f));
        best.or_else(|| self.torsion_witness())
    }

    /// Drops relations that lie in the span of the remaining ones plus the
    /// precision ideal `(p^a, deg >= b)`. The module is unchanged modulo
    /// that ideal; relations lying entirely inside it are kept.
    pub fn clean_at(&self, p: Precision) -> Self {
        let ring = &self.ring;
        let base = ring.base();
        let (n, r) = (self.generators(), ring.rank());
        let extra = block_precision_rows(ring, n, p);
        let cols = self.rel.columns();
        let mut keep: Vec<usize> = (0..cols.len()).collect();
        for j in (0..cols.len()).rev() {
            let v = RMatrix::vector_to_base(&cols[j]);
            if ring.vector_in_precision_ideal(&v, p) {
                continue;
            }
            let others: Vec<Vec<RingElem<B>>> = keep.iter().filter(|&&k| k != j).map(|&k| cols[k].clone()).collect();
            let mut rows = span_lattice(ring, n, &others).rows;
            rows.extend(extra.iter().cloned());
            if Echelon::new(base, rows, n * r).contains(base, &v) {
                keep.retain(|&k| k != j);
            }
        }
        Self { ring: ring.clone(), rel: self.rel.select_columns(&keep), precision: self.precision }.tagged(Some(p))
    }

    pub fn tagged(mut self, p: Option<Precision>) -> Self {
        self.precision = crate::ring::min_precision(self.precision, p);
        self
    }

    /// Smallest `k` with `p^k M = 0`.
    pub fn annihilator_exponent(&self) -> Result<u32> {
        let n = self.generators();
        if n == 0 {
            return Ok(0);
        }
        if B::EXACT && !self.is_torsion() {
            return Err(Error::NotTorsion);
        }
        let base = self.ring.base();
        let lat = self.relation_lattice();
        let width = n * self.ring.rank();
        let bound = lat.pivots.iter().map(|(_, v)| *v).sum::<u32>() + 1;
        let bound = base.modulus_exponent().map_or(bound, |e| bound.min(e));
        for k in 0..=bound {
            let pk = base.p_power(k);
            let ok = (0..width).all(|i| {
                let mut v = vec![base.zero(); width];
                v[i] = pk.clone();
                lat.contains(base, &v)
            });
            if ok {
                return Ok(k);
            }
        }
        Err(Error::NotTorsion)
    }

    /// `log_p` of the order of a finite (exact-mode) module.
    pub fn log_order(&self) -> Option<u32> {
        if !B::EXACT || !self.is_torsion() {
            return None;
        }
        Some(self.relation_lattice().pivots.iter().map(|(_, v)| *v).sum())
    }

    /// A square presentation matrix of this module with non-zero-divisor
    /// determinant, found by bounded search.
    pub fn pd_le_1_witness(&self) -> Result<RMatrix<B>> {
        let m = self.minimize().module;
        let n = m.generators();
        if n == 0 {
            return Ok(RMatrix::zeros(&self.ring, 0, 0));
        }
        let a = &m.rel;
        if a.cols() < n {
            return Err(Error::PdWitnessNotFound("fewer relations than generators".into()));
        }
        let good_det = |h: &RMatrix<B>| h.det().map(|d| d.is_regular_to_precision()).unwrap_or(false);
        if a.cols() == n {
            if good_det(a) {
                return Ok(a.clone());
            }
            return Err(Error::PdWitnessNotFound("square presentation has a zero-divisor determinant".into()));
        }
        let full = m.relation_lattice();
        let spans = |h: &RMatrix<B>| span_lattice(&self.ring, n, &h.columns()) == full;
        for cols in subsets(a.cols(), n) {
            let h = a.select_columns(&cols);
            if good_det(&h) && spans(&h) {
                return Ok(h);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x9d);
        for _ in 0..PD_WITNESS_ATTEMPTS {
            let mut c = RMatrix::zeros(&self.ring, a.cols(), n);
            for i in 0..a.cols() {
                for j in 0..n {
                    c.set(i, j, self.ring.scalar(rng.gen_range(-2..=2)));
                }
            }
            let h = a.mul(&c)?;
            if good_det(&h) && spans(&h) {
                return Ok(h);
            }
        }
        Err(Error::PdWitnessNotFound(format!("no square presentation after {PD_WITNESS_ATTEMPTS} attempts")))
    }

    /// Kernel of the map `source -> target` sending generator `j` of the
    /// source to column `j` of `f`. The map must be well defined and onto.
    pub fn kernel_of_surjection(f: &RMatrix<B>, source: &Self, target: &Self) -> Result<KernelData<B>> {
        let ring = &source.ring;
        if f.rows() != target.generators() || f.cols() != source.generators() {
            return Err(Error::Dimension(format!(
                "map is {}x{} but modules have {} -> {} generators",
                f.rows(),
                f.cols(),
                source.generators(),
                target.generators()
            )));
        }
        let image_of_rel = f.mul(&source.rel)?;
        if target.rel.solve_matrix(&image_of_rel).is_none() {
            return Err(Error::NotWellDefined("a source relation does not map into the target relations".into()));
        }
        let combined = f.hstack(&target.rel)?;
        let nt = target.generators();
        if !lattice_is_full(&span_lattice(ring, nt, &combined.columns()), nt * ring.rank()) {
            return Err(Error::NotSurjective);
        }
        let ns = source.generators();
        let ker = combined.kernel();
        let top: Vec<usize> = (0..ns).collect();
        let kmat = ker.select_rows(&top);
        let rel = kmat.hstack(&source.rel)?.kernel();
        let k = kmat.cols();
        let rel = rel.select_rows(&(0..k).collect::<Vec<_>>());
        Ok(KernelData {
            module: Self { ring: ring.clone(), rel, precision: source.precision },
            inclusion: kmat,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torsion_and_exponent() {
        let r = Ring::exact(3, &[2]).unwrap();
        assert!(!FPModule::free(&r, 1).is_torsion());
        let g = r.group_generator(0);
        let m = FPModule::cyclic(&r, &[r.scalar(3), &g - &r.one()]);
        assert!(m.is_torsion());
        assert_eq!(m.annihilator_exponent().unwrap(), 1);
        assert_eq!(FPModule::cyclic(&r, &[r.scalar(9)]).annihilator_exponent().unwrap(), 2);
        assert!(!FPModule::cyclic(&r, &[&g - &r.one()]).is_torsion());
    }

    #[test]
    fn kernel_examples() {
        let r = Ring::exact(3, &[]).unwrap();
        let one = RMatrix::identity(&r, 1);
        let k = FPModule::kernel_of_surjection(&one, &FPModule::free(&r, 1), &FPModule::cyclic(&r, &[r.scalar(3)]))
            .unwrap();
        assert_eq!(k.module.minimize().module.generators(), 1);
        assert!(!k.module.is_torsion());

        let k = FPModule::kernel_of_surjection(
            &one,
            &FPModule::cyclic(&r, &[r.scalar(9)]),
            &FPModule::cyclic(&r, &[r.scalar(3)]),
        )
        .unwrap();
        assert_eq!(k.module.log_order(), Some(1));
        assert_eq!(k.module.annihilator_exponent().unwrap(), 1);

        let m = FPModule::cyclic(&r, &[r.scalar(9)]);
        assert!(FPModule::kernel_of_surjection(&one, &m, &m).unwrap().module.is_zero());

        let not_onto = RMatrix::scalar_diag(&r, &[r.scalar(3)]);
        assert_eq!(
            FPModule::kernel_of_surjection(&not_onto, &FPModule::free(&r, 1), &m).unwrap_err(),
            Error::NotSurjective
        );
    }

    #[test]
    fn minimize_drops_unit_relations() {
        let r = Ring::exact(5, &[3]).unwrap();
        let g = r.group_generator(0);
        let rel = RMatrix::from_rows(&r, vec![vec![r.one(), r.scalar(5)], vec![g.clone(), r.zero()]]).unwrap();
        let m = FPModule::new(rel).minimize();
        assert_eq!(m.module.generators(), 1);
        assert_eq!(m.module.log_order(), Some(3));
    }

    #[test]
    fn pd_witness_examples() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        assert!(FPModule::cyclic(&r, &[r.scalar(9)]).pd_le_1_witness().is_ok());
        let d = RMatrix::scalar_diag(&r, &[r.scalar(3), &g + &r.scalar(2)]);
        assert!(FPModule::new(d).pd_le_1_witness().is_ok());
        // 2 is invertible, so (3, g - 1) = (4 - g) is principal
        let m = FPModule::cyclic(&r, &[r.scalar(3), &g - &r.one()]);
        let h = m.pd_le_1_witness().unwrap();
        assert_eq!((h.rows(), h.cols()), (1, 1));
        // over Z_(3)[C_3] the residue field has infinite projective dimension
        let r3 = Ring::exact(3, &[3]).unwrap();
        let g3 = r3.group_generator(0);
        let m = FPModule::cyclic(&r3, &[r3.scalar(3), &g3 - &r3.one()]);
        assert!(matches!(m.pd_le_1_witness(), Err(Error::PdWitnessNotFound(_))));
    }
}
