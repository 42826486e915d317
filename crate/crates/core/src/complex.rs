//! Bounded complexes of finite free R-modules, their cohomology, cones, the
//! determinant into fractional ideals, and the map from modules to
//! complexes given by finite free resolutions.
//!
//! Sign convention: `Det(F) = prod_i Det(F^i)^{(-1)^i}`, normalized so that a
//! two-term complex `[R^a --h--> R^a]` in degrees `(k, k+1)` has determinant
//! `(det h)^{(-1)^k}`. In particular a resolution of `P` in degrees
//! `(-1, 0)` has determinant `Fitt(P)^{-1}`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hom::RingHom;
use crate::ideal::{FracElem, FracIdeal};
use crate::matrix::{span_lattice, subsets, RMatrix};
use crate::module::FPModule;
use crate::ring::{Precision, Ring, RingElem};
use crate::scalar::BaseRing;

/// Maximal length of the free resolutions searched for by [`phi`].
pub const RESOLUTION_DEPTH: usize = 8;

/// `F^lo -> ... -> F^hi`; `diffs[k]` maps degree `lo + k` to `lo + k + 1`.
#[derive(Clone, Debug)]
pub struct PerfectComplex<B: BaseRing> {
    ring: Arc<Ring<B>>,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<RMatrix<B>>,
}

/// A degreewise map of complexes `F -> G`; `maps[i - lo]` acts in degree `i`.
#[derive(Clone, Debug)]
pub struct ChainMap<B: BaseRing> {
    pub source: PerfectComplex<B>,
    pub target: PerfectComplex<B>,
    pub lo: i64,
    pub maps: Vec<RMatrix<B>>,
}

/// A formal integer combination of complexes.
#[derive(Clone, Debug)]
pub struct K0Class<B: BaseRing> {
    pub terms: Vec<(PerfectComplex<B>, i64)>,
}

impl<B: BaseRing> PerfectComplex<B> {
    pub fn new(ring: &Arc<Ring<B>>, lo: i64, ranks: Vec<usize>, diffs: Vec<RMatrix<B>>) -> Result<Self> {
        if ranks.is_empty() {
            return Err(Error::Dimension("a complex needs at least one degree".into()));
        }
        if diffs.len() + 1 != ranks.len() {
            return Err(Error::Dimension(format!("{} ranks need {} differentials", ranks.len(), ranks.len() - 1)));
        }
        for (k, d) in diffs.iter().enumerate() {
            if !d.ring().same_as(ring) {
                return Err(Error::MixedRings);
            }
            if d.rows() != ranks[k + 1] || d.cols() != ranks[k] {
                return Err(Error::Dimension(format!(
                    "differential at degree {} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    ranks[k + 1],
                    ranks[k]
                )));
            }
        }
        for k in 0..diffs.len().saturating_sub(1) {
            if !diffs[k + 1].mul(&diffs[k])?.is_zero() {
                return Err(Error::NotAComplex(lo + k as i64));
            }
        }
        Ok(Self { ring: ring.clone(), lo, ranks, diffs })
    }

    pub fn zero(ring: &Arc<Ring<B>>) -> Self {
        Self { ring: ring.clone(), lo: 0, ranks: vec![0], diffs: Vec::new() }
    }

    /// `[R^a --h--> R^b]` with the source in degree `lo`.
    pub fn two_term(h: &RMatrix<B>, lo: i64) -> Self {
        Self { ring: h.ring().clone(), lo, ranks: vec![h.cols(), h.rows()], diffs: vec![h.clone()] }
    }

    pub fn ring(&self) -> &Arc<Ring<B>> {
        &self.ring
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn differentials(&self) -> &[RMatrix<B>] {
        &self.diffs
    }

    pub fn rank(&self, i: i64) -> usize {
        if i < self.lo || i > self.hi() {
            0
        } else {
            self.ranks[(i - self.lo) as usize]
        }
    }

    /// `d^i : F^i -> F^{i+1}` (a zero matrix outside the stored range).
    pub fn diff(&self, i: i64) -> RMatrix<B> {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            RMatrix::zeros(&self.ring, self.rank(i + 1), self.rank(i))
        }
    }

    /// `F[n]^i = F^{i+n}` with differentials multiplied by `(-1)^n`.
    pub fn shift(&self, n: i64) -> Self {
        let diffs = if n.rem_euclid(2) == 1 { self.diffs.iter().map(|d| d.neg()).collect() } else { self.diffs.clone() };
        Self { ring: self.ring.clone(), lo: self.lo - n, ranks: self.ranks.clone(), diffs }
    }

    /// Drops zero modules at both ends.
    pub fn trimmed(&self) -> Self {
        let first = self.ranks.iter().position(|&r| r > 0);
        let Some(first) = first else { return Self::zero(&self.ring) };
        let last = self.ranks.iter().rposition(|&r| r > 0).unwrap();
        Self {
            ring: self.ring.clone(),
            lo: self.lo + first as i64,
            ranks: self.ranks[first..=last].to_vec(),
            diffs: self.diffs[first..last].to_vec(),
        }
    }

    /// `H^i(F)` as a finitely presented module.
    pub fn cohomology(&self, i: i64) -> FPModule<B> {
        let z = self.diff(i).kernel();
        let k = z.cols();
        if k == 0 {
            return FPModule::zero(&self.ring);
        }
        let incoming = self.diff(i - 1);
        let coords = z.solve_matrix(&incoming).expect("image lies in the kernel");
        let syz = z.kernel();
        FPModule::new(syz.hstack(&coords).expect("same row count"))
    }

    pub fn is_torsion(&self) -> bool {
        (self.lo..=self.hi()).all(|i| self.cohomology(i).is_torsion())
    }

    pub fn is_acyclic(&self) -> bool {
        (self.lo..=self.hi()).all(|i| self.cohomology(i).is_zero())
    }

    pub fn apply_hom(&self, h: &RingHom<B>) -> Result<Self> {
        let diffs = self.diffs.iter().map(|d| h.apply_matrix(d)).collect::<Result<Vec<_>>>()?;
        Self::new(h.target(), self.lo, self.ranks.clone(), diffs)
    }

    /// The determinant as an explicit fraction.
    pub fn det(&self) -> Result<FracElem<B>> {
        let mut acc = FracElem::one(&self.ring);
        self.reduce(&mut |h, sign_exp| {
            let d = h.det()?;
            acc = acc.mul(&FracElem::new(d, self.ring.one()).pow(sign_exp));
            Ok(())
        })?;
        Ok(acc)
    }

    pub fn det_ideal(&self) -> Result<FracIdeal<B>> {
        self.det()?.ideal()
    }

    /// `[F] = sum_j sign_j * [phi(coker h_j)]` in K_0.
    pub fn k0_reduce(&self) -> Result<Vec<(FPModule<B>, i64)>> {
        let mut out = Vec::new();
        self.reduce(&mut |h, sign_exp| {
            // (det h)^{sign_exp} = det(phi(coker h))^{-sign_exp}
            out.push((FPModule::new(h.clone()), -sign_exp));
            Ok(())
        })?;
        Ok(out)
    }

    /// Splits off two-term pieces `[R^a --h--> R^a]` with non-zero-divisor
    /// `det h`, reporting each with the exponent of `det h` in `Det(F)`.
    fn reduce(&self, emit: &mut dyn FnMut(&RMatrix<B>, i64) -> Result<()>) -> Result<()> {
        let f = self.trimmed();
        if f.ranks == [0] {
            return Ok(());
        }
        let (lo, hi) = (f.lo, f.hi());
        if lo == hi {
            return Err(Error::ComplexNotTorsion(format!("free module alone in degree {lo}")));
        }
        let d = f.diff(hi - 1);
        let a = f.rank(hi);
        if lo + 1 == hi {
            if !d.is_square() {
                return Err(Error::ComplexNotTorsion(format!("ranks differ in degrees {lo}, {hi}")));
            }
            if !d.det()?.is_regular_to_precision() {
                return Err(Error::ComplexNotTorsion(format!("determinant in degrees {lo}, {hi} is a zero divisor")));
            }
            return emit(&d, if lo.rem_euclid(2) == 0 { 1 } else { -1 });
        }
        let (s, killer) = split_top(&d, a)?;
        // [F^hi --killer--> F^hi] in degrees (hi-1, hi)
        let top = RMatrix::scalar_diag(&self.ring, &vec![killer; a]);
        emit(&top, if (hi - 1).rem_euclid(2) == 0 { 1 } else { -1 })?;
        // remaining cone: ... -> F^{hi-3} -> F^hi (+) F^{hi-2} --[s | d]--> F^{hi-1}
        let below = f.rank(hi - 2);
        let mut ranks: Vec<usize> = (lo..=hi - 1).map(|i| f.rank(i)).collect();
        let idx = (hi - 2 - lo) as usize;
        ranks[idx] = a + below;
        let mut diffs: Vec<RMatrix<B>> = (lo..hi - 1).map(|i| f.diff(i)).collect();
        let last = s.hstack(&f.diff(hi - 2))?;
        diffs[idx] = last;
        if idx > 0 {
            let prev = f.diff(hi - 3);
            diffs[idx - 1] = RMatrix::zeros(&self.ring, a, prev.cols()).vstack(&prev)?;
        }
        let cone = PerfectComplex { ring: self.ring.clone(), lo, ranks, diffs };
        cone.reduce(emit)
    }

    pub fn check_chain_map(f: &ChainMap<B>) -> Result<()> {
        for i in f.lo..f.lo + f.maps.len() as i64 - 1 {
            let left = f.map_at(i + 1).mul(&f.source.diff(i))?;
            let right = f.target.diff(i).mul(&f.map_at(i))?;
            if left != right {
                return Err(Error::NotChainMap(format!("square at degree {i} does not commute")));
            }
        }
        Ok(())
    }

    /// Mapping cone `C^i = F^{i+1} (+) G^i`,
    /// `d = [[-d_F, 0], [f, d_G]]`.
    pub fn cone(f: &ChainMap<B>) -> Result<Self> {
        Self::check_chain_map(f)?;
        let (src, tgt) = (&f.source, &f.target);
        let ring = &src.ring;
        let lo = (src.lo - 1).min(tgt.lo);
        let hi = (src.hi() - 1).max(tgt.hi());
        let ranks: Vec<usize> = (lo..=hi).map(|i| src.rank(i + 1) + tgt.rank(i)).collect();
        let mut diffs = Vec::new();
        for i in lo..hi {
            let top = src.diff(i + 1).neg().hstack(&RMatrix::zeros(ring, src.rank(i + 2), tgt.rank(i)))?;
            let bottom = f.map_at(i + 1).hstack(&tgt.diff(i))?;
            diffs.push(top.vstack(&bottom)?);
        }
        Self::new(ring, lo, ranks, diffs)
    }
}

impl<B: BaseRing> ChainMap<B> {
    /// Map in degree `i` (zero outside the stored range).
    pub fn map_at(&self, i: i64) -> RMatrix<B> {
        let k = i - self.lo;
        if k >= 0 && (k as usize) < self.maps.len() {
            self.maps[k as usize].clone()
        } else {
            RMatrix::zeros(self.source.ring(), self.target.rank(i), self.source.rank(i))
        }
    }

    pub fn new(source: PerfectComplex<B>, target: PerfectComplex<B>, lo: i64, maps: Vec<RMatrix<B>>) -> Result<Self> {
        for (k, m) in maps.iter().enumerate() {
            let i = lo + k as i64;
            if m.rows() != target.rank(i) || m.cols() != source.rank(i) {
                return Err(Error::Dimension(format!("chain map component in degree {i} has the wrong shape")));
            }
        }
        let f = Self { source, target, lo, maps };
        PerfectComplex::check_chain_map(&f)?;
        Ok(f)
    }
}

impl<B: BaseRing> K0Class<B> {
    pub fn new(terms: Vec<(PerfectComplex<B>, i64)>) -> Self {
        Self { terms: terms.into_iter().filter(|(_, m)| *m != 0).collect() }
    }

    pub fn det(&self, ring: &Arc<Ring<B>>) -> Result<FracElem<B>> {
        let mut acc = FracElem::one(ring);
        for (c, m) in &self.terms {
            acc = acc.mul(&c.det()?.pow(*m));
        }
        Ok(acc)
    }
}

/// Chooses `s` with `d s = f I` for a non-zero-divisor `f`, from one maximal
/// minor of `d` or a random combination of them.
fn split_top<B: BaseRing>(d: &RMatrix<B>, a: usize) -> Result<(RMatrix<B>, RingElem<B>)> {
    let ring = d.ring();
    let n = d.cols();
    if n < a {
        return Err(Error::ComplexNotTorsion("top cohomology is not torsion".into()));
    }
    let col_sets = subsets(n, a);
    let embed = |cols: &[usize], adj: &RMatrix<B>| {
        let mut s = RMatrix::zeros(ring, n, a);
        for (k, &c) in cols.iter().enumerate() {
            for j in 0..a {
                s.set(c, j, adj.get(k, j).clone());
            }
        }
        s
    };
    let mut best: Option<(Vec<usize>, RingElem<B>, (u32, u32))> = None;
    let mut minors = Vec::with_capacity(col_sets.len());
    for cols in &col_sets {
        let m = d.select_columns(cols).det()?;
        if !m.is_zero() && m.is_regular_to_precision() {
            let loss = if B::EXACT { (0, 0) } else { m.precision_loss().expect("regular") };
            if best.as_ref().is_none_or(|(_, _, l)| loss < *l) {
                best = Some((cols.clone(), m.clone(), loss));
            }
        }
        minors.push(m);
    }
    if let Some((cols, f, _)) = best {
        let adj = d.select_columns(&cols).adjugate()?;
        return Ok((embed(&cols, &adj), f));
    }
    let live: Vec<usize> = (0..col_sets.len()).filter(|&k| !minors[k].is_zero()).collect();
    if live.is_empty() {
        return Err(Error::ComplexNotTorsion("top cohomology is not torsion".into()));
    }
    let adjs: Vec<RMatrix<B>> = live.iter().map(|&k| embed(&col_sets[k], &d.select_columns(&col_sets[k]).adjugate().expect("square"))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let gs = ring.group_size();
    for _ in 0..64 {
        let mut f = ring.zero();
        let mut s = RMatrix::zeros(ring, n, a);
        for (pos, &k) in live.iter().enumerate() {
            let c = ring.basis_element(rng.gen_range(0..gs) * ring.monomial_count()).scale(&ring.base().from_i64(rng.gen_range(-3..=3)));
            f = &f + &(&c * &minors[k]);
            s = s.add(&adjs[pos].scale(&c))?;
        }
        if !f.is_zero() && f.is_regular_to_precision() {
            return Ok((s, f));
        }
    }
    Err(Error::ComplexNotTorsion("no non-zero-divisor among combinations of maximal minors".into()))
}

/// A finite free resolution of a torsion module, placed in degrees `<= 0`.
pub fn phi<B: BaseRing>(m: &FPModule<B>) -> Result<PerfectComplex<B>> {
    phi_tracked(m).map(|(c, _)| c)
}

/// [`phi`] together with the precision at which its exactness was
/// certified, when that is below the ring precision.
pub fn phi_tracked<B: BaseRing>(m: &FPModule<B>) -> Result<(PerfectComplex<B>, Option<Precision>)> {
    let ring = m.ring();
    if !m.is_torsion() {
        return Err(Error::NotTorsion);
    }
    let min = m.minimize().module;
    let n = min.generators();
    if n == 0 {
        return Ok((PerfectComplex::zero(ring), None));
    }
    if let Ok(h) = min.pd_le_1_witness() {
        return Ok((PerfectComplex::two_term(&h, -1), None));
    }
    if B::EXACT {
        return syzygy_resolution(&min).map(|c| (c, None));
    }
    koszul_resolution(&min)
}

/// Iterated syzygies until a map becomes injective.
fn syzygy_resolution<B: BaseRing>(m: &FPModule<B>) -> Result<PerfectComplex<B>> {
    let ring = m.ring();
    let mut maps = vec![m.relations().clone()];
    for _ in 0..RESOLUTION_DEPTH {
        let last = maps.last().unwrap();
        let k = last.kernel();
        if k.cols() == 0 {
            maps.reverse();
            let lo = -(maps.len() as i64);
            let mut ranks: Vec<usize> = maps.iter().map(|d| d.cols()).collect();
            ranks.push(m.generators());
            return PerfectComplex::new(ring, lo, ranks, maps);
        }
        maps.push(free_basis_of_span(&k).unwrap_or(k));
    }
    Err(Error::PdWitnessNotFound(format!("no finite free resolution within depth {RESOLUTION_DEPTH}")))
}

/// Columns spanning the same module as `k` and forming a basis of it, if a
/// subset of the expected size does.
fn free_basis_of_span<B: BaseRing>(k: &RMatrix<B>) -> Option<RMatrix<B>> {
    let ring = k.ring();
    let r = ring.rank();
    let rows = k.rows();
    let lattice = k.column_lattice();
    if !lattice.rank().is_multiple_of(r) {
        return None;
    }
    let expected = lattice.rank() / r;
    if k.cols() == expected {
        return (k.kernel().cols() == 0).then(|| k.clone());
    }
    let target = span_lattice(ring, rows, &k.columns());
    subsets(k.cols(), expected)
        .into_iter()
        .take(512)
        .map(|cols| k.select_columns(&cols))
        .find(|c| c.column_lattice() == target && c.kernel().cols() == 0)
}

/// The Koszul complex of `R/(f, g)`. In truncated mode it is accepted at
/// the best precision at which its homology lies in the precision ideal.
pub fn koszul_resolution<B: BaseRing>(m: &FPModule<B>) -> Result<(PerfectComplex<B>, Option<Precision>)> {
    let ring = m.ring();
    let rel = m.relations();
    if m.generators() != 1 || rel.cols() != 2 {
        return Err(Error::PdWitnessNotFound("not a cyclic module with two relations".into()));
    }
    let (f, g) = (rel.get(0, 0).clone(), rel.get(0, 1).clone());
    let d1 = RMatrix::from_rows(ring, vec![vec![f.clone(), g.clone()]])?;
    let d2 = RMatrix::from_rows(ring, vec![vec![-&g], vec![f.clone()]])?;
    let c = PerfectComplex::new(ring, -2, vec![1, 2, 1], vec![d2.clone(), d1.clone()])?;
    let Some(cap) = ring.precision() else {
        if !c.cohomology(-1).is_zero() || !c.cohomology(-2).is_zero() {
            return Err(Error::PdWitnessNotFound("Koszul complex is not exact".into()));
        }
        return Ok((c, None));
    };
    if !f.is_regular_to_precision() || !g.is_regular_to_precision() {
        return Err(Error::PdWitnessNotFound("Koszul entries are not regular to precision".into()));
    }
    let base = ring.base();
    let r = ring.rank();
    // syzygies at full truncation must die modulo the precision ideal;
    // working modulo that ideal from the start would add Tor terms
    let z1 = d1.kernel_at(cap);
    let z2 = d2.kernel_at(cap);
    let exact_at = |p: Precision| {
        let extra = ring.precision_ideal_rows(p);
        let mut rows = span_lattice(ring, 2, &d2.columns()).rows;
        for k in 0..2 {
            for e in &extra {
                let mut row = vec![base.zero(); 2 * r];
                row[k * r..(k + 1) * r].clone_from_slice(e);
                rows.push(row);
            }
        }
        let image = crate::echelon::Echelon::new(base, rows, 2 * r);
        z1.iter().all(|v| image.contains(base, v)) && z2.iter().all(|v| ring.vector_in_precision_ideal(v, p))
    };
    match Ring::<B>::precision_candidates(cap).into_iter().find(|&p| exact_at(p)) {
        Some(p) => Ok((c, Some(p))),
        None => Err(Error::PdWitnessNotFound("Koszul complex is not exact at any precision above the floor".into())),
    }
}

/// `(1 - Nv^{-1} sigma) / (1 - sigma)`; the denominator must be a
/// non-zero-divisor.
pub fn euler_factor<B: BaseRing>(sigma: &RingElem<B>, norm: i64) -> Result<FracElem<B>> {
    let ring = sigma.ring();
    let base = ring.base();
    let nv = base.from_i64(norm);
    let inv = base
        .inverse(&nv)
        .ok_or_else(|| Error::EulerFactorUndefined(format!("norm {norm} is not invertible in the base")))?;
    let den = &ring.one() - sigma;
    if den.is_zero() || !den.is_regular_to_precision() {
        return Err(Error::EulerFactorUndefined("1 - sigma is a zero divisor".into()));
    }
    let num = &ring.one() - &sigma.scale(&inv);
    Ok(FracElem::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_by_one<B: BaseRing>(x: &RingElem<B>) -> RMatrix<B> {
        RMatrix::from_rows(x.ring(), vec![vec![x.clone()]]).unwrap()
    }

    #[test]
    fn cohomology_of_two_term() {
        let r = Ring::exact(3, &[2]).unwrap();
        let c = PerfectComplex::two_term(&one_by_one(&r.scalar(3)), -1);
        assert_eq!(c.cohomology(0).log_order(), Some(2));
        assert!(c.cohomology(-1).is_zero());
        assert!(PerfectComplex::two_term(&one_by_one(&r.one()), 0).is_acyclic());
    }

    #[test]
    fn det_normalization() {
        let r = Ring::exact(3, &[]).unwrap();
        let c = PerfectComplex::two_term(&one_by_one(&r.scalar(3)), -1);
        let third = FracIdeal::new(&r, vec![r.one()], r.scalar(3)).unwrap();
        assert!(c.det_ideal().unwrap().equals(&third).unwrap());
        let shifted = c.shift(1);
        assert_eq!((shifted.lo(), shifted.hi()), (-2, -1));
        assert!(shifted.det_ideal().unwrap().equals(&FracIdeal::principal(&r.scalar(3))).unwrap());
    }

    #[test]
    fn k0_reduce_signs() {
        let r = Ring::exact(3, &[]).unwrap();
        let c = PerfectComplex::two_term(&one_by_one(&r.scalar(9)), -1);
        let red = c.k0_reduce().unwrap();
        assert_eq!(red.len(), 1);
        assert_eq!(red[0].1, 1);
        let c = PerfectComplex::two_term(&one_by_one(&r.scalar(3)), 0);
        assert_eq!(c.k0_reduce().unwrap()[0].1, -1);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        let c = PerfectComplex::two_term(&one_by_one(&(&g + &r.scalar(3))), -1);
        let id = ChainMap::new(c.clone(), c.clone(), -1, vec![RMatrix::identity(&r, 1), RMatrix::identity(&r, 1)]).unwrap();
        let cone = PerfectComplex::cone(&id).unwrap();
        assert!(cone.is_acyclic());
        assert!(cone.det_ideal().unwrap().is_unit_ideal().unwrap());
    }

    #[test]
    fn phi_of_cyclic() {
        let r = Ring::exact(3, &[2]).unwrap();
        let c = phi(&FPModule::cyclic(&r, &[r.scalar(3)])).unwrap();
        assert_eq!((c.lo(), c.hi()), (-1, 0));
        assert_eq!(phi(&FPModule::zero(&r)).unwrap().ranks(), &[0]);
    }

    #[test]
    fn three_term_det_matches_product() {
        // 0 -> R --(3, 9)^T--> R^2 --[[3, -1]]--> R -> 0 in degrees (-2, -1, 0)
        let r = Ring::exact(3, &[]).unwrap();
        let d2 = RMatrix::from_rows(&r, vec![vec![r.scalar(1)], vec![r.scalar(3)]]).unwrap();
        let d1 = RMatrix::from_rows(&r, vec![vec![r.scalar(3), -&r.one()]]).unwrap();
        let c = PerfectComplex::new(&r, -2, vec![1, 2, 1], vec![d2, d1]).unwrap();
        assert!(c.is_acyclic());
        assert!(c.det_ideal().unwrap().is_unit_ideal().unwrap());
    }

    #[test]
    fn euler_factor_substitution() {
        let t = Ring::truncated(3, &[], 1, 3, 4).unwrap();
        let s = t.gamma(0);
        let e = euler_factor(&s, 7).unwrap();
        assert_eq!(e.den, -&t.var(0));
        let e_ring = Ring::exact(3, &[2]).unwrap();
        assert!(matches!(euler_factor(&e_ring.group_generator(0), 7), Err(Error::EulerFactorUndefined(_))));
    }
}
