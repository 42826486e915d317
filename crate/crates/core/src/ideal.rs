//! Fractional ideals `(1/den) * (gens)` with a non-zero-divisor denominator.
//!
//! Exact mode has a canonical form `p^e * J` with `J` an integral lattice not
//! contained in `pR`. Truncated mode compares `den_2 * J_1` with
//! `den_1 * J_2` modulo `(p^N', degree >= M')`, where `(N', M')` is the
//! effective precision left after accounting for the denominators.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::echelon::{self, Echelon};
use crate::error::{Error, Result};
use crate::hom::RingHom;
use crate::matrix::{prune_generators, span_lattice};
use crate::ring::{min_precision, Precision, Ring, RingElem};
use crate::scalar::BaseRing;

/// Lowest effective precision at which a truncated comparison is attempted.
pub const PRECISION_FLOOR: (u32, u32) = (1, 1);

/// Attempts made by [`FracIdeal::principal_generator`].
pub const GENERATOR_BUDGET: usize = 256;

/// A fraction `num / den` with `den` a non-zero-divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracElem<B: BaseRing> {
    pub num: RingElem<B>,
    pub den: RingElem<B>,
}

impl<B: BaseRing> FracElem<B> {
    pub fn new(num: RingElem<B>, den: RingElem<B>) -> Self {
        Self { num, den }
    }

    /// Product; a factor appearing both upstairs and downstairs cancels,
    /// which keeps truncated-mode products from underflowing.
    pub fn mul(&self, other: &Self) -> Self {
        let ring = self.num.ring();
        let out = if self.num == other.den {
            Self { num: other.num.clone(), den: self.den.clone() }
        } else if self.den == other.num {
            Self { num: self.num.clone(), den: other.den.clone() }
        } else {
            Self { num: &self.num * &other.num, den: &self.den * &other.den }
        };
        if out.num == out.den {
            Self::one(ring)
        } else {
            out
        }
    }

    pub fn one(ring: &Arc<Ring<B>>) -> Self {
        Self { num: ring.one(), den: ring.one() }
    }

    /// `den / num`; meaningful when `num` is a non-zero-divisor.
    pub fn inverse_frac(&self) -> Self {
        Self { num: self.den.clone(), den: self.num.clone() }
    }

    pub fn pow(&self, e: i64) -> Self {
        let b = if e < 0 { self.inverse_frac() } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Self { num: b.num.pow(k), den: b.den.pow(k) }
    }

    pub fn ideal(&self) -> Result<FracIdeal<B>> {
        FracIdeal::new(self.num.ring(), vec![self.num.clone()], self.den.clone())
    }
}

impl<B: BaseRing> fmt::Display for FracElem<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Clone)]
pub struct FracIdeal<B: BaseRing> {
    ring: Arc<Ring<B>>,
    gens: Vec<RingElem<B>>,
    den: RingElem<B>,
    precision: Option<Precision>,
}

impl<B: BaseRing> fmt::Debug for FracIdeal<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gens.iter().map(|x| x.to_string()).collect();
        write!(f, "FracIdeal(({}) / ({}))", g.join(", "), self.den)
    }
}

/// Canonical form of an exact-mode fractional ideal: `p^exponent * lattice`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactNormalForm<B: BaseRing> {
    pub exponent: i64,
    pub lattice: Echelon<B>,
}

/// Outcome of a comparison, with the precision at which it was decided
/// (`None` in exact mode).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub precision: Option<Precision>,
}

pub(crate) fn ideal_lattice<B: BaseRing>(ring: &Arc<Ring<B>>, gens: &[RingElem<B>]) -> Echelon<B> {
    let vecs: Vec<Vec<RingElem<B>>> = gens.iter().map(|g| vec![g.clone()]).collect();
    span_lattice(ring, 1, &vecs)
}

impl<B: BaseRing> FracIdeal<B> {
    /// `(1/den) * (gens)`; the denominator must be a non-zero-divisor.
    pub fn new(ring: &Arc<Ring<B>>, gens: Vec<RingElem<B>>, den: RingElem<B>) -> Result<Self> {
        if gens.iter().chain(std::iter::once(&den)).any(|g| !g.ring().same_as(ring)) {
            return Err(Error::MixedRings);
        }
        if !den.is_regular_to_precision() {
            return Err(Error::Precondition(format!("denominator {den} is a zero divisor")));
        }
        let gens = prune_generators(ring, 1, gens.into_iter().map(|g| vec![g]).collect())
            .into_iter()
            .map(|mut v| v.remove(0))
            .collect();
        Ok(Self { ring: ring.clone(), gens, den, precision: ring.precision() })
    }

    pub fn integral(ring: &Arc<Ring<B>>, gens: Vec<RingElem<B>>) -> Result<Self> {
        Self::new(ring, gens, ring.one())
    }

    pub fn principal(f: &RingElem<B>) -> Self {
        Self::integral(f.ring(), vec![f.clone()]).expect("denominator one")
    }

    pub fn unit(ring: &Arc<Ring<B>>) -> Self {
        Self::principal(&ring.one())
    }

    pub fn zero(ring: &Arc<Ring<B>>) -> Self {
        Self::integral(ring, Vec::new()).expect("denominator one")
    }

    pub fn ring(&self) -> &Arc<Ring<B>> {
        &self.ring
    }

    pub fn gens(&self) -> &[RingElem<B>] {
        &self.gens
    }

    pub fn den(&self) -> &RingElem<B> {
        &self.den
    }

    pub fn precision(&self) -> Option<Precision> {
        self.precision
    }

    pub fn with_precision(mut self, p: Option<Precision>) -> Self {
        self.precision = min_precision(self.precision, p);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    fn check_ring(&self, other: &Self) -> Result<()> {
        if self.ring.same_as(&other.ring) {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_ring(other)?;
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a * b);
            }
        }
        let mut out = Self::new(&self.ring, gens, &self.den * &other.den)?;
        out.precision = min_precision(self.precision, other.precision);
        Ok(out)
    }

    pub fn multiply_all<'a>(ring: &Arc<Ring<B>>, items: impl IntoIterator<Item = &'a Self>) -> Result<Self>
    where
        B: 'a,
    {
        items.into_iter().try_fold(Self::unit(ring), |acc, x| acc.multiply(x))
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::unit(&self.ring).with_precision(self.precision);
        for _ in 0..e.unsigned_abs() {
            acc = acc.multiply(&base)?;
        }
        Ok(acc)
    }

    /// Exact-mode canonical form.
    pub fn normal_form(&self) -> Result<ExactNormalForm<B>> {
        if !B::EXACT {
            return Err(Error::Unsupported("canonical normal forms exist only in exact mode".into()));
        }
        let base = self.ring.base();
        let lattice = ideal_lattice(&self.ring, &self.gens);
        if lattice.is_zero() {
            return Ok(ExactNormalForm { exponent: 0, lattice });
        }
        // den * x = p^v
        let m = self.den.mult_matrix();
        let r = self.ring.rank();
        let mut found = None;
        for v in 0..=256u32 {
            let mut target = vec![base.zero(); r];
            target[0] = base.p_power(v);
            if let Some(x) = echelon::solve(base, &m, &target) {
                found = Some((v, self.ring.from_vector(&x)));
                break;
            }
        }
        let (v, x) = found.ok_or_else(|| Error::Precondition("denominator is not invertible up to p-powers".into()))?;
        let scaled: Vec<RingElem<B>> = self.gens.iter().map(|g| &x * g).collect();
        let lattice = ideal_lattice(&self.ring, &scaled);
        let content = lattice
            .rows
            .iter()
            .flatten()
            .filter_map(|c| base.valuation(c))
            .min()
            .expect("non-zero lattice");
        let lattice = if content > 0 {
            let pk = base.p_power(content);
            let rows = lattice
                .rows
                .iter()
                .map(|row| row.iter().map(|c| base.divide(c, &pk).expect("content divides")).collect())
                .collect();
            Echelon::new(base, rows, r)
        } else {
            lattice
        };
        Ok(ExactNormalForm { exponent: content as i64 - v as i64, lattice })
    }

    /// The precision at which a comparison is decided: the common precision,
    /// reduced so that multiplication by each denominator is injective on it.
    fn effective_precision(&self, other: &Self) -> Result<Option<Precision>> {
        let Some(mut prec) = min_precision(self.precision, other.precision) else {
            return Ok(None);
        };
        if self.den == other.den {
            return Ok(Some(prec));
        }
        for d in [&self.den, &other.den] {
            if d.is_one() {
                continue;
            }
            prec = d.annihilator_precision(prec).ok_or(Error::PrecisionExhausted(
                (prec.p_adic as i64, prec.degree as i64),
                PRECISION_FLOOR,
            ))?;
        }
        Ok(Some(prec))
    }

    /// Lattices of `other.den * self.gens` and `self.den * other.gens`,
    /// each enlarged by the precision ideal.
    fn cross_lattices(&self, other: &Self, prec: Precision) -> (Echelon<B>, Echelon<B>) {
        let r = self.ring.rank();
        let extra = self.ring.precision_ideal_rows(prec);
        let build = |gens: &[RingElem<B>], mult: &RingElem<B>| {
            let g: Vec<RingElem<B>> = gens.iter().map(|x| x * mult).collect();
            let mut rows = ideal_lattice(&self.ring, &g).rows;
            rows.extend(extra.iter().cloned());
            Echelon::new(self.ring.base(), rows, r)
        };
        if self.den == other.den {
            (build(&self.gens, &self.ring.one()), build(&other.gens, &self.ring.one()))
        } else {
            (build(&self.gens, &other.den), build(&other.gens, &self.den))
        }
    }

    pub fn compare(&self, other: &Self) -> Result<Verdict> {
        self.check_ring(other)?;
        if B::EXACT {
            let holds = self.normal_form()? == other.normal_form()?;
            return Ok(Verdict { holds, precision: None });
        }
        let prec = self.effective_precision(other)?.expect("truncated ring has a precision");
        let (a, b) = self.cross_lattices(other, prec);
        Ok(Verdict { holds: a == b, precision: Some(prec) })
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        Ok(self.compare(other)?.holds)
    }

    /// Whether `other` is contained in `self`.
    pub fn contains_ideal(&self, other: &Self) -> Result<Verdict> {
        self.check_ring(other)?;
        let base = self.ring.base();
        if B::EXACT {
            let (a, b) = (self.normal_form()?, other.normal_form()?);
            if b.lattice.is_zero() {
                return Ok(Verdict { holds: true, precision: None });
            }
            if a.lattice.is_zero() {
                return Ok(Verdict { holds: false, precision: None });
            }
            // p^eb B in p^ea A
            let holds = if b.exponent >= a.exponent {
                let s = base.p_power((b.exponent - a.exponent) as u32);
                b.lattice
                    .rows
                    .iter()
                    .all(|row| a.lattice.contains(base, &row.iter().map(|c| base.mul(c, &s)).collect::<Vec<_>>()))
            } else {
                let s = base.p_power((a.exponent - b.exponent) as u32);
                let rows = a.lattice.rows.iter().map(|row| row.iter().map(|c| base.mul(c, &s)).collect()).collect();
                let scaled = Echelon::new(base, rows, self.ring.rank());
                scaled.contains_all(base, &b.lattice)
            };
            return Ok(Verdict { holds, precision: None });
        }
        let prec = self.effective_precision(other)?.expect("truncated ring has a precision");
        let (a, b) = self.cross_lattices(other, prec);
        Ok(Verdict { holds: a.contains_all(base, &b), precision: Some(prec) })
    }

    pub fn contains_element(&self, x: &RingElem<B>) -> Result<Verdict> {
        self.contains_ideal(&Self::principal(x))
    }

    pub fn is_unit_ideal(&self) -> Result<bool> {
        self.equals(&Self::unit(&self.ring))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        if !B::EXACT {
            let g = self.principal_generator(0).map_err(|_| Error::NotInvertible)?;
            if !g.num.is_regular_to_precision() {
                return Err(Error::NotInvertible);
            }
            let mut out = Self::new(&self.ring, vec![g.den], g.num)?;
            out.precision = self.precision;
            return Ok(out);
        }
        let base = self.ring.base();
        let r = self.ring.rank();
        let lattice = ideal_lattice(&self.ring, &self.gens);
        if lattice.rank() < r {
            return Err(Error::NotInvertible);
        }
        // smallest w with p^w in J
        let w = (0..=256u32)
            .find(|&w| {
                let mut v = vec![base.zero(); r];
                v[0] = base.p_power(w);
                lattice.contains(base, &v)
            })
            .ok_or(Error::NotInvertible)?;
        // Y = {y : y g_i in p^w R for all i}
        let k = self.gens.len();
        let pw = base.p_power(w);
        let mut a = echelon::Mat::filled(k * r, r + k * r, base.zero());
        for (i, g) in self.gens.iter().enumerate() {
            let mg = g.mult_matrix();
            for row in 0..r {
                for col in 0..r {
                    a.set(i * r + row, col, mg.get(row, col).clone());
                }
                a.set(i * r + row, r + i * r + row, base.neg(&pw));
            }
        }
        let ker = echelon::kernel(base, &a);
        let ys: Vec<RingElem<B>> = ker.iter().map(|v| self.ring.from_vector(&v[..r])).collect();
        let gens: Vec<RingElem<B>> = ys.iter().map(|y| y * &self.den).collect();
        let inv = Self::new(&self.ring, gens, self.ring.scalar(1).scale(&pw))?;
        if !self.multiply(&inv)?.is_unit_ideal()? {
            return Err(Error::NotInvertible);
        }
        Ok(inv)
    }

    /// Some `f / den` generating the ideal, found among the generators and
    /// then among seeded random small combinations of them.
    pub fn principal_generator(&self, seed: u64) -> Result<FracElem<B>> {
        if self.is_zero() {
            return Ok(FracElem::new(self.ring.zero(), self.den.clone()));
        }
        let integral = Self { den: self.ring.one(), ..self.clone() };
        let check = |f: &RingElem<B>| -> Result<bool> {
            let cand = Self { ring: self.ring.clone(), gens: vec![f.clone()], den: self.ring.one(), precision: self.precision };
            integral.equals(&cand)
        };
        for g in &self.gens {
            if check(g)? {
                return Ok(FracElem::new(g.clone(), self.den.clone()));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gs = self.ring.group_size();
        for _ in 0..GENERATOR_BUDGET {
            let mut f = self.ring.zero();
            for g in &self.gens {
                let c: i64 = rng.gen_range(-2..=2);
                if c == 0 {
                    continue;
                }
                let h = self.ring.basis_element(rng.gen_range(0..gs) * self.ring.monomial_count());
                f = &f + &(&h * g).scale(&self.ring.base().from_i64(c));
            }
            if !f.is_zero() && check(&f)? {
                return Ok(FracElem::new(f, self.den.clone()));
            }
        }
        Err(Error::GeneratorNotFound(GENERATOR_BUDGET))
    }

    pub fn apply_hom(&self, h: &RingHom<B>) -> Result<Self> {
        let gens = self.gens.iter().map(|g| h.apply(g)).collect::<Result<Vec<_>>>()?;
        let den = h.apply(&self.den)?;
        let mut out = Self::new(h.target(), gens, den)?;
        out.precision = min_precision(self.precision, h.target().precision());
        Ok(out)
    }

    /// Canonical human-readable form.
    pub fn to_canonical_string(&self) -> String {
        if B::EXACT {
            if let Ok(nf) = self.normal_form() {
                if nf.lattice.is_zero() {
                    return "(0)".into();
                }
                if nf.lattice.rows.len() == self.ring.rank() && nf.lattice.pivots.iter().all(|(_, v)| *v == 0) {
                    let pe = num_bigint::BigInt::from(self.ring.prime()).pow(nf.exponent.unsigned_abs() as u32);
                    return if nf.exponent >= 0 { format!("({pe})") } else { format!("(1/{pe})") };
                }
                let basis: Vec<String> =
                    nf.lattice.rows.iter().map(|r| self.ring.from_vector(r).to_string()).collect();
                return format!("p^{} * <{}>", nf.exponent, basis.join("; "));
            }
        }
        let lat = ideal_lattice(&self.ring, &self.gens);
        let basis: Vec<String> = lat.rows.iter().map(|r| self.ring.from_vector(r).to_string()).collect();
        format!("<{}> / ({})", basis.join("; "), self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_equality() {
        let r = Ring::exact(3, &[2]).unwrap();
        let three = FracIdeal::principal(&r.scalar(3));
        assert!(three.multiply(&three).unwrap().equals(&FracIdeal::principal(&r.scalar(9))).unwrap());
        let g = r.group_generator(0);
        let a = FracIdeal::principal(&(&r.one() - &g));
        assert!(a.multiply(&FracIdeal::unit(&r)).unwrap().equals(&a).unwrap());
    }

    #[test]
    fn unit_multiples_generate_the_same_ideal() {
        let r = Ring::exact(3, &[4]).unwrap();
        let s = r.group_generator(0);
        let a = FracIdeal::principal(&(&r.one() - &s));
        let b = FracIdeal::principal(&(&r.one() - &s.inverse().unwrap()));
        assert!(a.equals(&b).unwrap());
    }

    #[test]
    fn inverse_examples() {
        let r = Ring::exact(3, &[2]).unwrap();
        let inv = FracIdeal::principal(&r.scalar(3)).inverse().unwrap();
        let third = FracIdeal::new(&r, vec![r.one()], r.scalar(3)).unwrap();
        assert!(inv.equals(&third).unwrap());
        let g = r.group_generator(0);
        assert_eq!(FracIdeal::principal(&(&g - &r.one())).inverse().unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn principal_generator_examples() {
        let r = Ring::exact(3, &[2]).unwrap();
        let g = r.group_generator(0);
        let i = FracIdeal::integral(&r, vec![r.scalar(3), g.scale(&r.base().from_i64(3))]).unwrap();
        let f = i.principal_generator(0).unwrap();
        assert!(f.ideal().unwrap().equals(&FracIdeal::principal(&r.scalar(3))).unwrap());
    }

    #[test]
    fn normal_form_strips_p_content() {
        let r = Ring::exact(3, &[2]).unwrap();
        let a = FracIdeal::new(&r, vec![r.scalar(9)], r.scalar(3)).unwrap();
        let nf = a.normal_form().unwrap();
        assert_eq!(nf.exponent, 1);
        assert!(a.equals(&FracIdeal::principal(&r.scalar(3))).unwrap());
    }

    #[test]
    fn truncated_comparison_reports_precision() {
        let r = Ring::truncated(3, &[], 1, 4, 6).unwrap();
        let t = r.var(0);
        let a = FracIdeal::new(&r, vec![r.one()], t.clone()).unwrap();
        let b = FracIdeal::new(&r, vec![r.gamma(0)], t.clone()).unwrap();
        let v = a.compare(&b).unwrap();
        assert!(v.holds);
        assert_eq!(v.precision, Some(Precision { p_adic: 4, degree: 6 }));
        let c = FracIdeal::principal(&r.one());
        let v = a.compare(&c).unwrap();
        assert!(!v.holds);
        assert_eq!(v.precision, Some(Precision { p_adic: 4, degree: 5 }));
    }
}
