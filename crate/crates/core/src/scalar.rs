//! Base scalar rings.
//!
//! Both supported base rings are local with maximal ideal `(p)`: every
//! non-zero element factors as `p^v * unit`. All linear algebra downstream is
//! written against [`BaseRing`] and therefore works unchanged over the
//! p-local rationals (exact mode) and over `Z/p^N` (truncated mode).

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A commutative local ring with principal maximal ideal `(p)`.
///
/// Elements do not know their ring, so every operation goes through the
/// context value (the modulus of `Z/p^N` is a runtime quantity).
pub trait BaseRing: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    /// `true` for the p-local rationals, `false` for `Z/p^N`.
    const EXACT: bool;

    fn prime(&self) -> u64;
    /// `Some(N)` for `Z/p^N`.
    fn modulus_exponent(&self) -> Option<u32>;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Embeds `num/den`; fails if `p | den`.
    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<Self::Elem>;
    /// A representative `(num, den)` with `den > 0` and `gcd = 1`.
    fn to_ratio(&self, a: &Self::Elem) -> (BigInt, BigInt);

    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    /// p-adic valuation, `None` for zero.
    fn valuation(&self, a: &Self::Elem) -> Option<u32>;
    /// Inverse of a unit.
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Some `q` with `q * b = a`, provided `v(a) >= v(b)`.
    fn divide(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
    /// Splits `a = q * p^k + r` with `r` the canonical residue in `[0, p^k)`.
    fn split_mod_p_power(&self, a: &Self::Elem, k: u32) -> (Self::Elem, Self::Elem);

    fn p_power(&self, k: u32) -> Self::Elem {
        let p = self.from_i64(self.prime() as i64);
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, &p);
        }
        acc
    }

    /// Maps an element of a compatible ring of the same kind (same `p`,
    /// precision at least ours) into this one.
    fn coerce(&self, a: &Self::Elem) -> Self::Elem {
        a.clone()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.valuation(a) == Some(0)
    }

    /// Multiplies a lattice row by a unit to keep entries small. The row span
    /// over the base ring is unchanged.
    fn tidy_row(&self, _row: &mut [Self::Elem]) {}
}

fn p_free_part(mut n: BigInt, p: &BigInt) -> BigInt {
    if n.is_zero() {
        return n;
    }
    while (&n % p).is_zero() {
        n /= p;
    }
    n.abs()
}

fn valuation_of(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// The localization `Z_(p)`: rationals whose denominator is prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLocal {
    p: u64,
    p_big: BigInt,
}

impl PLocal {
    pub fn new(p: u64) -> Self {
        Self { p, p_big: BigInt::from(p) }
    }

    fn residue_mod(&self, a: &BigRational, modulus: &BigInt) -> BigInt {
        // num * den^{-1} mod modulus, den is prime to p
        let den = a.denom();
        let inv = mod_inverse(&den.mod_floor(modulus), modulus).expect("denominator prime to p");
        (a.numer() * inv).mod_floor(modulus)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

impl BaseRing for PLocal {
    type Elem = BigRational;
    const EXACT: bool = true;

    fn prime(&self) -> u64 {
        self.p
    }

    fn modulus_exponent(&self) -> Option<u32> {
        None
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<BigRational> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        let r = BigRational::new(num.clone(), den.clone());
        if (r.denom() % &self.p_big).is_zero() {
            return Err(Error::Parse(format!(
                "denominator {} is divisible by p = {}",
                r.denom(),
                self.p
            )));
        }
        Ok(r)
    }

    fn to_ratio(&self, a: &BigRational) -> (BigInt, BigInt) {
        (a.numer().clone(), a.denom().clone())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn valuation(&self, a: &BigRational) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(valuation_of(a.numer(), &self.p_big))
        }
    }

    fn inverse(&self, a: &BigRational) -> Option<BigRational> {
        if self.valuation(a) == Some(0) {
            Some(a.recip())
        } else {
            None
        }
    }

    fn divide(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            return Some(BigRational::zero());
        }
        let vb = self.valuation(b)?;
        if self.valuation(a)? < vb {
            return None;
        }
        Some(a / b)
    }

    fn split_mod_p_power(&self, a: &BigRational, k: u32) -> (BigRational, BigRational) {
        if k == 0 {
            return (a.clone(), BigRational::zero());
        }
        let modulus = num_traits::pow(self.p_big.clone(), k as usize);
        let r = self.residue_mod(a, &modulus);
        let r = BigRational::from_integer(r);
        let q = (a - &r) / BigRational::from_integer(modulus);
        (q, r)
    }

    fn tidy_row(&self, row: &mut [BigRational]) {
        // clear (p-free) denominators, then strip the p-free content
        let mut lcm = BigInt::one();
        for x in row.iter() {
            if !x.is_zero() {
                lcm = lcm.lcm(x.denom());
            }
        }
        let mut gcd = BigInt::zero();
        for x in row.iter() {
            if !x.is_zero() {
                gcd = gcd.gcd(&(x.numer() * (&lcm / x.denom())));
            }
        }
        if gcd.is_zero() {
            return;
        }
        let g = p_free_part(gcd, &self.p_big);
        if lcm.is_one() && g.is_one() {
            return;
        }
        let scale = BigRational::new(lcm, g);
        for x in row.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &scale;
            }
        }
    }
}

/// The chain ring `Z/p^N`, elements stored as canonical residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPrimePower {
    p: u64,
    exponent: u32,
    modulus: u64,
}

impl ModPrimePower {
    pub fn new(p: u64, exponent: u32) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::InvalidRing("p-adic precision must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..exponent {
            modulus = modulus
                .checked_mul(p)
                .filter(|m| *m < (1u64 << 62))
                .ok_or_else(|| Error::InvalidRing(format!("p^N overflows for p={p}, N={exponent}")))?;
        }
        Ok(Self { p, exponent, modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn reduce_i128(&self, v: i128) -> u64 {
        v.rem_euclid(self.modulus as i128) as u64
    }

    fn inv_u64(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (self.modulus as i128, a as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        Some(self.reduce_i128(t))
    }
}

impl BaseRing for ModPrimePower {
    type Elem = u64;
    const EXACT: bool = false;

    fn prime(&self) -> u64 {
        self.p
    }

    fn modulus_exponent(&self) -> Option<u32> {
        Some(self.exponent)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.modulus
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i128(v as i128)
    }

    fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<u64> {
        let m = BigInt::from(self.modulus);
        let d = den.mod_floor(&m);
        let d = d.to_u64().unwrap_or(0);
        let dinv = self
            .inv_u64(d)
            .ok_or_else(|| Error::Parse(format!("denominator {den} is not a unit mod p^N")))?;
        let n = num.mod_floor(&m).to_u64().expect("residue fits");
        Ok(self.mul(&n, &dinv))
    }

    fn coerce(&self, a: &u64) -> u64 {
        a % self.modulus
    }

    fn to_ratio(&self, a: &u64) -> (BigInt, BigInt) {
        (BigInt::from(*a), BigInt::one())
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.modulus as u128) as u64
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.modulus as u128 - *b as u128) % self.modulus as u128) as u64
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn valuation(&self, a: &u64) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let mut v = 0;
        let mut x = *a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }

    fn inverse(&self, a: &u64) -> Option<u64> {
        self.inv_u64(*a)
    }

    fn divide(&self, a: &u64, b: &u64) -> Option<u64> {
        if *a == 0 {
            return Some(0);
        }
        let vb = self.valuation(b)?;
        let va = self.valuation(a)?;
        if va < vb {
            return None;
        }
        let pv = self.p.pow(vb);
        let unit = self.inv_u64(b / pv).expect("unit part");
        Some(self.mul(&(a / pv), &unit))
    }

    fn split_mod_p_power(&self, a: &u64, k: u32) -> (u64, u64) {
        if k >= self.exponent {
            return (0, *a);
        }
        let pk = self.p.pow(k);
        let r = a % pk;
        ((a - r) / pk, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plocal_rejects_p_in_denominator() {
        let b = PLocal::new(3);
        assert!(b.from_ratio(&BigInt::from(1), &BigInt::from(6)).is_err());
        let x = b.from_ratio(&BigInt::from(9), &BigInt::from(2)).unwrap();
        assert_eq!(b.valuation(&x), Some(2));
    }

    #[test]
    fn plocal_split_is_canonical() {
        let b = PLocal::new(3);
        let a = b.from_ratio(&BigInt::from(7), &BigInt::from(2)).unwrap();
        let (q, r) = b.split_mod_p_power(&a, 2);
        // 7/2 mod 9 = 7 * 5 = 35 = 8 mod 9
        assert_eq!(r, b.from_i64(8));
        assert_eq!(b.add(&b.mul(&q, &b.p_power(2)), &r), a);
    }

    #[test]
    fn mod_prime_power_basics() {
        let b = ModPrimePower::new(3, 2).unwrap();
        assert_eq!(b.mul(&3, &3), 0);
        assert_eq!(b.valuation(&6), Some(1));
        assert_eq!(b.inverse(&2), Some(5));
        let q = b.divide(&6, &3).unwrap();
        assert_eq!(b.mul(&q, &3), 6);
        assert!(b.divide(&3, &0).is_none());
        assert!(b.divide(&3, &9).is_none());
    }

    #[test]
    fn tidy_row_keeps_p_part() {
        let b = PLocal::new(3);
        let mut row = vec![
            b.from_ratio(&BigInt::from(6), &BigInt::from(5)).unwrap(),
            b.from_i64(4),
        ];
        b.tidy_row(&mut row);
        assert_eq!(b.valuation(&row[0]), Some(1));
        assert!(row.iter().all(|x| x.is_integer()));
    }
}
