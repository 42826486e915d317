//! The ambient rings: `Z_(p)[G]` (exact mode) and
//! `(Z/p^N)[G][T_1..T_d] / (total degree >= M)` (truncated mode).
//!
//! The free part `Z_p^d` of the Galois group is modeled by the variables
//! `T_i` with topological generators `gamma_i = 1 + T_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::echelon::{self, Echelon, Mat};
use crate::error::{Error, Result};
use crate::scalar::{BaseRing, ModPrimePower, PLocal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Truncated,
}

/// Serializable description of a ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    pub prime: u64,
    /// Elementary-divisor orders of the finite abelian group.
    pub group: Vec<u64>,
    pub vars: usize,
    pub mode: Mode,
    /// `[N, M]`: p-adic exponent and total-degree cutoff (truncated only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<[u32; 2]>,
}

impl RingSpec {
    pub fn exact(prime: u64, group: &[u64]) -> Self {
        Self { prime, group: group.to_vec(), vars: 0, mode: Mode::Exact, precision: None }
    }

    pub fn truncated(prime: u64, group: &[u64], vars: usize, n: u32, m: u32) -> Self {
        Self { prime, group: group.to_vec(), vars, mode: Mode::Truncated, precision: Some([n, m]) }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.prime;
        if p < 3 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::InvalidRing(format!("{p} is not an odd prime")));
        }
        if self.group.contains(&0) {
            return Err(Error::InvalidRing("group orders must be positive".into()));
        }
        match self.mode {
            Mode::Exact => {
                if self.vars != 0 {
                    return Err(Error::InvalidRing("exact mode requires vars = 0".into()));
                }
            }
            Mode::Truncated => match self.precision {
                Some([n, m]) if n >= 1 && m >= 1 => {}
                _ => return Err(Error::InvalidRing("truncated mode requires precision [N, M] >= 1".into())),
            },
        }
        Ok(())
    }

    pub fn group_order(&self) -> u64 {
        self.group.iter().product()
    }
}

/// Precision `(p^N, degree M)` at which a truncated-mode statement is made.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    pub p_adic: u32,
    pub degree: u32,
}

impl Precision {
    pub fn min(self, other: Precision) -> Precision {
        Precision { p_adic: self.p_adic.min(other.p_adic), degree: self.degree.min(other.degree) }
    }
}

pub(crate) fn min_precision(a: Option<Precision>, b: Option<Precision>) -> Option<Precision> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Builds the base scalar ring for a spec.
pub trait BaseFromSpec: BaseRing + Sized {
    fn from_spec(spec: &RingSpec) -> Result<Self>;
}

impl BaseFromSpec for PLocal {
    fn from_spec(spec: &RingSpec) -> Result<Self> {
        if spec.mode != Mode::Exact {
            return Err(Error::InvalidRing("expected an exact-mode ring".into()));
        }
        Ok(PLocal::new(spec.prime))
    }
}

impl BaseFromSpec for ModPrimePower {
    fn from_spec(spec: &RingSpec) -> Result<Self> {
        if spec.mode != Mode::Truncated {
            return Err(Error::InvalidRing("expected a truncated-mode ring".into()));
        }
        let [n, _] = spec.precision.expect("validated");
        ModPrimePower::new(spec.prime, n)
    }
}

/// A concrete ring together with its multiplication tables.
///
/// The base-scalar basis is `{g * T^alpha}` indexed by
/// `group_index * monomial_count + monomial_index`, ordered lexicographically
/// on (group residues, exponent vector).
pub struct Ring<B: BaseRing> {
    spec: RingSpec,
    base: B,
    group_size: usize,
    strides: Vec<usize>,
    monomials: Vec<Vec<u32>>,
    mono_index: HashMap<Vec<u32>, usize>,
    mono_mul: Vec<Option<usize>>,
    group_mul: Vec<usize>,
    group_inv: Vec<usize>,
}

impl<B: BaseRing> fmt::Debug for Ring<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring").field("spec", &self.spec).finish()
    }
}

fn enumerate_monomials(vars: usize, cutoff: u32) -> Vec<Vec<u32>> {
    // all exponent vectors of total degree < cutoff, lexicographic
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for e in 0..budget {
            prefix.push(e);
            rec(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        out.push(Vec::new());
    } else if cutoff > 0 {
        rec(&mut Vec::new(), vars, cutoff, &mut out);
    }
    out
}

impl<B: BaseFromSpec> Ring<B> {
    pub fn from_spec(spec: &RingSpec) -> Result<Arc<Self>> {
        spec.validate()?;
        let base = B::from_spec(spec)?;
        Ok(Arc::new(Self::build(spec.clone(), base)))
    }
}

impl Ring<PLocal> {
    pub fn exact(prime: u64, group: &[u64]) -> Result<Arc<Self>> {
        Self::from_spec(&RingSpec::exact(prime, group))
    }
}

impl Ring<ModPrimePower> {
    pub fn truncated(prime: u64, group: &[u64], vars: usize, n: u32, m: u32) -> Result<Arc<Self>> {
        Self::from_spec(&RingSpec::truncated(prime, group, vars, n, m))
    }
}

impl<B: BaseRing> Ring<B> {
    fn build(spec: RingSpec, base: B) -> Self {
        let orders: Vec<usize> = spec.group.iter().map(|&n| n as usize).collect();
        let group_size: usize = orders.iter().product();
        let mut strides = vec![1; orders.len()];
        for j in (0..orders.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * orders[j + 1];
        }
        let residues = |idx: usize| -> Vec<usize> {
            orders.iter().zip(&strides).map(|(n, s)| (idx / s) % n).collect()
        };
        let index_of = |r: &[usize]| -> usize { r.iter().zip(&strides).map(|(a, s)| a * s).sum() };
        let mut group_mul = vec![0; group_size * group_size];
        let mut group_inv = vec![0; group_size];
        for a in 0..group_size {
            let ra = residues(a);
            let inv: Vec<usize> = ra.iter().zip(&orders).map(|(x, n)| (n - x) % n).collect();
            group_inv[a] = index_of(&inv);
            for b in 0..group_size {
                let rb = residues(b);
                let sum: Vec<usize> = ra.iter().zip(&rb).zip(&orders).map(|((x, y), n)| (x + y) % n).collect();
                group_mul[a * group_size + b] = index_of(&sum);
            }
        }

        let cutoff = match spec.mode {
            Mode::Exact => 1,
            Mode::Truncated => spec.precision.map(|[_, m]| m).unwrap_or(1),
        };
        let monomials = enumerate_monomials(spec.vars, cutoff);
        let mono_index: HashMap<Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let nm = monomials.len();
        let mut mono_mul = vec![None; nm * nm];
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mono_mul[i * nm + j] = mono_index.get(&s).copied();
            }
        }

        Self { spec, base, group_size, strides, monomials, mono_index, mono_mul, group_mul, group_inv }
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn prime(&self) -> u64 {
        self.spec.prime
    }

    pub fn is_exact(&self) -> bool {
        B::EXACT
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    /// Base-scalar rank of the ring.
    pub fn rank(&self) -> usize {
        self.group_size * self.monomials.len()
    }

    pub fn vars(&self) -> usize {
        self.spec.vars
    }

    /// `(p-adic exponent, degree cutoff)` of a truncated ring.
    pub fn precision(&self) -> Option<Precision> {
        match self.spec.mode {
            Mode::Exact => None,
            Mode::Truncated => self.spec.precision.map(|[n, m]| Precision { p_adic: n, degree: m }),
        }
    }

    pub fn group_residues(&self, idx: usize) -> Vec<u64> {
        self.spec
            .group
            .iter()
            .zip(&self.strides)
            .map(|(n, s)| ((idx / s) as u64) % n)
            .collect()
    }

    pub fn group_index(&self, residues: &[u64]) -> Result<usize> {
        if residues.len() != self.spec.group.len() {
            return Err(Error::Dimension(format!(
                "group element needs {} residues, got {}",
                self.spec.group.len(),
                residues.len()
            )));
        }
        Ok(residues
            .iter()
            .zip(&self.spec.group)
            .zip(&self.strides)
            .map(|((r, n), s)| (*r % n) as usize * s)
            .sum())
    }

    pub fn monomial_index(&self, exps: &[u32]) -> Option<usize> {
        self.mono_index.get(exps).copied()
    }

    pub(crate) fn split_basis(&self, idx: usize) -> (usize, usize) {
        (idx / self.monomials.len(), idx % self.monomials.len())
    }

    pub(crate) fn basis_product(&self, a: usize, b: usize) -> Option<usize> {
        let nm = self.monomials.len();
        let (ga, ma) = (a / nm, a % nm);
        let (gb, mb) = (b / nm, b % nm);
        let m = self.mono_mul[ma * nm + mb]?;
        Some(self.group_mul[ga * self.group_size + gb] * nm + m)
    }

    pub(crate) fn group_inverse_index(&self, g: usize) -> usize {
        self.group_inv[g]
    }

    pub(crate) fn group_product_index(&self, a: usize, b: usize) -> usize {
        self.group_mul[a * self.group_size + b]
    }

    pub fn same_as(&self, other: &Ring<B>) -> bool {
        std::ptr::eq(self, other) || (self.spec == other.spec && self.base == other.base)
    }

    pub fn zero(self: &Arc<Self>) -> RingElem<B> {
        RingElem { ring: self.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(self: &Arc<Self>) -> RingElem<B> {
        self.scalar(1)
    }

    pub fn scalar(self: &Arc<Self>, v: i64) -> RingElem<B> {
        self.from_base(self.base.from_i64(v))
    }

    pub fn from_base(self: &Arc<Self>, c: B::Elem) -> RingElem<B> {
        let mut coeffs = BTreeMap::new();
        if !self.base.is_zero(&c) {
            coeffs.insert(0, c);
        }
        RingElem { ring: self.clone(), coeffs }
    }

    /// The group-like basis element for the given residues.
    pub fn group_element(self: &Arc<Self>, residues: &[u64]) -> Result<RingElem<B>> {
        let g = self.group_index(residues)?;
        Ok(self.basis_element(g * self.monomials.len()))
    }

    /// Generator `j` of the finite group (residue 1 in factor `j`).
    pub fn group_generator(self: &Arc<Self>, j: usize) -> RingElem<B> {
        let mut r = vec![0; self.spec.group.len()];
        r[j] = 1;
        self.group_element(&r).expect("valid residues")
    }

    pub fn basis_element(self: &Arc<Self>, idx: usize) -> RingElem<B> {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(idx, self.base.one());
        RingElem { ring: self.clone(), coeffs }
    }

    /// The variable `T_i` (zero if the degree cutoff is 1).
    pub fn var(self: &Arc<Self>, i: usize) -> RingElem<B> {
        assert!(i < self.spec.vars, "variable index out of range");
        let mut e = vec![0; self.spec.vars];
        e[i] = 1;
        match self.monomial_index(&e) {
            Some(m) => self.basis_element(m),
            None => self.zero(),
        }
    }

    /// The topological generator `gamma_i = 1 + T_i`.
    pub fn gamma(self: &Arc<Self>, i: usize) -> RingElem<B> {
        &self.one() + &self.var(i)
    }

    /// Builds an element from a dense coefficient vector of length `rank()`.
    pub fn from_vector(self: &Arc<Self>, v: &[B::Elem]) -> RingElem<B> {
        assert_eq!(v.len(), self.rank());
        let coeffs = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(i, c)| (i, c.clone()))
            .collect();
        RingElem { ring: self.clone(), coeffs }
    }

    pub fn from_terms(
        self: &Arc<Self>,
        terms: impl IntoIterator<Item = (Vec<u64>, Vec<u32>, B::Elem)>,
    ) -> Result<RingElem<B>> {
        let mut acc = self.zero();
        for (g, alpha, c) in terms {
            let gi = self.group_index(&g)?;
            if alpha.len() != self.spec.vars {
                return Err(Error::Dimension(format!(
                    "monomial needs {} exponents, got {}",
                    self.spec.vars,
                    alpha.len()
                )));
            }
            let Some(mi) = self.monomial_index(&alpha) else {
                continue; // beyond the degree cutoff
            };
            let idx = gi * self.monomials.len() + mi;
            let cur = acc.coeffs.remove(&idx).unwrap_or_else(|| self.base.zero());
            let new = self.base.add(&cur, &c);
            if !self.base.is_zero(&new) {
                acc.coeffs.insert(idx, new);
            }
        }
        Ok(acc)
    }

    /// The same ring with the finite group removed (`Z_p[[T]]` truncated).
    pub fn free_part(&self) -> Arc<Ring<B>> {
        let mut spec = self.spec.clone();
        spec.group = Vec::new();
        Arc::new(Ring::build(spec, self.base.clone()))
    }

    /// The ideal `(p^N', total degree >= M')` as a list of lattice rows.
    /// Whether a base vector (blocks of length `rank`) lies in
    /// `(p^a, deg >= b)` coordinatewise.
    pub(crate) fn vector_in_precision_ideal(&self, v: &[B::Elem], prec: Precision) -> bool {
        let r = self.rank();
        v.iter().enumerate().all(|(i, c)| {
            if self.base.is_zero(c) {
                return true;
            }
            let (_, m) = self.split_basis(i % r);
            self.monomials[m].iter().sum::<u32>() >= prec.degree
                || self.base.valuation(c).is_some_and(|val| val >= prec.p_adic)
        })
    }

    /// Candidate precisions not above `cap`, best first: larger total, then
    /// more balanced, then more degree precision.
    pub(crate) fn precision_candidates(cap: Precision) -> Vec<Precision> {
        let (fa, fd) = crate::ideal::PRECISION_FLOOR;
        let mut out: Vec<Precision> = (fa..=cap.p_adic)
            .flat_map(|a| (fd..=cap.degree).map(move |b| Precision { p_adic: a, degree: b }))
            .collect();
        out.sort_by_key(|p| std::cmp::Reverse((p.p_adic + p.degree, p.p_adic.min(p.degree), p.degree)));
        out
    }

    /// Ideal generators of `(p^a, deg >= b)`: `p^a` and the monomials of
    /// degree exactly `b` (those of higher degree follow).
    pub(crate) fn precision_ideal_gens(self: &Arc<Self>, prec: Precision) -> Vec<RingElem<B>> {
        let mut out = Vec::new();
        let pa = self.base.p_power(prec.p_adic);
        if !self.base.is_zero(&pa) {
            out.push(self.from_base(pa));
        }
        for (m, mono) in self.monomials.iter().enumerate() {
            if mono.iter().sum::<u32>() == prec.degree {
                out.push(self.basis_element(m));
            }
        }
        out
    }

    pub(crate) fn precision_ideal_rows(&self, prec: Precision) -> Vec<Vec<B::Elem>> {
        let r = self.rank();
        let pn = self.base.p_power(prec.p_adic);
        let mut rows = Vec::new();
        for idx in 0..r {
            let (_, m) = self.split_basis(idx);
            let deg: u32 = self.monomials[m].iter().sum();
            let mut row = vec![self.base.zero(); r];
            if deg >= prec.degree {
                row[idx] = self.base.one();
            } else if !self.base.is_zero(&pn) {
                row[idx] = pn.clone();
            } else {
                continue;
            }
            rows.push(row);
        }
        rows
    }
}

/// An element of a [`Ring`], stored sparsely (zero coefficients absent).
#[derive(Clone)]
pub struct RingElem<B: BaseRing> {
    ring: Arc<Ring<B>>,
    coeffs: BTreeMap<usize, B::Elem>,
}

impl<B: BaseRing> PartialEq for RingElem<B> {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_as(&other.ring) && self.coeffs == other.coeffs
    }
}

impl<B: BaseRing> Eq for RingElem<B> {}

impl<B: BaseRing> std::hash::Hash for RingElem<B> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (k, v) in &self.coeffs {
            k.hash(state);
            v.hash(state);
        }
    }
}

impl<B: BaseRing> RingElem<B> {
    pub fn ring(&self) -> &Arc<Ring<B>> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| self.ring.base.is_one(c))
    }

    pub fn coeff(&self, idx: usize) -> B::Elem {
        self.coeffs.get(&idx).cloned().unwrap_or_else(|| self.ring.base.zero())
    }

    /// Non-zero terms as `(basis index, coefficient)` in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &B::Elem)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    pub fn to_vector(&self) -> Vec<B::Elem> {
        let mut v = vec![self.ring.base.zero(); self.ring.rank()];
        for (k, c) in &self.coeffs {
            v[*k] = c.clone();
        }
        v
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ring.same_as(&other.ring) {
            Ok(())
        } else {
            Err(Error::MixedRings)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = &self.ring.base;
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            let new = match coeffs.get(k) {
                Some(a) => base.add(a, c),
                None => c.clone(),
            };
            if base.is_zero(&new) {
                coeffs.remove(k);
            } else {
                coeffs.insert(*k, new);
            }
        }
        Ok(Self { ring: self.ring.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let base = &self.ring.base;
        let mut acc: BTreeMap<usize, B::Elem> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some(k) = self.ring.basis_product(*i, *j) {
                    let prod = base.mul(a, b);
                    let entry = acc.entry(k).or_insert_with(|| base.zero());
                    *entry = base.add(entry, &prod);
                }
            }
        }
        acc.retain(|_, v| !base.is_zero(v));
        Ok(Self { ring: self.ring.clone(), coeffs: acc })
    }

    fn neg_ref(&self) -> Self {
        let base = &self.ring.base;
        Self { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(|(k, v)| (*k, base.neg(v))).collect() }
    }

    pub fn scale(&self, c: &B::Elem) -> Self {
        let base = &self.ring.base;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (*k, base.mul(v, c)))
            .filter(|(_, v)| !base.is_zero(v))
            .collect();
        Self { ring: self.ring.clone(), coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut result = self.ring.one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        result
    }

    /// Matrix of `x -> self * x` on the base-scalar basis (column convention).
    pub fn mult_matrix(&self) -> Mat<B::Elem> {
        let r = self.ring.rank();
        let base = &self.ring.base;
        let mut m = Mat::filled(r, r, base.zero());
        for (i, a) in &self.coeffs {
            for j in 0..r {
                if let Some(k) = self.ring.basis_product(*i, j) {
                    let cur = base.add(m.get(k, j), a);
                    m.set(k, j, cur);
                }
            }
        }
        m
    }

    /// Whether multiplication by `self` is injective on the ring as
    /// represented (exact mode: `det != 0`; truncated mode: injective on the
    /// truncation). When it is not, a kernel element is returned.
    pub fn is_nonzerodivisor(&self) -> NzdReport<B> {
        let ker = echelon::kernel(&self.ring.base, &self.mult_matrix());
        match ker.first() {
            None => NzdReport { regular: true, witness: None },
            Some(v) => NzdReport { regular: false, witness: Some(self.ring.from_vector(v)) },
        }
    }

    /// Certifies that `self` lifts to a non-zero-divisor of the untruncated
    /// algebra: in exact mode this is [`Self::is_nonzerodivisor`]; in
    /// truncated mode the norm down to `Z_p[[T]]` must be non-zero at the
    /// working precision.
    pub fn is_regular_to_precision(&self) -> bool {
        if B::EXACT {
            return self.is_nonzerodivisor().regular;
        }
        !self.norm_to_free_part().is_zero()
    }

    /// Determinant of multiplication by `self` on the free
    /// `Z_p[[T]]`-module with basis the finite group.
    pub fn norm_to_free_part(&self) -> RingElem<B> {
        let ng = self.ring.group_size;
        let free = self.ring.free_part();
        if ng == 1 {
            return free.from_vector(&self.to_vector());
        }
        let nm = self.ring.monomials.len();
        // component of self along each group element, as elements of the free ring
        let mut parts = vec![free.zero(); ng];
        for (idx, c) in &self.coeffs {
            let (g, m) = (idx / nm, idx % nm);
            parts[g] = &parts[g] + &free.basis_element(m).scale(c);
        }
        let mut entries = Vec::with_capacity(ng * ng);
        for h in 0..ng {
            for g in 0..ng {
                let k = self.ring.group_product_index(h, self.ring.group_inverse_index(g));
                entries.push(parts[k].clone());
            }
        }
        let m = crate::matrix::RMatrix::from_entries(&free, ng, ng, entries).expect("square");
        m.det().expect("square matrix")
    }

    /// Newton-polygon style precision loss `(p-adic, degree)` incurred by
    /// dividing by `self`; `None` if `self` is not regular to precision.
    pub fn precision_loss(&self) -> Option<(u32, u32)> {
        // multiplication by a free-part element is block diagonal, so its
        // loss is read off the element itself rather than its norm
        let n = if self.coeffs.keys().all(|&i| i < self.ring.monomials.len()) {
            self.ring.free_part().from_vector(&self.to_vector()[..self.ring.monomials.len()])
        } else {
            self.norm_to_free_part()
        };
        if n.is_zero() {
            return None;
        }
        let ring = n.ring();
        let base = &ring.base;
        let terms: Vec<(u32, u32)> = n
            .terms()
            .map(|(idx, c)| {
                let (_, m) = ring.split_basis(idx);
                (ring.monomials[m].iter().sum::<u32>(), base.valuation(c).expect("non-zero"))
            })
            .collect();
        let content = terms.iter().map(|t| t.1).min().unwrap();
        let k0 = terms.iter().filter(|t| t.1 == content).map(|t| t.0).min().unwrap();
        let v0 = terms.iter().filter(|t| t.0 < k0).map(|t| t.1).min().unwrap_or(content);
        Some((v0, k0))
    }

    /// `min(valuation + degree)` over the terms; `u32::MAX` for zero.
    pub fn adic_order(&self) -> u32 {
        self.terms()
            .map(|(idx, c)| {
                let (_, m) = self.ring.split_basis(idx);
                self.ring.monomials[m].iter().sum::<u32>() + self.ring.base.valuation(c).unwrap_or(0)
            })
            .min()
            .unwrap_or(u32::MAX)
    }

    /// Whether every term lies in `(p^a, deg >= b)`.
    pub fn in_precision_ideal(&self, prec: Precision) -> bool {
        self.ring.vector_in_precision_ideal(&self.to_vector(), prec)
    }

    /// The best precision `P' <= cap` with `(I_cap : self) inside I_P'`,
    /// where `I_P = (p^a, deg >= b)`: multiplication by `self` is injective
    /// up to `P'` on objects known modulo `I_cap`. `None` in exact mode or
    /// when no precision above the floor qualifies.
    pub fn annihilator_precision(&self, cap: Precision) -> Option<Precision> {
        self.ring.precision()?;
        let m = crate::matrix::RMatrix::from_rows(&self.ring, vec![vec![self.clone()]]).ok()?;
        let colon = m.kernel_at(cap);
        Ring::<B>::precision_candidates(cap)
            .into_iter()
            .find(|&p| colon.iter().all(|v| self.ring.vector_in_precision_ideal(v, p)))
    }

    pub fn inverse(&self) -> Option<Self> {
        let r = self.ring.rank();
        let base = &self.ring.base;
        let mut e = vec![base.zero(); r];
        e[0] = base.one();
        echelon::solve(base, &self.mult_matrix(), &e).map(|x| self.ring.from_vector(&x))
    }

    pub fn is_unit(&self) -> bool {
        // a unit iff multiplication is invertible iff the Hermite/Howell form
        // of the multiplication matrix has only unit pivots on the diagonal
        let ech = Echelon::new(&self.ring.base, self.mult_matrix().transpose().data_rows(), self.ring.rank());
        ech.rank() == self.ring.rank() && ech.pivots.iter().all(|(_, v)| *v == 0)
    }

    /// Element divided by `p^k` if all coefficients allow it.
    pub fn div_p_power(&self, k: u32) -> Option<Self> {
        let base = &self.ring.base;
        let pk = base.p_power(k);
        let mut coeffs = BTreeMap::new();
        for (i, c) in &self.coeffs {
            coeffs.insert(*i, base.divide(c, &pk)?);
        }
        Some(Self { ring: self.ring.clone(), coeffs })
    }

    /// Canonical human-readable form, terms in basis order.
    pub fn to_canonical_string(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let ring = &self.ring;
        let mut parts = Vec::new();
        for (idx, c) in &self.coeffs {
            let (g, m) = ring.split_basis(*idx);
            let (num, den) = ring.base.to_ratio(c);
            let mut s = if den == num_bigint::BigInt::from(1) { num.to_string() } else { format!("{num}/{den}") };
            if g != 0 {
                let res = ring.group_residues(g);
                let r: Vec<String> = res.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("*g[{}]", r.join(",")));
            }
            for (i, e) in ring.monomials[m].iter().enumerate() {
                match e {
                    0 => {}
                    1 => s.push_str(&format!("*T{}", i + 1)),
                    _ => s.push_str(&format!("*T{}^{}", i + 1, e)),
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl<E: Clone> Mat<E> {
    pub(crate) fn data_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Result of [`RingElem::is_nonzerodivisor`].
#[derive(Clone, Debug)]
pub struct NzdReport<B: BaseRing> {
    pub regular: bool,
    /// `w != 0` with `a * w = 0` whenever `regular` is false.
    pub witness: Option<RingElem<B>>,
}

impl<B: BaseRing> fmt::Debug for RingElem<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem({})", self.to_canonical_string())
    }
}

impl<B: BaseRing> fmt::Display for RingElem<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

// Operators panic on mixed rings; use the `try_*` methods to get an error.
impl<B: BaseRing> Add for &RingElem<B> {
    type Output = RingElem<B>;
    fn add(self, rhs: Self) -> RingElem<B> {
        self.try_add(rhs).expect("mixed-ring operands")
    }
}

impl<B: BaseRing> Sub for &RingElem<B> {
    type Output = RingElem<B>;
    fn sub(self, rhs: Self) -> RingElem<B> {
        self.try_sub(rhs).expect("mixed-ring operands")
    }
}

impl<B: BaseRing> Mul for &RingElem<B> {
    type Output = RingElem<B>;
    fn mul(self, rhs: Self) -> RingElem<B> {
        self.try_mul(rhs).expect("mixed-ring operands")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<B: BaseRing> $tr<&RingElem<B>> for RingElem<B> {
            type Output = RingElem<B>;
            fn $f(self, rhs: &RingElem<B>) -> RingElem<B> {
                (&self).$f(rhs)
            }
        }
        impl<B: BaseRing> $tr for RingElem<B> {
            type Output = RingElem<B>;
            fn $f(self, rhs: RingElem<B>) -> RingElem<B> {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<B: BaseRing> Neg for &RingElem<B> {
    type Output = RingElem<B>;
    fn neg(self) -> RingElem<B> {
        self.neg_ref()
    }
}
