//! JSON documents for rings, elements, matrices, modules, ideals, complexes
//! and scenarios, plus a mode dispatch for callers that only know the ring spec
//! at runtime.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::PlaceData;
use crate::complex::PerfectComplex;
use crate::error::{Error, Result};
use crate::ideal::FracIdeal;
use crate::matrix::RMatrix;
use crate::module::FPModule;
use crate::ring::{Mode, Ring, RingElem, RingSpec};
use crate::scalar::{BaseRing, ModPrimePower, PLocal};

/// An integer written either as a JSON number or as a decimal string (for
/// values beyond `i64`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Int(i64),
    Str(String),
}

impl JsonInt {
    fn to_bigint(&self) -> Result<BigInt> {
        match self {
            JsonInt::Int(v) => Ok(BigInt::from(*v)),
            JsonInt::Str(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        }
    }

    fn from_bigint(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| JsonInt::Str(v.to_string()), JsonInt::Int)
    }
}

fn one() -> JsonInt {
    JsonInt::Int(1)
}

/// One term `num/den * g * T^alpha` of a ring element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    #[serde(default)]
    pub group: Vec<u64>,
    #[serde(default)]
    pub monomial: Vec<u32>,
    pub num: JsonInt,
    #[serde(default = "one")]
    pub den: JsonInt,
}

pub type ElemDoc = Vec<TermDoc>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ElemDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDoc {
    pub ring: RingSpec,
    pub presentation: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealDoc {
    pub ring: RingSpec,
    pub gens: Vec<ElemDoc>,
    #[serde(default)]
    pub den: Option<ElemDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub ring: RingSpec,
    pub lo: i64,
    pub hi: i64,
    pub ranks: Vec<usize>,
    pub differentials: Vec<MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceDoc {
    pub label: String,
    pub decomposition: Vec<ElemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frobenius: Option<ElemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<i64>,
}

/// A check to run against the places of a scenario, referenced by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckDoc {
    /// `Fitt^[1](Z^0_{p}) = Fitt^[2](Z_p)` (part 1) or the comparison of
    /// `Z^0` with and without the conjugate place (part 2).
    Lemma79 {
        part: u8,
        p_place: String,
        #[serde(default)]
        conjugate: Option<String>,
        #[serde(default)]
        others: Vec<String>,
    },
    /// `sf(Z_v, 0) = R` for a place with finite-index decomposition group.
    PlaceSf0 { place: String },
    /// Multiplying by `1 - sigma^{-1}` and by the local determinant gives
    /// back the base ideal, and Euler factors commute.
    LedgerCoherence { places: Vec<String> },
    /// `Fitt^[n](Z^0_A)` for the listed places.
    Z0Fitt { places: Vec<String>, #[serde(default = "default_shift")] n: usize },
}

fn default_shift() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub ring: RingSpec,
    pub places: Vec<PlaceDoc>,
    #[serde(default)]
    pub checks: Vec<CheckDoc>,
}

// ---- conversions ----

pub fn elem_to_doc<B: BaseRing>(e: &RingElem<B>) -> ElemDoc {
    let ring = e.ring();
    let nm = ring.monomial_count();
    e.terms()
        .map(|(idx, c)| {
            let (num, den) = ring.base().to_ratio(c);
            TermDoc {
                group: ring.group_residues(idx / nm),
                monomial: ring.monomials()[idx % nm].clone(),
                num: JsonInt::from_bigint(&num),
                den: JsonInt::from_bigint(&den),
            }
        })
        .collect()
}

pub fn elem_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &[TermDoc]) -> Result<RingElem<B>> {
    let mut terms = Vec::with_capacity(doc.len());
    for t in doc {
        let group = if t.group.is_empty() { vec![0; ring.spec().group.len()] } else { t.group.clone() };
        let monomial = if t.monomial.is_empty() { vec![0; ring.vars()] } else { t.monomial.clone() };
        let c = ring.base().from_ratio(&t.num.to_bigint()?, &t.den.to_bigint()?)?;
        terms.push((group, monomial, c));
    }
    ring.from_terms(terms)
}

pub fn matrix_to_doc<B: BaseRing>(m: &RMatrix<B>) -> MatrixDoc {
    MatrixDoc {
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows()).map(|i| m.row(i).iter().map(elem_to_doc).collect()).collect(),
    }
}

pub fn matrix_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &MatrixDoc) -> Result<RMatrix<B>> {
    if doc.entries.len() != doc.rows || doc.entries.iter().any(|r| r.len() != doc.cols) {
        return Err(Error::Parse(format!("matrix entries do not match the declared {}x{} shape", doc.rows, doc.cols)));
    }
    let mut entries = Vec::with_capacity(doc.rows * doc.cols);
    for row in &doc.entries {
        for e in row {
            entries.push(elem_from_doc(ring, e)?);
        }
    }
    RMatrix::from_entries(ring, doc.rows, doc.cols, entries)
}

pub fn module_to_doc<B: BaseRing>(m: &FPModule<B>) -> ModuleDoc {
    ModuleDoc { ring: m.ring().spec().clone(), presentation: matrix_to_doc(m.relations()) }
}

pub fn module_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &ModuleDoc) -> Result<FPModule<B>> {
    check_spec(ring, &doc.ring)?;
    Ok(FPModule::new(matrix_from_doc(ring, &doc.presentation)?))
}

pub fn ideal_to_doc<B: BaseRing>(i: &FracIdeal<B>) -> IdealDoc {
    IdealDoc {
        ring: i.ring().spec().clone(),
        gens: i.gens().iter().map(elem_to_doc).collect(),
        den: Some(elem_to_doc(i.den())),
    }
}

pub fn ideal_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &IdealDoc) -> Result<FracIdeal<B>> {
    check_spec(ring, &doc.ring)?;
    let gens = doc.gens.iter().map(|g| elem_from_doc(ring, g)).collect::<Result<Vec<_>>>()?;
    let den = match &doc.den {
        Some(d) => elem_from_doc(ring, d)?,
        None => ring.one(),
    };
    FracIdeal::new(ring, gens, den)
}

pub fn complex_to_doc<B: BaseRing>(c: &PerfectComplex<B>) -> ComplexDoc {
    ComplexDoc {
        ring: c.ring().spec().clone(),
        lo: c.lo(),
        hi: c.hi(),
        ranks: c.ranks().to_vec(),
        differentials: c.differentials().iter().map(matrix_to_doc).collect(),
    }
}

/// Validates shapes and `d∘d = 0`; the error names the offending degree.
pub fn complex_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &ComplexDoc) -> Result<PerfectComplex<B>> {
    check_spec(ring, &doc.ring)?;
    if doc.hi < doc.lo || (doc.hi - doc.lo + 1) as usize != doc.ranks.len() {
        return Err(Error::Parse(format!("degrees {}..={} do not match {} ranks", doc.lo, doc.hi, doc.ranks.len())));
    }
    let diffs = doc.differentials.iter().map(|d| matrix_from_doc(ring, d)).collect::<Result<Vec<_>>>()?;
    PerfectComplex::new(ring, doc.lo, doc.ranks.clone(), diffs)
}

pub fn place_from_doc<B: BaseRing>(ring: &Arc<Ring<B>>, doc: &PlaceDoc) -> Result<PlaceData<B>> {
    let decomposition = doc.decomposition.iter().map(|d| elem_from_doc(ring, d)).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = decomposition.iter().position(|d| !d.is_unit()) {
        return Err(Error::Parse(format!("decomposition generator {bad} of place {} is not a unit", doc.label)));
    }
    let mut place = PlaceData::new(doc.label.clone(), decomposition);
    if let Some(f) = &doc.frobenius {
        let sigma = elem_from_doc(ring, f)?;
        place = match doc.norm {
            Some(n) => place.with_frobenius(sigma, n),
            None => {
                place.frobenius = Some(sigma);
                place
            }
        };
    }
    Ok(place)
}

pub fn place_to_doc<B: BaseRing>(p: &PlaceData<B>) -> PlaceDoc {
    PlaceDoc {
        label: p.label.clone(),
        decomposition: p.decomposition.iter().map(elem_to_doc).collect(),
        frobenius: p.frobenius.as_ref().map(elem_to_doc),
        norm: p.norm,
    }
}

fn check_spec<B: BaseRing>(ring: &Arc<Ring<B>>, spec: &RingSpec) -> Result<()> {
    if ring.spec() != spec {
        return Err(Error::MixedRings);
    }
    Ok(())
}

// ---- mode dispatch ----

/// A ring whose scalar type is only known at runtime.
#[derive(Clone, Debug)]
pub enum AnyRing {
    Exact(Arc<Ring<PLocal>>),
    Truncated(Arc<Ring<ModPrimePower>>),
}

impl AnyRing {
    pub fn from_spec(spec: &RingSpec) -> Result<Self> {
        Ok(match spec.mode {
            Mode::Exact => AnyRing::Exact(Ring::from_spec(spec)?),
            Mode::Truncated => AnyRing::Truncated(Ring::from_spec(spec)?),
        })
    }

    /// Reads the `ring` field of any document.
    pub fn from_document(doc: &serde_json::Value) -> Result<Self> {
        let spec = doc.get("ring").ok_or_else(|| Error::Parse("document has no \"ring\" field".into()))?;
        let spec: RingSpec = serde_json::from_value(spec.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }
}

/// Something that can run against either mode.
pub trait ModeVisitor {
    type Output;
    fn visit<B: crate::ring::BaseFromSpec>(self, ring: &Arc<Ring<B>>) -> Self::Output;
}

impl AnyRing {
    pub fn dispatch<V: ModeVisitor>(&self, v: V) -> V::Output {
        match self {
            AnyRing::Exact(r) => v.visit(r),
            AnyRing::Truncated(r) => v.visit(r),
        }
    }
}

pub fn parse_json<T: serde::de::DeserializeOwned>(value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip_with_big_and_fractional_coefficients() {
        let r = Ring::exact(3, &[2]).unwrap();
        let doc: ElemDoc = serde_json::from_str(
            r#"[{"group":[1],"monomial":[],"num":"123456789012345678901234567890","den":2},{"group":[0],"num":5,"den":7}]"#,
        )
        .unwrap();
        let e = elem_from_doc(&r, &doc).unwrap();
        assert_eq!(elem_from_doc(&r, &elem_to_doc(&e)).unwrap(), e);
        let bad: ElemDoc = serde_json::from_str(r#"[{"num":1,"den":3}]"#).unwrap();
        assert!(elem_from_doc(&r, &bad).is_err());
    }

    #[test]
    fn malformed_complex_names_the_degree() {
        let r = Ring::exact(3, &[]).unwrap();
        let one = elem_to_doc(&r.one());
        let m = MatrixDoc { rows: 1, cols: 1, entries: vec![vec![one]] };
        let doc = ComplexDoc { ring: r.spec().clone(), lo: 0, hi: 2, ranks: vec![1, 1, 1], differentials: vec![m.clone(), m] };
        assert_eq!(complex_from_doc(&r, &doc).unwrap_err(), Error::NotAComplex(0));
    }
}
