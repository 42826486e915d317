//! Ring homomorphisms: augmentation, projection to a quotient, and twists by
//! characters of the finite part.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::RMatrix;
use crate::ring::{Mode, Ring, RingElem, RingSpec};
use crate::scalar::BaseRing;

#[derive(Clone, Debug, PartialEq)]
pub enum HomKind<E> {
    Augmentation,
    Projection {
        /// Image of each finite generator, as residues in the target group.
        group_images: Vec<Vec<u64>>,
        /// Image of each `gamma_i`: a target group element times
        /// `prod_k gamma'_k^{e_k}`.
        free_images: Vec<(Vec<u64>, Vec<i64>)>,
    },
    /// `g_j -> chi_j * g_j`, identity on the free part.
    Twist { characters: Vec<E> },
}

/// A ring homomorphism, stored as the images of all basis elements.
#[derive(Clone, Debug)]
pub struct RingHom<B: BaseRing> {
    kind: HomKind<B::Elem>,
    source: Arc<Ring<B>>,
    target: Arc<Ring<B>>,
    basis_images: Vec<RingElem<B>>,
}

fn element_order(residues: &[u64], orders: &[u64]) -> u64 {
    residues
        .iter()
        .zip(orders)
        .map(|(&r, &n)| {
            let r = r % n;
            if r == 0 {
                1
            } else {
                n / num_integer::gcd(r, n)
            }
        })
        .fold(1, num_integer::lcm)
}

fn generated_subgroup(gens: &[Vec<u64>], orders: &[u64]) -> usize {
    let start = vec![0u64; orders.len()];
    let mut seen = BTreeSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).zip(orders).map(|((a, b), n)| (a + b) % n).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

impl<B: BaseRing> RingHom<B> {
    /// `G -> 1`, `T_i -> 0`, onto the base ring (as a ring with trivial group).
    pub fn augmentation(source: &Arc<Ring<B>>) -> Result<Self>
    where
        B: crate::ring::BaseFromSpec,
    {
        let s = source.spec();
        let spec = RingSpec { prime: s.prime, group: Vec::new(), vars: 0, mode: s.mode, precision: s.precision };
        let target = Ring::<B>::from_spec(&spec)?;
        let images = (0..source.rank())
            .map(|idx| {
                let (_, m) = source_split(source, idx);
                if m == 0 {
                    target.one()
                } else {
                    target.zero()
                }
            })
            .collect();
        Ok(Self { kind: HomKind::Augmentation, source: source.clone(), target, basis_images: images })
    }

    /// Projection onto `target`, determined by the images of the finite
    /// generators and of the `gamma_i`.
    pub fn projection(
        source: &Arc<Ring<B>>,
        target: &Arc<Ring<B>>,
        group_images: Vec<Vec<u64>>,
        free_images: Vec<(Vec<u64>, Vec<i64>)>,
    ) -> Result<Self> {
        let (ss, ts) = (source.spec(), target.spec());
        if ss.prime != ts.prime || ss.mode != ts.mode {
            return Err(Error::InvalidHom("source and target differ in prime or mode".into()));
        }
        if group_images.len() != ss.group.len() {
            return Err(Error::InvalidHom(format!(
                "need {} finite generator images, got {}",
                ss.group.len(),
                group_images.len()
            )));
        }
        if free_images.len() != ss.vars {
            return Err(Error::InvalidHom(format!("need {} free images, got {}", ss.vars, free_images.len())));
        }
        if ss.mode == Mode::Truncated {
            let ([n, m], [n2, m2]) = (ss.precision.unwrap(), ts.precision.unwrap());
            if n2 > n || m2 > m {
                return Err(Error::InvalidHom("target precision exceeds source precision".into()));
            }
        }
        for (j, img) in group_images.iter().enumerate() {
            if img.len() != ts.group.len() {
                return Err(Error::InvalidHom(format!("generator {j}: wrong number of residues")));
            }
            let ord = element_order(img, &ts.group);
            if ss.group[j] % ord != 0 {
                return Err(Error::InvalidHom(format!(
                    "generator {j} has order {} but its image has order {ord}",
                    ss.group[j]
                )));
            }
        }
        for (i, (h, e)) in free_images.iter().enumerate() {
            if h.len() != ts.group.len() || e.len() != ts.vars {
                return Err(Error::InvalidHom(format!("free image {i}: wrong shape")));
            }
            if ss.mode == Mode::Truncated && h.iter().zip(&ts.group).any(|(r, n)| r % n != 0) {
                // gamma -> h * gamma' with h of finite order is not compatible
                // with the degree truncation
                return Err(Error::InvalidHom(format!(
                    "free image {i} must have trivial finite component in truncated mode"
                )));
            }
        }
        let mut all: Vec<Vec<u64>> = group_images.clone();
        all.extend(free_images.iter().map(|(h, _)| h.clone()));
        if generated_subgroup(&all, &ts.group) as u64 != ts.group_order() {
            return Err(Error::InvalidHom("images do not generate the target group".into()));
        }

        let gen_imgs: Vec<RingElem<B>> =
            group_images.iter().map(|r| target.group_element(r)).collect::<Result<_>>()?;
        let var_imgs: Vec<RingElem<B>> = free_images
            .iter()
            .map(|(h, e)| {
                let mut x = target.group_element(h)?;
                for (k, &ek) in e.iter().enumerate() {
                    let g = target.gamma(k);
                    let g = if ek < 0 { g.inverse().expect("gamma is a unit") } else { g };
                    x = &x * &g.pow(ek.unsigned_abs() as u32);
                }
                Ok(&x - &target.one())
            })
            .collect::<Result<_>>()?;
        let basis_images = build_images(source, target, &gen_imgs, &var_imgs);
        Ok(Self {
            kind: HomKind::Projection { group_images, free_images },
            source: source.clone(),
            target: target.clone(),
            basis_images,
        })
    }

    /// Automorphism `g_j -> chi_j g_j`. Each `chi_j` must be a unit with
    /// `chi_j^{n_j} = 1`.
    pub fn twist(source: &Arc<Ring<B>>, characters: Vec<B::Elem>) -> Result<Self> {
        let s = source.spec();
        let base = source.base();
        if characters.len() != s.group.len() {
            return Err(Error::InvalidHom(format!(
                "need {} character values, got {}",
                s.group.len(),
                characters.len()
            )));
        }
        for (j, c) in characters.iter().enumerate() {
            if !base.is_unit(c) {
                return Err(Error::InvalidHom(format!("character value {j} is not a unit")));
            }
            let mut pow = base.one();
            for _ in 0..s.group[j] {
                pow = base.mul(&pow, c);
            }
            if !base.is_one(&pow) {
                return Err(Error::InvalidHom(format!("character value {j} is not an n-th root of unity")));
            }
        }
        let gen_imgs: Vec<RingElem<B>> =
            characters.iter().enumerate().map(|(j, c)| source.group_generator(j).scale(c)).collect();
        let var_imgs: Vec<RingElem<B>> = (0..s.vars).map(|i| source.var(i)).collect();
        let basis_images = build_images(source, source, &gen_imgs, &var_imgs);
        Ok(Self { kind: HomKind::Twist { characters }, source: source.clone(), target: source.clone(), basis_images })
    }

    /// The inverse twist.
    pub fn inverse(&self) -> Result<Self> {
        match &self.kind {
            HomKind::Twist { characters } => {
                let base = self.source.base();
                let inv = characters.iter().map(|c| base.inverse(c).expect("unit")).collect();
                Self::twist(&self.source, inv)
            }
            _ => Err(Error::InvalidHom("only twists are invertible".into())),
        }
    }

    pub fn kind(&self) -> &HomKind<B::Elem> {
        &self.kind
    }

    pub fn source(&self) -> &Arc<Ring<B>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Ring<B>> {
        &self.target
    }

    pub fn apply(&self, a: &RingElem<B>) -> Result<RingElem<B>> {
        if !a.ring().same_as(&self.source) {
            return Err(Error::MixedRings);
        }
        let tb = self.target.base();
        let mut acc = self.target.zero();
        for (idx, c) in a.terms() {
            let c = tb.coerce(c);
            if !tb.is_zero(&c) {
                acc = &acc + &self.basis_images[idx].scale(&c);
            }
        }
        Ok(acc)
    }

    pub fn apply_matrix(&self, m: &RMatrix<B>) -> Result<RMatrix<B>> {
        if !m.ring().same_as(&self.source) {
            return Err(Error::MixedRings);
        }
        Ok(m.map_entries(&self.target, |e| self.apply(e).expect("checked ring")))
    }
}

fn source_split<B: BaseRing>(ring: &Ring<B>, idx: usize) -> (usize, usize) {
    (idx / ring.monomial_count(), idx % ring.monomial_count())
}

fn build_images<B: BaseRing>(
    source: &Arc<Ring<B>>,
    target: &Arc<Ring<B>>,
    gen_imgs: &[RingElem<B>],
    var_imgs: &[RingElem<B>],
) -> Vec<RingElem<B>> {
    let group_imgs: Vec<RingElem<B>> = (0..source.group_size())
        .map(|g| {
            let res = source.group_residues(g);
            let mut x = target.one();
            for (j, r) in res.iter().enumerate() {
                x = &x * &gen_imgs[j].pow(*r as u32);
            }
            x
        })
        .collect();
    let mono_imgs: Vec<RingElem<B>> = source
        .monomials()
        .iter()
        .map(|alpha| {
            let mut x = target.one();
            for (i, e) in alpha.iter().enumerate() {
                x = &x * &var_imgs[i].pow(*e);
            }
            x
        })
        .collect();
    (0..source.rank())
        .map(|idx| {
            let (g, m) = source_split(source, idx);
            &group_imgs[g] * &mono_imgs[m]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn augmentation_kills_augmentation_ideal() {
        let r = Ring::exact(3, &[2]).unwrap();
        let h = RingHom::augmentation(&r).unwrap();
        let g = r.group_generator(0);
        assert!(h.apply(&(&g - &r.one())).unwrap().is_zero());
        assert_eq!(h.apply(&g).unwrap(), h.target().one());
    }

    #[test]
    fn projection_c4_to_c2() {
        let r = Ring::exact(3, &[4]).unwrap();
        let q = Ring::exact(3, &[2]).unwrap();
        let h = RingHom::projection(&r, &q, vec![vec![1]], vec![]).unwrap();
        let g = r.group_generator(0);
        let gb = q.group_generator(0);
        assert_eq!(h.apply(&(&g - &r.one())).unwrap(), &gb - &q.one());
        assert!(RingHom::projection(&q, &r, vec![vec![1]], vec![]).is_err());
    }

    #[test]
    fn twist_by_sign() {
        let r = Ring::exact(3, &[2]).unwrap();
        let base = r.base().clone();
        let h = RingHom::twist(&r, vec![base.from_i64(-1)]).unwrap();
        let g = r.group_generator(0);
        assert_eq!(h.apply(&(&r.one() + &g)).unwrap(), &r.one() - &g);
        assert!(RingHom::twist(&r, vec![base.from_i64(3)]).is_err());
    }

    #[test]
    fn truncated_projection_lowers_precision() {
        let r = Ring::truncated(3, &[], 1, 3, 4).unwrap();
        let q = Ring::truncated(3, &[], 1, 2, 3).unwrap();
        let h = RingHom::projection(&r, &q, vec![], vec![(vec![], vec![3])]).unwrap();
        // gamma -> gamma^3, so T -> 3T + 3T^2 + T^3 = 3T + 3T^2 (T^3 truncated)
        let img = h.apply(&r.var(0)).unwrap();
        let t = q.var(0);
        assert_eq!(img, &t.scale(&3) + &t.pow(2).scale(&3));
    }
}
