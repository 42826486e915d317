mod common;

use std::sync::Arc;

use common::{coeffs, elem, exps, matrix, nzd, pd1_presentation, unitriangular};
use iwafit_core::arith::{check_cor41_shape, ledger_apply_eq100, ledger_apply_eq101, place_sf0, z0, PlaceData};
use iwafit_core::complex::{phi, ChainMap, K0Class};
use iwafit_core::fitting::{fitt, sf, shift_fitt, shift_fitt_with, ResolutionChoice};
use iwafit_core::hom::RingHom;
use iwafit_core::suites::lemma79_places;
use iwafit_core::{BaseRing, FPModule, FracIdeal, ModPrimePower, PLocal, PerfectComplex, RMatrix, Ring};
use proptest::prelude::*;

fn exact(ri: usize) -> Arc<Ring<PLocal>> {
    [Ring::exact(3, &[]), Ring::exact(3, &[2]), Ring::exact(5, &[2]), Ring::exact(3, &[2, 2]), Ring::exact(3, &[4])]
        [ri]
        .clone()
        .unwrap()
}

const EXACT_RINGS: usize = 5;

/// Free `Z_(p)`-rank of a module: generators times ring rank, minus the
/// rank of the relation lattice.
fn free_rank<B: BaseRing>(m: &FPModule<B>) -> usize {
    m.generators() * m.ring().rank() - m.relation_lattice().rank()
}

fn choice() -> impl Strategy<Value = ResolutionChoice> {
    (0u32..2, prop::option::of(0u64..100), any::<bool>()).prop_map(|(extra_power, shuffle_seed, redundant_generator)| {
        ResolutionChoice { extra_power, shuffle_seed, redundant_generator }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // ---- modules ----

    #[test]
    fn fitting_ideal_is_multiplicative_on_sums(ri in 0..EXACT_RINGS, a in coeffs(12), b in coeffs(12), ca in 1usize..3, cb in 1usize..3) {
        let ring = exact(ri);
        let m1 = FPModule::new(matrix(&ring, 1, ca, &a));
        let m2 = FPModule::new(matrix(&ring, 2, cb, &b));
        let lhs = fitt(&m1.direct_sum(&m2).unwrap());
        prop_assert!(lhs.equals(&fitt(&m1).multiply(&fitt(&m2)).unwrap()).unwrap());
    }

    #[test]
    fn twisting_keeps_the_annihilator_exponent(e in exps(2), c in coeffs(12), s in any::<bool>()) {
        let ring = exact(3);
        let m = FPModule::new(pd1_presentation(&ring, &e, &c));
        let minus = ring.base().from_i64(-1);
        let chi = if s { vec![minus.clone(), ring.base().one()] } else { vec![minus.clone(), minus] };
        let t = RingHom::twist(&ring, chi).unwrap();
        prop_assert_eq!(m.base_change(&t).unwrap().annihilator_exponent().unwrap(), m.annihilator_exponent().unwrap());
    }

    #[test]
    fn kernel_of_surjection_is_exact(ri in 0..EXACT_RINGS, e in exps(2), c in coeffs(12), k in 1u32..3) {
        // P = R^2 / L D U  ->  R / (p^k, entries) along the first coordinate
        let ring = exact(ri);
        let src = FPModule::new(pd1_presentation(&ring, &e, &c));
        let rel = src.relations().row(0);
        let mut tgt_rels = vec![ring.scalar((ring.prime() as i64).pow(k))];
        tgt_rels.extend(rel);
        let tgt = FPModule::cyclic(&ring, &tgt_rels);
        let f = RMatrix::from_rows(&ring, vec![vec![ring.one(), ring.zero()]]).unwrap();
        let kd = FPModule::kernel_of_surjection(&f, &src, &tgt).unwrap();
        // lengths add up, and the kernel maps to zero in the target
        prop_assert_eq!(kd.module.log_order().unwrap() + tgt.log_order().unwrap(), src.log_order().unwrap());
        prop_assert!(tgt.relations().solve_matrix(&f.mul(&kd.inclusion).unwrap()).is_some());
        // and embeds: the inclusion sends kernel relations into P's relations
        prop_assert!(src.relations().solve_matrix(&kd.inclusion.mul(kd.module.relations()).unwrap()).is_some());
    }

    // ---- ideals ----

    #[test]
    fn ideal_multiplication_laws(ri in 0..EXACT_RINGS, a in coeffs(8), b in coeffs(8), c in coeffs(8), k in 0u32..3) {
        let ring = exact(ri);
        let i = FracIdeal::integral(&ring, vec![elem(&ring, &a), nzd(&ring, k, &b)]).unwrap();
        let j = FracIdeal::new(&ring, vec![elem(&ring, &c), ring.one()], nzd(&ring, 1, &a)).unwrap();
        let l = FracIdeal::principal(&nzd(&ring, 2, &c));
        prop_assert!(i.multiply(&j).unwrap().equals(&j.multiply(&i).unwrap()).unwrap());
        let left = i.multiply(&j).unwrap().multiply(&l).unwrap();
        let right = i.multiply(&j.multiply(&l).unwrap()).unwrap();
        prop_assert!(left.equals(&right).unwrap());
        prop_assert!(i.multiply(&FracIdeal::unit(&ring)).unwrap().equals(&i).unwrap());
        // equals is reflexive and symmetric on these
        prop_assert!(i.equals(&i).unwrap());
        prop_assert_eq!(i.equals(&j).unwrap(), j.equals(&i).unwrap());
    }

    #[test]
    fn inverse_is_an_involution(ri in 0..EXACT_RINGS, a in coeffs(8), b in coeffs(8), k in 0u32..3) {
        let ring = exact(ri);
        let i = FracIdeal::new(&ring, vec![nzd(&ring, k, &a)], nzd(&ring, 1, &b)).unwrap();
        let inv = i.inverse().unwrap();
        prop_assert!(inv.inverse().unwrap().equals(&i).unwrap());
        prop_assert!(i.multiply(&inv).unwrap().is_unit_ideal().unwrap());
    }

    // ---- fitting ----

    #[test]
    fn shifted_fitting_ideal_is_independent_of_the_resolution(ri in 0..EXACT_RINGS, e in exps(2), c in coeffs(12), x in coeffs(4), ch in choice(), n in 1usize..3) {
        let ring = exact(ri);
        // a torsion module that is usually not of pd <= 1
        let extra = vec![&elem(&ring, &x) * &ring.scalar(ring.prime() as i64), ring.zero()];
        let m = FPModule::new(pd1_presentation(&ring, &e, &c)).with_relations(&[extra]).unwrap();
        let a = shift_fitt(&m, n).unwrap();
        let b = shift_fitt_with(&m, n, &ch).unwrap();
        prop_assert!(a.equals(&b).unwrap());
    }

    #[test]
    fn fitting_ideal_is_multiplicative_on_pd1_modules(ri in 0..EXACT_RINGS, e1 in exps(2), e2 in exps(1), c in coeffs(12)) {
        let ring = exact(ri);
        let p1 = FPModule::new(pd1_presentation(&ring, &e1, &c));
        let p2 = FPModule::new(pd1_presentation(&ring, &e2, &c[3..]));
        let sum = fitt(&p1.direct_sum(&p2).unwrap());
        prop_assert!(sum.equals(&fitt(&p1).multiply(&fitt(&p2)).unwrap()).unwrap());
        let total: u32 = e1.iter().chain(&e2).sum();
        prop_assert!(sum.equals(&FracIdeal::principal(&ring.scalar((ring.prime() as i64).pow(total)))).unwrap());
    }

    #[test]
    fn consecutive_shifted_ideals_are_inverse(ri in 0..EXACT_RINGS, e in exps(2), c in coeffs(12), n in -2i64..3) {
        let ring = exact(ri);
        let m = FPModule::new(pd1_presentation(&ring, &e, &c));
        let prod = sf(&m, n).unwrap().multiply(&sf(&m, n + 1).unwrap()).unwrap();
        prop_assert!(prod.is_unit_ideal().unwrap());
    }

    // ---- complexes ----

    #[test]
    fn det_is_multiplicative_in_triangles(ri in 0..EXACT_RINGS, n in 1usize..3, kw in exps(2), kx in exps(2), ky in exps(2), c in coeffs(12)) {
        // F = [W X], G = [Y W], f = (X, Y): then Y (W X) = (Y W) X
        let ring = exact(ri);
        let w = pd1_presentation(&ring, &kw[..n], &c);
        let x = pd1_presentation(&ring, &kx[..n], &c[2..]);
        let y = pd1_presentation(&ring, &ky[..n], &c[4..]);
        let f_cx = PerfectComplex::two_term(&w.mul(&x).unwrap(), 0);
        let g_cx = PerfectComplex::two_term(&y.mul(&w).unwrap(), 0);
        let f = ChainMap::new(f_cx.clone(), g_cx.clone(), 0, vec![x, y]).unwrap();
        let cone = PerfectComplex::cone(&f).unwrap();
        let rhs = f_cx.det_ideal().unwrap().multiply(&cone.det_ideal().unwrap()).unwrap();
        prop_assert!(g_cx.det_ideal().unwrap().equals(&rhs).unwrap());
    }

    #[test]
    fn k0_reduction_recovers_det(ri in 0..EXACT_RINGS, e in exps(2), c in coeffs(12), lo in -1i64..2) {
        let ring = exact(ri);
        let cx = PerfectComplex::two_term(&pd1_presentation(&ring, &e, &c), lo);
        let terms = cx.k0_reduce().unwrap().into_iter().map(|(m, s)| (phi(&m).unwrap(), s)).collect();
        let det = K0Class::new(terms).det(&ring).unwrap().ideal().unwrap();
        prop_assert!(det.equals(&cx.det_ideal().unwrap()).unwrap());
    }

    #[test]
    fn det_ignores_a_change_of_basis(ri in 0..EXACT_RINGS, a in coeffs(4), b in coeffs(4), c in coeffs(12)) {
        // F: R --a--> R^2 --(0 b)--> R mixed by a unitriangular W
        let ring = exact(ri);
        let (x, y) = (nzd(&ring, 1, &a), nzd(&ring, 1, &b));
        let plain = PerfectComplex::new(&ring, 0, vec![1, 2, 1], vec![
            RMatrix::from_rows(&ring, vec![vec![x.clone()], vec![ring.zero()]]).unwrap(),
            RMatrix::from_rows(&ring, vec![vec![ring.zero(), y.clone()]]).unwrap(),
        ]).unwrap();
        let w = unitriangular(&ring, 2, true, &c);
        let w_inv = {
            let mut m = RMatrix::identity(&ring, 2);
            m.set(0, 1, -w.get(0, 1));
            m
        };
        let mixed = PerfectComplex::new(&ring, 0, vec![1, 2, 1], vec![
            w.mul(plain.differentials().first().unwrap()).unwrap(),
            plain.differentials()[1].mul(&w_inv).unwrap(),
        ]).unwrap();
        prop_assert!(plain.det_ideal().unwrap().equals(&mixed.det_ideal().unwrap()).unwrap());
        let expect = FracIdeal::new(&ring, vec![y], x).unwrap();
        prop_assert!(plain.det_ideal().unwrap().equals(&expect).unwrap());
    }

    // ---- arithmetic ----

    #[test]
    fn augmentation_sequence_is_exact(picks in prop::collection::vec(0usize..4, 1..4)) {
        let ring = exact(3);
        let subgroups: [&[&[u64]]; 4] = [&[&[1, 0]], &[&[0, 1]], &[&[1, 1]], &[&[1, 0], &[0, 1]]];
        let places: Vec<PlaceData<PLocal>> = picks
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let gens = subgroups[k].iter().map(|r| ring.group_element(r).unwrap()).collect();
                PlaceData::new(format!("v{i}"), gens)
            })
            .collect();
        let seq = z0(&ring, &places).unwrap();
        prop_assert_eq!(free_rank(&seq.z_sum), free_rank(&seq.z0) + free_rank(&seq.trivial));
        prop_assert_eq!(free_rank(&seq.trivial), 1);
        prop_assert!(seq.trivial.relations().solve_matrix(&seq.augmentation.mul(&seq.inclusion).unwrap()).is_some());
    }

    #[test]
    fn ledger_is_a_homomorphism(order in 0usize..6, a in 1u32..3, k in 0i64..3) {
        let ring = Ring::<ModPrimePower>::truncated(3, &[2], 1, 4, 8).unwrap();
        let g = ring.group_generator(0);
        let gamma = ring.gamma(0);
        let places = [
            PlaceData::new("u", vec![gamma.pow(a)]).with_frobenius(gamma.pow(a), 2),
            PlaceData::new("v", vec![gamma.clone()]).with_frobenius(&g * &gamma, 7),
            PlaceData::new("w", vec![gamma.pow(2)]).with_frobenius(&ring.scalar(1 + 3 * k) * &gamma.pow(2), 5),
        ];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = perms[order];
        let base = FracIdeal::new(&ring, vec![&ring.var(0) + &ring.scalar(3)], &ring.var(0).pow(2) + &ring.scalar(3)).unwrap();
        let all = ledger_apply_eq100(&base, &places).unwrap();
        let shuffled: Vec<_> = perm.iter().map(|&i| places[i].clone()).collect();
        let stepwise = shuffled.iter().try_fold(base.clone(), |acc, v| ledger_apply_eq100(&acc, std::slice::from_ref(v))).unwrap();
        prop_assert!(all.compare(&stepwise).unwrap().holds);
        // adding a place and removing it through its local determinant is the identity
        let v = &places[perm[0]];
        let back = ledger_apply_eq101(&base, std::slice::from_ref(v)).unwrap().multiply(&v.local_complex().unwrap().det_ideal().unwrap()).unwrap();
        prop_assert!(back.compare(&base).unwrap().holds);
    }

    #[test]
    fn bookkeeping_identity_holds_on_exact_triples(ri in 0..EXACT_RINGS, ka in 0u32..3, kd in 0u32..3, c in coeffs(12)) {
        let ring = exact(ri);
        let (a, d) = (nzd(&ring, ka, &c), nzd(&ring, kd, &c[2..]));
        let u = unitriangular(&ring, 2, false, &c[4..]);
        let mut u_inv = RMatrix::identity(&ring, 2);
        u_inv.set(1, 0, -u.get(1, 0));
        let rel = RMatrix::from_rows(&ring, vec![vec![a.clone(), elem(&ring, &c[6..])], vec![ring.zero(), d.clone()]]).unwrap();
        let h2 = FPModule::new(u.mul(&rel).unwrap());
        let z = FPModule::cyclic(&ring, &[d]);
        let map = RMatrix::from_rows(&ring, vec![vec![ring.zero(), ring.one()]]).unwrap().mul(&u_inv).unwrap();
        let report = check_cor41_shape(&h2, &z, &map).unwrap();
        prop_assert!(report.verdict.holds);
        prop_assert!(report.lhs.equals(&FracIdeal::principal(&a)).unwrap());
    }
}

#[test]
fn p_place_module_has_trivial_sf0_at_precision() {
    let ring = Ring::<ModPrimePower>::truncated(3, &[], 2, 4, 6).unwrap();
    for k in 0..3 {
        let (p_place, _, _) = lemma79_places(&ring, k);
        let s = place_sf0(&ring, &p_place).unwrap();
        assert!(s.is_unit_ideal().unwrap(), "index p^{k}: {}", s.to_canonical_string());
        assert!(s.precision().is_some());
    }
}

#[test]
fn equal_fitting_ideals_come_with_exact_sequences() {
    // R/(9) and R/(3) + R/(3) have the same Fitting ideal, and
    // 0 -> R/3 -> R/9 -> R/3 -> 0 exhibits equal classes.
    for ri in 0..EXACT_RINGS {
        let ring = exact(ri);
        let nine = FPModule::cyclic(&ring, &[ring.scalar(9)]);
        let three = FPModule::cyclic(&ring, &[ring.scalar(3)]);
        let sum = three.direct_sum(&three).unwrap();
        assert!(fitt(&nine).equals(&fitt(&sum)).unwrap());
        let f = RMatrix::identity(&ring, 1);
        let kd = FPModule::kernel_of_surjection(&f, &nine, &three).unwrap();
        assert!(fitt(&kd.module).equals(&fitt(&three)).unwrap());
        // R/(f) and R/(uf) for a unit u: the identity map is an isomorphism
        let u = &ring.one() + &ring.scalar(ring.prime() as i64);
        let uf = FPModule::cyclic(&ring, &[&u * &ring.scalar(9)]);
        assert!(FPModule::kernel_of_surjection(&f, &uf, &nine).unwrap().module.is_zero());
        assert!(FPModule::kernel_of_surjection(&f, &nine, &uf).unwrap().module.is_zero());
    }
}

#[test]
fn principal_truncated_ideals_compare_by_weierstrass_data() {
    // f = p^a (T^b + 3c) u with distinguished part T^b + 3c
    let ring = Ring::<ModPrimePower>::truncated(3, &[], 1, 4, 8).unwrap();
    let t = ring.var(0);
    let units = [ring.one(), ring.gamma(0), &ring.one() + &ring.scalar(3).try_mul(&t).unwrap(), &ring.scalar(2) - &t];
    let mut family = Vec::new();
    for a in 0..2u32 {
        for b in 1..3u32 {
            for c in 0..3i64 {
                for (ui, u) in units.iter().enumerate() {
                    let f = &(&ring.scalar(3i64.pow(a)) * &(&t.pow(b) + &ring.scalar(3 * c))) * u;
                    family.push(((a, b, c), ui, FracIdeal::principal(&f)));
                }
            }
        }
    }
    let mut checked = 0;
    for (d1, u1, i1) in &family {
        for (d2, u2, i2) in &family {
            if (u1 + u2) % 3 != 0 {
                continue;
            }
            let v = i1.compare(i2).unwrap();
            assert_eq!(v.holds, d1 == d2, "{d1:?} vs {d2:?} at {:?}", v.precision);
            checked += 1;
        }
    }
    assert!(checked > 100);
}
