mod common;

use std::sync::Arc;

use common::{coeffs, matrix};
use iwafit_core::echelon::{self, mat_mul, Echelon, Mat};
use iwafit_core::{BaseRing, ModPrimePower, PLocal, RMatrix, Ring, RingElem};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn exact(ri: usize) -> Arc<Ring<PLocal>> {
    [Ring::exact(3, &[2]), Ring::exact(3, &[2, 2]), Ring::exact(5, &[4]), Ring::exact(3, &[3])][ri].clone().unwrap()
}

fn truncated() -> Arc<Ring<ModPrimePower>> {
    Ring::truncated(3, &[2], 1, 2, 3).unwrap()
}

/// Gaussian elimination over Q, independent of the crate's echelon code.
fn rational_det(m: &Mat<BigRational>) -> BigRational {
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col].clone();
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Cofactor expansion along the first row.
fn laplace<B: BaseRing>(m: &RMatrix<B>) -> RingElem<B> {
    let n = m.rows();
    if n == 0 {
        return m.ring().one();
    }
    let mut acc = m.ring().zero();
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let term = m.get(0, j) * &laplace(&m.submatrix(&rows, &cols));
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Base lattice of the R-span of the columns of `k`.
fn r_span<B: BaseRing>(k: &RMatrix<B>) -> Echelon<B> {
    let ring = k.ring();
    let mut rows = Vec::new();
    for col in k.columns() {
        for idx in 0..ring.rank() {
            let e = ring.basis_element(idx);
            let scaled: Vec<RingElem<B>> = col.iter().map(|x| x * &e).collect();
            rows.push(RMatrix::vector_to_base(&scaled));
        }
    }
    Echelon::new(ring.base(), rows, k.rows() * ring.rank())
}

fn kernel_matches_base_kernel<B: BaseRing>(a: &RMatrix<B>) {
    let ring = a.ring();
    let k = a.kernel();
    assert!(a.mul(&k).unwrap().is_zero(), "A * kernel != 0");
    let base_kernel = Echelon::new(ring.base(), echelon::kernel(ring.base(), &a.expand()), a.cols() * ring.rank());
    let span = r_span(&k);
    assert!(span.contains_all(ring.base(), &base_kernel), "R-span misses part of the base kernel");
    assert!(base_kernel.contains_all(ring.base(), &span), "R-span leaves the base kernel");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn expand_is_multiplicative(ri in 0usize..4, n in 1usize..4, a in coeffs(24), b in coeffs(24)) {
        let ring = exact(ri);
        let (x, y) = (matrix(&ring, n, n, &a), matrix(&ring, n, n, &b));
        prop_assert_eq!(x.mul(&y).unwrap().expand(), mat_mul(ring.base(), &x.expand(), &y.expand()));
    }

    #[test]
    fn expand_is_multiplicative_truncated(a in coeffs(12), b in coeffs(12)) {
        let ring = truncated();
        let (x, y) = (matrix(&ring, 2, 2, &a), matrix(&ring, 2, 2, &b));
        prop_assert_eq!(x.mul(&y).unwrap().expand(), mat_mul(ring.base(), &x.expand(), &y.expand()));
    }

    #[test]
    fn kernel_generators_span_the_base_kernel(ri in 0usize..4, rows in 1usize..3, cols in 1usize..4, a in coeffs(24)) {
        let ring = exact(ri);
        kernel_matches_base_kernel(&matrix(&ring, rows, cols, &a));
    }

    #[test]
    fn kernel_generators_span_the_base_kernel_truncated(cols in 1usize..3, a in coeffs(12)) {
        kernel_matches_base_kernel(&matrix(&truncated(), 1, cols, &a));
    }

    #[test]
    fn solve_round_trips(ri in 0usize..4, rows in 1usize..3, cols in 1usize..4, a in coeffs(24), x in coeffs(8)) {
        let ring = exact(ri);
        let m = matrix(&ring, rows, cols, &a);
        let x0 = matrix(&ring, cols, 1, &x).column(0);
        let b = m.apply(&x0);
        let sol = m.solve(&b).expect("consistent system");
        prop_assert_eq!(m.apply(&sol), b);
    }

    #[test]
    fn det_of_expansion_is_the_norm_of_det(ri in 0usize..4, n in 1usize..5, a in coeffs(32)) {
        let ring = exact(ri);
        let m = matrix(&ring, n, n, &a);
        let d = m.det().unwrap();
        let lhs = rational_det(&m.expand());
        let rhs = rational_det(&d.mult_matrix());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(d, laplace(&m));
    }

    #[test]
    fn minors_agree_with_cofactor_expansion(ri in 0usize..4, a in coeffs(24), k in 1usize..3) {
        let ring = exact(ri);
        let m = matrix(&ring, 2, 3, &a);
        let minors = m.minors(k);
        let mut expect = Vec::new();
        for rs in iwafit_core::matrix::subsets(2, k) {
            for cs in iwafit_core::matrix::subsets(3, k) {
                expect.push(laplace(&m.submatrix(&rs, &cs)));
            }
        }
        prop_assert_eq!(minors, expect);
        prop_assert!(m.minors(3).is_empty());
    }
}

#[test]
fn mixed_kernel_example() {
    let ring = exact(0);
    let g = ring.group_generator(0);
    let a = RMatrix::from_rows(&ring, vec![vec![ring.scalar(3), &g - &ring.one()]]).unwrap();
    kernel_matches_base_kernel(&a);
    assert!(!a.kernel().is_zero());
}
