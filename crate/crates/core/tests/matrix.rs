//! Randomized checks of the determinant identities, the maximal-submatrix
//! property and the potential-difference bound.

use gaplab::matrix::{
    negative_det_witness, det, difference_bound, max_submatrix_det, random_column_dominant, random_dominant_symmetric,
    sign_partition_sums, solve_and_check, DominanceProfile, Parity, SignDiag, SymMatrix,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn square(l: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, l * l).prop_map(move |v| DMatrix::from_row_slice(l, l, &v))
}

fn any_square() -> impl Strategy<Value = DMatrix<f64>> {
    (1usize..=6).prop_flat_map(square)
}

/// Brute-force oracle: sum of det(xI + ĪA) over one parity class.
fn parity_sum(a: &DMatrix<f64>, x: f64, parity: Parity) -> f64 {
    let l = a.nrows();
    (0..1u32 << l)
        .map(|mask| SignDiag::from_mask(l, mask))
        .filter(|s| s.parity == parity)
        .map(|s| det(&s.shifted_product(a, x)))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sign_partition_identities(a in any_square(), xi in 0usize..4) {
        let x = [-1.0, 0.0, 0.5, 3.0][xi];
        let l = a.nrows() as i32;
        let (even, odd) = sign_partition_sums(&a, x).unwrap();
        let d = det(&a);
        let scale = 2f64.powi(l - 1);
        let tol = 1e-9 * (scale * (x.abs().powi(l) + d.abs())).max(1.0);
        prop_assert!((even - scale * (x.powi(l) + d)).abs() <= tol);
        prop_assert!((odd - scale * (x.powi(l) - d)).abs() <= tol);
        prop_assert!((even - parity_sum(&a, x, Parity::Even)).abs() <= tol);
        prop_assert!((odd - parity_sum(&a, x, Parity::Odd)).abs() <= tol);
    }

    #[test]
    fn large_determinant_has_negative_witness(a in any_square(), s in 1.0f64..3.0) {
        let a = a * s;
        let w = negative_det_witness(&a).unwrap();
        if det(&a).abs() > 1.0 {
            let w = w.expect("witness must exist");
            prop_assert!(det(&w.shifted_product(&a, 1.0)) < 0.0);
        } else if let Some(w) = w {
            prop_assert!(det(&w.shifted_product(&a, 1.0)) < 0.0);
        }
    }

    #[test]
    fn sign_diag_parity_matches_negatives(l in 1usize..10, mask in 0u32..1024) {
        let s = SignDiag::from_mask(l, mask & ((1 << l) - 1));
        let neg = s.signs.iter().filter(|&&v| v < 0).count();
        prop_assert_eq!(s.parity == Parity::Even, neg % 2 == 0);
    }

    #[test]
    fn top_block_attains_maximal_determinant(seed in any::<u64>()) {
        let q = random_column_dominant(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = max_submatrix_det(&q).unwrap();
        prop_assert!((r.det_s1 - r.max_abs).abs() <= 1e-9 * r.max_abs.max(1.0));
        prop_assert!(r.det_s1 > 0.0);
    }

    #[test]
    fn difference_bound_never_violated(
        seed in any::<u64>(), m in 2usize..=6, beta in prop::collection::vec(-5.0f64..5.0, 6),
    ) {
        let p = random_dominant_symmetric(&mut ChaCha8Rng::seed_from_u64(seed), m);
        let prof = DominanceProfile::of(&p);
        prop_assert!(prof.ok());
        let beta = &beta[..m];
        let (alpha, violation) = solve_and_check(&p, beta).unwrap();
        prop_assert!(violation <= 0.0);
        // Residual of P alpha = beta.
        let res = p.to_dmatrix() * DMatrix::from_column_slice(m, 1, &alpha) - DMatrix::from_column_slice(m, 1, beta);
        let bmax = beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        prop_assert!(res.amax() <= 1e-10 * bmax.max(1.0));
        for i in 0..m {
            for j in (i + 1)..m {
                prop_assert!((alpha[i] - alpha[j]).abs() <= difference_bound(&p, beta, i, j).unwrap());
            }
        }
    }

    #[test]
    fn packed_matrix_stays_symmetric(vals in prop::collection::vec(-3.0f64..3.0, 15)) {
        let mut p = SymMatrix::zeros(5);
        let mut k = 0;
        for i in 0..5 {
            for j in i..5 {
                p.set(i, j, vals[k]);
                k += 1;
            }
        }
        let d = p.to_dmatrix();
        prop_assert_eq!(d.clone(), d.transpose());
    }
}

#[test]
fn orders_beyond_enumeration_cap_are_rejected() {
    assert!(sign_partition_sums(&DMatrix::identity(13, 13), 1.0).is_err());
    assert!(sign_partition_sums(&DMatrix::identity(12, 12), 1.0).is_ok());
}

#[test]
fn dominance_failures_are_errors() {
    let q = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
    assert!(max_submatrix_det(&q).unwrap_err().to_string().contains("column dominance"));
    let p = SymMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
    assert!(difference_bound(&p, &[1.0, 0.0], 0, 1).is_err());
    let p = SymMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
    assert!(difference_bound(&p, &[1.0, 0.0], 0, 0).is_err());
}
