use cframe::analysis::{
    f2_sufficient, frame_bounds, gramian_eigen, is_frame, is_parseval, quotient, quotient_extended,
    quotient_extended_direct, trace_mean_bounds_check, QuotientForm,
};
use cframe::extended::{analysis, block_operator_matrix, extended_frame_operator, synthesis, CoefficientField};
use cframe::generators::random_parseval;
use cframe::linalg::hermitian_eigenvalues;
use cframe::scalar::rel_diff;
use cframe::{Family, Field, Matrix, WeightedFamily, C};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = C<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn cvec(n: usize) -> impl Strategy<Value = Vec<C<f64>>> {
    proptest::collection::vec(scalar(), n)
}

fn family_with(n: usize, points: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Family> {
    points.prop_flat_map(move |m| {
        (proptest::collection::vec(0.05..3.0f64, m), proptest::collection::vec(cvec(n), m))
            .prop_map(move |(w, v)| WeightedFamily::new(Field::Complex, n, w, v).unwrap())
    })
}

fn family_and_vector() -> impl Strategy<Value = (Family, Vec<C<f64>>)> {
    (1usize..=5).prop_flat_map(|n| {
        (family_with(n, 1..=8), cvec(n)).prop_filter("nonzero v", |(_, v)| v.iter().any(|z| z.norm() > 1e-3))
    })
}

/// Rank of the points x n matrix with rows sqrt(w_j) u_j, by Gaussian
/// elimination with partial pivoting and absolute pivot threshold.
fn row_reduction_rank(fam: &Family, pivot: f64) -> usize {
    let n = fam.dim();
    let mut rows: Vec<Vec<C<f64>>> = fam
        .points()
        .map(|(w, v)| v.iter().map(|z| *z * w.sqrt()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let best = (rank..rows.len()).max_by(|&a, &b| rows[a][col].norm().partial_cmp(&rows[b][col].norm()).unwrap());
        let Some(p) = best else { break };
        if rows[p][col].norm() <= pivot {
            continue;
        }
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail {
            let f = row[col] / pivot_row[col];
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * y;
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn three_quotient_forms_agree((fam, v) in family_and_vector()) {
        let d = quotient(&v, &fam, QuotientForm::Direct).unwrap();
        let t = quotient(&v, &fam, QuotientForm::Trace).unwrap();
        let s = quotient(&v, &fam, QuotientForm::Synthesis).unwrap();
        let scale = frame_bounds(&fam).unwrap().upper;
        // relative to the largest attainable value so kernel directions do not blow up the ratio
        prop_assert!((d - t).abs() <= 1e-10 * d.max(scale));
        prop_assert!((d - s).abs() <= 1e-10 * d.max(scale));
    }

    #[test]
    fn quotient_is_homogeneous((fam, v) in family_and_vector(), alpha in scalar()) {
        prop_assume!(alpha.norm() > 1e-2);
        let scaled: Vec<_> = v.iter().map(|z| *z * alpha).collect();
        let a = quotient(&v, &fam, QuotientForm::Direct).unwrap();
        let b = quotient(&scaled, &fam, QuotientForm::Direct).unwrap();
        let scale = frame_bounds(&fam).unwrap().upper;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(scale) * 10.0);
    }

    #[test]
    fn quotient_lies_between_bounds((fam, v) in family_and_vector()) {
        let b = frame_bounds(&fam).unwrap();
        let q = quotient(&v, &fam, QuotientForm::Direct).unwrap();
        prop_assert!(b.lower - 1e-10 * b.upper.max(1.0) <= q && q <= b.upper + 1e-10 * b.upper.max(1.0));
    }

    #[test]
    fn bounds_attained_at_eigenvectors(fam in (1usize..=5).prop_flat_map(|n| family_with(n, 1..=8))) {
        let e = gramian_eigen(&fam).unwrap();
        let n = fam.dim();
        let lo = quotient(&e.vector(0), &fam, QuotientForm::Direct).unwrap();
        let hi = quotient(&e.vector(n - 1), &fam, QuotientForm::Direct).unwrap();
        let scale = e.values.max().max(1.0);
        prop_assert!((lo - e.values.min()).abs() <= 1e-10 * scale);
        prop_assert!((hi - e.values.max()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn frame_iff_full_rank(fam in (1usize..=4).prop_flat_map(|n| family_with(n, 1..=8))) {
        let rank = row_reduction_rank(&fam, 1e-10);
        prop_assert_eq!(is_frame(&fam, None).unwrap(), rank == fam.dim());
    }

    #[test]
    fn sufficient_condition_bounds_lambda_min(fam in family_with(2, 1..=6)) {
        let f2 = f2_sufficient(&fam).unwrap();
        let b = frame_bounds(&fam).unwrap();
        if f2.holds {
            prop_assert!(b.lower >= f2.guaranteed_lower - 1e-12 * b.upper.max(1.0));
            prop_assert!(is_frame(&fam, None).unwrap());
        }
    }

    #[test]
    fn parseval_quotient_is_one(seed in 0u64..1000, v in cvec(3)) {
        prop_assume!(v.iter().any(|z| z.norm() > 1e-3));
        let fam = random_parseval::<f64>(7, 3, Field::Complex, seed).unwrap();
        prop_assert!(is_parseval(&fam, None));
        let q = quotient(&v, &fam, QuotientForm::Direct).unwrap();
        prop_assert!((q - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn extended_quotient_trace_equals_double_sum(
        (fam, tv) in (1usize..=4).prop_flat_map(|n| (family_with(n, 1..=6), family_with(n, 1..=5)))
    ) {
        let a = quotient_extended(&tv, &fam).unwrap();
        let b = quotient_extended_direct(&tv, &fam).unwrap();
        let scale = frame_bounds(&fam).unwrap().upper;
        prop_assert!((a - b).abs() <= 1e-10 * a.max(scale));
    }

    #[test]
    fn trace_mean_bounds(
        (b, p) in (1usize..=5).prop_flat_map(|n| (proptest::collection::vec(scalar(), n * n), proptest::collection::vec(scalar(), n * n)))
    ) {
        let n = (b.len() as f64).sqrt() as usize;
        let mb = Matrix::from_fn(n, |i, j| b[i * n + j]);
        let mp = Matrix::from_fn(n, |i, j| p[i * n + j]);
        let u = mb.mul(&mb.conj_transpose()).unwrap();
        let pp = mp.mul(&mp.conj_transpose()).unwrap();
        let u = Matrix::from_fn(n, |i, j| if i <= j { u[(i, j)] } else { u[(j, i)].conj() });
        let pp = Matrix::from_fn(n, |i, j| if i <= j { pp[(i, j)] } else { pp[(j, i)].conj() });
        prop_assume!(pp.trace().re > 1e-6);
        prop_assert!(trace_mean_bounds_check(&pp, &u).unwrap());
    }

    #[test]
    fn adjoint_identity(
        (fam, tv, coeffs) in (1usize..=4, 1usize..=6, 1usize..=4).prop_flat_map(|(n, m, p)| (
            family_with(n, m..=m),
            family_with(n, p..=p),
            proptest::collection::vec(scalar(), m * p),
        ))
    ) {
        let p = tv.len();
        let c = CoefficientField::from_fn(fam.weights().to_vec(), tv.weights().to_vec(), |i, j| coeffs[i * p + j]);
        let lhs = analysis(&fam, &tv).unwrap().inner(&c).unwrap();
        let rhs = tv.pointwise_inner(&synthesis(&fam, &c).unwrap()).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(1e-300);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn quadratic_form_equals_coefficient_energy(
        (fam, tv) in (1usize..=4).prop_flat_map(|n| (family_with(n, 1..=6), family_with(n, 1..=5)))
    ) {
        let form = extended_frame_operator(&fam, &tv).unwrap().pointwise_inner(&tv).unwrap();
        let energy = analysis(&fam, &tv).unwrap().weighted_norm_sqr();
        prop_assert!(form.im.abs() <= 1e-10 * energy.max(1.0));
        prop_assert!(rel_diff(form.re, energy) <= 1e-10);
    }

    #[test]
    fn block_spectrum_repeats_gramian_spectrum(
        fam in (1usize..=4).prop_flat_map(|n| family_with(n, 1..=6)),
        blocks in 1usize..=5,
    ) {
        let s_u = hermitian_eigenvalues(&fam.gramian()).unwrap();
        let s_b = hermitian_eigenvalues(&block_operator_matrix(&fam, blocks).unwrap()).unwrap();
        let mut expected: Vec<f64> = s_u.values().iter().flat_map(|&x| std::iter::repeat_n(x, blocks)).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = s_u.max().max(1.0);
        for (a, b) in s_b.values().iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn rank_deficient_constructions_match_oracle() {
    // second component a multiple of the first; a zero component; fewer points than n
    let cases: Vec<Family> = vec![
        WeightedFamily::from_real_vectors(2, vec![vec![1.0, 2.0], vec![-3.0, -6.0], vec![0.5, 1.0]]).unwrap(),
        WeightedFamily::from_real_vectors(3, vec![vec![1.0, 0.0, 2.0], vec![4.0, 0.0, 1.0]]).unwrap(),
        WeightedFamily::from_real_vectors(4, vec![vec![1.0, 2.0, 3.0, 4.0]; 3]).unwrap(),
        WeightedFamily::from_real_points(2, vec![(0.0, vec![0.0, 1.0]), (1.0, vec![1.0, 0.0])]).unwrap(),
    ];
    for fam in &cases {
        assert!(row_reduction_rank(fam, 1e-10) < fam.dim());
        assert!(!is_frame(fam, None).unwrap());
    }
}
