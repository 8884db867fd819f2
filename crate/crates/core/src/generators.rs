//! Reference families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{FrameError, Result};
use crate::family::{orthonormal_basis, Field, FamilyMeta, WeightedFamily};
use crate::scalar::{c, Real, C};

/// Deterministic generator used by every seeded construction in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal scalar; complex draws have independent real and
/// imaginary parts.
pub fn normal_scalar<T: Real, R: Rng + ?Sized>(field: Field, rng: &mut R) -> C<T> {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = match field {
        Field::Real => 0.0,
        Field::Complex => rng.sample(StandardNormal),
    };
    c(T::lit(x), T::lit(y))
}

pub fn normal_vector<T: Real, R: Rng + ?Sized>(len: usize, field: Field, rng: &mut R) -> Vec<C<T>> {
    (0..len).map(|_| normal_scalar(field, rng)).collect()
}

/// Whether `a - b` is an integer (within `1e-12`), in which case the two
/// Dirichlet components are proportional and the family is not a frame.
pub fn dirichlet_is_degenerate(a: f64, b: f64) -> bool {
    let d = a - b;
    (d - d.round()).abs() <= 1e-12
}

/// The `C^2` family `u_n = (e^{2 pi i a n} / n, e^{2 pi i b n} / n)`,
/// `n = 1..=terms`, with unit weights.
///
/// The discarded tail has energy at most `2 / terms` (each Gramian entry
/// moves by at most `1 / terms`), which is stored as the tail bound.
pub fn dirichlet_example<T: Real>(a: f64, b: f64, terms: usize) -> Result<WeightedFamily<T>> {
    if terms == 0 {
        return Err(FrameError::Input("terms must be at least 1".into()));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(FrameError::Input("a and b must be finite".into()));
    }
    if dirichlet_is_degenerate(a, b) {
        log::warn!("a - b = {} is an integer: components are proportional, not a frame", a - b);
    }
    let tau = std::f64::consts::TAU;
    // reduce a*n modulo 1 before taking the phase
    let phase = |x: f64, n: f64| tau * (x * n).rem_euclid(1.0);
    let vectors = (1..=terms).map(|n| {
        let nf = n as f64;
        let (pa, pb) = (phase(a, nf), phase(b, nf));
        vec![
            c(T::lit(pa.cos() / nf), T::lit(pa.sin() / nf)),
            c(T::lit(pb.cos() / nf), T::lit(pb.sin() / nf)),
        ]
    });
    let fam = WeightedFamily::new(Field::Complex, 2, vec![T::one(); terms], vectors.collect())?;
    Ok(fam.with_meta(FamilyMeta {
        label: Some(format!("dirichlet a={a} b={b} terms={terms}")),
        tail_bound: Some(T::lit(2.0 / terms as f64)),
    }))
}

/// Equispaced quadrature of the unit circle: nodes `x_j = 2 pi j / nodes`,
/// weights `2 pi / nodes`, vectors `scale * (cos x_j, sin x_j)`.
/// The Gramian is `scale^2 * pi * I`.
pub fn circle_frame<T: Real>(nodes: usize, scale: T) -> Result<WeightedFamily<T>> {
    if nodes < 3 {
        return Err(FrameError::Input(format!("circle frame needs at least 3 nodes, got {nodes}")));
    }
    let tau = std::f64::consts::TAU;
    let w = T::lit(tau / nodes as f64);
    let fam = WeightedFamily::from_real_points(
        2,
        (0..nodes).map(|j| {
            let x = tau * j as f64 / nodes as f64;
            (w, vec![scale * T::lit(x.cos()), scale * T::lit(x.sin())])
        }),
    )?;
    Ok(fam.with_label(format!("circle nodes={nodes} scale={scale}")))
}

/// Three unit vectors at angles `2 pi k / 3`, unit weights, times `scale`.
/// Gramian `(3/2) scale^2 I`; Parseval at `scale = sqrt(2/3)`.
pub fn mercedes_benz<T: Real>(scale: T) -> WeightedFamily<T> {
    let tau = std::f64::consts::TAU;
    WeightedFamily::from_real_vectors(
        2,
        (0..3).map(|k| {
            let x = tau * k as f64 / 3.0;
            vec![scale * T::lit(x.cos()), scale * T::lit(x.sin())]
        }),
    )
    .expect("three finite vectors")
    .with_label(format!("mercedes-benz scale={scale}"))
}

/// Unit weights, independent standard normal entries.
pub fn random_family<T: Real>(points: usize, n: usize, field: Field, seed: u64) -> Result<WeightedFamily<T>> {
    if points == 0 || n == 0 {
        return Err(FrameError::Input("points and n must be positive".into()));
    }
    let mut rng = seeded_rng(seed);
    let vectors = (0..points).map(|_| normal_vector(n, field, &mut rng)).collect();
    WeightedFamily::new(field, n, vec![T::one(); points], vectors)
        .map(|f| f.with_label(format!("random points={points} n={n} seed={seed}")))
}

/// Parseval family on `weights`: random components orthonormalized in the
/// weighted inner product.
pub fn random_parseval_on<T: Real>(weights: &[T], n: usize, field: Field, seed: u64) -> Result<WeightedFamily<T>> {
    let support = weights.iter().filter(|&&w| w > T::zero()).count();
    if support < n {
        return Err(FrameError::Capacity {
            required: n,
            available: support,
        });
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..20 {
        let raw: Vec<Vec<C<T>>> = (0..n)
            .map(|_| {
                let mut f = normal_vector(weights.len(), field, &mut rng);
                for (z, &w) in f.iter_mut().zip(weights) {
                    if w == T::zero() {
                        *z = C::new(T::zero(), T::zero());
                    }
                }
                f
            })
            .collect();
        let q = orthonormal_basis(weights, &raw, T::lit(1e-8));
        if q.len() == n {
            return WeightedFamily::from_components(field, weights.to_vec(), &q);
        }
    }
    Err(FrameError::Generation("could not draw independent components in 20 attempts".into()))
}

/// Unit-weight Parseval family with `points` points.
pub fn random_parseval<T: Real>(points: usize, n: usize, field: Field, seed: u64) -> Result<WeightedFamily<T>> {
    random_parseval_on(&vec![T::one(); points], n, field, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{frame_bounds, is_frame, is_parseval};
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_single_term() {
        let fam = dirichlet_example::<f64>(0.25, 0.0, 1).unwrap();
        assert_eq!(fam.len(), 1);
        let v = fam.vector(0);
        assert!((v[0] - C::new(0.0, 1.0)).norm() < 1e-15);
        assert!((v[1] - C::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(fam.meta().tail_bound, Some(2.0));
    }

    #[test]
    fn dirichlet_rejects_zero_terms() {
        assert!(matches!(dirichlet_example::<f64>(0.5, 0.0, 0), Err(FrameError::Input(_))));
    }

    #[test]
    fn dirichlet_integer_difference_is_degenerate() {
        assert!(dirichlet_is_degenerate(1.3, 0.3));
        assert!(!dirichlet_is_degenerate(0.5, 0.0));
        let fam = dirichlet_example::<f64>(0.3, 0.3, 200).unwrap();
        assert!(!is_frame(&fam, None).unwrap());
    }

    #[test]
    fn dirichlet_component_energies_within_tail() {
        for terms in [10, 1000] {
            let fam = dirichlet_example::<f64>(0.5, 0.0, terms).unwrap();
            let g = fam.gramian();
            for k in 0..2 {
                let e = g[(k, k)].re;
                assert!(e <= PI * PI / 6.0 && e >= PI * PI / 6.0 - 1.0 / terms as f64);
            }
        }
    }

    #[test]
    fn circle_frame_is_tight() {
        let fam = circle_frame(64, 1.0).unwrap();
        let b = frame_bounds(&fam).unwrap();
        assert!((b.lower - PI).abs() < 1e-12 && (b.upper - PI).abs() < 1e-12);
        assert!((fam.total_energy() - 2.0 * PI).abs() < 1e-12);
        assert!(is_parseval(&circle_frame(64, 1.0 / PI.sqrt()).unwrap(), None));
        for nodes in 3..40 {
            let g = circle_frame(nodes, 1.0).unwrap().gramian();
            assert!(g[(0, 1)].norm() < 1e-12, "nodes={nodes}");
            assert!((g[(0, 0)].re - PI).abs() < 1e-12);
        }
        assert!(circle_frame::<f64>(2, 1.0).is_err());
    }

    #[test]
    fn random_family_is_seeded() {
        let a = random_family::<f64>(5, 3, Field::Complex, 7).unwrap();
        let b = random_family::<f64>(5, 3, Field::Complex, 7).unwrap();
        assert_eq!(a, b);
        let c = random_family::<f64>(5, 3, Field::Complex, 8).unwrap();
        assert_ne!(a, c);
        let r = random_family::<f64>(4, 2, Field::Real, 1).unwrap();
        assert!(r.points().all(|(_, v)| v.iter().all(|z| z.im == 0.0)));
    }

    #[test]
    fn random_family_frame_statistics() {
        let frames = (0..100)
            .filter(|&s| is_frame(&random_family::<f64>(4, 3, Field::Real, s).unwrap(), None).unwrap())
            .count();
        assert!(frames >= 99);
        for s in 0..20 {
            assert!(!is_frame(&random_family::<f64>(2, 3, Field::Complex, s).unwrap(), None).unwrap());
        }
    }

    #[test]
    fn random_parseval_is_parseval() {
        for s in 0..10 {
            let f = random_parseval::<f64>(7, 3, Field::Complex, s).unwrap();
            assert!(is_parseval(&f, None));
        }
        assert!(matches!(
            random_parseval::<f64>(2, 3, Field::Real, 0),
            Err(FrameError::Capacity { .. })
        ));
    }
}
