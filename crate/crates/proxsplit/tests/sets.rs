//! Projector contracts: worked examples, idempotence, firm nonexpansiveness,
//! membership, and brute-force nearest-point cross-checks.

use num_complex::Complex64;
use proxsplit::hilbert::fft::Fft2;
use proxsplit::hilbert::{Shape, Vector};
use proxsplit::sets::ConvexSet;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn randn(rng: &mut ChaCha8Rng, shape: Shape, scale: f64) -> Vector {
    Vector::from_fn(shape, |_| rng.random_range(-scale..scale))
}

fn sample_sets() -> Vec<(&'static str, ConvexSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = Shape::Grid(2, 4);
    let normal = randn(&mut rng, Shape::Flat(3), 1.0);
    let theta: Vec<f64> = {
        // Phases of a real image are automatically antisymmetric.
        let img = randn(&mut rng, Shape::Grid(2, 4), 1.0);
        Fft2::new(2, 4)
            .forward_real(img.as_slice())
            .into_iter()
            .map(|c| c.arg())
            .collect()
    };
    vec![
        (
            "box",
            ConvexSet::box_set(Shape::Flat(3), 0.0, 255.0).unwrap(),
        ),
        ("hyperplane", ConvexSet::hyperplane(normal.clone(), 0.7).unwrap()),
        ("halfspace", ConvexSet::halfspace(normal, -0.2).unwrap()),
        (
            "ball",
            ConvexSet::ball(Vector::flat(&[0.5, -1.0, 0.0]), 1.5).unwrap(),
        ),
        ("point", ConvexSet::point(Vector::flat(&[1.0, 2.0, 3.0]))),
        (
            "mask",
            ConvexSet::subspace_mask(Shape::Flat(3), vec![true, false, true]).unwrap(),
        ),
        (
            "dft-data",
            ConvexSet::dft_data(
                2,
                4,
                &[
                    ((0, 0), Complex64::new(3.0, 0.0)),
                    ((0, 1), Complex64::new(0.5, -0.25)),
                    ((1, 1), Complex64::new(-0.3, 0.8)),
                ],
            )
            .unwrap(),
        ),
        ("phase", ConvexSet::phase(2, 4, &theta).unwrap()),
        (
            "grid-box",
            ConvexSet::box_set(grid, -1.0, 1.0).unwrap(),
        ),
    ]
}

#[test]
fn idempotence_firm_nonexpansiveness_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, set) in sample_sets() {
        for _ in 0..100 {
            let x = randn(&mut rng, set.shape().clone(), 300.0);
            let y = randn(&mut rng, set.shape().clone(), 300.0);
            let px = set.project(&x);
            let ppx = set.project(&px);
            assert!(
                ppx.dist(&px) <= 1e-10 * (1.0 + px.norm()),
                "{name}: projection not idempotent"
            );
            let py = set.project(&y);
            let lhs = px.dist(&py).powi(2);
            let rhs = px.sub(&py).dot(&x.sub(&y));
            assert!(
                lhs <= rhs + 1e-10 * (1.0 + lhs),
                "{name}: firm nonexpansiveness violated ({lhs} vs {rhs})"
            );
            assert!(
                set.contains(&px, 1e-8 * (1.0 + px.norm())),
                "{name}: projection not a member"
            );
        }
    }
}

#[test]
fn box_examples() {
    let set = ConvexSet::box_set(Shape::Flat(3), 0.0, 255.0).unwrap();
    let x = Vector::flat(&[-3.0, 10.0, 300.0]);
    assert_eq!(set.project(&x).as_slice(), &[0.0, 10.0, 255.0]);
    let inside = Vector::flat(&[5.0, 6.0, 7.0]);
    assert_eq!(set.project(&inside), inside);
    // Distance equals the norm of the clamp residual (per-coordinate
    // nearest point).
    let expected: f64 = x
        .as_slice()
        .iter()
        .map(|&v| {
            let p = v.clamp(0.0, 255.0);
            (v - p) * (v - p)
        })
        .sum::<f64>()
        .sqrt();
    assert!((set.distance(&x) - expected).abs() < 1e-12);
    assert!(ConvexSet::box_set(Shape::Flat(1), 2.0, 1.0).is_err());
}

#[test]
fn hyperplane_examples() {
    let ones = Vector::constant(Shape::Flat(4), 1.0);
    let set = ConvexSet::hyperplane(ones.clone(), 4.0).unwrap();
    let p = set.project(&Vector::zeros(Shape::Flat(4)));
    assert_eq!(p.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
    assert_eq!(set.project(&p), p);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let x = randn(&mut rng, Shape::Flat(4), 50.0);
        assert!((ones.dot(&set.project(&x)) - 4.0).abs() < 1e-10);
    }
    assert!(ConvexSet::hyperplane(Vector::zeros(Shape::Flat(2)), 1.0).is_err());
}

#[test]
fn ball_examples() {
    let set = ConvexSet::ball(Vector::zeros(Shape::Flat(2)), 1.0).unwrap();
    let p = set.project(&Vector::flat(&[3.0, 4.0]));
    assert!((p.as_slice()[0] - 0.6).abs() < 1e-14);
    assert!((p.as_slice()[1] - 0.8).abs() < 1e-14);
    let interior = Vector::flat(&[0.1, -0.2]);
    assert_eq!(set.project(&interior), interior);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let x = randn(&mut rng, Shape::Flat(2), 20.0);
        assert!(set.project(&x).norm() <= 1.0 + 1e-12);
    }
}

#[test]
fn mask_examples() {
    let shape = Shape::Flat(4);
    let full = ConvexSet::subspace_mask(shape.clone(), vec![true; 4]).unwrap();
    let empty = ConvexSet::subspace_mask(shape.clone(), vec![false; 4]).unwrap();
    let x = Vector::flat(&[1.0, -2.0, 3.0, -4.0]);
    assert_eq!(full.project(&x), x);
    assert!(empty.project(&x).norm() == 0.0);

    // proj_V + proj_{V⊥} = Id entrywise.
    let keep = vec![true, false, true, false];
    let v = ConvexSet::subspace_mask(shape.clone(), keep.clone()).unwrap();
    let vperp =
        ConvexSet::subspace_mask(shape, keep.iter().map(|b| !b).collect()).unwrap();
    let sum = v.project(&x).add(&vperp.project(&x));
    assert_eq!(sum, x);
}

#[test]
fn dft_data_examples() {
    let (h, w) = (2usize, 4usize);
    let fft = Fft2::new(h, w);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let target_img = randn(&mut rng, Shape::Grid(h, w), 1.0);
    let spec = fft.forward_real(target_img.as_slice());

    // R = all frequencies: the projection is the inverse DFT of the target.
    let mut all: Vec<((usize, usize), Complex64)> = Vec::new();
    for u in 0..h {
        for v in 0..w {
            all.push(((u, v), spec[u * w + v]));
        }
    }
    let full = ConvexSet::dft_data(h, w, &all).unwrap();
    let x = randn(&mut rng, Shape::Grid(h, w), 5.0);
    assert!(full.project(&x).dist(&target_img) < 1e-10);

    // R = empty: the projection is the identity.
    let empty = ConvexSet::dft_data(h, w, &[]).unwrap();
    assert_eq!(empty.project(&x), x);

    // Parseval: the squared distance is the spectral residual on R.
    let partial = ConvexSet::dft_data(
        h,
        w,
        &[((0, 1), spec[1]), ((1, 2), spec[w + 2])],
    )
    .unwrap();
    let px = partial.project(&x);
    let xs = fft.forward_real(x.as_slice());
    let mut expected = 0.0;
    for &(u, v) in &[(0usize, 1usize), (0, 3), (1, 2)] {
        // (0,1) symmetrizes to (0,3); (1,2) is self-conjugate on a 2x4 grid.
        expected += (xs[u * w + v] - spec[u * w + v]).norm_sqr();
    }
    assert!((x.dist(&px).powi(2) - expected).abs() < 1e-10);

    // Self-conjugate frequency with complex target is rejected.
    assert!(ConvexSet::dft_data(h, w, &[((0, 0), Complex64::new(1.0, 2.0))]).is_err());
    // Conflicting pair is rejected.
    assert!(ConvexSet::dft_data(
        h,
        w,
        &[
            ((0, 1), Complex64::new(1.0, 1.0)),
            ((0, 3), Complex64::new(1.0, 1.0)),
        ]
    )
    .is_err());
}

#[test]
fn phase_examples() {
    let (h, w) = (1usize, 8usize);
    let fft = Fft2::new(h, w);
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let base = randn(&mut rng, Shape::Grid(h, w), 1.0);
    let theta: Vec<f64> = fft
        .forward_real(base.as_slice())
        .iter()
        .map(|c| c.arg())
        .collect();
    let set = ConvexSet::phase(h, w, &theta).unwrap();

    // The generating image already has the right phase and nonnegative
    // amplitudes along its own rays.
    assert!(set.project(&base).dist(&base) < 1e-10);

    // Anti-aligned spectrum: projecting the negated image zeroes every
    // coefficient whose ray it opposes; -base has phase theta+pi everywhere,
    // so the projection collapses to 0.
    let neg = base.scaled(-1.0);
    assert!(set.project(&neg).norm() < 1e-10);

    // Per-frequency 1-D brute force over the ray amplitude.
    let x = randn(&mut rng, Shape::Grid(h, w), 2.0);
    let px = set.project(&x);
    let xs = fft.forward_real(x.as_slice());
    let ps = fft.forward_real(px.as_slice());
    for k in 0..w {
        let ray = Complex64::from_polar(1.0, theta[k]);
        let mut best = (f64::INFINITY, 0.0);
        let mut rho = 0.0;
        while rho <= 8.0 {
            let d = (xs[k] - ray * rho).norm_sqr();
            if d < best.0 {
                best = (d, rho);
            }
            rho += 1e-4;
        }
        assert!(
            (ps[k] - ray * best.1).norm() < 5e-4,
            "frequency {k}: brute force {} vs projector {}",
            best.1,
            ps[k]
        );
    }

    // A non-antisymmetric phase array is rejected.
    let mut bad = theta.clone();
    bad[1] += 0.5;
    assert!(ConvexSet::phase(h, w, &bad).is_err());
}

#[test]
fn distance_matches_brute_force_low_dim() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let sets: Vec<(&str, ConvexSet)> = vec![
        (
            "box2",
            ConvexSet::box_set(Shape::Flat(2), -1.0, 1.0).unwrap(),
        ),
        (
            "ball2",
            ConvexSet::ball(Vector::flat(&[0.3, -0.4]), 0.8).unwrap(),
        ),
        (
            "half2",
            ConvexSet::halfspace(Vector::flat(&[1.0, 1.0]), 0.5).unwrap(),
        ),
    ];
    for (name, set) in sets {
        let dim = set.shape().len();
        for _ in 0..5 {
            let x = randn(&mut rng, set.shape().clone(), 3.0);
            // Brute force: dense grid search refined once.
            let mut best = (f64::INFINITY, vec![0.0; dim]);
            let steps = if dim == 2 { 401 } else { 101 };
            let mut idx = vec![0usize; dim];
            loop {
                let cand: Vec<f64> = (0..dim)
                    .map(|d| -4.0 + 8.0 * idx[d] as f64 / (steps - 1) as f64)
                    .collect();
                let cv = Vector::flat(&cand);
                if set.contains(&cv, 1e-9) {
                    let d = cv.dist(&x);
                    if d < best.0 {
                        best = (d, cand);
                    }
                }
                let mut d = 0;
                loop {
                    idx[d] += 1;
                    if idx[d] < steps {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                    if d == dim {
                        break;
                    }
                }
                if d == dim {
                    break;
                }
            }
            let grid_step = 8.0 / (steps - 1) as f64;
            let d_set = set.distance(&x);
            // The grid search can only overshoot by the mesh width.
            assert!(
                best.0 >= d_set - 1e-9 && best.0 <= d_set + grid_step * (dim as f64).sqrt(),
                "{name}: brute force {} vs projector distance {}",
                best.0,
                d_set
            );
        }
    }
}

#[test]
fn hyperplane_distance_matches_surface_search() {
    // Brute force over a 2-D parametrization of the plane itself: base point
    // plus an orthonormal tangent basis derived by Gram-Schmidt.
    let a = Vector::flat(&[1.0, -2.0, 0.5]);
    let b = 0.3;
    let set = ConvexSet::hyperplane(a.clone(), b).unwrap();
    let a_hat = a.scaled(1.0 / a.norm());
    let e1 = Vector::flat(&[1.0, 0.0, 0.0]);
    let mut u = e1.clone();
    u.axpy(-e1.dot(&a_hat), &a_hat);
    let u = u.scaled(1.0 / u.norm());
    let (ah, us) = (a_hat.as_slice(), u.as_slice());
    let v = Vector::flat(&[
        ah[1] * us[2] - ah[2] * us[1],
        ah[2] * us[0] - ah[0] * us[2],
        ah[0] * us[1] - ah[1] * us[0],
    ]);
    let base = a.scaled(b / a.norm_sq());

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..5 {
        let x = randn(&mut rng, Shape::Flat(3), 3.0);
        let mut center = (0.0f64, 0.0f64);
        let mut span = 16.0f64;
        let mut best = f64::INFINITY;
        for _ in 0..4 {
            let steps = 81;
            let mut best_st = center;
            for i in 0..steps {
                for j in 0..steps {
                    let s = center.0 - span + 2.0 * span * i as f64 / (steps - 1) as f64;
                    let t = center.1 - span + 2.0 * span * j as f64 / (steps - 1) as f64;
                    let mut p = base.clone();
                    p.axpy(s, &u);
                    p.axpy(t, &v);
                    let d = p.dist(&x);
                    if d < best {
                        best = d;
                        best_st = (s, t);
                    }
                }
            }
            center = best_st;
            span /= 20.0;
        }
        assert!(
            (best - set.distance(&x)).abs() < 1e-6,
            "surface search {best} vs projector {}",
            set.distance(&x)
        );
    }
}
