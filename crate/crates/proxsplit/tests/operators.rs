//! Operator contracts: adjoint identities, norm bounds, convolution against
//! direct spatial references, and the normal-equation solver.

use proxsplit::hilbert::{
    solve_normal, variable_gaussian_blur, ConvolutionOp, DenseOp, NormalTerm, Op, Shape,
    SolveOptions, Vector,
};
use proxsplit::oracles::{dense_reference, op_norm_estimate};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn randn(rng: &mut ChaCha8Rng, shape: Shape) -> Vector {
    Vector::from_fn(shape, |_| rng.random_range(-1.0..1.0))
}

fn shipped_operators() -> Vec<(&'static str, Op)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let conv = Op::convolution(ConvolutionOp::uniform(3, 5, 8, 8).unwrap());
    let kernel: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let conv2 = Op::convolution(ConvolutionOp::new(&kernel, 2, 3, 8, 8).unwrap());
    let grad = Op::gradient(8, 8);
    let mask = Op::mask(
        Shape::Grid(8, 8),
        (0..64).map(|i| i % 3 != 0).collect(),
    )
    .unwrap();
    let sigmas: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..1.0)).collect();
    let blur = Op::row_sparse(variable_gaussian_blur(8, 8, &sigmas).unwrap());
    let dense = Op::dense(
        DenseOp::new(
            (0..40).map(|_| rng.random_range(-1.0..1.0)).collect(),
            Shape::Flat(5),
            Shape::Flat(8),
        )
        .unwrap(),
    );
    let composed = conv.clone().compose(conv2.clone()).unwrap();
    let scaled = grad.clone().scaled(-2.5);
    let stacked = Op::stack(vec![conv.clone(), conv2.clone(), mask.clone()]).unwrap();
    let summed = Op::sum(vec![conv.clone(), conv2.clone()]).unwrap();
    let select = Op::select_block(
        Shape::Product(vec![Shape::Grid(8, 8), Shape::Grid(8, 8)]),
        1,
    )
    .unwrap();
    vec![
        ("identity", Op::identity(Shape::Grid(8, 8))),
        ("convolution-uniform", conv),
        ("convolution-random", conv2),
        ("gradient", grad),
        ("mask", mask),
        ("variable-blur", blur),
        ("dense", dense),
        ("composed", composed),
        ("scaled", scaled),
        ("stacked", stacked),
        ("summed", summed),
        ("select-block", select),
    ]
}

#[test]
fn adjoint_identity_all_shipped_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (name, op) in shipped_operators() {
        for _ in 0..100 {
            let x = randn(&mut rng, op.in_shape().clone());
            let y = randn(&mut rng, op.out_shape().clone());
            let lhs = op.apply(&x).dot(&y);
            let rhs = x.dot(&op.apply_adjoint(&y));
            let tol = 1e-10 * (x.norm() * y.norm() + 1.0);
            assert!(
                (lhs - rhs).abs() <= tol,
                "{name}: adjoint identity violated by {:.3e}",
                (lhs - rhs).abs()
            );
        }
    }
}

#[test]
fn norm_bounds_dominate_power_iteration() {
    for (name, op) in shipped_operators() {
        if op.norm_bound() == 0.0 {
            continue;
        }
        let estimate = op_norm_estimate(&op, 300, 5);
        assert!(
            estimate <= op.norm_bound() * (1.0 + 1e-6),
            "{name}: power estimate {estimate} exceeds bound {}",
            op.norm_bound()
        );
    }
}

#[test]
fn identity_and_constant_behavior() {
    let id = Op::identity(Shape::Flat(4));
    let x = Vector::flat(&[1.0, -2.0, 3.0, 0.5]);
    assert_eq!(id.apply(&x), x);

    // A normalized uniform kernel preserves constant images.
    let conv = Op::convolution(ConvolutionOp::uniform(15, 5, 32, 32).unwrap());
    let c = Vector::constant(Shape::Grid(32, 32), 7.25);
    let out = conv.apply(&c);
    for &v in out.as_slice() {
        assert!((v - 7.25).abs() < 1e-10);
    }

    // Differences of a constant image vanish in both blocks.
    let d = Op::gradient(16, 16);
    let z = d.apply(&Vector::constant(Shape::Grid(16, 16), 3.0));
    assert!(z.norm() < 1e-12);
}

#[test]
fn combinators_match_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let conv = Op::convolution(ConvolutionOp::uniform(3, 3, 8, 8).unwrap());
    let id = Op::identity(Shape::Grid(8, 8));
    let composed = id.clone().compose(conv.clone()).unwrap();
    let x = randn(&mut rng, Shape::Grid(8, 8));
    assert!(composed.apply(&x).dist(&conv.apply(&x)) < 1e-14);

    let doubled = Op::identity(Shape::Flat(3)).scaled(2.0);
    let v = Vector::flat(&[1.0, 2.0, 3.0]);
    assert_eq!(doubled.apply(&v).as_slice(), &[2.0, 4.0, 6.0]);

    // stack(Id, Id) has squared norm exactly 2.
    let stacked = Op::stack(vec![
        Op::identity(Shape::Flat(6)),
        Op::identity(Shape::Flat(6)),
    ])
    .unwrap();
    assert!((stacked.norm_bound().powi(2) - 2.0).abs() < 1e-12);
    let est = op_norm_estimate(&stacked, 200, 9);
    assert!((est.powi(2) - 2.0).abs() < 1e-9);
}

#[test]
fn convolution_matches_direct_spatial_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (h, w) = (8usize, 8usize);
    let (kh, kw) = (3usize, 5usize);
    let kernel: Vec<f64> = (0..kh * kw).map(|_| rng.random_range(-1.0..1.0)).collect();
    let conv = ConvolutionOp::new(&kernel, kh, kw, h, w).unwrap();
    let x = randn(&mut rng, Shape::Grid(h, w));
    let fast = conv.apply(&x);

    // Direct circular convolution with the center-anchored kernel.
    let (ch, cw) = (kh / 2, kw / 2);
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for a in 0..kh {
                for b in 0..kw {
                    let si = (i as isize - (a as isize - ch as isize)).rem_euclid(h as isize);
                    let sj = (j as isize - (b as isize - cw as isize)).rem_euclid(w as isize);
                    acc += kernel[a * kw + b] * x.as_slice()[si as usize * w + sj as usize];
                }
            }
            let got = fast.as_slice()[i * w + j];
            assert!(
                (acc - got).abs() < 1e-10,
                "spatial reference mismatch at ({i},{j}): {acc} vs {got}"
            );
        }
    }
}

#[test]
fn gradient_norm_squared_converges_to_eight() {
    let d = Op::gradient(16, 16);
    let est = op_norm_estimate(&d, 4000, 1);
    assert!(
        (est.powi(2) - 8.0).abs() < 1e-3,
        "estimated squared norm {}",
        est.powi(2)
    );
    assert!((d.norm_bound().powi(2) - 8.0).abs() < 1e-12);
}

#[test]
fn variable_blur_rows_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let sigmas: Vec<f64> = (0..36).map(|_| rng.random_range(0.0..1.0)).collect();
    let blur = variable_gaussian_blur(6, 6, &sigmas).unwrap();
    let ones = Vector::constant(Shape::Grid(6, 6), 1.0);
    let out = blur.apply(&ones);
    for &v in out.as_slice() {
        assert!((v - 1.0).abs() < 1e-12);
    }
}

#[test]
#[should_panic(expected = "operator expects")]
fn apply_shape_mismatch_panics() {
    let conv = Op::convolution(ConvolutionOp::uniform(3, 3, 8, 8).unwrap());
    conv.apply(&Vector::flat(&[1.0, 2.0]));
}

#[test]
fn solve_normal_trivial_cases() {
    // No terms: x = b.
    let b = Vector::flat(&[4.0, -1.0]);
    let x = solve_normal(&[], 1.0, &b, &SolveOptions::default()).unwrap();
    assert_eq!(x, b);

    // 1-D, L = Id, P = Id, alpha = 1, gamma = 1: (1+1)x = 4 gives x = 2.
    let b = Vector::flat(&[4.0]);
    let term = NormalTerm {
        alpha: 1.0,
        op: Op::identity(Shape::Flat(1)),
        projector: None,
    };
    let x = solve_normal(&[term], 1.0, &b, &SolveOptions::default()).unwrap();
    assert!((x.as_slice()[0] - 2.0).abs() < 1e-12);

    assert!(solve_normal(&[], 0.0, &b, &SolveOptions::default()).is_err());
}

#[test]
fn solve_normal_matches_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let kernel: Vec<f64> = (0..15).map(|_| rng.random_range(-0.5..0.5)).collect();
    let conv = Op::convolution(ConvolutionOp::new(&kernel, 3, 5, 8, 8).unwrap());
    let gamma = 0.7;
    let alpha = 1.9;
    let b = randn(&mut rng, Shape::Grid(8, 8));

    let term = NormalTerm {
        alpha,
        op: conv.clone(),
        projector: None,
    };
    let fast = solve_normal(std::slice::from_ref(&term), gamma, &b, &SolveOptions::default()).unwrap();

    // Dense oracle: materialize Id + gamma*alpha*L^T L and solve by
    // elimination.
    let l = dense_reference(&conv);
    let n = 64;
    let mut system = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = if i == j { 1.0 } else { 0.0 };
            for k in 0..n {
                acc += gamma * alpha * l.entry(k, i) * l.entry(k, j);
            }
            system[i * n + j] = acc;
        }
    }
    let dense = DenseOp::new(system, Shape::Grid(8, 8), Shape::Grid(8, 8)).unwrap();
    let reference = dense_reference(&Op::dense(dense)).solve(&b).unwrap();
    assert!(
        fast.dist(&reference) <= 1e-8 * reference.norm().max(1.0),
        "frequency path deviates from dense solve by {:.3e}",
        fast.dist(&reference)
    );

    // Force the conjugate-gradient path with a projector and check the
    // residual contract directly.
    let keep: Vec<bool> = (0..64).map(|i| i % 2 == 0).collect();
    let proj = Op::mask(Shape::Grid(8, 8), keep).unwrap();
    let term_cg = NormalTerm {
        alpha,
        op: conv.clone(),
        projector: Some(proj.clone()),
    };
    let x = solve_normal(&[term_cg], gamma, &b, &SolveOptions::default()).unwrap();
    let mut residual = x.clone();
    residual.axpy(
        gamma * alpha,
        &conv.apply_adjoint(&proj.apply(&conv.apply(&x))),
    );
    assert!(residual.sub(&b).norm() <= 1e-8 * b.norm());
}

#[test]
fn solve_normal_reports_nonconvergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let b = randn(&mut rng, Shape::Flat(16));
    let entries: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dense = Op::dense(DenseOp::square(entries, 16).unwrap());
    let term = NormalTerm {
        alpha: 1.0,
        op: dense,
        projector: None,
    };
    let opts = SolveOptions {
        max_iters: 1,
        ..SolveOptions::default()
    };
    let err = solve_normal(&[term], 1e6, &b, &opts).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("residual"), "unexpected error: {msg}");
}

#[test]
fn dense_reference_checks() {
    let id = Op::identity(Shape::Flat(3));
    let m = dense_reference(&id);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(m.entry(i, j), if i == j { 1.0 } else { 0.0 });
        }
    }

    // Circulant structure of a 4x4 convolution: row r is a shift of row 0.
    let conv = Op::convolution(ConvolutionOp::uniform(1, 3, 1, 4).unwrap());
    let c = dense_reference(&conv);
    for r in 1..4 {
        for j in 0..4 {
            assert!((c.entry(r, j) - c.entry(0, (j + 4 - r) % 4)).abs() < 1e-12);
        }
    }

    // norm_bound dominates the top singular value.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let entries: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dense = Op::dense(DenseOp::new(entries, Shape::Flat(5), Shape::Flat(6)).unwrap());
    let sigma = dense_reference(&dense).top_singular_value(400);
    assert!(dense.norm_bound() >= sigma * (1.0 - 1e-9));
}
