use fraclab_core::diffops::{translate, Translation};
use fraclab_core::seminorms::{
    besov2_sup, dyadic_h_grid, gagliardo, gagliardo_global, nikolskii_sup, snail, verify_seminorm_structure, xps_norm,
};
use fraclab_core::{Ball, ExteriorRule, FractionalParams, Grid, GridFunction, TestFunction};

fn identity() -> TestFunction {
    TestFunction::Affine { a: [1.0, 0.0], b: 0.0 }
}

/// `u(x) = x` on a unit interval (translated to `(-1/2, 1/2)`).
fn unit_square_value(n: usize, s: f64) -> f64 {
    let grid = Grid::new(1, 0.5, n).unwrap();
    let u = GridFunction::exact(&identity(), &grid).unwrap();
    gagliardo(&u, &Ball::centered(0.5).unwrap(), s, 2.0).unwrap().raised
}

#[test]
fn identity_half_order_is_unit_area() {
    let mut errs = Vec::new();
    for n in [65, 129, 257, 513] {
        let v = unit_square_value(n, 0.5);
        errs.push((v - 1.0).abs());
        println!("n={n} gagliardo^2={v}");
    }
    assert!(errs[2] < 0.02, "n=257 error {}", errs[2]);
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!(r > 1.8 && r < 2.2, "refinement ratio {r}");
    }
}

#[test]
fn identity_quarter_order() {
    // ∬_{(0,1)²} |x-y|^{1/2} = 8/15
    let exact = (8.0f64 / 15.0).sqrt();
    let coarse = unit_square_value(129, 0.25).sqrt();
    let fine = unit_square_value(257, 0.25).sqrt();
    println!("s=0.25: {coarse} {fine} vs {exact}");
    assert!((fine - exact).abs() / exact < 0.02);
    assert!((fine - exact).abs() < (coarse - exact).abs());
}

#[test]
fn snail_of_constant_matches_radial_integral() {
    for (s, r) in [(0.5, 0.5), (0.3, 1.0), (0.8, 0.25)] {
        let pr = FractionalParams::new(1, s, 2.0, 0.0, 1.0).unwrap();
        let grid = Grid::new(1, 2.0, 257).unwrap();
        let one = GridFunction::sample(&TestFunction::Constant(1.0), &grid, ExteriorRule::constant(1.0)).unwrap();
        let sp = pr.sp();
        let exact = 2f64.powf(1.0 + sp) / sp;
        let got = snail(&one, [0.0, 0.0], &Ball::centered(r).unwrap(), &pr).unwrap().powf(2.0);
        assert!((got - exact).abs() / exact < 1e-6, "s={s} R={r}: {got} vs {exact}");
    }
}

#[test]
fn xps_of_constant() {
    let pr = FractionalParams::new(1, 0.4, 2.5, 0.0, 1.0).unwrap();
    let grid = Grid::new(1, 2.0, 257).unwrap();
    let one = GridFunction::sample(&TestFunction::Constant(1.0), &grid, ExteriorRule::constant(1.0)).unwrap();
    let v = xps_norm(&one, &pr).unwrap().raised;
    let exact = 2.0 / pr.sp();
    // box part is a node quadrature of a kinked weight
    assert!((v - exact).abs() / exact < 1e-3, "{v} vs {exact}");
    let zero = GridFunction::zeros(&grid);
    assert_eq!(xps_norm(&zero, &pr).unwrap().value, 0.0);
}

#[test]
fn affine_quotients() {
    let grid = Grid::new(1, 2.0, 129).unwrap();
    let u = GridFunction::exact(&identity(), &grid).unwrap();
    let e = Ball::centered(1.0).unwrap();
    let hs = dyadic_h_grid(&grid, 0.5);
    let nik = nikolskii_sup(&u, &e, 1.0, 2.0, &hs).unwrap();
    let measure = grid.restrict(&e).len() as f64 * grid.spacing();
    assert!((nik.raised - measure).abs() < 1e-12 * measure);
    assert!(besov2_sup(&u, 1.5, 2.0, &hs).unwrap().value < 1e-12);
    let pw = GridFunction::exact(&TestFunction::Power { beta: 0.5 }, &grid).unwrap();
    assert!(gagliardo(&pw, &e, 0.5, 2.0).unwrap().value > 0.0);
    assert!(nikolskii_sup(&pw, &e, 0.5, 2.0, &hs).unwrap().value > 0.0);
    assert!(besov2_sup(&pw, 0.5, 2.0, &hs).unwrap().value > 0.0);
}

#[test]
fn gagliardo_scaling_on_powers() {
    // [u(λ·)]_{W^{α,p}(E)} = λ^{α-N/p} [u]_{W^{α,p}(λE)}, and u(λx) = λ^β u(x)
    let (alpha, p, beta) = (0.4, 2.0, 0.75);
    let psi = TestFunction::Power { beta };
    let base_grid = Grid::new(1, 0.5, 129).unwrap();
    let base = gagliardo(&GridFunction::exact(&psi, &base_grid).unwrap(), &Ball::centered(0.5).unwrap(), alpha, p)
        .unwrap()
        .value;
    for lam in [0.5, 2.0] {
        let g = Grid::new(1, 0.5 * lam, 129).unwrap();
        let u = GridFunction::exact(&psi, &g).unwrap();
        let v = gagliardo(&u, &Ball::centered(0.5 * lam).unwrap(), alpha, p).unwrap().value;
        let predicted = base * f64::powf(lam, beta - alpha + 1.0 / p);
        assert!((v - predicted).abs() < 1e-10 * predicted, "λ={lam}: {v} vs {predicted}");
    }
}

#[test]
fn translation_and_refinement() {
    let psi = TestFunction::Bump { radius: 0.6 };
    let grid = Grid::new(1, 2.0, 257).unwrap();
    let u = GridFunction::exact(&psi, &grid).unwrap();
    let a = gagliardo_global(&u, 0.5, 2.0).unwrap().value;
    let moved = translate(&u, Translation::along(&grid, 0, 16)).unwrap();
    let b = gagliardo_global(&moved, 0.5, 2.0).unwrap().value;
    assert!((a - b).abs() < 1e-3 * a, "{a} vs {b}");

    let fine = Grid::new(1, 2.0, 513).unwrap();
    let uf = GridFunction::exact(&psi, &fine).unwrap();
    let e = Ball::centered(1.0).unwrap();
    let pairs = [
        (gagliardo(&u, &e, 0.5, 2.0).unwrap().value, gagliardo(&uf, &e, 0.5, 2.0).unwrap().value),
        (
            nikolskii_sup(&u, &e, 0.5, 2.0, &dyadic_h_grid(&grid, 0.5)).unwrap().value,
            nikolskii_sup(&uf, &e, 0.5, 2.0, &dyadic_h_grid(&fine, 0.5)).unwrap().value,
        ),
        (
            besov2_sup(&u, 1.5, 2.0, &dyadic_h_grid(&grid, 0.5)).unwrap().value,
            besov2_sup(&uf, 1.5, 2.0, &dyadic_h_grid(&fine, 0.5)).unwrap().value,
        ),
    ];
    for (c, f) in pairs {
        assert!((c - f).abs() / f < 0.05, "{c} vs {f}");
    }
}

fn corpus() -> Vec<TestFunction> {
    vec![
        TestFunction::Bump { radius: 0.5 },
        TestFunction::Bump { radius: 0.9 },
        TestFunction::Spline { degree: 2, width: 0.7 },
        TestFunction::Spline { degree: 3, width: 0.6 },
        TestFunction::Spline { degree: 4, width: 0.9 },
        TestFunction::TruncatedParabola { exponent: 2.0 },
    ]
}

#[test]
fn seminorm_structure_constants_are_shared() {
    let grid = Grid::new(1, 3.0, 385).unwrap();
    let rep = verify_seminorm_structure(&corpus(), &grid, 2.0, &[0.3, 0.5, 0.7], &[0.3, 0.5, 0.7]).unwrap();
    println!("{:?}", rep.fitted);
    assert!(rep.pass, "{:?}", rep.notes);
    assert!(rep.worst < 3.0);
    // smooth functions never saturate the 1/(1-α) blow-up, so pushing the
    // reduction up to α = 0.9 widens the spread; logged, not asserted
    let wide = verify_seminorm_structure(&corpus(), &grid, 2.0, &[0.5], &[0.3, 0.6, 0.9]).unwrap();
    println!("reduction spread up to 0.9: {:?}", wide.fitted_value("spread_reduction"));
}

#[test]
fn structure_rejects_noncompact_input() {
    let grid = Grid::new(1, 3.0, 129).unwrap();
    assert!(verify_seminorm_structure(&[TestFunction::Gaussian { sigma: 0.3 }], &grid, 2.0, &[0.5], &[0.5]).is_err());
}
