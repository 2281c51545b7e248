use etstir_core::driver::{detect_steady_state, SeriesPoint, SteadyState};
use etstir_core::field::ScalarField;
use etstir_core::mesh::{build_grid, Geometry};
use etstir_core::thermal::FluidProps;
use etstir_core::transport::{advance_concentration, wellmixed_oracle, ConcentrationField, ReactionParams, SurfaceState};

#[test]
fn step_profile_spreads_as_erfc() {
    let (length, height) = (500e-6, 20e-6);
    let grid = build_grid(&Geometry::empty_channel(length, height), 500, 4).unwrap();
    let params = ReactionParams::default();
    let props = FluidProps::default();
    let a_in = params.a_inlet;
    let mut a = ConcentrationField {
        a: ScalarField::zeros(grid.nx, grid.ny),
    };
    for j in 0..grid.ny {
        for i in 0..grid.nx / 2 {
            a.a.set(i, j, a_in);
        }
    }
    let surface = SurfaceState::empty(&grid);
    let mass0 = a.total(&grid);
    let dt = 0.01;
    let steps = 200;
    for _ in 0..steps {
        a = advance_concentration(&grid, &a, None, &surface, &params, &props, dt, 1e-14).unwrap().a;
    }
    let t = dt * steps as f64;
    let mass = a.total(&grid);
    assert!((mass - mass0).abs() <= 1e-10 * mass0, "mass drift {:e}", (mass - mass0) / mass0);

    let spread = (4.0 * props.diffusivity * t).sqrt();
    let mut worst = 0.0f64;
    for i in 0..grid.nx {
        let x = (i as f64 + 0.5) * grid.dx;
        let exact = 0.5 * a_in * libm::erfc((x - 0.5 * length) / spread);
        worst = worst.max((a.a.at(i, 1) - exact).abs() / a_in);
    }
    assert!(worst < 0.02, "worst deviation {worst:e} of a_inlet");
}

#[test]
fn analytic_curve_reaches_steady_at_closed_form_time() {
    let p = ReactionParams::default();
    let series: Vec<SeriesPoint> = (0..=200)
        .map(|k| {
            let t = 2.0 * k as f64;
            SeriesPoint {
                t,
                mean_coverage: wellmixed_oracle(&p, t),
                min_a: p.a_inlet,
                max_a: p.a_inlet,
            }
        })
        .collect();
    let exact = -(0.01f64).ln() / p.rate();
    assert!((exact - 127.9).abs() < 0.05, "{exact}");
    match detect_steady_state(&series, p.ab_eq(), 0.99).unwrap() {
        SteadyState::Reached(t) => assert!((t - 127.9).abs() <= 2.0, "{t}"),
        SteadyState::NotReached => panic!("analytic curve never reached steady state"),
    }
}

#[test]
fn oracle_constants() {
    let p = ReactionParams::default();
    assert!((p.ab_eq() - 2.1667e-8).abs() < 1e-4 * 2.1667e-8);
    assert!((p.rate() - 0.036).abs() < 1e-12);
    assert_eq!(wellmixed_oracle(&p, 0.0), 0.0);
    assert!((wellmixed_oracle(&p, 1e6) - p.ab_eq()).abs() < 1e-20);
}
