use etstir_core::etforce::force_density;
use etstir_core::thermal::FluidProps;
use etstir_core::transport::{advance_surface, wellmixed_oracle, ReactionParams, SurfaceState};
use proptest::prelude::*;

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1e-300)
}

proptest! {
    // Doubling E quadruples the force; doubling grad T doubles it.
    #[test]
    fn force_scales_with_field_squared_and_gradient(
        ex in -1e6..1e6f64, ey in -1e6..1e6f64,
        gx in -1e5..1e5f64, gy in -1e5..1e5f64,
        f in 1e3..1e9f64,
    ) {
        let p = FluidProps::default();
        let w = 2.0 * std::f64::consts::PI * f;
        let base = force_density((ex, ey), (gx, gy), &p, w);
        let e2 = force_density((2.0 * ex, 2.0 * ey), (gx, gy), &p, w);
        let g2 = force_density((ex, ey), (2.0 * gx, 2.0 * gy), &p, w);
        let scale = base.0.abs().max(base.1.abs()) * 4.0;
        prop_assert!(close(e2.0, 4.0 * base.0, scale) && close(e2.1, 4.0 * base.1, scale));
        prop_assert!(close(g2.0, 2.0 * base.0, scale) && close(g2.1, 2.0 * base.1, scale));
    }

    // With a surface bathed at the inlet concentration, one exact step of
    // any length lands on the closed-form curve and inside [0, b0].
    #[test]
    fn surface_step_tracks_closed_form(t0 in 0.0..400.0f64, dt in 1e-3..50.0f64) {
        let p = ReactionParams::default();
        let s = SurfaceState { ab: vec![wellmixed_oracle(&p, t0)], lengths: vec![1e-6], time: t0, clamped: 0 };
        let next = advance_surface(&s, &[p.a_inlet], &p, dt).unwrap();
        let ab = next.ab[0];
        prop_assert!((0.0..=p.b0).contains(&ab));
        prop_assert!((ab - wellmixed_oracle(&p, t0 + dt)).abs() <= 1e-12 * p.ab_eq());
        prop_assert!(ab >= s.ab[0]);
    }
}
