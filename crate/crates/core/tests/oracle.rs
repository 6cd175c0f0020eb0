use coupler_core::validation::*;
use coupler_core::{compute_coefficients, CouplerParams};

const FIGURE_SETS: [(f64, f64); 4] = [(1e-3, 1e-4), (1e-2, 1e-4), (1e-3, 1e-2), (1e-3, 1e-1)];

fn params(gamma_nl: f64, delta_k: f64) -> CouplerParams {
    CouplerParams::real(0.1, gamma_nl, delta_k, 1.0).unwrap()
}

#[test]
fn closed_forms_match_oracle_at_figure_sets() {
    for (g, dk) in FIGURE_SETS {
        let r = ode_oracle(&params(g, dk), &DEFAULT_L_GRID, DEFAULT_STEP).unwrap();
        assert!(
            r.max_rel_error < 1e-8,
            "Γ={g} Δk={dk}: {:?}",
            r.per_coefficient
        );
    }
}

#[test]
fn h3_without_phase_factor_disagrees_at_finite_mismatch() {
    let r = ode_oracle(&params(1e-3, 1e-1), &DEFAULT_L_GRID, DEFAULT_STEP).unwrap();
    assert!(
        r.h3_variant_max_rel_error > 1e-4,
        "{}",
        r.h3_variant_max_rel_error
    );
}

/// Error against the closed forms, at a step coarse enough that truncation
/// dominates rounding.
fn coarse_error(p: &CouplerParams, step: f64) -> f64 {
    ode_oracle(p, &[5.0], step).unwrap().max_rel_error
}

#[test]
fn halving_the_step_gives_fourth_order() {
    for (g, dk) in [(1e-3, 1e-4), (1e-3, 1e-1)] {
        let p = params(g, dk);
        let ratio = coarse_error(&p, 0.5) / coarse_error(&p, 0.25);
        assert!((ratio - 16.0).abs() < 2.0, "Γ={g} Δk={dk}: {ratio}");
    }
}

#[test]
fn zeroth_order_block_is_the_linear_coupler() {
    let p = CouplerParams::real(0.1, 0.0, 0.3, 1.0).unwrap();
    let r = ode_oracle(&p, &[0.5, 1.0, 2.0, 5.0, 20.0], 1e-3).unwrap();
    assert!(r.max_rel_error < 1e-10, "{}", r.max_rel_error);
    for (l, c) in &r.oracle {
        assert_eq!(c.f3.norm() + c.h4.norm(), 0.0, "L={l}");
    }
}

#[test]
fn grid_order_does_not_matter() {
    let p = params(1e-3, 1e-2);
    let a = ode_oracle(&p, &[5.0, 0.5, 2.0], 1e-3).unwrap();
    let b = ode_oracle(&p, &[0.5, 2.0, 5.0], 1e-3).unwrap();
    assert_eq!(a.oracle[0], b.oracle[2]);
    assert_eq!(a.oracle[1], b.oracle[0]);
}

#[test]
fn mixed_form_round_trips() {
    let c = compute_coefficients(&params(1e-2, 1e-1).with_length(3.0)).unwrap();
    let back = ForwardCoefficients::from_mixed(&c)
        .unwrap()
        .to_mixed()
        .unwrap();
    for (x, y) in c.values().into_iter().zip(back.values()) {
        assert!((x - y).norm() <= 1e-13 * x.norm().max(1e-3), "{x} {y}");
    }
}

#[test]
fn residuals_scale_quadratically_in_gamma() {
    let p = params(1e-3, 1e-4);
    let s = gamma_scaling(&p, &default_samples(7), &halving_gammas(p.gamma_nl)).unwrap();
    assert!((s.escr_exponent - 2.0).abs() < 0.2, "{}", s.escr_exponent);
    assert!((s.com_exponent - 2.0).abs() < 0.2, "{}", s.com_exponent);
}

#[test]
fn residuals_vanish_without_nonlinearity() {
    let p = params(0.0, 1e-4);
    let samples = default_samples(1);
    assert!(escr_check(&p, &samples).unwrap().max() < 1e-12);
    assert!(constant_of_motion_residual(&p, &samples).unwrap() < 1e-9);
}

#[test]
fn empty_samples_rejected() {
    assert!(escr_check(&params(1e-3, 1e-4), &[]).is_err());
    assert!(constant_of_motion_residual(&params(1e-3, 1e-4), &[]).is_err());
}

#[test]
fn short_length_order_is_at_least_three() {
    let p = params(1e-3, SHORT_LENGTH_DELTA_K);
    let fit = short_length_consistency(&p, &DEFAULT_SHORT_LENGTHS).unwrap();
    assert!(fit.reaches(3.0), "{fit:?}");
    for name in ["f1", "f2", "g3", "h2"] {
        assert!(fit.order(name).unwrap() >= 3.0 - ORDER_TOLERANCE, "{name}");
    }
}

#[test]
fn validation_report_is_deterministic_and_finite() {
    let p = params(1e-3, 1e-4);
    let a = validate(&p, 3).unwrap();
    let b = validate(&p, 3).unwrap();
    assert_eq!(a.to_string(), b.to_string());
    assert!(a.escr_deviation().is_finite() && a.com_residual.is_finite());
    assert!(a.ode_max_rel_error() < 1e-8);
    for line in a.to_string().lines() {
        assert!(line.split_once('=').is_some(), "{line}");
    }
}
