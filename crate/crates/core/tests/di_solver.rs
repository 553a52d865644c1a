use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;

use flatopt::di_solver::*;
use flatopt::numerics::{integrate_composite, least_squares};
use flatopt::Error;

fn instance(p0: [f64; 2], pf: [f64; 2], center: [f64; 2], clearance: f64) -> DiProblem {
    DiProblem {
        p0,
        pf,
        obstacle: Obstacle { center, clearance },
        ..DiProblem::reference()
    }
}

fn arc_instance() -> DiProblem {
    instance([-3.0, -0.3], [3.0, 0.0], [0.0, 0.0], 2.0)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn angle_diff(a: f64, b: f64) -> f64 {
    ((a - b + PI).rem_euclid(TAU) - PI).abs()
}

#[test]
fn stationary_when_already_there() {
    let p = instance([3.0, 3.0], [3.0, 3.0], [0.0, 0.0], 1.0);
    let c = di_unconstrained(&p).unwrap();
    assert!(c.iter().all(|axis| axis[1..].iter().all(|v| *v == 0.0)));
    assert_eq!(cubic_cost(c[0], 10.0) + cubic_cost(c[1], 10.0), 0.0);
}

#[test]
fn unconstrained_reference_enters_the_obstacle() {
    let p = DiProblem::reference();
    let c = di_unconstrained(&p).unwrap();
    // Straight-line path: closest approach to the origin is 0.4.
    let min = (0..=1000)
        .map(|i| {
            let tau = i as f64 * 0.01;
            let q = [0, 1].map(|a| c[a][0] + c[a][1] * tau + c[a][2] * tau * tau + c[a][3] * tau.powi(3));
            dist(q, [0.0, 0.0])
        })
        .fold(f64::INFINITY, f64::min);
    assert!((min - 0.4).abs() < 1e-4 && min < 1.25);
    assert!(violation_interval(&p).unwrap().is_some());
}

#[test]
fn closed_form_cost_matches_quadrature() {
    let p = DiProblem::reference();
    let c = di_unconstrained(&p).unwrap();
    let closed = cubic_cost(c[0], 10.0) + cubic_cost(c[1], 10.0);
    let quad = integrate_composite(
        |t| {
            let u = [0, 1].map(|a| 2.0 * c[a][2] + 6.0 * c[a][3] * t);
            0.5 * (u[0] * u[0] + u[1] * u[1])
        },
        0.0,
        10.0,
        4,
        6,
    );
    assert!((closed - quad).abs() < 1e-9 * closed);
    assert!((closed - 0.0375).abs() < 1e-12);
}

#[test]
fn touch_on_reference() {
    let p = DiProblem::reference();
    let sol = di_touch_solve(&p).unwrap();
    assert_eq!(sol.case, DiCase::Touch);
    assert!((sol.cost - 0.080357).abs() < 1e-6, "{}", sol.cost);
    assert!((sol.theta.unwrap() - 2.31771).abs() < 1e-4);
    assert!((sol.t1.unwrap() - 7.08102).abs() < 1e-4);
    assert!(sol.pi.unwrap() > 0.0);
    let d = &sol.diagnostics;
    assert!(d.control_jump < 1e-8);
    assert!(d.radial_velocity < 1e-8);
    assert!(d.boundary_residual < 1e-6);
    assert!(sol.min_clearance >= -1e-9);
    let t1 = sol.t1.unwrap();
    assert!(dist(sol.position(t1).unwrap(), [0.0, 0.0]) - 1.25 < 1e-9);
    let (_, residual) = touch_inner(&p, sol.theta.unwrap(), t1).unwrap();
    let norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(norm < 1e-6);
    let report = verify_di(&sol, &di_tolerances()).unwrap();
    let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(report.get("jump_condition").is_some());
}

#[test]
fn touch_system_shape() {
    let p = DiProblem::reference();
    let (a, b) = touch_system(&p, 2.3, 7.0);
    assert_eq!((a.rows(), a.cols(), b.len()), (TOUCH_EQUATIONS, TOUCH_UNKNOWNS, TOUCH_EQUATIONS));
    assert!(least_squares(&a, &b).is_ok());
}

#[test]
fn mirrored_touch_reflects_contact_angle() {
    // Reflection across the diagonal through the obstacle centre.
    let p = DiProblem::reference();
    let q = instance([-2.0, -2.0], [2.0, 1.0], [0.0, 0.0], 1.25);
    let a = di_touch_solve(&p).unwrap();
    let b = di_touch_solve(&q).unwrap();
    assert!((a.cost - b.cost).abs() < 1e-8);
    assert!((a.t1.unwrap() - b.t1.unwrap()).abs() < 1e-6);
    assert!(angle_diff(b.theta.unwrap(), FRAC_PI_2 - a.theta.unwrap()) < 1e-6);
}

#[test]
fn grazing_instance_needs_only_a_touch() {
    // Obstacle moved along the path normal so the straight path enters
    // the clearance by 0.03.
    let n = [0.8, -0.6];
    let p = instance([-2.0, -2.0], [1.0, 2.0], [0.82 * n[0], 0.82 * n[1]], 1.25);
    let esc = di_escalate_with(&p, &default_strategies()).unwrap();
    assert_eq!(esc.solution.case, DiCase::Touch);
    assert!(esc.solution.min_clearance >= -1e-9);
    assert_eq!(esc.steps.len(), 2);
}

#[test]
fn far_obstacle_returns_straight_line() {
    let p = instance([-2.0, -2.0], [1.0, 2.0], [5.0, -5.0], 1.0);
    let esc = di_escalate_with(&p, &default_strategies()).unwrap();
    assert_eq!(esc.solution.case, DiCase::Unconstrained);
    assert_eq!(esc.steps.len(), 1);
    assert!((esc.solution.cost - 0.0375).abs() < 1e-12);
}

#[test]
fn reference_escalation_stops_at_a_feasible_touch() {
    let esc = di_escalate_with(&DiProblem::reference(), &default_strategies()).unwrap();
    assert_eq!(esc.solution.case, DiCase::Touch);
    assert_eq!(esc.steps[0].strategy, "unconstrained");
    assert!(is_feasible(&esc.solution));
}

#[test]
fn cost_grows_with_clearance() {
    let mut last = 0.0375;
    for d in [0.5, 0.75, 1.0, 1.25] {
        let p = instance([-2.0, -2.0], [1.0, 2.0], [0.0, 0.0], d);
        let sol = di_escalate(&p).unwrap();
        assert!(sol.cost > last, "D = {d}: {} <= {last}", sol.cost);
        last = sol.cost;
    }
}

#[test]
fn arc_instance_escalates_to_arc() {
    let p = arc_instance();
    let touch = di_touch_solve(&p).unwrap();
    assert!(touch.min_clearance < -1e-3);
    let esc = di_escalate_with(&p, &default_strategies()).unwrap();
    let sol = &esc.solution;
    assert_eq!(sol.case, DiCase::Arc);
    assert_eq!(esc.steps.len(), 3);
    assert!((sol.cost - 0.237913).abs() < 1e-5, "{}", sol.cost);
    assert!(sol.cost > touch.cost);
    assert!(sol.min_clearance >= -1e-9);
    assert!(sol.pi.unwrap() > 0.0);
    let d = &sol.diagnostics;
    assert!(d.boundary_residual < 1e-6);
    assert!(d.control_jump < 1e-8);
    assert!(d.first_integral_drift < 1e-6);
    let report = verify_di(sol, &di_tolerances()).unwrap();
    let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
    assert!(failed.is_empty(), "{failed:?}");
    for t in sol.junction_times() {
        let e = 1e-9;
        let a = sol.control(t - e).unwrap();
        let b = sol.control(t + e).unwrap();
        assert!(dist(a, b) < 1e-6);
    }
}

#[test]
fn arc_solutions_from_both_sides() {
    let p = arc_instance();
    let upper = di_arc_solve_from(
        &p,
        ArcParameters { theta: 1.8, t1: 5.6, t2: 6.9, speed: -0.8, exit_jump: 0.2 },
    )
    .unwrap();
    let lower = di_arc_solve_from(
        &p,
        ArcParameters { theta: 4.75, t1: 6.1, t2: 6.7, speed: 0.8, exit_jump: 0.2 },
    )
    .unwrap();
    assert!((upper.cost - 0.302680).abs() < 1e-5);
    assert!((lower.cost - 0.237913).abs() < 1e-5);
    assert!(di_arc_solve(&p).unwrap().cost <= upper.cost);
}

#[test]
fn symmetric_arc_pair() {
    // Point-symmetric endpoints: the two arcs mirror across the chord.
    let p = instance([-3.0, -0.3], [3.0, 0.3], [0.0, 0.0], 2.5);
    let a = di_arc_solve_from(&p, ArcParameters { theta: 2.18, t1: 4.47, t2: 7.75, speed: -0.87, exit_jump: 0.3 })
        .unwrap();
    let b = di_arc_solve_from(&p, ArcParameters { theta: 4.30, t1: 4.47, t2: 7.75, speed: 0.87, exit_jump: 0.3 })
        .unwrap();
    assert!((a.cost - b.cost).abs() < 1e-7 * a.cost);
    assert!((a.t1.unwrap() - b.t1.unwrap()).abs() < 1e-6);
    assert!((a.t2.unwrap() - b.t2.unwrap()).abs() < 1e-6);
    let chord = 0.1f64.atan();
    assert!(angle_diff(b.theta.unwrap(), 2.0 * chord - a.theta.unwrap()) < 1e-6);
}

#[test]
fn uniform_rotation_is_an_arc_equilibrium() {
    let (d, w) = (1.5, 0.7);
    let ob = Obstacle { center: [1.0, -2.0], clearance: d };
    let arc = integrate_arc(ob, 2.0, [0.3, w, 0.0, 0.0], 3.0, 0.01).unwrap();
    for i in 0..=30 {
        let t = 2.0 + i as f64 * 0.1;
        let jet = arc.position_jet(t, 2);
        let phi = 0.3 + w * (t - 2.0);
        let r = [phi.cos(), phi.sin()];
        assert!((jet[2].re + d * w * w * r[0]).abs() < 1e-12);
        assert!((jet[2].im + d * w * w * r[1]).abs() < 1e-12);
        assert!((jet[0].re - 1.0 - d * r[0]).abs() < 1e-12);
    }
}

#[test]
fn arc_integration_rejects_bad_steps() {
    let ob = Obstacle { center: [0.0, 0.0], clearance: 1.0 };
    assert!(matches!(integrate_arc(ob, 0.0, [0.0; 4], 1.0, 0.3), Err(Error::InvalidParameter(_))));
    assert!(integrate_arc(ob, 0.0, [0.0; 4], -1.0, 0.1).is_err());
    let h = arc_step(1.0, 0.3);
    assert!((h - 0.25).abs() < 1e-15);
}

#[test]
fn obstacle_on_an_endpoint_is_rejected() {
    let bad = instance([-2.0, -2.0], [1.0, 2.0], [1.0, 2.0], 0.5);
    assert!(matches!(bad.validate(), Err(Error::InvalidParameter(_))));
    assert!(di_escalate(&bad).is_err());
    let text = r#"{"p0":[0,0],"v0":[0,0],"pf":[1,0],"t0":0,"tf":1,"obstacle":{"center":[0,0],"clearance":0.5}}"#;
    assert!(DiProblem::from_json(text).is_err());
    let missing = r#"{"p0":[0,0],"v0":[0,0],"pf":[3,0],"t0":0,"tf":1}"#;
    assert!(DiProblem::from_json(missing).unwrap_err().to_string().contains("obstacle"));
}

#[test]
fn csv_and_summary() {
    let sol = di_escalate(&arc_instance()).unwrap();
    let mut buf = Vec::new();
    write_di_csv(&sol, 11, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,px,py,vx,vy,ux,uy,segment_id,clearance");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[8] >= -1e-9));
    let summary = serde_json::to_value(DiSummary::new(&sol)).unwrap();
    assert_eq!(summary["case"], "arc");
}

#[test]
fn strategies_by_name() {
    for name in ["unconstrained", "touch", "arc"] {
        assert_eq!(strategy_by_name(name).unwrap().name(), name);
    }
    assert!(strategy_by_name("spiral").is_none());
    let only = vec![strategy_by_name("unconstrained").unwrap()];
    assert!(matches!(di_escalate_with(&DiProblem::reference(), &only), Err(Error::EscalationFailed(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn arc_samples_stay_on_circle(
        phi in 0.0f64..TAU,
        w in -0.8f64..0.8,
        a in -0.2f64..0.2,
        j in -0.2f64..0.2,
        d in 0.5f64..3.0,
    ) {
        let ob = Obstacle { center: [0.4, -0.7], clearance: d };
        let arc = integrate_arc(ob, 1.0, [phi, w, a, j], 1.0, 1e-3).unwrap();
        let i0 = arc.first_integral(1.0);
        for k in 0..=50 {
            let t = 1.0 + k as f64 * 0.02;
            let jet = arc.position_jet(t, 1);
            let rel = [jet[0].re - 0.4, jet[0].im + 0.7];
            prop_assert!((dist(rel, [0.0, 0.0]) - d).abs() < 1e-9);
            prop_assert!((rel[0] * jet[1].re + rel[1] * jet[1].im).abs() < 1e-9);
            prop_assert!((arc.first_integral(t) - i0).abs() < 1e-6 * (1.0 + i0.abs()));
        }
    }
}
