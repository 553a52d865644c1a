use flatopt::crane_solver::*;
use flatopt::optimality::Tolerances;
use flatopt::Error;

fn zero_coefficients() -> ConstrainedCoefficients {
    ConstrainedCoefficients {
        entry: [0.0; 8],
        arc: [0.0; 2],
        exit: [0.0; 8],
        refs: [0.0; 3],
        bound: 0.0,
    }
}

#[test]
fn zero_coefficients_give_zero_residual() {
    let r = junction_residual(&zero_coefficients(), 6.0, 8.0, &CraneParams::default());
    assert_eq!(r, [0.0, 0.0]);
}

#[test]
fn quartic_coefficient_alone() {
    let mut c = zero_coefficients();
    c.entry[4] = 1.0;
    c.refs = [6.0, 6.0, 0.0];
    let r = junction_residual(&c, 6.0, 8.0, &CraneParams::default());
    assert_eq!(r[0], 24.0);
}

#[test]
fn coincident_junctions_rejected() {
    let b = CraneBoundary::rest_to_rest(0.0, 5.0, 0.0, 15.0);
    let err = assemble_junction_system(7.0, 7.0, &CraneParams::default(), &b, BoundSide::Upper)
        .unwrap_err();
    assert!(matches!(err, Error::DegenerateJunctions(_)));
}

#[test]
fn default_parameters_are_valid() {
    let p = CraneParams::default();
    p.validate().unwrap();
    assert!((p.rate() - 1.0 / 4.905).abs() < 1e-15);
}

#[test]
fn rejects_bad_values() {
    let p = CraneParams {
        l: 0.0,
        ..CraneParams::default()
    };
    assert!(p.validate().is_err());
    let p = CraneParams {
        p_min: 3.0,
        p_max: 3.0,
        ..CraneParams::default()
    };
    assert!(p.validate().is_err());
    let b = CraneBoundary::rest_to_rest(0.0, 12.0, 0.0, 15.0);
    assert!(b.validate(&CraneParams::default()).is_err());
}

#[test]
fn feasible_profile_has_no_violation() {
    let v = scan_violations(|t| t.sin(), 0.0, 10.0, -2.0, 2.0, 2001);
    assert!(v.is_empty());
}

#[test]
fn exact_touch_is_feasible() {
    let v = scan_violations(|t| 2.0 - (t - 3.3).powi(2), 0.0, 10.0, -100.0, 2.0, 2001);
    assert!(v.is_empty());
}

#[test]
fn bump_is_bracketed() {
    let v = scan_violations(|t| 2.5 - (t - 3.3).powi(2), 0.0, 10.0, -100.0, 2.0, 2001);
    assert_eq!(v.len(), 1);
    let w = v[0];
    assert_eq!(w.side, BoundSide::Upper);
    assert!((w.max_excess - 0.5).abs() < 1e-12);
    assert!((w.start - (3.3 - 0.5f64.sqrt())).abs() < 1e-9);
    assert!((w.end - (3.3 + 0.5f64.sqrt())).abs() < 1e-9);
}

#[test]
fn lower_bound_violation() {
    let v = scan_violations(|t| (t - 5.0).powi(2) - 1.0, 0.0, 10.0, -0.5, 100.0, 2001);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].side, BoundSide::Lower);
    assert!((v[0].max_excess - 0.5).abs() < 1e-12);
}

fn swing(theta_deg: f64, p_max: f64) -> (CraneParams, CraneBoundary) {
    let params = CraneParams { p_max, ..CraneParams::default() };
    let b = CraneBoundary { theta0: theta_deg.to_radians(), ..CraneBoundary::rest_to_rest(0.0, 5.0, 0.0, 15.0) };
    (params, b)
}

#[test]
fn homogeneous_problem_has_zero_solution() {
    let params = CraneParams::default();
    let sol = solve_unconstrained(&params, &CraneBoundary::rest_to_rest(0.0, 0.0, 0.0, 15.0)).unwrap();
    assert!(sol.constants().iter().flatten().all(|c| *c == 0.0));
    assert_eq!(sol.cost(), 0.0);
}

#[test]
fn unconstrained_rest_to_rest_meets_boundary() {
    let params = CraneParams::default();
    let b = CraneBoundary::rest_to_rest(0.0, 5.0, 0.0, 15.0);
    let sol = solve_unconstrained(&params, &b).unwrap();
    assert!(sol.diagnostics.boundary_residual < 1e-8);
    for (t, y) in [(0.0, 0.0), (15.0, 5.0)] {
        assert!((sol.y(t, 0).unwrap() - y).abs() < 1e-8);
        for k in 1..4 {
            assert!(sol.y(t, k).unwrap().abs() < 1e-8);
        }
    }
    // Antisymmetry of the rest-to-rest transfer about the midpoint.
    for &t in &[1.0, 4.0, 6.5] {
        let a = sol.y(t, 0).unwrap() - 2.5;
        let b = sol.y(15.0 - t, 0).unwrap() - 2.5;
        assert!((a + b).abs() < 1e-8, "{t}");
    }
}

#[test]
fn swing_instance_stays_inside_the_bound() {
    // Independently cross-checked: the printed parameters peak at 6.5566 m.
    let (params, b) = swing(-5.0, 10.0);
    let sol = solve_unconstrained(&params, &b).unwrap();
    assert!(constraint_violation(&sol, &params).unwrap().is_empty());
    let excess = max_constraint_excess(&sol, &params);
    assert!((excess + 10.0 - 6.5566).abs() < 1e-3, "{excess}");
    let constrained = solve_constrained(&params, &b).unwrap();
    assert!(constrained.junctions.is_none());
    assert_eq!(constrained.constants(), sol.constants());
}

#[test]
fn larger_swing_activates_the_bound() {
    let (params, b) = swing(-10.0, 10.0);
    let free = solve_unconstrained(&params, &b).unwrap();
    let v = constraint_violation(&free, &params).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].side, BoundSide::Upper);
    assert!(v[0].max_excess > 0.0 && v[0].start < v[0].t_peak && v[0].t_peak < v[0].end);

    let sol = solve_constrained(&params, &b).unwrap();
    let (t1, t2) = sol.junctions.unwrap();
    assert!((t1 - 6.747427).abs() < 1e-5 && (t2 - 8.573698).abs() < 1e-5, "{t1} {t2}");
    assert!(max_constraint_excess(&sol, &params) <= 1e-6);
    let d = &sol.diagnostics;
    assert!(d.state_continuity < 1e-8);
    assert!(d.snap_continuity < 1e-6);
    assert!(d.tangency_residual < 1e-10);
    assert!(d.junction_residual < 1e-8);
    for i in 1..100 {
        let t = t1 + (t2 - t1) * i as f64 / 100.0;
        assert!((sol.position(t).unwrap() - params.p_max).abs() < 1e-9);
    }
}

#[test]
fn junction_system_back_substitution() {
    let (params, b) = swing(-10.0, 10.0);
    let sol = solve_constrained(&params, &b).unwrap();
    let (t1, t2) = sol.junctions.unwrap();
    let js = assemble_junction_system(t1, t2, &params, &b, BoundSide::Upper).unwrap();
    assert_eq!(js.system.matrix.rows(), 18);
    let (coef, _) = js.solve().unwrap();
    let mut x = coef.entry.to_vec();
    x.extend_from_slice(&coef.arc);
    x.extend_from_slice(&coef.exit);
    let bnorm = js.system.rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(js.system.residual_inf(&x) < 1e-10 * bnorm);
    let r = junction_residual(&coef, t1, t2, &params);
    assert!(r[0].abs() < 1e-8 && r[1].abs() < 1e-8);
}

#[test]
fn middle_reference_shift_leaves_trajectory_unchanged() {
    let (params, b) = swing(-10.0, 10.0);
    let sol = solve_constrained(&params, &b).unwrap();
    let (t1, t2) = sol.junctions.unwrap();
    let base = assemble_junction_system(t1, t2, &params, &b, BoundSide::Upper).unwrap();
    let mut refs = base.refs;
    refs[1] += 0.37 * (t2 - t1);
    let moved = assemble_junction_system_with_refs(t1, t2, &params, &b, BoundSide::Upper, refs).unwrap();
    let a = base.solve().unwrap().0.segments(&params, 0.0, t1, t2, 15.0).unwrap();
    let c = moved.solve().unwrap().0.segments(&params, 0.0, t1, t2, 15.0).unwrap();
    for (sa, sc) in a.iter().zip(&c) {
        for i in 0..=20 {
            let t = sa.t_start + (sa.t_end - sa.t_start) * i as f64 / 20.0;
            for k in 0..=4 {
                let (u, v) = (sa.derivative(t, k), sc.derivative(t, k));
                assert!((u - v).abs() < 1e-9 * (1.0 + u.abs()), "order {k} at {t}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn tightening_the_bound_shortens_the_arc() {
    // Computed behaviour on the activating instance; see the project notes.
    let mut durations = Vec::new();
    for p_max in [10.0, 9.0, 8.0] {
        let (params, b) = swing(-10.0, p_max);
        let (t1, t2) = solve_constrained(&params, &b).unwrap().junctions.unwrap();
        durations.push(t2 - t1);
    }
    assert!(durations[0] > durations[1] && durations[1] > durations[2], "{durations:?}");
}

#[test]
fn constrained_solution_certifies() {
    for p_max in [10.0, 8.0] {
        let (params, b) = swing(-10.0, p_max);
        let sol = solve_constrained(&params, &b).unwrap();
        let report = verify_crane(&sol, &crane_tolerances()).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }
    let (params, b) = swing(0.0, 10.0);
    let sol = solve_constrained(&params, &b).unwrap();
    assert!(verify_crane(&sol, &crane_tolerances()).unwrap().all_pass());
}

#[test]
fn tight_tolerance_fails_certificate() {
    let (params, b) = swing(-10.0, 10.0);
    let sol = solve_constrained(&params, &b).unwrap();
    let mut tol: Tolerances = crane_tolerances();
    tol.set("el_exact", 1e-30).unwrap();
    let report = verify_crane(&sol, &tol).unwrap();
    assert!(!report.all_pass());
}

#[test]
fn lower_bound_activates_on_mirrored_transfer() {
    let params = CraneParams { p_min: -10.0, ..CraneParams::default() };
    let b = CraneBoundary { theta0: 10f64.to_radians(), ..CraneBoundary::rest_to_rest(0.0, -5.0, 0.0, 15.0) };
    let sol = solve_constrained(&params, &b).unwrap();
    assert_eq!(sol.active_bound, Some(BoundSide::Lower));
    let (t1, t2) = sol.junctions.unwrap();
    assert!((t1 - 6.747427).abs() < 1e-5 && (t2 - 8.573698).abs() < 1e-5);
}

#[test]
fn config_round_trip_and_errors() {
    let (params, b) = swing(-5.0, 10.0);
    let cfg = CraneConfig::from_problem(&params, &b);
    let text = serde_json::to_string(&cfg).unwrap();
    assert!(text.contains("\"M\":200"));
    let back = CraneConfig::from_json(&text).unwrap();
    let (p2, b2) = back.problem().unwrap();
    assert_eq!(p2, params);
    assert!((b2.theta0 - b.theta0).abs() < 1e-15);

    let missing = text.replace(",\"p_max\":10.0", "");
    let err = CraneConfig::from_json(&missing).unwrap_err();
    assert!(err.to_string().contains("p_max"), "{err}");
    let extra = text.replace("{", "{\"beta\":1,");
    assert!(CraneConfig::from_json(&extra).is_err());
    let bad = CraneConfig { l: -1.0, ..cfg };
    assert!(matches!(bad.problem(), Err(Error::InvalidParameter(_))));
    let outside = CraneConfig { pf: 12.0, ..cfg };
    assert!(outside.problem().is_err());
}

#[test]
fn csv_has_expected_columns() {
    let (params, b) = swing(-10.0, 10.0);
    let sol = solve_constrained(&params, &b).unwrap();
    let mut buf = Vec::new();
    write_crane_csv(&sol, 31, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,y,dy,d2y,d3y,d4y,p_ref,theta_ref,F,segment_id");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 31);
    let segs: Vec<f64> = rows.iter().map(|r| r[9]).collect();
    assert_eq!(segs.first(), Some(&0.0));
    assert_eq!(segs.last(), Some(&2.0));
    assert!(segs.contains(&1.0));
    let summary = serde_json::to_value(CraneSummary::new(&sol)).unwrap();
    assert_eq!(summary["case"], "constrained");
}
