use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;

use flatopt::crane_solver::{solve_unconstrained, CraneBoundary, CraneParams};
use flatopt::numerics::CentralStencil;
use flatopt::flat_model::*;
use flatopt::Error;

#[test]
fn csv_layout() {
    let seg = AnalyticSegment::new(0.0, 1.0, 0.0, vec![Term::new(Basis::Monomial(2), 1.0)]).unwrap();
    let traj =
        PiecewiseTrajectory::new(IntegratorChainSpec::single(1, "y").unwrap(), vec![vec![seg.into()]])
            .unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &[0.5], 1, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text, "t,chain,order,value\n0.5,y,0,0.25\n0.5,y,1,1\n");
    let v = segments_json(&traj);
    assert_eq!(v["chains"][0]["segments"][0]["terms"][0]["kind"], "monomial");
}

#[test]
fn sample_grid_endpoints() {
    let ts = sample_times(0.0, 15.0, 7);
    assert_eq!(ts.len(), 7);
    assert_eq!(ts[0], 0.0);
    assert_eq!(ts[6], 15.0);
}

#[test]
fn unicycle_straight_and_axis_aligned() {
    let u = unicycle_from_flat([0.0, 0.0], [1.0, 0.0], [0.0, 0.0]).unwrap();
    assert_eq!((u.theta, u.u1, u.u2), (0.0, 1.0, 0.0));
    let u = unicycle_from_flat([0.0, 0.0], [0.0, 2.0], [0.0, 0.0]).unwrap();
    assert!((u.theta - FRAC_PI_2).abs() < 1e-15);
    assert_eq!((u.u1, u.u2), (2.0, 0.0));
}

#[test]
fn unicycle_on_unit_circle() {
    let u = unicycle_from_flat([1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]).unwrap();
    assert!((u.theta - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(u.u1, 1.0);
    assert_eq!(u.u2, 1.0);
}

#[test]
fn unicycle_guard() {
    assert!(matches!(
        unicycle_from_flat([0.0, 0.0], [0.0, 0.0], [1.0, 0.0]),
        Err(Error::FlatnessSingularity(_))
    ));
    assert!(!UnicycleMap.in_domain(&[1.0, 0.0, 2.0, 0.0]));
}

#[test]
fn crane_rest_state() {
    let c = crane_from_flat(5.0, 0.0, 0.0, 0.0, &CraneParams::default());
    assert_eq!((c.p, c.theta, c.force), (5.0, 0.0, 0.0));
}

#[test]
fn crane_position_from_swing() {
    let p = CraneParams::default();
    let c = crane_from_flat(0.0, -p.g * 0.1, 0.0, 0.0, &p);
    assert!((c.p + 0.5).abs() < 1e-15);
    assert!((c.theta - 0.1).abs() < 1e-15);
}

#[test]
fn crane_force_from_acceleration() {
    let c = crane_from_flat(0.0, 1.0, 0.0, 0.0, &CraneParams::default());
    assert!((c.force - 250.0).abs() < 1e-12);
}

#[test]
fn crane_boundary_values() {
    let p = CraneParams::default();
    let b = CraneBoundary {
        theta0: (-5.0f64).to_radians(),
        ..CraneBoundary::rest_to_rest(0.0, 5.0, 0.0, 15.0)
    };
    let fb = crane_boundary_to_flat(&b, &p);
    assert_eq!(fb.terminal, [5.0, 0.0, 0.0, 0.0]);
    assert!((fb.initial[0] + 0.436332).abs() < 1e-6);
    assert!((fb.initial[2] - 0.856084).abs() < 1e-6);
    assert_eq!(fb.initial[1], 0.0);
    assert_eq!(fb.initial[3], 0.0);
    let zero = crane_boundary_to_flat(&CraneBoundary::rest_to_rest(0.0, 0.0, 0.0, 1.0), &p);
    assert_eq!(zero.initial, [0.0; 4]);
    assert_eq!(zero.terminal, [0.0; 4]);
}

#[test]
fn crane_map_round_trip() {
    let map = CraneMap {
        params: CraneParams::default(),
    };
    let x = [1.2, -0.3, 0.05, 0.02];
    let s = map.flat_state(&x, &[]);
    let back = map.state_from_flat(&s).unwrap();
    for (a, b) in back.iter().zip(&x) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn unicycle_map_round_trip() {
    let x = [0.4, -1.0, 2.1];
    let s = UnicycleMap.flat_state(&x, &[1.5, 0.2]);
    let back = UnicycleMap.state_from_flat(&s).unwrap();
    for (a, b) in back.iter().zip(&x) {
        assert!((a - b).abs() < 1e-14);
    }
}

fn seg(terms: Vec<Term>) -> AnalyticSegment {
    AnalyticSegment::new(0.0, 10.0, 0.0, terms).unwrap()
}

#[test]
fn monomial_power_rule() {
    let s = seg(vec![Term::new(Basis::Monomial(2), 1.0)]);
    assert_eq!(s.derivative(3.0, 1), 6.0);
    assert_eq!(s.derivative(3.0, 2), 2.0);
    assert_eq!(s.derivative(3.0, 3), 0.0);
}

#[test]
fn exponential_at_origin() {
    let ag = 0.5 * 9.81;
    let s = AnalyticSegment::new(0.0, 15.0, 4.0, vec![Term::new(Basis::Exp(1.0 / ag), 1.0)]).unwrap();
    assert_eq!(s.derivative(4.0, 0), 1.0);
    assert!((s.derivative(4.0, 3) - ag.powi(-3)).abs() < 1e-15);
}

#[test]
fn trig_derivative_cycle() {
    let w = 1.4;
    let s = seg(vec![Term::new(Basis::Sin(w), 1.0)]);
    let t: f64 = 0.9;
    let expect = [
        (w * t).sin(),
        w * (w * t).cos(),
        -w * w * (w * t).sin(),
        -w.powi(3) * (w * t).cos(),
        w.powi(4) * (w * t).sin(),
    ];
    for (k, e) in expect.iter().enumerate() {
        assert!((s.derivative(t, k) - e).abs() < 1e-14);
    }
}

#[test]
fn rejects_empty_interval() {
    assert!(AnalyticSegment::new(1.0, 1.0, 0.0, vec![]).is_err());
}

#[test]
fn reparametrization_keeps_values() {
    let s = AnalyticSegment::new(
        0.0,
        5.0,
        1.0,
        vec![
            Term::new(Basis::Monomial(5), 0.01),
            Term::new(Basis::Monomial(2), -0.3),
            Term::new(Basis::Exp(0.2), 1.5),
            Term::new(Basis::Cos(1.4), 0.7),
            Term::new(Basis::Sin(1.4), -0.2),
        ],
    )
    .unwrap();
    let r = s.reparametrize(3.7);
    for k in 0..=MAX_ORDER {
        for &t in &[0.0, 1.3, 2.5, 4.9] {
            let a = s.derivative(t, k);
            let b = r.derivative(t, k);
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "order {k} t {t}");
        }
    }
}

#[test]
fn term_json_shape() {
    let t = Term::new(Basis::Monomial(3), 2.5);
    let v = serde_json::to_value(t).unwrap();
    assert_eq!(v["kind"], "monomial");
    assert_eq!(v["parameter"], 3);
    assert_eq!(v["coefficient"], 2.5);
    let back: Term = serde_json::from_value(v).unwrap();
    assert_eq!(back, t);
}

fn line(t0: f64, t1: f64, slope: f64, offset: f64) -> Segment {
    AnalyticSegment::new(
        t0,
        t1,
        0.0,
        vec![
            Term::new(Basis::Monomial(0), offset),
            Term::new(Basis::Monomial(1), slope),
        ],
    )
    .unwrap()
    .into()
}

#[test]
fn left_and_right_limits() {
    let spec = IntegratorChainSpec::single(1, "y").unwrap();
    let traj =
        PiecewiseTrajectory::new(spec, vec![vec![line(0.0, 1.0, 1.0, 0.0), line(1.0, 2.0, 3.0, -2.0)]])
            .unwrap();
    assert_eq!(traj.junction_times(), &[1.0]);
    assert_eq!(traj.eval_chain_side(0, 1.0, 1, Side::Left).unwrap(), 1.0);
    assert_eq!(traj.eval_chain_side(0, 1.0, 1, Side::Right).unwrap(), 3.0);
    assert_eq!(traj.eval_chain(0, 1.5, 0).unwrap(), 2.5);
}

#[test]
fn rejects_state_jump() {
    let spec = IntegratorChainSpec::single(1, "y").unwrap();
    let err = PiecewiseTrajectory::new(
        spec,
        vec![vec![line(0.0, 1.0, 1.0, 0.0), line(1.0, 2.0, 1.0, 1e-3)]],
    )
    .unwrap_err();
    assert!(matches!(err, Error::Discontinuous { order: 0, .. }));
}

#[test]
fn rejects_gap() {
    let spec = IntegratorChainSpec::single(1, "y").unwrap();
    assert!(PiecewiseTrajectory::new(
        spec,
        vec![vec![line(0.0, 1.0, 1.0, 0.0), line(1.5, 2.0, 1.0, 0.0)]],
    )
    .is_err());
}

#[test]
fn horizon_and_order_errors() {
    let spec = IntegratorChainSpec::single(2, "y").unwrap();
    let traj = PiecewiseTrajectory::new(spec, vec![vec![line(0.0, 1.0, 1.0, 0.0)]]).unwrap();
    assert!(matches!(traj.eval(1.5, 0), Err(Error::OutsideHorizon { .. })));
    assert!(matches!(traj.eval(0.5, 9), Err(Error::OrderTooHigh { .. })));
}

#[test]
fn chain_spec_invariants() {
    assert!(IntegratorChainSpec::new(vec![2, 0], vec!["a".into(), "b".into()]).is_err());
    let s = IntegratorChainSpec::new(vec![2, 2], vec!["x".into(), "y".into()]).unwrap();
    assert_eq!(s.state_dim(), 4);
    assert_eq!(s.control_dim(), 2);
}

#[test]
fn crane_segment_high_orders_match_differences() {
    let params = CraneParams::default();
    let sol = solve_unconstrained(&params, &CraneBoundary::rest_to_rest(0.0, 5.0, 0.0, 15.0)).unwrap();
    let seg = sol.segments()[0].clone();
    let h = 0.05;
    for order in 5..=8 {
        let st = CentralStencil::new(order - 4);
        for &t in &[2.0, 7.5, 12.0] {
            let exact = seg.derivative(t, order);
            let fd = st.apply(|s| seg.derivative(s, 4), t, h);
            let scale = (0..=8).map(|k| seg.derivative(t, k).abs()).fold(0.0, f64::max);
            assert!((exact - fd).abs() < 1e-6 * scale, "order {order} at {t}: {exact} vs {fd}");
        }
    }
}

#[test]
fn crane_map_consistent_with_force_formula() {
    let params = CraneParams::default();
    let (y, d2y, d3y, d4y) = (0.3, 0.2, -0.1, 0.05);
    let o = crane_from_flat(y, d2y, d3y, d4y, &params);
    let g = params.g;
    assert!((o.theta + d2y / g).abs() < 1e-15);
    assert!((o.p - (y + params.l / g * d2y)).abs() < 1e-15);
    let mm = params.big_m + params.m;
    let f = mm * (d2y + params.l / g * d4y) + params.m * params.l * (-d4y / g + (d2y / g) * (d3y / g).powi(2));
    assert!((crane_force(d2y, d3y, d4y, &params) - f).abs() < 1e-12);
}

#[test]
fn trajectory_state_and_control_layout() {
    let seg = AnalyticSegment::new(0.0, 2.0, 0.0, vec![Term::new(Basis::Monomial(3), 1.0)]).unwrap();
    let spec = IntegratorChainSpec::new(vec![2, 1], vec!["a".into(), "b".into()]).unwrap();
    let other = AnalyticSegment::new(0.0, 2.0, 0.0, vec![Term::new(Basis::Sin(1.0), 1.0)]).unwrap();
    let traj = PiecewiseTrajectory::new(spec, vec![vec![seg.into()], vec![other.into()]]).unwrap();
    let x = traj.state(1.0, Side::Left).unwrap();
    assert_eq!(x.len(), 3);
    assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 3.0).abs() < 1e-15);
    assert!((x[2] - 1f64.sin()).abs() < 1e-15);
    let u = traj.control(1.0, Side::Left).unwrap();
    assert!((u[0] - 6.0).abs() < 1e-15 && (u[1] - 1f64.cos()).abs() < 1e-15);
}

proptest! {
    #[test]
    fn reparametrization_invariance(
        c in prop::collection::vec(-2.0f64..2.0, 6),
        shift in -3.0f64..3.0,
        t in 0.0f64..4.0,
        order in 0usize..=8,
    ) {
        let terms = vec![
            Term::new(Basis::Monomial(0), c[0]),
            Term::new(Basis::Monomial(2), c[1]),
            Term::new(Basis::Monomial(3), c[2]),
            Term::new(Basis::Exp(0.7), c[3]),
            Term::new(Basis::Cos(1.3), c[4]),
            Term::new(Basis::Sin(1.3), c[5]),
        ];
        let seg = AnalyticSegment::new(0.0, 4.0, 1.0, terms).unwrap();
        let moved = seg.reparametrize(1.0 + shift);
        let a = seg.derivative(t, order);
        let b = moved.derivative(t, order);
        let scale = 1.0 + a.abs() + 10.0 * c.iter().map(|v| v.abs()).sum::<f64>();
        prop_assert!((a - b).abs() < 1e-9 * scale, "{a} vs {b}");
    }

    #[test]
    fn crane_flat_state_round_trip(
        x in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let params = CraneParams::default();
        let x = [x[0] * 5.0, x[1], x[2] * 0.3, x[3] * 0.3];
        let s = crane_flat_from_state(x, &params);
        let back = crane_state_from_flat(s, &params);
        for i in 0..4 {
            prop_assert!((back[i] - x[i]).abs() < 1e-12);
        }
    }
}
