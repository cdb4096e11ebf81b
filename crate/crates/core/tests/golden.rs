//! Frozen reference numbers. Each is reproduced by the reference integrator in
//! `common` and then compared with the library.

mod common;

use num_rational::BigRational;
use soliton_core::asymptotics::{end_separation, estimate_constant};
use soliton_core::funnel::{crossing_radius, Funnel};
use soliton_core::profile_ode::{graph_view, solve_bowl, solve_wing, SolverConfig};
use soliton_core::subsolution::{
    derive_polynomial, int, nonpositive_on_ray, paper_coefficients, rat, tau_eval, taylor_shift,
    to_f64, Basis, SignVerdict,
};
use soliton_core::sweep::{sweep_translate, ObstacleProfile};
use soliton_core::Error;

const BOWL2_PHI10: f64 = 9.897879917452263;
const BOWL2_V10: f64 = 47.055389726043245;
const WING_2_1: (f64, f64) = (1.846498151689591, 0.8310357461487698);
const WING_3_2: (f64, f64) = (2.8185603945572817, 0.8091913609945229);
const C_PLUS_2_1: f64 = 0.6062774927290704;
const C_MINUS_2_1: f64 = -4.782286182033319;
const WALL_LO_2_2_1: f64 = -6.413712710079183;
const CROSSING_2_1_0_2: f64 = 1.024415253278;
const WALL_MIN_2_1_1: f64 = -6.038197427067235;
const TAU_2_0_1: f64 = 0.15342640972002736;
const CHORD_GAP: f64 = 0.37810966353260733;
const QUARTIC_ROOT: f64 = 0.6589829632931832;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn bowl_slope_at_ten() {
    let [v, phi] = common::bowl(2, 10.0);
    assert!(
        close(phi, BOWL2_PHI10, 1e-10) && close(v, BOWL2_V10, 1e-10),
        "{v} {phi}"
    );
    assert!(phi > 10.0 - 0.1 - 0.01 && phi < 10.0);

    let g = graph_view(
        &solve_bowl(2, &SolverConfig::default().with_r_max(12.0)).unwrap(),
        0.0,
    )
    .unwrap();
    assert!(close(g.phi_at(10.0).unwrap(), BOWL2_PHI10, 1e-7));
    assert!(close(g.v_at(10.0).unwrap(), BOWL2_V10, 1e-7));
}

#[test]
fn wing_turning_points() {
    for (n, r, want) in [(2, 1.0, WING_2_1), (3, 2.0, WING_3_2)] {
        let (rs, d) = common::turning(n, r);
        assert!(
            close(rs, want.0, 1e-10) && close(d, want.1, 1e-10),
            "oracle {rs} {d}"
        );
        let w = solve_wing(n, r, &SolverConfig::default().with_r_max(10.0)).unwrap();
        assert!(close(w.r_star, want.0, 1e-7), "{}", w.r_star);
        assert!(close(w.depth, want.1, 1e-7), "{}", w.depth);
    }
}

#[test]
fn end_constants_of_the_unit_wing() {
    let rs = common::log_points(50.0, 500.0, 200);
    let (cp, _) = common::constant_fit(2, &rs, &common::wing_heights_at(2, 1.0, 1.0, &rs));
    let (cm, _) = common::constant_fit(2, &rs, &common::wing_heights_at(2, 1.0, -1.0, &rs));
    assert!(
        close(cp, C_PLUS_2_1, 1e-10) && close(cm, C_MINUS_2_1, 1e-10),
        "{cp} {cm}"
    );

    let w = solve_wing(2, 1.0, &SolverConfig::default().with_r_max(600.0)).unwrap();
    let sep = end_separation(&w, (50.0, 500.0)).unwrap();
    assert!(close(sep.c_plus.c, C_PLUS_2_1, 1e-7), "{}", sep.c_plus.c);
    assert!(close(sep.c_minus.c, C_MINUS_2_1, 1e-7), "{}", sep.c_minus.c);
    let upper = estimate_constant(&graph_view(&w.upper, 25.0).unwrap(), (50.0, 500.0)).unwrap();
    assert_eq!(upper.c, sep.c_plus.c);
}

#[test]
fn funnel_wall_values() {
    assert!(close(
        common::lower_wall(2, 2.0, 1.0, 2.0),
        WALL_LO_2_2_1,
        1e-14
    ));
    let f = Funnel::new(2, 2.0, 1.0).unwrap();
    let (lo, hi) = f.walls(2.0).unwrap();
    assert!(close(lo, WALL_LO_2_2_1, 1e-14));
    assert_eq!(hi, 3.0);
}

#[test]
fn wall_crossing_radius() {
    let gap = |r| common::lower_wall(2, 0.0, 1.0, r) - common::lower_wall(2, 2.0, 1.0, r);
    let oracle = common::bisect(gap, 0.0, 2.0, 1e-12);
    assert!(close(oracle, CROSSING_2_1_0_2, 1e-10));
    assert!(close(
        crossing_radius(2, 1.0, 0.0, 2.0).unwrap(),
        CROSSING_2_1_0_2,
        1e-9
    ));
}

#[test]
fn lowest_point_of_the_lower_wall() {
    let r = common::golden_min(|r| common::lower_wall(2, 1.0, 1.0, r), 1.0, 5.0, 1e-10);
    let oracle = common::lower_wall(2, 1.0, 1.0, r);
    assert!(close(oracle, WALL_MIN_2_1_1, 1e-12));
    let (at, value) = Funnel::new(2, 1.0, 1.0).unwrap().lower_wall_minimum();
    assert!(close(value, WALL_MIN_2_1_1, 1e-12));
    assert!(at > 1.0 && at < 5.0);
}

#[test]
fn tau_at_one() {
    assert!(close(0.5 - 2f64.ln() / 2.0, TAU_2_0_1, 1e-15));
    assert!(close(tau_eval(2, &int(0), 1.0), TAU_2_0_1, 1e-15));
}

#[test]
fn centered_table_for_n5_r1() {
    let want: Vec<BigRational> = [-28, -76, -45, -152, -23, -12, -7, 0, -1]
        .iter()
        .map(|&k| int(k))
        .collect();
    assert_eq!(
        paper_coefficients(5, &int(1), Basis::Centered).unwrap(),
        want
    );
    let centered = taylor_shift(&derive_polynomial(5, &int(1)).unwrap(), &int(1));
    assert_eq!(centered.coeffs(), &want[..]);
}

#[test]
fn subcritical_root_bracket() {
    let root = common::bisect(|s| 3.0 * s.powi(4) + s * s - 1.0, 0.0, 1.0, 1e-15);
    assert!(close(root, QUARTIC_ROOT, 1e-12), "{root}");
    let v = nonpositive_on_ray(&derive_polynomial(2, &int(0)).unwrap(), &int(0));
    assert!(matches!(v, SignVerdict::SignChange { .. }), "{v:?}");
    let (lo, hi) = v.bracket().unwrap();
    assert!(&hi - &lo <= rat(1, 1_000_000_000));
    assert!(to_f64(&lo) <= QUARTIC_ROOT && QUARTIC_ROOT <= to_f64(&hi));
}

#[test]
fn segment_across_the_bowl_is_rejected() {
    let height = common::bowl(2, 3.0)[0] - 1.0;
    assert!(common::bowl(2, 2.0)[0] < height);
    let ob = ObstacleProfile::new(vec![(2.0, height), (4.0, height)]).unwrap();
    assert!(matches!(
        sweep_translate(&ob, 2, -1, 1e-10),
        Err(Error::Hypothesis(_))
    ));
}

#[test]
fn chord_under_the_bowl() {
    let (a, b) = (common::bowl(2, 2.0)[0] - 1.0, common::bowl(2, 4.0)[0] - 1.0);
    let chord = |r: f64| a + (b - a) * (r - 2.0) / 2.0;
    let gap = |r: f64| common::bowl(2, r)[0] - chord(r);
    let at = common::golden_min(gap, 2.0, 4.0, 1e-9);
    let oracle = gap(at);
    assert!(close(oracle, CHORD_GAP, 1e-10), "{oracle}");
    let ob = ObstacleProfile::new(vec![(2.0, a), (4.0, b)]).unwrap();
    let res = sweep_translate(&ob, 2, -1, 1e-10).unwrap();
    assert!(
        (res.critical_value.unwrap() - CHORD_GAP).abs() < 1e-6,
        "{res:?}"
    );
    let (r, _) = res.touching_point.unwrap();
    assert!((r - at).abs() < 1e-3);
}
