mod common;

use std::collections::BTreeMap;

use common::{base, system};
use csa::numeric::{
    constraint_drift, correspondence_report, integrate_base_complex, integrate_system, matched_initial,
    observed_order, Grid,
};
use csa::system::{ScalarODE, SplitVariant};
use csa::split;
use num_complex::Complex64;

fn names(sys: &csa::DifferentialSystem) -> Vec<String> {
    sys.ctx.deps().iter().map(|d| d.name().to_string()).collect()
}

#[test]
fn emden_fowler_split_tracks_the_complex_solution() {
    let start = std::time::Instant::now();
    let ode = base("emden_fowler");
    let sys = split(&ode, SplitVariant::Ode2).unwrap().system;
    let grid = Grid::span(1.0, 2.0, 1e-3).unwrap();
    let (u0, du0) = (Complex64::new(1.0, 0.1), Complex64::new(0.0, 0.0));
    let bt = integrate_base_complex(&ode, u0, du0, &grid).unwrap();
    let init = matched_initial(&sys, SplitVariant::Ode2, u0, du0).unwrap();
    let st = integrate_system(&sys, &init, &grid).unwrap();
    let r = correspondence_report(&bt, &st, SplitVariant::Ode2, &names(&sys), None).unwrap();
    assert!(r.max_deviation < 1e-8, "{r:?}");
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn observed_order_is_fourth() {
    let ode = base("emden_fowler");
    let sys = split(&ode, SplitVariant::Ode2).unwrap().system;
    let init = matched_initial(&sys, SplitVariant::Ode2, Complex64::new(1.0, 0.1), Complex64::new(0.0, 0.0)).unwrap();
    let order = observed_order(
        |h| Ok(integrate_system(&sys, &init, &Grid::span(1.0, 2.0, h)?)?.final_value("p").unwrap()),
        0.1,
    )
    .unwrap();
    assert!(order >= 3.5, "{order}");
}

/// u'' = -u has u = u0 cos(s - 1) + u0' sin(s - 1) for complex data; every
/// component of the four-equation split follows the same law.
#[test]
fn harmonic_split_matches_closed_form() {
    let ode = ScalarODE::parse("s", "u", "-u").unwrap();
    let grid = Grid::span(1.0, 3.0, 1e-2).unwrap();
    let sys = split(&ode, SplitVariant::Ode4).unwrap().system;
    let data = [(0.3, 1.0), (-0.7, 0.2), (1.1, -0.4), (0.5, 0.9)];
    let mut init = BTreeMap::new();
    for (d, (a, b)) in ["w", "x", "y", "z"].iter().zip(data) {
        init.insert(d.to_string(), a);
        init.insert(format!("{d}'"), b);
    }
    let t = integrate_system(&sys, &init, &grid).unwrap();
    for (d, (a, b)) in ["w", "x", "y", "z"].iter().zip(data) {
        let col = t.column(d).unwrap();
        for (k, v) in col.iter().enumerate() {
            let s = grid.point(k) - 1.0;
            let exact = a * s.cos() + b * s.sin();
            assert!((v - exact).abs() < 1e-8, "{d} at {s}");
        }
    }
}

#[test]
fn four_equation_split_on_the_real_slice() {
    let ode = base("emden_fowler");
    let sys = split(&ode, SplitVariant::Ode4).unwrap().system;
    let grid = Grid::span(1.0, 2.0, 1e-3).unwrap();
    let (u0, du0) = (Complex64::new(0.4, -0.3), Complex64::new(0.2, 0.1));
    let bt = integrate_base_complex(&ode, u0, du0, &grid).unwrap();
    let init = matched_initial(&sys, SplitVariant::Ode4, u0, du0).unwrap();
    let st = integrate_system(&sys, &init, &grid).unwrap();
    let r = correspondence_report(&bt, &st, SplitVariant::Ode4, &names(&sys), None).unwrap();
    assert!(r.max_deviation < 1e-8, "{r:?}");
}

/// The printed three-equation system does not preserve its own cone.
#[test]
fn printed_cone_drifts() {
    let sys = system("golden/quadratic_source_ode3_printed.sys");
    let mut init = BTreeMap::new();
    for (k, v) in [("x", 0.6), ("y", 0.8), ("z", 1.0), ("x'", 0.0), ("y'", 0.0), ("z'", 0.0)] {
        init.insert(k.to_string(), v);
    }
    let t = integrate_system(&sys, &init, &Grid::span(1.0, 1.5, 1e-3).unwrap()).unwrap();
    let drift = constraint_drift(&t, &sys.constraints).unwrap();
    assert!((drift - 0.112415).abs() < 1e-5, "{drift}");
}

#[test]
fn pde_variants_are_refused() {
    let ode = base("free_particle");
    let sys = split(&ode, SplitVariant::Pde2).unwrap().system;
    let grid = Grid::span(0.0, 1.0, 0.1).unwrap();
    assert!(integrate_system(&sys, &BTreeMap::new(), &grid).is_err());
    let bt = integrate_base_complex(&ode, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), &grid).unwrap();
    assert!(correspondence_report(&bt, &bt, SplitVariant::Pde2, &[], None).is_err());
}

#[test]
fn bad_grids_are_rejected() {
    assert!(Grid::span(1.0, 1.0, 0.1).is_err());
    assert!(Grid::span(0.0, 1.0, 0.0).is_err());
    assert!(Grid::new(0.0, f64::NAN, 3).is_err());
    // backwards is allowed
    let g = Grid::span(1.0, 0.0, 0.25).unwrap();
    assert_eq!((g.count, g.step, g.end()), (4, -0.25, 0.0));
}

#[test]
fn pole_on_the_grid_is_reported() {
    let ode = ScalarODE::parse("s", "u", "1/s").unwrap();
    let grid = Grid::span(-1.0, 1.0, 0.5).unwrap();
    assert!(integrate_base_complex(&ode, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), &grid).is_err());
}
