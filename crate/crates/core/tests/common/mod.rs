#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use csa::symmetry::{parse_generators, Generator};
use csa::{DifferentialSystem, ScalarODE};

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    let p = fixture_path(rel);
    fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn system(rel: &str) -> DifferentialSystem {
    DifferentialSystem::parse(&read_fixture(rel)).unwrap()
}

pub fn base(name: &str) -> ScalarODE {
    ScalarODE::from_system(&system(&format!("base/{name}.ode"))).unwrap()
}

pub fn generators(rel: &str, sys: Option<&DifferentialSystem>) -> Vec<Generator> {
    parse_generators(&read_fixture(rel), sys.map(|s| &s.ctx)).unwrap()
}

/// Rational scalar equations in `(s, u, u')` used for round trips.
pub const CORPUS: [&str; 10] = [
    "s^-5*u^2",
    "-5*u'/s - u^2",
    "0",
    "u^3 - s*u'",
    "u'^2/u",
    "(u + 1)/(s^2 + 1)",
    "s*u*u' + 2",
    "u'/s + u/s^2",
    "3/2*u^2 - 1/4*u'^3",
    "u^2*u' - s^3",
];
