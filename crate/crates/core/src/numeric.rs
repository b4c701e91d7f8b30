//! Fixed-step RK4 for split ODE systems and the complex base equation, and
//! the numerical correspondence between the two.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bicomplex::{eval_bicomplex, Bicomplex64, Unit};
use crate::error::{CsaError, Result};
use crate::expr::{ratio_to_f64, Expression};
use crate::poly::Symbol;
use crate::split::Layout;
use crate::system::{ConstraintSet, DifferentialSystem, ScalarODE, SplitVariant};

/// Uniform grid `start + k * step`, `k = 0..=count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Grid> {
        if !(step.is_finite() && step != 0.0 && start.is_finite()) {
            return Err(CsaError::Numeric("grid step must be finite and nonzero".into()));
        }
        Ok(Grid { start, step, count })
    }

    /// Grid from `a` to `b` with step close to `h`.
    pub fn span(a: f64, b: f64, h: f64) -> Result<Grid> {
        if !(h.is_finite() && h != 0.0 && a.is_finite() && b.is_finite()) {
            return Err(CsaError::Numeric("grid step must be finite and nonzero".into()));
        }
        let count = ((b - a) / h).abs().round() as usize;
        if count == 0 {
            return Err(CsaError::Numeric("empty integration interval".into()));
        }
        Grid::new(a, (b - a) / count as f64, count)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericTrajectory {
    pub grid: Grid,
    pub names: Vec<String>,
    /// `values[k][n]`: variable `k` at grid point `n`.
    pub values: Vec<Vec<f64>>,
    pub method: &'static str,
}

impl NumericTrajectory {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(&self.values[k])
    }

    pub fn final_value(&self, name: &str) -> Option<f64> {
        self.column(name).and_then(|c| c.last().copied())
    }

    pub fn to_csv(&self, indep: &str) -> String {
        let mut s = String::new();
        s.push_str(indep);
        for n in &self.names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for i in 0..=self.grid.count {
            let _ = write!(s, "{}", self.grid.point(i));
            for col in &self.values {
                let _ = write!(s, ",{}", col[i]);
            }
            s.push('\n');
        }
        s
    }
}

/// State arithmetic shared by the real and complex integrators.
trait State: Copy + std::ops::Add<Output = Self> + std::ops::Mul<f64, Output = Self> {}
impl State for f64 {}
impl State for Complex64 {}

/// Classical RK4 for `y'' = f(r, y, y')` reduced to first order.
fn rk4<T: State>(
    grid: &Grid,
    y0: &[T],
    dy0: &[T],
    f: impl Fn(f64, &[T], &[T]) -> Result<Vec<T>>,
) -> Result<Vec<Vec<(T, T)>>> {
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut dy = dy0.to_vec();
    let mut out = vec![vec![(y[0], dy[0]); grid.count + 1]; n];
    let record = |out: &mut Vec<Vec<(T, T)>>, k: usize, y: &[T], dy: &[T]| {
        for j in 0..n {
            out[j][k] = (y[j], dy[j]);
        }
    };
    record(&mut out, 0, &y, &dy);
    let h = grid.step;
    let axpy = |a: &[T], b: &[T], c: f64| -> Vec<T> { a.iter().zip(b).map(|(x, y)| *x + *y * c).collect() };
    for k in 0..grid.count {
        let r = grid.point(k);
        let k1y = dy.clone();
        let k1v = f(r, &y, &dy)?;
        let (y2, v2) = (axpy(&y, &k1y, h / 2.0), axpy(&dy, &k1v, h / 2.0));
        let k2y = v2.clone();
        let k2v = f(r + h / 2.0, &y2, &v2)?;
        let (y3, v3) = (axpy(&y, &k2y, h / 2.0), axpy(&dy, &k2v, h / 2.0));
        let k3y = v3.clone();
        let k3v = f(r + h / 2.0, &y3, &v3)?;
        let (y4, v4) = (axpy(&y, &k3y, h), axpy(&dy, &k3v, h));
        let k4y = v4.clone();
        let k4v = f(r + h, &y4, &v4)?;
        for j in 0..n {
            y[j] = y[j] + (k1y[j] + k2y[j] * 2.0 + k3y[j] * 2.0 + k4y[j]) * (h / 6.0);
            dy[j] = dy[j] + (k1v[j] + k2v[j] * 2.0 + k3v[j] * 2.0 + k4v[j]) * (h / 6.0);
        }
        record(&mut out, k + 1, &y, &dy);
    }
    Ok(out)
}

fn pole(at: f64) -> CsaError {
    CsaError::Pole(format!("right-hand side is singular or non-finite at {at}"))
}

/// Integrates an ODE-kind system. `initial` holds every dependent and its
/// first jet by name, e.g. `x` and `x'`.
pub fn integrate_system(
    sys: &DifferentialSystem,
    initial: &BTreeMap<String, f64>,
    grid: &Grid,
) -> Result<NumericTrajectory> {
    if !sys.ctx.is_single_indep() {
        return Err(CsaError::Precondition(
            "numerical integration needs a single independent variable".into(),
        ));
    }
    let shell = sys.on_shell()?;
    let ctx = &sys.ctx;
    let nd = ctx.deps().len();
    let rhs: Vec<Expression> = (0..nd)
        .map(|b| {
            let s = ctx.jet(b, &[0, 0]);
            shell
                .get(&s)
                .cloned()
                .ok_or_else(|| CsaError::System(format!("`{s}` is not solved for")))
        })
        .collect::<Result<_>>()?;
    if let Some(p) = ctx.params().first() {
        return Err(CsaError::Precondition(format!(
            "parameter `{p}` needs a numerical value"
        )));
    }
    let get = |name: String| {
        initial
            .get(&name)
            .copied()
            .ok_or_else(|| CsaError::Precondition(format!("missing initial value for `{name}`")))
    };
    let y0: Vec<f64> = ctx.deps().iter().map(|d| get(d.name().to_string())).collect::<Result<_>>()?;
    let dy0: Vec<f64> = (0..nd).map(|b| get(ctx.jet(b, &[0]).name().to_string())).collect::<Result<_>>()?;
    let index: BTreeMap<Symbol, (usize, usize)> = (0..nd)
        .flat_map(|b| [(ctx.dep(b).clone(), (0, b)), (ctx.jet(b, &[0]), (1, b))])
        .collect();
    let indep = ctx.indep(0).clone();
    let f = |r: f64, y: &[f64], dy: &[f64]| -> Result<Vec<f64>> {
        let var = |s: &Symbol| {
            if *s == indep {
                return r;
            }
            match index.get(s) {
                Some((0, b)) => y[*b],
                Some((_, b)) => dy[*b],
                None => f64::NAN,
            }
        };
        rhs.iter()
            .map(|e| e.eval_f64(var).ok_or_else(|| pole(r)))
            .collect()
    };
    let sol = rk4(grid, &y0, &dy0, f)?;
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (b, col) in sol.iter().enumerate() {
        names.push(ctx.dep(b).name().to_string());
        values.push(col.iter().map(|p| p.0).collect());
        names.push(ctx.jet(b, &[0]).name().to_string());
        values.push(col.iter().map(|p| p.1).collect());
    }
    check_finite(&values)?;
    Ok(NumericTrajectory {
        grid: *grid,
        names,
        values,
        method: "rk4",
    })
}

fn check_finite(values: &[Vec<f64>]) -> Result<()> {
    if values.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CsaError::Numeric("trajectory left the finite range".into()))
    }
}

fn eval_complex(e: &Expression, var: impl Fn(&Symbol) -> Complex64) -> Option<Complex64> {
    let coeff = |c: &num_rational::BigRational| Complex64::new(ratio_to_f64(c), 0.0);
    let (n, d) = e.eval_generic(coeff, var);
    let v = n / d;
    (d != Complex64::zero() && v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// Integrates `u'' = f(r, u, u')` over the complex numbers along a real
/// grid. Columns: `u_re, u_im, u'_re, u'_im`.
pub fn integrate_base_complex(
    ode: &ScalarODE,
    u0: Complex64,
    du0: Complex64,
    grid: &Grid,
) -> Result<NumericTrajectory> {
    let (r_sym, u_sym, du_sym) = (ode.indep().clone(), ode.dep().clone(), ode.first_jet());
    let f = |r: f64, y: &[Complex64], dy: &[Complex64]| -> Result<Vec<Complex64>> {
        let var = |s: &Symbol| {
            if *s == r_sym {
                Complex64::new(r, 0.0)
            } else if *s == u_sym {
                y[0]
            } else if *s == du_sym {
                dy[0]
            } else {
                Complex64::new(f64::NAN, 0.0)
            }
        };
        Ok(vec![eval_complex(&ode.rhs, var).ok_or_else(|| pole(r))?])
    };
    let sol = rk4(grid, &[u0], &[du0], f)?;
    let col = &sol[0];
    let values = vec![
        col.iter().map(|p| p.0.re).collect(),
        col.iter().map(|p| p.0.im).collect(),
        col.iter().map(|p| p.1.re).collect(),
        col.iter().map(|p| p.1.im).collect(),
    ];
    check_finite(&values)?;
    let u = ode.dep().name();
    Ok(NumericTrajectory {
        grid: *grid,
        names: vec![
            format!("{u}_re"),
            format!("{u}_im"),
            format!("{u}'_re"),
            format!("{u}'_im"),
        ],
        values,
        method: "rk4",
    })
}

/// Where each split dependent sits on the real slice: real part, imaginary
/// part, or zero.
fn slice_role(unit: Unit) -> Option<usize> {
    match unit {
        Unit::One => Some(0),
        Unit::I => Some(1),
        _ => None,
    }
}

/// Initial data for the split system matching complex base data.
pub fn matched_initial(
    sys: &DifferentialSystem,
    variant: SplitVariant,
    u0: Complex64,
    du0: Complex64,
) -> Result<BTreeMap<String, f64>> {
    let layout = Layout::new(variant, sys.ctx.indep(0).name());
    let mut out = BTreeMap::new();
    for (b, c) in layout.deps.iter().enumerate() {
        let pick = |z: Complex64| match slice_role(c.unit) {
            Some(0) => z.re,
            Some(_) => z.im,
            None => 0.0,
        };
        out.insert(sys.ctx.dep(b).name().to_string(), pick(u0));
        out.insert(sys.ctx.jet(b, &[0]).name().to_string(), pick(du0));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport {
    /// Max-norm deviation per split dependent from its slice value.
    pub deviations: Vec<(String, f64)>,
    pub max_deviation: f64,
    pub constraint_drift: Option<f64>,
}

/// Compares a split trajectory against the base one on the real slice.
pub fn correspondence_report(
    base: &NumericTrajectory,
    system: &NumericTrajectory,
    variant: SplitVariant,
    deps: &[String],
    constraints: Option<&ConstraintSet>,
) -> Result<CorrespondenceReport> {
    if variant.is_pde() {
        return Err(CsaError::Unsupported(
            "numerical correspondence covers the ODE variants only".into(),
        ));
    }
    if base.grid != system.grid {
        return Err(CsaError::Precondition("trajectories use different grids".into()));
    }
    let layout = Layout::new(variant, "r");
    let zeros = vec![0.0; base.grid.count + 1];
    let mut deviations = Vec::new();
    for (name, c) in deps.iter().zip(&layout.deps) {
        let target: &[f64] = match slice_role(c.unit) {
            Some(0) => &base.values[0],
            Some(_) => &base.values[1],
            None => &zeros,
        };
        let col = system
            .column(name)
            .ok_or_else(|| CsaError::Precondition(format!("trajectory lacks `{name}`")))?;
        let d = col
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        deviations.push((name.clone(), d));
    }
    let max_deviation = deviations.iter().map(|d| d.1).fold(0.0, f64::max);
    let constraint_drift = match constraints {
        Some(c) if !c.is_empty() => Some(constraint_drift(system, c)?),
        _ => None,
    };
    Ok(CorrespondenceReport {
        deviations,
        max_deviation,
        constraint_drift,
    })
}

/// `max |lead - replacement|` along a trajectory.
pub fn constraint_drift(traj: &NumericTrajectory, constraints: &ConstraintSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..=traj.grid.count {
        let var = |s: &Symbol| traj.column(s.name()).map(|c| c[n]).unwrap_or(f64::NAN);
        for c in &constraints.relations {
            let cf = |q: &num_rational::BigRational| ratio_to_f64(q);
            let lead = crate::poly::Poly::term(num_rational::BigRational::one(), c.lead.clone());
            let l: f64 = lead.eval_with(cf, var);
            let r: f64 = c.replacement.eval_with(cf, var);
            worst = worst.max((l - r).abs());
        }
    }
    if worst.is_finite() {
        Ok(worst)
    } else {
        Err(CsaError::Numeric("constraint evaluation is not finite".into()))
    }
}

/// Observed order `log2(e(h) / e(h/2))` from successive differences of the
/// final value at steps `h, h/2, h/4`.
pub fn observed_order(final_at: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let a = final_at(h)?;
    let b = final_at(h / 2.0)?;
    let c = final_at(h / 4.0)?;
    let (e1, e2) = ((a - b).abs(), (b - c).abs());
    if e2 == 0.0 {
        return Err(CsaError::Numeric("differences vanish; order is undefined".into()));
    }
    Ok((e1 / e2).log2())
}

/// Maximum relative difference between the split right sides and the base
/// right side evaluated in bicomplex arithmetic, over random points.
pub fn rhs_cross_check(
    ode: &ScalarODE,
    sys: &DifferentialSystem,
    variant: SplitVariant,
    points: usize,
    seed: u64,
) -> Result<f64> {
    let layout = Layout::new(variant, ode.indep().name());
    let ctx = &sys.ctx;
    let n2 = (layout.n() * layout.n()) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let base_syms = [ode.indep().clone(), ode.dep().clone(), ode.first_jet()];
    let bic = [
        layout.indep_value(),
        layout.dep_value(),
        layout.first_derivative_value(ctx),
    ];
    let mut done = 0;
    let mut tries = 0;
    while done < points {
        tries += 1;
        if tries > points * 20 {
            return Err(CsaError::Numeric("too many samples hit a pole".into()));
        }
        let mut point: BTreeMap<Symbol, f64> = BTreeMap::new();
        for s in ctx.indeps().iter().chain(ctx.deps()) {
            point.insert(s.clone(), rng.gen_range(0.5..2.0));
        }
        for (_, _, s) in ctx.jets_of_order(1) {
            point.insert(s, rng.gen_range(-1.0..1.0));
        }
        let var = |s: &Symbol| point.get(s).copied().unwrap_or(f64::NAN);
        let mut values = Vec::new();
        for b in &bic {
            let mut c = [0.0; 4];
            for u in Unit::ALL {
                let e = b.component(u);
                c[u.bits()] = if e.is_zero() { 0.0 } else { e.eval_f64(var).unwrap_or(f64::NAN) };
            }
            values.push(Bicomplex64::from_components(c));
        }
        let f = eval_bicomplex(&ode.rhs, |s| {
            let k = base_syms.iter().position(|b| b == s).expect("base symbol");
            values[k]
        })
        .components();
        if f.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let mut ok = true;
        let mut local: f64 = 0.0;
        for (c, eq) in layout.deps.iter().zip(&sys.equations) {
            let Some(got) = eq.rhs.eval_f64(var) else {
                ok = false;
                break;
            };
            let want = n2 * f[c.unit.bits()];
            let scale = want.abs().max(1.0);
            local = local.max((got - want).abs() / scale);
        }
        if ok {
            worst = worst.max(local);
            done += 1;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_is_exact() {
        let sys = DifferentialSystem::parse("indep: s\ndep: p, q\nkind: ode2\neq: p'' = 0\neq: q'' = 0\n").unwrap();
        let init: BTreeMap<String, f64> = [("p", 0.0), ("p'", 1.0), ("q", 1.0), ("q'", 0.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let t = integrate_system(&sys, &init, &Grid::span(0.0, 1.0, 0.1).unwrap()).unwrap();
        assert!((t.final_value("p").unwrap() - 1.0).abs() < 1e-12);
        assert!((t.final_value("q").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_free_particle() {
        let ode = ScalarODE::parse("s", "u", "0").unwrap();
        let g = Grid::span(0.0, 1.0, 0.1).unwrap();
        let t = integrate_base_complex(&ode, Complex64::new(0.0, 1.0), Complex64::one(), &g).unwrap();
        assert!((t.final_value("u_re").unwrap() - 1.0).abs() < 1e-12);
        assert!((t.final_value("u_im").unwrap() - 1.0).abs() < 1e-12);
    }
}
