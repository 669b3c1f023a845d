//! Convergence of normalized section densities against test batteries.

use rayon::prelude::*;

use super::battery::{TestBattery, TestFunction};
use super::fit::{fit, RateFit, RateModel};
use crate::generators::Generator;
use crate::polytope::{FaceFrame, Polytope};
use crate::quadrature::{integrate, Region, Tolerance};
use crate::quantization::{default_tolerance, delta_m, neg_h0_m, QuantizationError, SectionDensity, Weight};
use crate::scalar::dot;

/// Pairing errors per `s` and per test function.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingTable {
    pub s: Vec<f64>,
    pub names: Vec<String>,
    pub targets: Vec<f64>,
    pub pairings: Vec<Vec<f64>>,
    pub errors: Vec<Vec<f64>>,
    /// Largest error over the battery at each `s`.
    pub max_errors: Vec<f64>,
}

/// Pairs the normalized density of `σ^m_s` with every test function for
/// each `s` in `s_grid` and compares with `targets`.
pub fn pairing_table(
    p: &Polytope,
    gen: &Generator,
    m: &[f64],
    weight: Weight,
    s_grid: &[f64],
    names: Vec<String>,
    tests: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    targets: &[f64],
) -> Result<PairingTable, QuantizationError> {
    let k = targets.len();
    let rows: Result<Vec<Vec<f64>>, QuantizationError> = s_grid
        .par_iter()
        .map(|&s| {
            let sd = SectionDensity::new(p, gen, m, s, weight)?;
            sd.pair(tests, k)
        })
        .collect();
    let pairings = rows?;
    let errors: Vec<Vec<f64>> =
        pairings.iter().map(|row| row.iter().zip(targets).map(|(a, b)| (a - b).abs()).collect()).collect();
    let max_errors = errors.iter().map(|e| e.iter().fold(0.0f64, |m, &v| m.max(v))).collect();
    Ok(PairingTable { s: s_grid.to_vec(), names, targets: targets.to_vec(), pairings, errors, max_errors })
}

/// Convergence to `δ(x − m)`: targets are the point values `τ(m)`.
pub fn delta_diagnostic(
    p: &Polytope,
    gen: &Generator,
    m: &[f64],
    weight: Weight,
    s_grid: &[f64],
    battery: &TestBattery,
) -> Result<(PairingTable, RateFit), QuantizationError> {
    let targets = battery.eval(m);
    let table = pairing_table(p, gen, m, weight, s_grid, battery.names(), &|x| battery.eval(x), &targets)?;
    let f = fit(&table.s, &table.max_errors, RateModel::Power);
    Ok((table, f))
}

/// Limit of the normalized density when it spreads over `component`:
/// uniform (bare) or proportional to `e^{−h⁰_m}` (weighted).
pub fn component_means(p: &Polytope, m: &[f64], weight: Weight, component: &Region<f64>, battery: &TestBattery) -> Vec<f64> {
    let tol = default_tolerance::<f64>(p.dim());
    match weight {
        Weight::Bare => battery.means(component, &tol),
        Weight::Weighted => battery.weighted_means(component, &[], |x| neg_h0_m(p, m, x), &tol),
    }
}

/// Convergence to the (weighted) mean over the component of `P ∖ supp Hess ψ`
/// containing `m`; the fit is the exponential law.
pub fn uniform_diagnostic(
    p: &Polytope,
    gen: &Generator,
    m: &[f64],
    weight: Weight,
    component: &Region<f64>,
    s_grid: &[f64],
    battery: &TestBattery,
) -> Result<(PairingTable, RateFit), QuantizationError> {
    let targets = component_means(p, m, weight, component, battery);
    let table = pairing_table(p, gen, m, weight, s_grid, battery.names(), &|x| battery.eval(x), &targets)?;
    let f = fit(&table.s, &table.max_errors, RateModel::Exponential);
    Ok((table, f))
}

/// `min Δ_m` over sample points outside the limit component.
pub fn scan_gap(gen: &Generator, m: &[f64], samples: &[Vec<f64>], in_component: impl Fn(&[f64]) -> bool) -> f64 {
    samples.iter().filter(|x| !in_component(x)).map(|x| delta_m(gen, m, x)).fold(f64::INFINITY, f64::min)
}

/// Test function `τ_∥(x_F) · τ_⊥(x_F^⊥)` in the frame of a face.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTest {
    pub parallel: TestFunction,
    pub transverse: TestFunction,
}

impl SeparableTest {
    pub fn eval(&self, frame: &FaceFrame, x: &[f64]) -> f64 {
        self.parallel.eval(&frame.parallel(x)) * self.transverse.eval(&frame.transverse(x))
    }

    pub fn name(&self) -> String {
        format!("({})_par*({})_perp", self.parallel.name(), self.transverse.name())
    }
}

/// Products of `{1, u, u²}` in the parallel and `{1, v, v², cos}` in the
/// transverse frame coordinates (first coordinate of each block).
pub fn separable_battery(frame: &FaceFrame, period: f64) -> Vec<SeparableTest> {
    let par = frame.dim() - frame.codim();
    let mut pars = vec![TestFunction::Constant];
    if par > 0 {
        pars.push(TestFunction::Coordinate(0));
        pars.push(TestFunction::Product(0, 0));
    }
    let perps = vec![
        TestFunction::Constant,
        TestFunction::Coordinate(0),
        TestFunction::Product(0, 0),
        TestFunction::Wave { axis: 0, period },
    ];
    pars.iter()
        .flat_map(|a| perps.iter().map(move |b| SeparableTest { parallel: a.clone(), transverse: b.clone() }))
        .collect()
}

/// The chord `P ∩ {x_F^⊥ = m_F^⊥}` as a region in parallel frame coordinates,
/// with the map back to `x`.
pub fn chord_region<'a>(p: &Polytope, frame: &'a FaceFrame, m: &[f64]) -> (Region<f64>, impl Fn(&[f64]) -> Vec<f64> + 'a) {
    let n = frame.dim();
    let j = frame.codim();
    let perp = frame.transverse(m);
    let to_x = move |u: &[f64]| {
        let mut full = u.to_vec();
        full.extend_from_slice(&perp);
        frame.from_frame(&full)
    };
    let origin = to_x(&vec![0.0; n - j]);
    let cols: Vec<Vec<f64>> = (0..n - j)
        .map(|k| {
            let mut e = vec![0.0; n - j];
            e[k] = 1.0;
            let x = to_x(&e);
            x.iter().zip(&origin).map(|(a, b)| a - b).collect()
        })
        .collect();
    let hs = p
        .facets()
        .iter()
        .map(|f| {
            let v: Vec<f64> = f.normal.iter().map(|&a| a as f64).collect();
            let a: Vec<f64> = cols.iter().map(|c| dot(&v, c)).collect();
            let off: f64 = crate::exact::to_real(&f.offset);
            (a, off - dot(&v, &origin))
        })
        .collect();
    (Region::new(n - j, hs), to_x)
}

/// Convergence to `δ(x_F^⊥ − m_F^⊥)` times the chord profile, uniform
/// (bare) or `e^{−h⁰_m}` (weighted). The fit is the power law.
pub fn face_delta_diagnostic(
    p: &Polytope,
    gen: &Generator,
    m: &[f64],
    weight: Weight,
    frame: &FaceFrame,
    s_grid: &[f64],
    tests: &[SeparableTest],
) -> Result<(PairingTable, RateFit), QuantizationError> {
    let (chord, to_x) = chord_region(p, frame, m);
    let perp_m = frame.transverse(m);
    let k = tests.len();
    let tol: Tolerance<f64> = default_tolerance(p.dim());
    let r = integrate(
        &chord,
        &[],
        |u| {
            let x = to_x(u);
            let w = match weight {
                Weight::Bare => 1.0,
                Weight::Weighted => neg_h0_m(p, m, &x).exp(),
            };
            let mut v: Vec<f64> = tests.iter().map(|t| t.parallel.eval(u) * w).collect();
            v.push(w);
            v
        },
        k + 1,
        &tol,
    );
    let targets: Vec<f64> =
        tests.iter().enumerate().map(|(i, t)| t.transverse.eval(&perp_m) * r.value[i] / r.value[k]).collect();
    let names = tests.iter().map(|t| t.name()).collect();
    let eval = |x: &[f64]| tests.iter().map(|t| t.eval(frame, x)).collect::<Vec<f64>>();
    let table = pairing_table(p, gen, m, weight, s_grid, names, &eval, &targets)?;
    let f = fit(&table.s, &table.max_errors, RateModel::Power);
    Ok((table, f))
}
