//! Verification suites: each check reports a measured gap, the tolerance it
//! is held to, and a pass flag.

use gammareg_core::bauer::{check_bauer, check_convexity};
use gammareg_core::minimize::{
    check_theorem1_with, check_theorem3_extreme, generalized_minimizer_nodes, near_minimal_nodes,
    nested_exhaustion, representing_measure,
};
use gammareg_core::subdiff::{
    ball_nodes, corollary_from_gradients, limiting_gradients_from, subdifferential, tilt,
};
use gammareg_core::transform::{
    conjugate_fast, conjugate_naive, envelope_biconjugate_with, lsc_hull, value_tolerance,
};
use gammareg_core::{AffineFunction, Point, SampledFunction};
use serde_json::{json, Value};

use crate::commands::{family, gamma};
use crate::io::num;
use crate::{CliError, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Every suite that applies to the spec.
    All,
    /// Infimum and minimizer-set identities, extreme points of the minimizer set.
    Theorems,
    /// Lower semi-continuous hull.
    Lsc,
    /// Envelope fixed points and the biconjugate against the hull.
    Envelope,
    /// Fast conjugate against the brute-force one.
    Oracle,
    /// Subdifferentials of the conjugate as tilted minimizers.
    Subdiff,
    /// Limiting gradients around the spec's tilt (needs `radii`).
    Tsets,
    /// Representing measures.
    Barycenter,
    /// Convex sums over extreme points (needs `h_plus`).
    Bauer,
    /// Nested exhaustion (needs `family`).
    Exhaust,
}

impl Suite {
    const EACH: [Suite; 9] = [
        Suite::Theorems,
        Suite::Lsc,
        Suite::Envelope,
        Suite::Oracle,
        Suite::Subdiff,
        Suite::Tsets,
        Suite::Barycenter,
        Suite::Bauer,
        Suite::Exhaust,
    ];
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub gap: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    fn within(name: &str, gap: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            gap,
            tol,
            passed: gap <= tol,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "gap": num(self.gap),
            "tol": num(self.tol),
            "passed": self.passed,
        })
    }
}

/// `count` indices spread evenly over `0..len`.
pub fn spread(len: usize, count: usize) -> Vec<usize> {
    if len <= count {
        return (0..len).collect();
    }
    let mut v: Vec<usize> = (0..count).map(|k| k * (len - 1) / (count - 1).max(1)).collect();
    v.dedup();
    v
}

/// Runs `suite` on `p`. Suites that need a missing spec key or a hull in
/// three dimensions contribute no checks when run as part of `all`.
pub fn run_suite(p: &Problem, suite: Suite) -> Result<Vec<Check>, CliError> {
    if suite == Suite::All {
        let mut out = Vec::new();
        for s in Suite::EACH {
            if applies(p, s) {
                out.extend(run_suite(p, s)?);
            }
        }
        return Ok(out);
    }
    match suite {
        Suite::All => unreachable!(),
        Suite::Theorems => theorems(p),
        Suite::Lsc => Ok(lsc(p)),
        Suite::Envelope => envelope(p),
        Suite::Oracle => oracle(p),
        Suite::Subdiff => subdiff(p),
        Suite::Tsets => tsets(p),
        Suite::Barycenter => barycenter(p),
        Suite::Bauer => bauer(p),
        Suite::Exhaust => exhaust(p),
    }
}

fn applies(p: &Problem, s: Suite) -> bool {
    let hull = p.dim() <= 2;
    match s {
        Suite::Lsc | Suite::Oracle => true,
        Suite::Theorems | Suite::Envelope | Suite::Subdiff | Suite::Barycenter => hull,
        Suite::Tsets => hull && p.spec.radii.is_some(),
        Suite::Bauer => p.spec.h_plus.is_some(),
        Suite::Exhaust => hull && !p.spec.family.is_empty(),
        Suite::All => true,
    }
}

fn theorems(p: &Problem) -> Result<Vec<Check>, CliError> {
    let t1 = check_theorem1_with(&p.h, &p.dual, p.tol)?;
    let t3 = check_theorem3_extreme(&p.h, p.tol)?;
    let worst = t3.extreme_points.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    Ok(vec![
        Check::within("inf_gap", t1.inf_gap, t1.delta_env),
        Check::within("set_gap", t1.set_gap, t1.set_tol),
        Check::within("extreme_point_gap", worst, t3.set_tol),
    ])
}

fn lsc(p: &Problem) -> Vec<Check> {
    let h0 = lsc_hull(&p.h);
    let omega = generalized_minimizer_nodes(&p.h, p.tol);
    let argmin0 = near_minimal_nodes(&h0, p.tol);
    let sym: usize = omega.iter().filter(|n| !argmin0.contains(n)).count()
        + argmin0.iter().filter(|n| !omega.contains(n)).count();
    vec![
        Check::within("lsc_infimum", (p.h.infimum().value() - h0.infimum().value()).abs(), 0.0),
        Check::within("generalized_minimizers_are_lsc_argmin", sym as f64, 0.0),
    ]
}

fn envelope(p: &Problem) -> Result<Vec<Check>, CliError> {
    let (env, _) = gamma(p)?;
    let bi = envelope_biconjugate_with(&p.h, &p.dual)?;
    let grid = p.h.grid();
    let mut bi_gap: f64 = 0.0;
    let mut drop: f64 = 0.0;
    let mut dev: f64 = 0.0;
    for n in 0..grid.len() {
        let (hv, ev) = (p.h.value(n), env.value(n));
        if let Some(e) = ev.to_finite() {
            bi_gap = bi_gap.max((bi.value(n).value() - e).abs());
            drop = drop.max(hv.value() - e);
        }
        if ev != hv {
            dev = dev.max(if ev.is_finite() && hv.is_finite() { (hv.value() - ev.value()).abs() } else { f64::INFINITY });
        }
    }
    let fixed = if check_convexity(&p.h).is_grid_convex {
        Check::within("convex_data_is_its_envelope", dev, 0.0)
    } else {
        Check {
            name: "nonconvex_data_lies_above_its_envelope".into(),
            gap: -drop,
            tol: 0.0,
            passed: drop > 0.0,
        }
    };
    Ok(vec![
        fixed,
        Check::within("biconjugate_matches_hull", bi_gap, p.delta_env),
    ])
}

/// Largest `|p.x| + |h(x)|`: the size of the terms in a conjugate.
pub fn summand_scale(h: &SampledFunction, dual: &gammareg_core::transform::DualGrid) -> f64 {
    let x = h.grid().nodes().iter().map(Point::norm).fold(0.0, f64::max);
    let s = dual.grid().nodes().iter().map(Point::norm).fold(0.0, f64::max);
    x * s + h.max_abs_finite()
}

fn oracle(p: &Problem) -> Result<Vec<Check>, CliError> {
    let a = conjugate_naive(&p.h, &p.dual)?;
    let b = conjugate_fast(&p.h, &p.dual)?;
    let gap = (0..p.dual.len())
        .map(|j| (a.value(j).value() - b.value(j).value()).abs())
        .fold(0.0, f64::max);
    let tol = 4.0 * f64::EPSILON * summand_scale(&p.h, &p.dual);
    Ok(vec![Check::within("fast_conjugate_matches_naive", gap, tol)])
}

fn subdiff(p: &Problem) -> Result<Vec<Check>, CliError> {
    let star = conjugate_naive(&p.h, &p.dual)?;
    let (env, _) = gamma(p)?;
    let grid = p.h.grid();
    let mut gap: f64 = 0.0;
    let mut tol: f64 = 0.0;
    let mut nb = Vec::new();
    for j in spread(p.dual.len(), 20) {
        let s = AffineFunction::linear(p.dual.slope(j));
        let t = value_tolerance(&tilt(&p.h, &s)?);
        let body = subdifferential(&p.h, &s, p.tol_override)?;
        let tilted = |n: usize| env.value(n).value() - s.eval(&grid.node(n));
        for v in body.vertices() {
            let n = grid.find_node(v).expect("subdifferential vertices are nodes");
            if env.value(n).is_infinite() {
                // eroded one cell past the effective domain
                continue;
            }
            // generalized minimizers reach one cell past the tilted argmin
            grid.neighborhood(n, &mut nb);
            let jump = nb
                .iter()
                .filter(|&&w| env.value(w).is_finite())
                .map(|&w| tilted(n) - tilted(w))
                .fold(0.0, f64::max);
            let fy = star.value(j).value() + tilted(n);
            gap = gap.max(fy.abs() - jump);
        }
        tol = tol.max(p.delta_env + p.tol_override.unwrap_or(t));
    }
    Ok(vec![Check::within("fenchel_young_equality_on_subdifferentials", gap, tol)])
}

fn tilt_of(p: &Problem) -> AffineFunction {
    AffineFunction::linear(
        p.spec
            .tilt
            .as_deref()
            .map(Point::new)
            .unwrap_or_else(|| Point::zero(p.dim())),
    )
}

fn tsets(p: &Problem) -> Result<Vec<Check>, CliError> {
    let radii = p.spec.radii.as_ref().expect("suite applies only with radii");
    let xstar = tilt_of(p);
    let nodes = ball_nodes(&p.dual, &xstar, radii)?;
    let scan = p.scan(&nodes, None)?;
    let lg = limiting_gradients_from(&p.h, &scan, &xstar, radii)?;
    let empty = lg.counts.iter().filter(|&&c| c == 0).count();
    let density = Check::within("differentiability_points_in_every_ball", empty as f64, 0.0);
    if empty > 0 {
        return Ok(vec![density]);
    }
    let lr = corollary_from_gradients(&p.h, &xstar, lg)?;
    Ok(vec![
        density,
        Check::within("subdifferential_in_hull_of_limiting_gradients", lr.excess, lr.set_tol),
    ])
}

fn barycenter(p: &Problem) -> Result<Vec<Check>, CliError> {
    let (env, _) = gamma(p)?;
    let grid = p.h.grid();
    let finite: Vec<usize> = (0..grid.len()).filter(|&n| env.value(n).is_finite()).collect();
    let (mut value_gap, mut pos_gap, mut mass_gap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in spread(finite.len(), 50) {
        let n = finite[k];
        let mu = representing_measure(&p.h, n)?;
        let integral = mu.integrate(|q| p.h.value(grid.find_node(q).expect("support is on nodes")).value());
        value_gap = value_gap.max((integral - env.value(n).value()).abs());
        pos_gap = pos_gap.max(mu.barycenter().dist(&grid.node(n)));
        mass_gap = mass_gap.max((mu.total_mass() - 1.0).abs());
    }
    Ok(vec![
        Check::within("measure_integrates_to_envelope", value_gap, p.delta_env),
        Check::within("measure_barycenter_is_the_point", pos_gap, grid.eps_geom()),
        Check::within("measure_is_a_probability", mass_gap, 1e-12),
    ])
}

fn bauer(p: &Problem) -> Result<Vec<Check>, CliError> {
    let (_, expr) = p.spec.h_plus.as_ref().expect("suite applies only with h_plus");
    let plus = SampledFunction::from_expr(p.h.grid().clone(), expr)?;
    let r = check_bauer(&p.h, &plus)?;
    Ok(vec![
        Check::within("extreme_points_carry_the_maximum", -r.gap, 1e-9),
        Check::within("bauer_gap_below_modulus", r.gap, r.bound + 1e-9),
    ])
}

fn exhaust(p: &Problem) -> Result<Vec<Check>, CliError> {
    let r = nested_exhaustion(&p.h, &family(p)?, p.tol)?;
    let worst = r.certification.iter().copied().fold(0.0, f64::max);
    Ok(vec![Check::within("recovered_points_are_generalized_minimizers", worst, r.set_tol)])
}
