use std::sync::Arc;

use gammareg_core::bauer::{check_bauer, HYPOTHESIS};
use gammareg_core::geometry::convex_hull;
use gammareg_core::minimize::{check_theorem1_with, check_theorem3_extreme, nested_exhaustion, representing_measure};
use gammareg_core::subdiff::{ball_nodes, corollary_from_gradients, limiting_gradients_from, tilted_minimum};
use gammareg_core::transform::{
    conjugate_fast, envelope_biconjugate_with, envelope_hull, lsc_hull, value_tolerance,
};
use gammareg_core::{AffineFunction, ConvexBody, Point, PointSet, SampledFunction};
use serde_json::{json, Map, Value};

use crate::io::{self, ext, num, point, Table};
use crate::{CliError, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Conjugate,
    Envelope,
    LscHull,
    Minimizers,
    Subdiff,
    Exhaust,
    Bauer,
    Measure,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Conjugate => "conjugate",
            Command::Envelope => "envelope",
            Command::LscHull => "lsc-hull",
            Command::Minimizers => "minimizers",
            Command::Subdiff => "subdiff",
            Command::Exhaust => "exhaust",
            Command::Bauer => "bauer",
            Command::Measure => "measure",
        }
    }
}

/// A finished command: the JSON report, a CSV table, and whether every
/// contract the command checks held.
pub struct Report {
    pub json: Map<String, Value>,
    pub table: Table,
    pub passed: bool,
}

fn missing(key: &str) -> CliError {
    CliError::Spec {
        key: key.into(),
        message: "missing (required by this command)".into(),
    }
}

fn points(set: &PointSet) -> Value {
    Value::Array(set.iter().map(point).collect())
}

fn vertices(body: &ConvexBody) -> Value {
    Value::Array(body.vertices().iter().map(point).collect())
}

pub fn run(cmd: Command, p: &Problem) -> Result<Report, CliError> {
    match cmd {
        Command::Conjugate => conjugate(p),
        Command::Envelope => envelope(p),
        Command::LscHull => lsc(p),
        Command::Minimizers => minimizers(p),
        Command::Subdiff => subdiff(p),
        Command::Exhaust => exhaust(p),
        Command::Bauer => bauer(p),
        Command::Measure => measure(p),
    }
}

fn conjugate(p: &Problem) -> Result<Report, CliError> {
    let star = conjugate_fast(&p.h, &p.dual)?;
    let mut table = Table::with_slopes(p.dim(), &["h_star"]);
    for (j, s) in p.dual.grid().nodes().iter().enumerate() {
        table.row(None, Some(s), &[star.value(j).value()]);
    }
    let (lo, hi) = p.dual.grid().domain().bounds();
    let mut json = p.header("conjugate");
    json.insert("dual_lower".into(), io::nums(&lo));
    json.insert("dual_upper".into(), io::nums(&hi));
    json.insert("h_star_min".into(), ext(star.infimum()));
    json.insert("h_star_max".into(), num(star.max_finite()));
    Ok(Report {
        json,
        table,
        passed: true,
    })
}

/// Hull envelope in one and two dimensions, biconjugate in three.
pub fn gamma(p: &Problem) -> Result<(SampledFunction, &'static str), CliError> {
    if p.dim() <= 2 {
        Ok((envelope_hull(&p.h)?, "lower_hull"))
    } else {
        Ok((envelope_biconjugate_with(&p.h, &p.dual)?, "biconjugate"))
    }
}

fn envelope(p: &Problem) -> Result<Report, CliError> {
    let (env, method) = gamma(p)?;
    let bi = envelope_biconjugate_with(&p.h, &p.dual)?;
    let mut table = Table::with_coords(p.dim(), &["h", "gamma_h"]);
    let grid = p.h.grid();
    let mut gap: f64 = 0.0;
    let mut below = 0usize;
    let mut above = false;
    for n in 0..grid.len() {
        let (hv, ev) = (p.h.value(n), env.value(n));
        table.row(None, Some(&grid.node(n)), &[hv.value(), ev.value()]);
        if let Some(e) = ev.to_finite() {
            gap = gap.max((bi.value(n).value() - e).abs());
        }
        below += usize::from(ev < hv);
        above |= ev > hv;
    }
    let mut json = p.header("envelope");
    json.insert("method".into(), json!(method));
    json.insert("biconjugate_gap".into(), num(gap));
    json.insert("nodes_below_h".into(), json!(below));
    json.insert("inf_h".into(), ext(p.h.infimum()));
    json.insert("inf_gamma_h".into(), ext(env.infimum()));
    let passed = !above && gap <= p.delta_env;
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}

fn lsc(p: &Problem) -> Result<Report, CliError> {
    let h0 = lsc_hull(&p.h);
    let grid = p.h.grid();
    let mut table = Table::with_coords(p.dim(), &["h", "h0"]);
    for n in 0..grid.len() {
        table.row(None, Some(&grid.node(n)), &[p.h.value(n).value(), h0.value(n).value()]);
    }
    let mut json = p.header("lsc-hull");
    json.insert("inf_h".into(), ext(p.h.infimum()));
    json.insert("inf_h0".into(), ext(h0.infimum()));
    let passed = p.h.infimum() == h0.infimum();
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}

fn minimizers(p: &Problem) -> Result<Report, CliError> {
    let t1 = check_theorem1_with(&p.h, &p.dual, p.tol)?;
    let t3 = check_theorem3_extreme(&p.h, p.tol)?;
    let mut table = Table::new(&[&["set"], &["x", "y", "z"][..p.dim()]].concat());
    for w in t1.generalized_minimizers.iter() {
        table.row(Some("generalized"), Some(w), &[]);
    }
    for v in t1.envelope_minimizers.vertices() {
        table.row(Some("envelope_vertex"), Some(v), &[]);
    }
    let mut json = p.header("minimizers");
    json.insert(
        "theorem1".into(),
        json!({
            "inf_h": num(t1.inf_h),
            "inf_envelope": num(t1.inf_envelope),
            "inf_biconjugate": num(t1.inf_biconjugate),
            "inf_gap": num(t1.inf_gap),
            "inf_ok": t1.inf_ok(),
            "set_gap": num(t1.set_gap),
            "set_tol": num(t1.set_tol),
            "set_ok": t1.set_ok(),
            "envelope_minimizers": vertices(&t1.envelope_minimizers),
            "generalized_minimizers": points(&t1.generalized_minimizers),
        }),
    );
    json.insert(
        "extreme_points".into(),
        json!({
            "distances": t3.extreme_points.iter().map(|(v, d)| json!({"point": point(v), "distance": num(*d)})).collect::<Vec<_>>(),
            "violations": t3.violations.len(),
            "strict": t3.strict(),
            "beyond_extreme": t3.beyond_extreme.iter().map(point).collect::<Vec<_>>(),
            "passed": t3.passed(),
        }),
    );
    let passed = t1.inf_ok() && t1.set_ok() && t3.passed();
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}

fn tilt_of(p: &Problem) -> AffineFunction {
    let slope = p
        .spec
        .tilt
        .as_deref()
        .map(Point::new)
        .unwrap_or_else(|| Point::zero(p.dim()));
    AffineFunction::linear(slope)
}

fn subdiff(p: &Problem) -> Result<Report, CliError> {
    let xstar = tilt_of(p);
    let t = tilted_minimum(&p.h, &xstar, p.tol_override)?;
    let mut table = Table::with_coords(p.dim(), &[]);
    for v in t.body.vertices() {
        table.row(None, Some(v), &[]);
    }
    let width_tol = p
        .spec
        .width_tol
        .unwrap_or_else(|| gammareg_core::subdiff::default_width_tol(&p.h));
    let mut json = p.header("subdiff");
    json.insert("slope".into(), point(&xstar.slope));
    json.insert("vertices".into(), vertices(&t.body));
    json.insert("diameter".into(), num(t.body.diameter()));
    json.insert("gradient".into(), point(&t.gradient));
    json.insert("width_tol".into(), num(width_tol));
    json.insert("differentiable".into(), json!(t.body.diameter() <= width_tol + p.h.grid().eps_geom()));
    let mut passed = true;
    if let Some(radii) = &p.spec.radii {
        let nodes = ball_nodes(&p.dual, &xstar, radii)?;
        let scan = p.scan(&nodes, None)?;
        let lg = limiting_gradients_from(&p.h, &scan, &xstar, radii)?;
        let lr = corollary_from_gradients(&p.h, &xstar, lg)?;
        json.insert(
            "limiting".into(),
            json!({
                "radii": io::nums(&lr.gradients.radii),
                "counts": lr.gradients.counts,
                "per_radius": lr.gradients.per_radius.iter().map(points).collect::<Vec<_>>(),
                "intersection": points(&lr.gradients.intersection),
                "hull": vertices(&lr.limiting_hull),
                "excess": num(lr.excess),
                "set_tol": num(lr.set_tol),
                "included": lr.included,
            }),
        );
        passed = lr.included;
    }
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}

pub fn family(p: &Problem) -> Result<Vec<ConvexBody>, CliError> {
    if p.spec.family.is_empty() {
        return Err(missing("family"));
    }
    let eps = p.h.grid().eps_geom();
    p.spec
        .family
        .iter()
        .map(|m| {
            let pts: Vec<Point> = m.iter().map(|c| Point::new(c)).collect();
            convex_hull(&pts, eps).map_err(|e| CliError::Spec {
                key: "family".into(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn exhaust(p: &Problem) -> Result<Report, CliError> {
    let fam = family(p)?;
    let r = nested_exhaustion(&p.h, &fam, p.tol)?;
    let mut table = Table::new(&[&["set"], &["x", "y", "z"][..p.dim()]].concat());
    for (i, m) in r.members.iter().enumerate() {
        let label = format!("member{i}");
        for e in m.extreme_points.iter() {
            table.row(Some(&label), Some(e), &[]);
        }
    }
    for e in r.recovered.iter() {
        table.row(Some("recovered"), Some(e), &[]);
    }
    let mut json = p.header("exhaust");
    json.insert(
        "members".into(),
        Value::Array(
            r.members
                .iter()
                .map(|m| {
                    json!({
                        "inf_restricted": ext(m.inf_restricted),
                        "gated_in": m.gated_in,
                        "extreme_points": points(&m.extreme_points),
                    })
                })
                .collect(),
        ),
    );
    json.insert("recovered".into(), points(&r.recovered));
    json.insert("certification".into(), io::nums(&r.certification));
    json.insert("set_tol".into(), num(r.set_tol));
    let passed = r.certified();
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}

fn bauer(p: &Problem) -> Result<Report, CliError> {
    let (_, expr) = p.spec.h_plus.as_ref().ok_or_else(|| missing("h_plus"))?;
    let grid = Arc::clone(p.h.grid());
    let plus = SampledFunction::from_expr(grid.clone(), expr).map_err(|e| CliError::Spec {
        key: "h_plus".into(),
        message: e.to_string(),
    })?;
    let r = check_bauer(&p.h, &plus)?;
    let mut table = Table::with_coords(p.dim(), &["h_minus", "h_plus", "sum"]);
    for n in 0..grid.len() {
        let (a, b) = (p.h.value(n), plus.value(n));
        table.row(None, Some(&grid.node(n)), &[a.value(), b.value(), (a + b).value()]);
    }
    let mut json = p.header("bauer");
    json.insert("hypothesis".into(), json!(HYPOTHESIS));
    json.insert("sup_k".into(), ext(r.sup_k));
    json.insert("sup_extreme".into(), ext(r.sup_extreme));
    json.insert("gap".into(), num(r.gap));
    json.insert("lipschitz".into(), num(r.lipschitz));
    json.insert("bound".into(), num(r.bound));
    json.insert("argmax".into(), point(&grid.node(r.argmax)));
    json.insert("passed".into(), json!(r.passed));
    Ok(Report {
        json,
        table,
        passed: r.passed,
    })
}

fn measure(p: &Problem) -> Result<Report, CliError> {
    let at = p.spec.measure_at.as_ref().ok_or_else(|| missing("measure_at"))?;
    let grid = p.h.grid();
    let x = Point::new(at);
    let node = grid.find_node(&x).ok_or_else(|| CliError::Spec {
        key: "measure_at".into(),
        message: format!("{at:?} is not a grid node"),
    })?;
    let (env, _) = gamma(p)?;
    let mu = representing_measure(&p.h, node)?;
    let value = |q: &Point| grid.find_node(q).map_or(f64::INFINITY, |n| p.h.value(n).value());
    let mut table = Table::with_coords(p.dim(), &["weight", "h"]);
    for (q, w) in mu.support() {
        table.row(None, Some(q), &[*w, value(q)]);
    }
    let integral = mu.integrate(value);
    let gamma_h = env.value(node).value();
    let bary = mu.barycenter();
    let mut json = p.header("measure");
    json.insert("point".into(), point(&grid.node(node)));
    json.insert("gamma_h".into(), num(gamma_h));
    json.insert("integral".into(), num(integral));
    json.insert("total_mass".into(), num(mu.total_mass()));
    json.insert("barycenter".into(), point(&bary));
    let passed = (integral - gamma_h).abs() <= value_tolerance(&p.h)
        && bary.dist(&grid.node(node)) <= grid.eps_geom()
        && (mu.total_mass() - 1.0).abs() <= 1e-12;
    json.insert("passed".into(), json!(passed));
    Ok(Report { json, table, passed })
}
