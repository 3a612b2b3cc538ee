//! Problem spec files.
//!
//! A spec is a flat list of `key = value` lines. Blank lines and everything
//! after a `#` are ignored. Vectors are comma separated; point lists separate
//! points with `;` and coordinates with `,`. `family` may be repeated, every
//! other key appears at most once.
//!
//! ```text
//! name = double_well
//! domain = box
//! lower = -2
//! upper = 2
//! resolution = 400
//! expression = (x^2 - 1)^2
//! tilt = 0
//! radii = 0.4, 0.2, 0.1
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gammareg_core::funclang::{parse, Expr};
use gammareg_core::{Domain, Grid};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const KEYS: &[&str] = &[
    "name",
    "domain",
    "lower",
    "upper",
    "vertices",
    "resolution",
    "expression",
    "samples",
    "h_plus",
    "tilt",
    "dual_resolution",
    "tol",
    "width_tol",
    "family",
    "radii",
    "measure_at",
];

#[derive(Clone, Debug)]
pub enum FunctionSource {
    Expression { text: String, expr: Expr },
    /// Resolved against the directory of the spec file.
    Samples(PathBuf),
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    /// Hex SHA-256 of the spec file bytes.
    pub sha256: String,
    pub domain: Domain,
    pub resolution: Vec<usize>,
    pub function: FunctionSource,
    /// Second summand for the `bauer` command; the main function is the first.
    pub h_plus: Option<(String, Expr)>,
    pub tilt: Option<Vec<f64>>,
    pub dual_resolution: Option<usize>,
    pub tol: Option<f64>,
    pub width_tol: Option<f64>,
    pub family: Vec<Vec<Vec<f64>>>,
    pub radii: Option<Vec<f64>>,
    pub measure_at: Option<Vec<f64>>,
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Spec {
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_real(key: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(key, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(bad(key, format!("`{}` is not finite", s.trim())));
    }
    Ok(v)
}

fn parse_vector(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|c| parse_real(key, c)).collect()
}

fn parse_points(key: &str, s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_vector(key, p))
        .collect()
}

fn parse_count(key: &str, s: &str) -> Result<usize, CliError> {
    s.trim()
        .parse()
        .map_err(|_| bad(key, format!("`{}` is not a positive integer", s.trim())))
}

fn parse_expr(key: &str, s: &str) -> Result<Expr, CliError> {
    parse(s).map_err(|e| bad(key, e.to_string()))
}

impl ProblemSpec {
    pub fn load(path: &Path) -> Result<ProblemSpec, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Io {
            path: path.to_path_buf(),
            message: "not valid UTF-8".into(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fallback = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut spec = ProblemSpec::parse(&text, base, &fallback)?;
        spec.sha256 = hex::encode(Sha256::digest(&bytes));
        Ok(spec)
    }

    /// Parses spec text. `base` resolves relative sample paths; `fallback_name`
    /// is used when the spec has no `name`.
    pub fn parse(text: &str, base: &Path, fallback_name: &str) -> Result<ProblemSpec, CliError> {
        let mut single: BTreeMap<&str, String> = BTreeMap::new();
        let mut family = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Syntax {
                    line: i + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(bad(key, "unknown key"));
            };
            if known == "family" {
                family.push(parse_points(known, value)?);
            } else if single.insert(known, value.to_string()).is_some() {
                return Err(bad(known, "given more than once"));
            }
        }
        let get = |k: &str| single.get(k).map(String::as_str);
        let need = |k: &str| get(k).ok_or_else(|| bad(k, "missing"));

        let domain = match need("domain")? {
            "box" => {
                let lower = parse_vector("lower", need("lower")?)?;
                let upper = parse_vector("upper", need("upper")?)?;
                if lower.len() != upper.len() {
                    return Err(bad("upper", "length differs from `lower`"));
                }
                Domain::new_box(&lower, &upper).map_err(|e| bad("lower", e.to_string()))?
            }
            "polygon" => {
                let pts = parse_points("vertices", need("vertices")?)?;
                let mut verts = Vec::with_capacity(pts.len());
                for p in pts {
                    let [x, y] = p[..] else {
                        return Err(bad("vertices", "polygon vertices need two coordinates"));
                    };
                    verts.push([x, y]);
                }
                Domain::polygon(&verts).map_err(|e| bad("vertices", e.to_string()))?
            }
            other => return Err(bad("domain", format!("`{other}` is neither `box` nor `polygon`"))),
        };
        let dim = domain.dim();
        let dim_check = |key: &str, v: &[f64]| -> Result<(), CliError> {
            if v.len() != dim {
                return Err(bad(key, format!("expected {dim} coordinate(s), got {}", v.len())));
            }
            Ok(())
        };

        let res: Vec<usize> = need("resolution")?
            .split(',')
            .map(|r| parse_count("resolution", r))
            .collect::<Result<_, _>>()?;
        let resolution = match res.len() {
            1 => vec![res[0]; dim],
            n if n == dim => res,
            n => return Err(bad("resolution", format!("expected 1 or {dim} values, got {n}"))),
        };
        if resolution.iter().any(|&r| r < 2) {
            return Err(bad("resolution", "must be at least 2"));
        }

        let function = match (get("expression"), get("samples")) {
            (Some(_), Some(_)) => return Err(bad("samples", "give either `expression` or `samples`, not both")),
            (None, None) => return Err(bad("expression", "missing (or give `samples`)")),
            (Some(text), None) => {
                let expr = parse_expr("expression", text)?;
                if expr.dimension_needed() > dim {
                    return Err(bad("expression", format!("uses more than {dim} variable(s)")));
                }
                FunctionSource::Expression {
                    text: text.to_string(),
                    expr,
                }
            }
            (None, Some(p)) => {
                let path = base.join(p);
                if !path.is_file() {
                    return Err(bad("samples", format!("file `{}` does not exist", path.display())));
                }
                FunctionSource::Samples(path)
            }
        };
        let h_plus = match get("h_plus") {
            None => None,
            Some(text) => {
                let expr = parse_expr("h_plus", text)?;
                if expr.dimension_needed() > dim {
                    return Err(bad("h_plus", format!("uses more than {dim} variable(s)")));
                }
                Some((text.to_string(), expr))
            }
        };

        let tilt = get("tilt").map(|s| parse_vector("tilt", s)).transpose()?;
        if let Some(t) = &tilt {
            dim_check("tilt", t)?;
        }
        let measure_at = get("measure_at").map(|s| parse_vector("measure_at", s)).transpose()?;
        if let Some(m) = &measure_at {
            dim_check("measure_at", m)?;
        }
        for member in &family {
            if member.is_empty() {
                return Err(bad("family", "empty member"));
            }
            for p in member {
                dim_check("family", p)?;
            }
        }
        let dual_resolution = get("dual_resolution")
            .map(|s| parse_count("dual_resolution", s))
            .transpose()?;
        if dual_resolution.is_some_and(|r| r < 2) {
            return Err(bad("dual_resolution", "must be at least 2"));
        }
        let positive = |key: &str| -> Result<Option<f64>, CliError> {
            get(key)
                .map(|s| {
                    let v = parse_real(key, s)?;
                    if v < 0.0 {
                        return Err(bad(key, "must not be negative"));
                    }
                    Ok(v)
                })
                .transpose()
        };
        let tol = positive("tol")?;
        let width_tol = positive("width_tol")?;
        let radii = get("radii").map(|s| parse_vector("radii", s)).transpose()?;
        if let Some(r) = &radii {
            if r.windows(2).any(|w| w[1] >= w[0]) || r.iter().any(|&v| v <= 0.0) {
                return Err(bad("radii", "must be positive and strictly decreasing"));
            }
        }

        Ok(ProblemSpec {
            name: get("name").unwrap_or(fallback_name).to_string(),
            sha256: String::new(),
            domain,
            resolution,
            function,
            h_plus,
            tilt,
            dual_resolution,
            tol,
            width_tol,
            family,
            radii,
            measure_at,
        })
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::build(self.domain.clone(), &self.resolution).map_err(|e| bad("resolution", e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(text: &str) -> ProblemSpec {
        ProblemSpec::parse(text, Path::new("."), "t").unwrap()
    }

    fn key_of(text: &str) -> String {
        match ProblemSpec::parse(text, Path::new("."), "t").unwrap_err() {
            CliError::Spec { key, .. } => key,
            e => panic!("unexpected {e:?}"),
        }
    }

    const BASE: &str = "domain = box\nlower = -2\nupper = 2\nresolution = 400\n";

    #[test]
    fn minimal_box_spec() {
        let s = parse_ok(&format!("{BASE}expression = (x^2 - 1)^2  # double well\n"));
        assert_eq!(s.name, "t");
        assert_eq!(s.resolution, vec![400]);
        assert!(matches!(s.function, FunctionSource::Expression { .. }));
    }

    #[test]
    fn polygon_with_family_and_broadcast_resolution() {
        let s = parse_ok(
            "name = tri\ndomain = polygon\nvertices = 0,0; 1,0; 0,1\nresolution = 32\n\
             expression = x^2 + y^2\nfamily = 0,0; 0.1,0\nfamily = 0,0\nradii = 0.5, 0.25\n",
        );
        assert_eq!(s.resolution, vec![32, 32]);
        assert_eq!(s.family.len(), 2);
        assert_eq!(s.family[0], vec![vec![0.0, 0.0], vec![0.1, 0.0]]);
        assert_eq!(s.name, "tri");
    }

    #[test]
    fn diagnostics_name_the_key() {
        assert_eq!(key_of("lower = 0\n"), "domain");
        assert_eq!(key_of("domain = box\nupper = 1\n"), "lower");
        assert_eq!(key_of(&format!("{BASE}expression = x +\n")), "expression");
        assert_eq!(key_of(&format!("{BASE}expression = y\n")), "expression");
        assert_eq!(key_of(&format!("{BASE}expression = x\ncolour = red\n")), "colour");
        assert_eq!(key_of(&format!("{BASE}expression = x\ntilt = 1, 2\n")), "tilt");
        assert_eq!(key_of(&format!("{BASE}expression = x\nradii = 0.1, 0.2\n")), "radii");
        assert_eq!(key_of(&format!("{BASE}expression = x\nsamples = nope.csv\n")), "samples");
        assert_eq!(key_of(&format!("{BASE}expression = x\nexpression = x\n")), "expression");
        assert_eq!(key_of("domain = box\nlower = 1\nupper = 0\nresolution = 4\nexpression = x\n"), "lower");
        assert_eq!(key_of("domain = box\nlower = 0\nupper = 1\nresolution = 1\nexpression = x\n"), "resolution");
        assert!(matches!(
            ProblemSpec::parse("domain box\n", Path::new("."), "t"),
            Err(CliError::Syntax { line: 1, .. })
        ));
    }
}
