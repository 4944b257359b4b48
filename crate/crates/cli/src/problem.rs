//! Problem-file schema (version 1) and conversion into engine inputs.

use std::path::Path;

use greenrep::interval::SearchOptions;
use greenrep::oned::{EpsRule, ShiftRule};
use greenrep::{Degrees, MfsConfig, PiecewiseSource1D, Point, Polygon, QuadConfig, SourceExpr};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub domain: Domain,
    pub source: Source,
    #[serde(default)]
    pub split: Option<Split>,
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub mfs: MfsSection,
    #[serde(default)]
    pub quad: QuadSection,
    #[serde(default)]
    pub oned: OnedSection,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Domain {
    /// The unit interval `(0, 1)`.
    Interval,
    Polygon { vertices: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Source {
    Expr(String),
    Piecewise { breakpoints: Vec<f64>, pieces: Vec<String> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Split {
    pub plus: String,
    pub minus: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct MfsSection {
    pub n: usize,
    #[serde(rename = "R_near")]
    pub r_near: f64,
    #[serde(rename = "R_far")]
    pub r_far: f64,
    pub corner: Option<[f64; 2]>,
    /// Target width of the boundary extremum enclosures.
    pub tol: f64,
}

impl Default for MfsSection {
    fn default() -> Self {
        let d = MfsConfig::default();
        MfsSection { n: d.n, r_near: d.r_near, r_far: d.r_far, corner: None, tol: d.search.tol }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadSection {
    pub deg_u: usize,
    pub deg_k: usize,
    pub subdiv: usize,
    pub tol: f64,
}

impl Default for QuadSection {
    fn default() -> Self {
        let d = QuadConfig::default();
        QuadSection { deg_u: d.tm_degrees.u, deg_k: d.tm_degrees.k, subdiv: d.regular_subdiv, tol: d.tol }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OnedSection {
    pub h: f64,
    /// Boundary shift; `None` selects `0.2·sup|f|·h²`.
    pub c: Option<f64>,
    pub eps_factor: f64,
    /// Mesh widths for `--sweep`.
    pub sweep: Vec<f64>,
}

impl Default for OnedSection {
    fn default() -> Self {
        OnedSection {
            h: 2f64.powi(-5),
            c: None,
            eps_factor: EpsRule::default().factor,
            sweep: (5..=9).map(|k| 2f64.powi(-k)).collect(),
        }
    }
}

/// Rejected input, reported with exit code 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> InputError + '_ {
    move |e| InputError(format!("{context}: {e}"))
}

pub fn parse_expr(text: &str, what: &str) -> Result<SourceExpr, InputError> {
    text.parse().map_err(input(what))
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(input(&path.display().to_string()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let p: ProblemFile = serde_json::from_str(text).map_err(input("invalid problem file"))?;
        if p.schema != SCHEMA_VERSION {
            return Err(InputError(format!("unsupported schema {} (expected {SCHEMA_VERSION})", p.schema)));
        }
        Ok(p)
    }

    pub fn polygon(&self) -> Result<Polygon, InputError> {
        match &self.domain {
            Domain::Polygon { vertices } => Polygon::from_coords(vertices).map_err(input("domain")),
            Domain::Interval => Err(InputError("enclose2d needs a polygon domain".into())),
        }
    }

    pub fn source_2d(&self) -> Result<SourceExpr, InputError> {
        match &self.source {
            Source::Expr(s) => parse_expr(s, "source"),
            Source::Piecewise { .. } => Err(InputError("piecewise sources are only supported in 1D".into())),
        }
    }

    pub fn source_1d(&self) -> Result<PiecewiseSource1D, InputError> {
        if !matches!(self.domain, Domain::Interval) {
            return Err(InputError("enclose1d needs an interval domain".into()));
        }
        let f = match &self.source {
            Source::Expr(s) => PiecewiseSource1D::smooth(parse_expr(s, "source")?),
            Source::Piecewise { breakpoints, pieces } => {
                let pieces = pieces.iter().map(|p| parse_expr(p, "source piece")).collect::<Result<Vec<_>, _>>()?;
                PiecewiseSource1D::new(breakpoints.clone(), pieces)
            }
        };
        let f = f.map_err(input("source"))?;
        if f.pieces().iter().any(|p| p.uses_y()) {
            return Err(InputError("1D sources may only use x".into()));
        }
        Ok(f)
    }

    pub fn points(&self, poly: &Polygon) -> Result<Vec<Point>, InputError> {
        if self.points.is_empty() {
            return Err(InputError("no evaluation points".into()));
        }
        self.points
            .iter()
            .map(|&[x, y]| {
                let p = Point::new(x, y);
                if poly.contains_strict(p) {
                    Ok(p)
                } else {
                    Err(InputError(format!("evaluation point ({x}, {y}) is not in the interior of the domain")))
                }
            })
            .collect()
    }

    pub fn mfs_config(&self) -> Result<MfsConfig, InputError> {
        let m = &self.mfs;
        if m.n < 3 || !(m.r_far > 1.0) || !(m.r_near > 1.0) || !(m.tol > 0.0) {
            return Err(InputError("mfs: need n ≥ 3, R_near > 1, R_far > 1 and tol > 0".into()));
        }
        Ok(MfsConfig {
            n: m.n,
            r_far: m.r_far,
            r_near: m.r_near,
            corner: m.corner.map(Point::from),
            search: SearchOptions::with_tol(m.tol),
            ..MfsConfig::default()
        })
    }

    pub fn quad_config(&self) -> Result<QuadConfig, InputError> {
        let q = &self.quad;
        let cfg = QuadConfig {
            tm_degrees: Degrees::new(q.deg_u, q.deg_k),
            regular_subdiv: q.subdiv,
            tol: q.tol,
            ..QuadConfig::default()
        };
        cfg.validate().map_err(input("quad"))?;
        Ok(cfg)
    }

    /// Shift rule and eps rule, with optional overrides of `c`.
    pub fn oned_rules(&self, c_override: Option<f64>) -> Result<(ShiftRule, EpsRule), InputError> {
        let o = &self.oned;
        if !(o.eps_factor > 0.0) {
            return Err(InputError("oned.eps_factor must be positive".into()));
        }
        let shift = match c_override.or(o.c) {
            Some(c) if c > 0.0 => ShiftRule::Constant(c),
            Some(c) => return Err(InputError(format!("boundary shift c must be positive, got {c}"))),
            None => ShiftRule::default(),
        };
        Ok((shift, EpsRule { factor: o.eps_factor }))
    }
}
