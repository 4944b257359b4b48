use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use greenrep::oned::{enclose_1d, intervals_for, sup_norm, sweep, write_sweep_csv};
use greenrep::twod::SIGN_TOL;
use greenrep::{certify_sign, enclose_batch, write_batch_csv, BatchRow, Error, SignVerdict, SignedSplit};
use serde::Serialize;

use crate::problem::{parse_expr, InputError, ProblemFile, SCHEMA_VERSION};

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Engine(String),
    NeedsSplit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Engine(_) => 3,
            CliError::NeedsSplit(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
            CliError::NeedsSplit(m) => write!(f, "{m}"),
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.0)
    }
}

fn engine(e: Error) -> CliError {
    match e {
        Error::NeedsSplit(m) => CliError::NeedsSplit(split_guidance(&m)),
        e => CliError::Engine(e.to_string()),
    }
}

fn split_guidance(reason: &str) -> String {
    format!(
        "source is {reason} on the domain; add \"split\": {{\"plus\": \"...\", \"minus\": \"...\"}} \
         with both parts nonnegative and plus - minus equal to the source"
    )
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value).map_err(|e| CliError::Engine(e.to_string()))
}

pub struct Enclose1dArgs {
    pub file: PathBuf,
    pub h: Option<f64>,
    pub c: Option<f64>,
    pub sweep: bool,
    pub out: Option<PathBuf>,
    pub emit_plot: Option<PathBuf>,
}

#[derive(Serialize)]
struct Plot1d<'a> {
    schema: u32,
    h: f64,
    c: f64,
    x: Vec<f64>,
    lower: &'a [f64],
    upper: &'a [f64],
}

pub fn enclose1d(args: &Enclose1dArgs) -> Result<(), CliError> {
    let problem = ProblemFile::load(&args.file)?;
    let f = problem.source_1d()?;
    let (shift, eps_rule) = problem.oned_rules(args.c)?;
    if args.sweep {
        if args.emit_plot.is_some() {
            return Err(CliError::Input("--emit-plot is not available with --sweep".into()));
        }
        let hs = match args.h {
            Some(h) => vec![h],
            None => problem.oned.sweep.clone(),
        };
        for &h in &hs {
            intervals_for(h).map_err(|e| CliError::Input(e.to_string()))?;
        }
        let rows = sweep(&f, &hs, shift, eps_rule).map_err(engine)?;
        write_sweep_csv(&rows, open_out(args.out.as_deref())?).map_err(engine)?;
        for r in &rows {
            eprintln!("h = {:e}  c = {:e}  max gap = {:e}  ({} passes)", r.h, r.c, r.max_gap, r.iterations);
        }
        return Ok(());
    }
    let h = args.h.unwrap_or(problem.oned.h);
    intervals_for(h).map_err(|e| CliError::Input(e.to_string()))?;
    let c = shift.shift(h, sup_norm(&f).map_err(engine)?);
    let enc = enclose_1d(&f, h, c, eps_rule).map_err(engine)?;
    enc.write_csv(open_out(args.out.as_deref())?).map_err(engine)?;
    if let Some(path) = &args.emit_plot {
        let grid = &enc.upper.grid;
        let plot = Plot1d {
            schema: SCHEMA_VERSION,
            h,
            c,
            x: (0..=grid.intervals()).map(|i| grid.node_f64(i)).collect(),
            lower: &enc.lower.grid.values,
            upper: &grid.values,
        };
        write_json(path, &plot)?;
    }
    eprintln!(
        "h = {h:e}  c = {c:e}  eps = {:e}  max gap = {:e}  (super {} passes, sub {} passes)",
        enc.upper.eps,
        enc.max_gap(),
        enc.upper.iterations,
        enc.lower.iterations
    );
    Ok(())
}

pub struct Enclose2dArgs {
    pub file: PathBuf,
    pub out: Option<PathBuf>,
    pub emit_plot: Option<PathBuf>,
}

#[derive(Serialize)]
struct PlotPoint {
    x: f64,
    y: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    width: Option<f64>,
    rel_error: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct Plot2d {
    schema: u32,
    domain: Vec<[f64; 2]>,
    points: Vec<PlotPoint>,
}

fn plot_point(r: &BatchRow) -> PlotPoint {
    let (x, y) = (r.point.x, r.point.y);
    match &r.result {
        Ok(e) => PlotPoint {
            x,
            y,
            lower: Some(e.bound.lo()),
            upper: Some(e.bound.hi()),
            width: Some(e.width),
            rel_error: e.rel_error.is_finite().then_some(e.rel_error),
            error: None,
        },
        Err(e) => PlotPoint { x, y, lower: None, upper: None, width: None, rel_error: None, error: Some(e.to_string()) },
    }
}

pub fn enclose2d(args: &Enclose2dArgs) -> Result<(), CliError> {
    let problem = ProblemFile::load(&args.file)?;
    let poly = problem.polygon()?;
    let f = problem.source_2d()?;
    let points = problem.points(&poly)?;
    let mfs = problem.mfs_config()?;
    let quad = problem.quad_config()?;
    let split = match &problem.split {
        Some(s) => {
            let plus = parse_expr(&s.plus, "split.plus")?;
            let minus = parse_expr(&s.minus, "split.minus")?;
            Some(SignedSplit::new(&f, plus, minus, &poly).map_err(|e| CliError::Input(format!("split: {e}")))?)
        }
        None => match certify_sign(&f, &poly, SIGN_TOL).map_err(engine)? {
            SignVerdict::Nonnegative | SignVerdict::Nonpositive => None,
            SignVerdict::Mixed => return Err(CliError::NeedsSplit(split_guidance("sign-changing"))),
            SignVerdict::Undecided => return Err(CliError::NeedsSplit(split_guidance("not certified single-signed"))),
        },
    };
    let rows = enclose_batch(&poly, &f, split.as_ref(), &points, &mfs, &quad);
    write_batch_csv(&rows, open_out(args.out.as_deref())?).map_err(engine)?;
    if let Some(path) = &args.emit_plot {
        let plot = Plot2d {
            schema: SCHEMA_VERSION,
            domain: poly.vertices().iter().map(|p| [p.x, p.y]).collect(),
            points: rows.iter().map(plot_point).collect(),
        };
        write_json(path, &plot)?;
    }
    let mut first_error = None;
    for r in &rows {
        match &r.result {
            Ok(e) => eprintln!(
                "({}, {})  [{:e}, {:e}]  width {:e}  rel {:e}",
                r.point.x,
                r.point.y,
                e.bound.lo(),
                e.bound.hi(),
                e.width,
                e.rel_error
            ),
            Err(e) => {
                eprintln!("({}, {})  failed: {e}", r.point.x, r.point.y);
                first_error.get_or_insert_with(|| e.clone());
            }
        }
    }
    match first_error {
        Some(e) => Err(engine(e)),
        None => Ok(()),
    }
}
