//! The subcommands. Each returns its primary output as text plus a few
//! summary lines; `main` decides where they go.

use std::path::{Path, PathBuf};

use bbw_core::lifting::scheme_parameters;
use bbw_core::refinement::two_scale_residual;
use bbw_core::{BrokenBasis, JumpMatrix, TransformPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, ExperimentConfig, FunctionSpec};
use crate::error::CliError;
use crate::formats::{self, csv_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Basis,
    Wavelets,
    Refine,
    Project,
    Forward,
    Inverse,
    Check,
}

#[derive(Debug, Clone)]
pub struct Request {
    pub command: Command,
    pub config: PathBuf,
    pub level: Option<usize>,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub target: Option<String>,
    pub tolerance_scale: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Written to `--out`, or to standard output when no path is given.
    pub output: String,
    /// Summary lines for standard error.
    pub notes: Vec<String>,
    /// False when a numerical check failed.
    pub passed: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self {
            output,
            notes: Vec::new(),
            passed: true,
        }
    }
}

pub fn run(req: &Request) -> Result<Outcome, CliError> {
    if !(req.tolerance_scale.is_finite() && req.tolerance_scale > 0.0) {
        return Err(CliError::Input(format!(
            "tolerance scale must be positive, got {}",
            req.tolerance_scale
        )));
    }
    let exp = ExperimentConfig::load(&req.config)?.validate()?;
    match req.command {
        Command::Basis => basis(req, &exp),
        Command::Wavelets => wavelets(req, &exp),
        Command::Refine => refine(req, &exp),
        Command::Project => project(req, &exp),
        Command::Forward => forward(req, &exp),
        Command::Inverse => inverse(req, &exp),
        Command::Check => check(req, &exp),
    }
}

fn sample_points(req: &Request, exp: &Experiment) -> Result<Vec<f64>, CliError> {
    let n = req.samples.unwrap_or(exp.config.samples);
    if n < 2 {
        return Err(CliError::Input(format!("need at least 2 samples, got {n}")));
    }
    Ok((0..n).map(|i| i as f64 / (n - 1) as f64).collect())
}

fn level_or(req: &Request, default: usize, count: usize, what: &str) -> Result<usize, CliError> {
    let j = req.level.unwrap_or(default);
    if j >= count {
        return Err(CliError::Input(format!(
            "{what} level {j} does not exist; valid levels are 0..{}",
            count.saturating_sub(1)
        )));
    }
    Ok(j)
}

fn plan(exp: &Experiment) -> Result<TransformPlan, CliError> {
    Ok(TransformPlan::new(&exp.family, &exp.hierarchy)?)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn data_path(req: &Request) -> Result<&Path, CliError> {
    req.data
        .as_deref()
        .ok_or_else(|| CliError::Input("this command needs --data <path>".into()))
}

fn is_csv(path: Option<&Path>) -> bool {
    path.and_then(Path::extension)
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn header(first: &str, prefix: &str, count: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((0..count).map(|k| format!("{prefix}_{k}")))
        .collect()
}

fn basis(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let j = level_or(req, 0, exp.hierarchy.len(), "knot")?;
    let b = BrokenBasis::build(&exp.family, exp.hierarchy.level(j))?;
    let xs = sample_points(req, exp)?;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut row = vec![x];
        row.extend(b.evaluate(x, 0)?);
        rows.push(row);
    }
    let mut out = Outcome::ok(csv_table(&header("x", "phi", b.len()), rows));
    out.notes.push(format!(
        "level {j}: {} knots, {} basis functions",
        b.grid().len(),
        b.len()
    ));
    Ok(out)
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn wavelets(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let p = plan(exp)?;
    if p.depth() == 0 {
        return Err(CliError::Input("wavelets need at least two knot levels".into()));
    }
    let j = level_or(req, 0, p.depth(), "wavelet")?;
    let psi = p.wavelets(j);
    let fine = p.basis(j + 1);
    let xs = sample_points(req, exp)?;
    let mut columns = vec![Vec::with_capacity(xs.len()); psi.len()];
    let mut rows = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = psi.evaluate(fine, x, 0)?;
        for (c, y) in columns.iter_mut().zip(&v) {
            c.push(*y);
        }
        let mut row = vec![x];
        row.extend(v);
        rows.push(row);
    }
    let worst = columns
        .iter()
        .map(|c| trapezoid(&xs, c).abs())
        .fold(0.0, f64::max);
    let mut out = Outcome::ok(csv_table(&header("x", "psi", psi.len()), rows));
    out.notes.push(format!(
        "level {j}: {} wavelets, largest trapezoid integral {:.3e}",
        psi.len(),
        worst
    ));
    Ok(out)
}

fn refine(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let p = plan(exp)?;
    let levels: Vec<usize> = match req.level {
        Some(_) => vec![level_or(req, 0, p.depth(), "refinement")?],
        None => (0..p.depth()).collect(),
    };
    let dump: Vec<_> = levels
        .iter()
        .map(|&j| formats::level_json(j, p.level(j)))
        .collect();
    let text = serde_json::to_string_pretty(&dump).expect("plain numbers serialize") + "\n";
    Ok(Outcome::ok(text))
}

fn target_spec(req: &Request, exp: &Experiment) -> Result<FunctionSpec, CliError> {
    match (&req.target, &exp.config.target) {
        (Some(text), _) => serde_json::from_str(text)
            .map_err(|e| CliError::Input(format!("bad --target descriptor: {e}"))),
        (None, Some(t)) => Ok(t.clone()),
        (None, None) => Err(CliError::Input(
            "no projection target: give --target or a \"target\" entry in the config".into(),
        )),
    }
}

fn project(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let j = level_or(req, exp.hierarchy.len() - 1, exp.hierarchy.len(), "knot")?;
    let target = target_spec(req, exp)?.to_function();
    let b = BrokenBasis::build(&exp.family, exp.hierarchy.level(j))?;
    let xs = sample_points(req, exp)?;
    let proj = b.project(&target, &xs)?;
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, e) in xs.iter().zip(&proj.errors) {
        let f = target.derivative(x, 0)?;
        rows.push(vec![x, f, f - e, *e]);
    }
    let head = ["x", "target", "projection", "error"].map(String::from);
    let mut out = Outcome::ok(csv_table(&head, rows));
    out.notes
        .push(format!("level {j}: max |error| = {:.3e}", proj.max_error()));
    Ok(out)
}

fn forward(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let p = plan(exp)?;
    let data = formats::read_vector(&read(data_path(req)?)?)?;
    let expected = p.finest().len();
    if data.len() != expected {
        return Err(CliError::Input(format!(
            "expected {expected} coefficients (finest knots {} + order {} - 2), found {}",
            exp.hierarchy.level(exp.hierarchy.len() - 1).len(),
            exp.config.order,
            data.len()
        )));
    }
    let pyramid = p.forward(&data)?;
    let text = if is_csv(req.out.as_deref()) {
        formats::pyramid_to_csv(&pyramid)
    } else {
        formats::pyramid_to_json(&pyramid)
    };
    let mut out = Outcome::ok(text);
    out.notes.push(format!(
        "{} levels, largest detail {:.3e}",
        pyramid.level_count(),
        pyramid.max_detail()
    ));
    Ok(out)
}

fn inverse(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let p = plan(exp)?;
    let path = data_path(req)?;
    let text = read(path)?;
    let pyramid = if is_csv(Some(path)) {
        formats::pyramid_from_csv(&text)?
    } else {
        formats::pyramid_from_json(&text)?
    };
    if pyramid.details.len() != p.depth() {
        return Err(CliError::Input(format!(
            "pyramid has {} detail levels, the configuration has {}",
            pyramid.details.len(),
            p.depth()
        )));
    }
    let mut expected = vec![p.basis(0).len()];
    expected.extend((0..p.depth()).map(|j| p.level(j).detail_len()));
    let found: Vec<usize> = std::iter::once(pyramid.coarse.len())
        .chain(pyramid.details.iter().map(Vec::len))
        .collect();
    if expected != found {
        return Err(CliError::Input(format!(
            "pyramid sizes {found:?} do not match the configuration {expected:?}"
        )));
    }
    let fine = p.inverse(&pyramid)?;
    Ok(Outcome::ok(formats::write_vector("value", &fine)))
}

struct Checks {
    scale: f64,
    lines: Vec<String>,
    passed: bool,
}

impl Checks {
    fn bound(&mut self, name: &str, value: f64, tol: f64) {
        let tol = tol * self.scale;
        let ok = value < tol;
        self.passed &= ok;
        self.lines.push(format!(
            "{}  {name}: {value:.3e} (tol {tol:.1e})",
            if ok { "PASS" } else { "FAIL" }
        ));
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.passed &= ok;
        self.lines.push(format!(
            "{}  {name}",
            if ok { "PASS" } else { "FAIL" }
        ));
    }

    fn info(&mut self, line: String) {
        self.lines.push(format!("INFO  {line}"));
    }
}

fn check(req: &Request, exp: &Experiment) -> Result<Outcome, CliError> {
    let xs = sample_points(req, exp)?;
    let mut c = Checks {
        scale: req.tolerance_scale,
        lines: Vec::new(),
        passed: true,
    };
    let p = plan(exp)?;
    let order = exp.config.order;
    c.info(format!(
        "order {order}, {} knot levels ({} .. {} knots), tolerance scale {}",
        exp.hierarchy.len(),
        exp.hierarchy.level(0).len(),
        p.finest().grid().len(),
        req.tolerance_scale
    ));

    let mut continuity = 0.0f64;
    let mut partition = 0.0f64;
    for j in 0..=p.depth() {
        let b = p.basis(j);
        continuity = continuity.max(b.max_continuity_defect().max(b.max_boundary_defect()));
        for &x in &xs {
            let s: f64 = b.evaluate(x, 0)?.iter().sum();
            partition = partition.max((s - exp.family.members()[0].derivative(x, 0)?).abs());
        }
    }
    c.bound("basis continuity and boundary conditions", continuity, 1e-9);
    c.bound("partition of unity", partition, 1e-10);

    let (mut rows, mut jumps, mut two_scale, mut factor, mut moments) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut first_row = true;
    let mut params = true;
    let (kind, u, _) = scheme_parameters(order);
    for j in 0..p.depth() {
        let lp = p.level(j);
        let h = &lp.refinement;
        rows = rows.max(h.row_sum_deviation());
        jumps = jumps.max(JumpMatrix::new(p.basis(j + 1)).annihilation_residual(h));
        first_row &= (0..h.cols()).all(|k| h.get(0, k) == if k == 0 { 1.0 } else { 0.0 });
        two_scale = two_scale.max(two_scale_residual(p.basis(j), p.basis(j + 1), h, &xs)?);
        factor = factor.max(lp.scheme.reconstruct().max_abs_diff(&lp.split.eo));
        params &= lp.scheme.kind() == kind && lp.scheme.pairs() == u;
        let table = p.basis(j + 1).moments(1);
        let psi = p.wavelets(j);
        for q in 0..2 {
            let m = psi.coefficients().transpose_mul_vec(&table.totals(q));
            moments = moments.max(m.iter().fold(0.0, |a, v| a.max(v.abs())));
        }
    }
    c.bound("refinement row sums", rows, 1e-10);
    c.bound("refinement jump annihilation", jumps, 1e-8);
    c.flag("first refinement row is exactly (1, 0, ..)", first_row);
    c.bound("two-scale residual", two_scale, 1e-8);
    c.bound("lifting factor reconstruction", factor, 1e-10);
    c.flag("lifting scheme shape matches the order", params);
    c.bound("wavelet moments (q = 0, 1)", moments, 1e-9);

    let mut span = 0.0f64;
    for w in exp.family.members() {
        let f = |x: f64| w.derivative(x, 0);
        span = span.max(p.analyze_function(&f)?.max_detail());
    }
    c.bound("details of family members", span, 1e-8);

    let mut rng = ChaCha8Rng::seed_from_u64(0x0062_6277);
    let mut round_trip = 0.0f64;
    for _ in 0..10 {
        let s: Vec<f64> = (0..p.finest().len())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let back = p.inverse(&p.forward(&s)?)?;
        round_trip = s
            .iter()
            .zip(&back)
            .fold(round_trip, |m, (a, b)| m.max((a - b).abs()));
    }
    c.bound("perfect reconstruction", round_trip, 1e-9);

    if let Some(t) = &exp.config.target {
        let err = p.finest().project(&t.to_function(), &xs)?.max_error();
        c.info(format!("projection of the target on the finest level: max |error| {err:.3e}"));
    }

    let summary = if c.passed {
        "all checks passed"
    } else {
        "some checks FAILED"
    };
    c.lines.push(summary.to_string());
    Ok(Outcome {
        output: c.lines.join("\n") + "\n",
        notes: Vec::new(),
        passed: c.passed,
    })
}
