use std::fs;
use std::path::Path;

use dirac_chains::approx;
use dirac_chains::corpus;
use dirac_chains::io;
use dirac_chains::norms::{self, natural, oracle, upper, FrequencyBudget, GridSpec, NormEstimate};
use dirac_chains::{Error, Exec, PointedChain};

use crate::output::{write_atomic, Csv};
use crate::Common;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(Error),
    #[error("{0}")]
    Io(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Certificate(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CertificateInvalid(msg) => CliError::Certificate(msg),
            other => CliError::Input(other),
        }
    }
}

/// Attaches the file name to parse errors.
fn load<T>(path: &Path, read: impl Fn(&Path) -> dirac_chains::Result<T>) -> Result<T, CliError> {
    read(path).map_err(|e| match e {
        Error::Parse { line, msg } => CliError::Io(format!("{}:{line}: {msg}", path.display())),
        other => CliError::Input(other),
    })
}

fn exec(c: &Common) -> Exec {
    if c.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn emit(c: &Common, text: &str) -> Result<(), CliError> {
    match &c.out {
        Some(path) => write_atomic(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

pub fn pair(c: &Common, chain: &Path, form: &Path) -> Result<(), CliError> {
    let a = load(chain, io::read_dipole_chain)?;
    let w = load(form, io::read_form)?;
    let value = a.pair_with(&w, exec(c))?;
    emit(c, &format!("{}\n", num(value)))
}

fn validate_all(a: &PointedChain, ests: &[NormEstimate]) -> Result<(), CliError> {
    for e in ests {
        e.validate(a)?;
    }
    Ok(())
}

fn sandwich_rows(csv: &mut Csv, ests: &[NormEstimate]) {
    for e in ests {
        csv.row(&[e.r.to_string(), num(e.lower), num(e.upper), num(e.gap())]);
    }
}

pub fn norm(c: &Common, chain: &Path, order: usize, certificates: Option<&Path>) -> Result<(), CliError> {
    let a = load(chain, io::read_chain)?;
    let budget = FrequencyBudget::default_for(a.dim());
    let ests = norms::estimate_orders(&a, order, &budget, exec(c))?;
    validate_all(&a, &ests)?;
    if let Some(dir) = certificates {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        for e in &ests {
            let lower = dir.join(format!("lower-{}.form", e.r));
            let upper = dir.join(format!("upper-{}.chain", e.r));
            write_atomic(&lower, &io::format_form(&e.lower_certificate))
                .and_then(|_| write_atomic(&upper, &io::format_cells(a.dim(), a.grade(), &e.upper_certificate)))
                .map_err(|err| CliError::Io(format!("cannot write certificates: {err}")))?;
        }
    }
    let mut csv = Csv::new(&["r", "lower", "upper", "gap"]);
    sandwich_rows(&mut csv, &ests);
    eprintln!("{} terms in R^{}, grade {}; all {} certificates verified", a.len(), a.dim(), a.grade(), 2 * ests.len());
    emit(c, &csv.into_string())
}

pub fn natural(c: &Common, chain: &Path, rmax: usize, tol: f64) -> Result<(), CliError> {
    let a = load(chain, io::read_chain)?;
    let nat = natural::natural_norm_with(&a, rmax, tol, &FrequencyBudget::default_for(a.dim()), exec(c))?;
    validate_all(&a, &nat.estimates)?;
    let mut csv = Csv::new(&["r", "lower", "upper", "gap", "relative_change"]);
    for (i, e) in nat.estimates.iter().enumerate() {
        let change = if i == 0 { String::new() } else { num(natural::relative_change(nat.estimates[i - 1].upper, e.upper)) };
        csv.row(&[e.r.to_string(), num(e.lower), num(e.upper), num(e.gap()), change]);
    }
    match nat.plateau_order {
        Some(r) => eprintln!("upper bounds settle at r = {r} (tol {tol}): natural norm ≤ {}", nat.plateau),
        None => eprintln!("no plateau within r ≤ {rmax} (tol {tol}); last upper bound {}", nat.plateau),
    }
    if !nat.monotone {
        return Err(CliError::Certificate("upper bounds are not non-increasing in r".into()));
    }
    emit(c, &csv.into_string())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::Io(format!("bad {what} `{t}` in --grid"))))
        .collect()
}

fn parse_grid(spec: &str, n: usize) -> Result<GridSpec, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Io(format!("--grid must be ORIGIN:SPACING:COUNT, got `{spec}`")));
    }
    let mut origin: Vec<f64> = parse_list(parts[0], "origin")?;
    let spacing: f64 = parts[1].trim().parse().map_err(|_| CliError::Io(format!("bad spacing `{}`", parts[1])))?;
    let mut counts: Vec<usize> = parse_list(parts[2], "count")?;
    if origin.len() == 1 {
        origin = vec![origin[0]; n];
    }
    if counts.len() == 1 {
        counts = vec![counts[0]; n];
    }
    if origin.len() != n || counts.len() != n {
        return Err(CliError::Io(format!("--grid needs {n} origin coordinates and counts")));
    }
    Ok(GridSpec::new(origin, spacing, counts)?)
}

pub fn oracle(c: &Common, chain: &Path, order: usize, grid: Option<&str>) -> Result<(), CliError> {
    let a = load(chain, io::read_chain)?;
    let grid = match grid {
        Some(s) => parse_grid(s, a.dim())?,
        None => GridSpec::covering(&a, 0.05, 4)?,
    };
    let rep = oracle::norm_oracle_grid(&a, order, &grid)?;
    let est = norms::estimate_with(&a, order, &FrequencyBudget::default_for(a.dim()), exec(c))?;
    est.validate(&a)?;
    let mut csv = Csv::new(&["spacing", "oracle", "lower", "upper"]);
    for (h, v) in [(rep.spacing, rep.value), (rep.refined_spacing, rep.refined_value)] {
        csv.row(&[num(h), num(v), num(est.lower), num(est.upper)]);
    }
    let inside = |v: f64| est.lower - 1e-9 <= v && v <= est.upper + 1e-9;
    eprintln!(
        "r = {order}: oracle {} -> {} under refinement; sandwich [{}, {}] {} both",
        rep.value,
        rep.refined_value,
        est.lower,
        est.upper,
        if inside(rep.value) && inside(rep.refined_value) { "contains" } else { "does not contain" }
    );
    emit(c, &csv.into_string())
}

pub fn stokes(c: &Common, cell: &Path, form: &Path, ms: &[usize]) -> Result<(), CliError> {
    let cell = load(cell, io::read_cell)?;
    let w = load(form, io::read_form)?;
    let mut csv = Csv::new(&["m", "boundary", "interior", "residual"]);
    let mut residuals = Vec::new();
    for &m in ms {
        let s = approx::stokes_sample(&cell, &w, m)?;
        residuals.push(s.residual());
        csv.row(&[m.to_string(), num(s.boundary), num(s.interior), num(s.residual())]);
    }
    if ms.len() >= 2 {
        let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        eprintln!("log-log slope of the residual: {}", approx::fit_loglog_slope(&xs, &residuals)?);
    }
    emit(c, &csv.into_string())
}

pub fn cauchy(c: &Common, cell: &Path, order: usize, ms: &[usize]) -> Result<(), CliError> {
    let cell = load(cell, io::read_cell)?;
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Io("--m must be increasing".into()));
    }
    let ex = exec(c);
    let mut csv = Csv::new(&["m", "upper"]);
    let mut values = Vec::new();
    for &m in ms {
        let diff = approx::riemann_chain_with(&cell, 2 * m, ex)?.sub(&approx::riemann_chain_with(&cell, m, ex)?)?;
        let ub = upper::norm_upper_with(&diff, order, ex)?;
        let residual = upper::expansion_residual(&diff, &ub.cells)?;
        if residual > norms::CERTIFICATE_TOL {
            return Err(CliError::Certificate(format!("m = {m}: decomposition residual {residual:e}")));
        }
        values.push(ub.value);
        csv.row(&[m.to_string(), num(ub.value)]);
    }
    if ms.len() >= 2 {
        let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
        eprintln!("r = {order}: log-log slope of ‖A_2m − A_m‖ upper bounds: {}", approx::fit_loglog_slope(&xs, &values)?);
    }
    emit(c, &csv.into_string())
}

pub fn dipole_check(c: &Common, cases: usize, tol: f64) -> Result<(), CliError> {
    let ex = exec(c);
    let mut csv = Csv::new(&["case", "k", "order", "lhs", "rhs", "error"]);
    let mut worst = 0.0f64;
    for (i, case) in corpus::duality_cases(c.seed, cases).iter().enumerate() {
        let lhs = case.chain.apply_pv(&case.direction)?.pair_with(&case.form, ex)?;
        let rhs = case.chain.pair_with(&case.form.lie_derivative(&case.direction)?, ex)?;
        let err = (lhs - rhs).abs();
        worst = worst.max(err);
        csv.row(&[i.to_string(), case.chain.grade().to_string(), case.chain.order().to_string(), num(lhs), num(rhs), num(err)]);
    }
    eprintln!("{cases} cases (seed {}), max error {worst:e}, tolerance {tol:e}", c.seed);
    emit(c, &csv.into_string())?;
    if worst > tol {
        return Err(CliError::Certificate(format!("duality identity violated: {worst:e} > {tol:e}")));
    }
    Ok(())
}
