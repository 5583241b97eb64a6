//! Command-line front end. `run` returns the exit code and the rendered
//! output so the binary stays a thin wrapper.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::algebra::{check_generic, parse_operator, NcPolynomial};
use crate::config::{Config, GammaRange, Window};
use crate::error::HsolvError;
use crate::numerics::{
    abel_check, adjoint_kernel_basis, canonical_basis, gamma_scan, mirrored_basis, transition_matrix,
    wronskians, BasisJet, OdeModel, ScanReport,
};
use crate::realization::Sign;
use crate::scalar::C64;
use crate::verdict::{classify, estimate_report, ErrorEcho, OperatorEcho, Report};
use crate::verify::verify_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NON_GENERIC: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

const DEFAULT_GAMMA: &str = "4";

#[derive(Debug, Parser)]
#[command(name = "hsolv", version, about = "Local solvability of left-invariant operators on the Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solvability verdict with the criteria that decided it
    Classify,
    /// Genericity report and ordered characteristic roots
    Roots,
    /// Exponents gamma_j, beta_j, rho_j at one gamma
    Exponents,
    /// Canonical kernel basis jets on the window
    Basis,
    /// Schwartz-matching scan over a gamma interval
    Scan,
    /// Invariant suite with one line per check
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Roots => "roots",
            Command::Exponents => "exponents",
            Command::Basis => "basis",
            Command::Scan => "scan",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
    Both,
}

impl SignArg {
    fn signs(self) -> Vec<Sign> {
        match self {
            SignArg::Plus => vec![Sign::Plus],
            SignArg::Minus => vec![Sign::Minus],
            SignArg::Both => vec![Sign::Plus, Sign::Minus],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Report,
    Tabular,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Operator expression, e.g. "-X^2 - Y^2"
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub op: Option<String>,
    /// Representation parameter as re[,im]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Scan interval lo:hi:steps
    #[arg(long = "gamma-range", global = true)]
    pub gamma_range: Option<String>,
    #[arg(long, value_enum, default_value = "plus", global = true)]
    pub sign: SignArg,
    /// Asymptotic window t0:T
    #[arg(long, env = "HSOLV_WINDOW", global = true)]
    pub window: Option<String>,
    /// Tolerance on the smallest singular value in matching tests
    #[arg(long, env = "HSOLV_TOL", global = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "report", global = true)]
    pub format: Format,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long = "inject-root-misorder", hide = true, global = true)]
    pub inject_root_misorder: bool,
}

/// Exit code and rendered document.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub diagnostics: String,
}

pub fn exit_code(e: &HsolvError) -> i32 {
    match e {
        HsolvError::Syntax { .. }
        | HsolvError::EmptyInput
        | HsolvError::DegreeOutOfRange(_)
        | HsolvError::InvalidArgument(_) => EXIT_VALIDATION,
        HsolvError::NonGeneric(_) | HsolvError::DegreeTooLow(_) | HsolvError::RepeatedRoots(_) => EXIT_NON_GENERIC,
        _ => EXIT_NUMERICAL,
    }
}

fn kind(e: &HsolvError) -> &'static str {
    match exit_code(e) {
        EXIT_VALIDATION => "validation",
        EXIT_NON_GENERIC => "non_generic",
        _ => "numerical",
    }
}

/// Flags override the environment, which overrides the defaults.
pub fn build_config(o: &Opts) -> Result<Config, HsolvError> {
    let mut cfg = Config::default();
    if let Some(t) = o.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(HsolvError::InvalidArgument(format!("tolerance must be positive, got {t}")));
        }
        cfg.tol.sigma = t;
        cfg.tol.sigma_confirm = cfg.tol.sigma_confirm.min(t);
    }
    if let Some(w) = &o.window {
        cfg.window = Window::parse(w, cfg.window.points)?;
    }
    if let Some(r) = &o.gamma_range {
        cfg.gamma_range = GammaRange::parse(r)?;
    }
    Ok(cfg)
}

pub fn parse_gamma(s: &str) -> Result<C64, HsolvError> {
    let bad = || HsolvError::InvalidArgument(format!("gamma must be re[,im], got {s:?}"));
    let mut it = s.split(',');
    let re = it.next().ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())?;
    let im = match it.next() {
        Some(v) => v.trim().parse::<f64>().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || re.is_nan() || im.is_nan() || (re == 0.0 && im == 0.0) {
        return Err(bad());
    }
    Ok(C64::new(re, im))
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn f(x: f64) -> String {
    format!("{x:.17e}")
}

struct Ctx {
    cfg: Config,
    opts: Opts,
    report: Report,
}

type Step = Result<(i32, String), HsolvError>;

impl Ctx {
    fn operator(&mut self) -> Result<NcPolynomial, HsolvError> {
        let text = self.opts.op.clone().ok_or_else(|| HsolvError::InvalidArgument("--op is required".into()))?;
        let p = parse_operator(&text)?;
        self.report.operator = Some(OperatorEcho::new(&text, &p));
        Ok(p)
    }

    fn gamma(&self) -> Result<C64, HsolvError> {
        parse_gamma(self.opts.gamma.as_deref().unwrap_or(DEFAULT_GAMMA))
    }

    fn finish(&self, code: i32, tabular: String) -> (i32, String) {
        match self.opts.format {
            Format::Report => (code, self.report.to_json() + "\n"),
            Format::Tabular => (code, tabular),
        }
    }

    /// Non-generic operators stop every command with exit 3.
    fn generic(&mut self, p: &NcPolynomial) -> Result<bool, HsolvError> {
        let g = check_generic(p, &self.cfg.tol)?;
        self.report.roots = g.roots.clone();
        let ok = g.is_generic;
        if !ok {
            self.report.error = Some(ErrorEcho {
                kind: "non_generic".into(),
                message: g.reasons.join("; "),
                exit_code: EXIT_NON_GENERIC,
            });
        }
        self.report.genericity = Some(g);
        Ok(ok)
    }

    fn classify(&mut self) -> Step {
        let p = self.operator()?;
        let generic = self.generic(&p)?;
        let v = classify(&p, &self.cfg);
        let op = self.report.operator.take();
        let err = self.report.error.take();
        self.report = self.report.clone().with_verdict(&v);
        self.report.operator = op;
        self.report.error = err;
        let c = v.root_counts;
        let tab = csv_string(
            &["status", "p_pos", "p_neg", "n", "hypothesis"],
            &[vec![
                v.status.as_str().into(),
                c.p_pos.to_string(),
                c.p_neg.to_string(),
                c.n.to_string(),
                v.hypothesis.clone().unwrap_or_default(),
            ]],
        );
        Ok(self.finish(if generic { EXIT_OK } else { EXIT_NON_GENERIC }, tab))
    }

    fn roots(&mut self) -> Step {
        let p = self.operator()?;
        let generic = self.generic(&p)?;
        let rows: Vec<Vec<String>> =
            self.report.roots.iter().enumerate().map(|(j, r)| vec![j.to_string(), f(r[0]), f(r[1])]).collect();
        let tab = csv_string(&["j", "gamma_re", "gamma_im"], &rows);
        Ok(self.finish(if generic { EXIT_OK } else { EXIT_NON_GENERIC }, tab))
    }

    fn exponents(&mut self) -> Step {
        let p = self.operator()?;
        if !self.generic(&p)? {
            return Ok(self.finish(EXIT_NON_GENERIC, String::new()));
        }
        let gamma = self.gamma()?;
        let mut rows = Vec::new();
        let mut per_sign = Vec::new();
        for sign in self.opts.sign.signs() {
            let m = OdeModel::for_operator(&p, sign, gamma, &self.cfg.tol)?;
            let recs = m.expo.records();
            for r in &recs {
                rows.push(vec![
                    sign.label().into(),
                    r.j.to_string(),
                    f(r.gamma[0]),
                    f(r.gamma[1]),
                    f(r.beta[0]),
                    f(r.beta[1]),
                    f(r.rho[0]),
                    f(r.rho[1]),
                ]);
            }
            let (r1, r2) = m.gauge.residuals(&m.frame.roots);
            per_sign.push(json!({ "sign": sign.label(), "exponents": recs, "gauge_residuals": [r1, r2] }));
        }
        self.report.numerics = json!({ "gamma": [gamma.re, gamma.im], "signs": per_sign });
        let tab = csv_string(&["sign", "j", "gamma_re", "gamma_im", "beta_re", "beta_im", "rho_re", "rho_im"], &rows);
        Ok(self.finish(EXIT_OK, tab))
    }

    fn basis_summary(b: &BasisJet) -> Result<serde_json::Value, HsolvError> {
        let res = b.jet_residuals(1e-12)?;
        let w = wronskians(b)?;
        let abel = abel_check(b, &w)?;
        let adj = adjoint_kernel_basis(b, &w)?;
        Ok(json!({
            "sign": b.sign.label(),
            "jet_residuals": res,
            "abel_max_defect": abel.max_defect,
            "log_w_slope": [abel.slope.re, abel.slope.im],
            "adjoint_residuals": adj.residuals,
            "exponents": b.expo.records(),
            "points": b.s_grid.len(),
        }))
    }

    fn basis(&mut self) -> Step {
        let p = self.operator()?;
        if !self.generic(&p)? {
            return Ok(self.finish(EXIT_NON_GENERIC, String::new()));
        }
        let gamma = self.gamma()?;
        let mut rows = Vec::new();
        let mut sections = Vec::new();
        for sign in self.opts.sign.signs() {
            let b = canonical_basis(&p, sign, gamma, &self.cfg.window, &self.cfg)?;
            let mut sec = Self::basis_summary(&b)?;
            let est = estimate_report(&b.model, &self.cfg.window, &self.cfg, false)?;
            sec["estimates"] = serde_json::to_value(&est).expect("serializable");
            if let Ok(minus) = mirrored_basis(&b.model, &self.cfg.window, &self.cfg) {
                if let Ok(t) = transition_matrix(&b, &minus) {
                    let a: Vec<Vec<[f64; 2]>> =
                        t.a.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
                    sec["transition_matrix"] = json!({ "a": a, "residual": t.residual });
                }
            }
            sections.push(sec);
            for (k, jets) in b.jets.iter().enumerate() {
                for (i, jet) in jets.iter().enumerate() {
                    let t = b.t_grid[i];
                    for j in 0..b.n() {
                        rows.push(vec![
                            sign.label().into(),
                            f(t.re),
                            f(t.im),
                            k.to_string(),
                            j.to_string(),
                            f(jet.log_abs(j)),
                            f(jet.phase(j)),
                        ]);
                    }
                }
            }
        }
        self.report.numerics = json!({ "gamma": [gamma.re, gamma.im], "bases": sections });
        let tab = csv_string(&["sign", "t_re", "t_im", "k", "j", "log_abs", "phase"], &rows);
        Ok(self.finish(EXIT_OK, tab))
    }

    fn scan(&mut self) -> Step {
        let p = self.operator()?;
        if !self.generic(&p)? {
            return Ok(self.finish(EXIT_NON_GENERIC, String::new()));
        }
        let mut scans: Vec<ScanReport> = Vec::new();
        for sign in self.opts.sign.signs() {
            scans.push(gamma_scan(&p, sign, &self.cfg.gamma_range, &self.cfg)?);
        }
        let mut rows = Vec::new();
        let mut summary = String::new();
        for s in &scans {
            for r in &s.rows {
                rows.push(vec![s.sign.clone(), f(r.gamma), f(r.sigma_min), r.p.to_string(), r.q.to_string()]);
            }
            summary += &format!(
                "# sign={} confirmed_dips={} refined_dips={} limit_point_flag={}\n",
                s.sign, s.confirmed_dips, s.refined_dips, s.limit_point_flag
            );
        }
        self.report.numerics = json!({ "scans": scans });
        let tab = csv_string(&["sign", "gamma", "sigma_min", "p", "q"], &rows) + &summary;
        Ok(self.finish(EXIT_OK, tab))
    }

    fn verify(&mut self) -> Step {
        let text = self.opts.op.clone().unwrap_or_else(|| "-X^2 - Y^2".into());
        self.opts.op = Some(text);
        let p = self.operator()?;
        let gamma = self.gamma()?;
        let mut all = true;
        let mut rows = Vec::new();
        let mut sections = Vec::new();
        let mut harness_lines = String::new();
        for sign in self.opts.sign.signs() {
            let r = verify_suite(&p, sign, gamma, &self.cfg, self.opts.inject_root_misorder);
            all &= r.all_pass();
            for c in &r.checks {
                rows.push(vec![
                    sign.label().into(),
                    c.name.clone(),
                    if c.pass { "pass" } else { "FAIL" }.into(),
                    f(c.value),
                    f(c.limit),
                    format!("{:.2}", c.margin()),
                ]);
            }
            for h in &r.harness {
                harness_lines += &format!(
                    "# harness sign={} gamma={} a={} t_max={} growth_sup={:.6e} decay_sup={:.6e} alpha_growth_ratio={:.3} alpha_decay_ratio={:.3}\n",
                    sign.label(),
                    h.gamma,
                    h.a,
                    h.t_max,
                    h.at_alpha.growth,
                    h.at_alpha.decay,
                    h.growth_uniformity,
                    h.decay_uniformity
                );
            }
            sections.push(json!({ "sign": sign.label(), "checks": r.checks, "harness": r.harness }));
        }
        self.report.numerics = json!({ "all_pass": all, "suites": sections });
        let tab = csv_string(&["sign", "check", "status", "value", "limit", "margin"], &rows) + &harness_lines;
        Ok(self.finish(if all { EXIT_OK } else { EXIT_NUMERICAL }, tab))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let cfg = match build_config(&cli.opts) {
        Ok(c) => c,
        Err(e) => return failure(cli, &Config::default(), None, &e),
    };
    let mut ctx = Ctx { cfg, opts: cli.opts.clone(), report: Report::new(cli.command.name(), &cfg) };
    let step = match cli.command {
        Command::Classify => ctx.classify(),
        Command::Roots => ctx.roots(),
        Command::Exponents => ctx.exponents(),
        Command::Basis => ctx.basis(),
        Command::Scan => ctx.scan(),
        Command::Verify => ctx.verify(),
    };
    match step {
        Ok((code, output)) => Outcome { code, output, diagnostics: String::new() },
        Err(e) => failure(cli, &cfg, ctx.report.operator.take(), &e),
    }
}

fn failure(cli: &Cli, cfg: &Config, op: Option<OperatorEcho>, e: &HsolvError) -> Outcome {
    let code = exit_code(e);
    let mut r = Report::new(cli.command.name(), cfg);
    r.operator = op;
    r.error = Some(ErrorEcho { kind: kind(e).into(), message: e.to_string(), exit_code: code });
    let output = match cli.opts.format {
        Format::Report => r.to_json() + "\n",
        Format::Tabular => String::new(),
    };
    Outcome { code, output, diagnostics: format!("hsolv: {e}\n") }
}

/// Parses arguments and runs one command; `--out` is honoured here.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            // help and version requests are not errors
            return if e.use_stderr() {
                Outcome { code: EXIT_VALIDATION, output: String::new(), diagnostics: text }
            } else {
                Outcome { code: EXIT_OK, output: text, diagnostics: String::new() }
            };
        }
    };
    let mut out = dispatch(&cli);
    if let Some(path) = &cli.opts.out {
        if let Err(e) = std::fs::write(path, &out.output) {
            return Outcome {
                code: EXIT_VALIDATION,
                output: String::new(),
                diagnostics: format!("hsolv: cannot write {}: {e}\n", path.display()),
            };
        }
        out.output.clear();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("hsolv").chain(args.iter().copied()))
    }

    #[test]
    fn classify_examples() {
        let o = go(&["classify", "--op", "i*X^3 + 2*X^2*Y + i*X*Y^2 + 2*Y^3"]);
        assert_eq!(o.code, 0);
        let r = Report::from_json(&o.output).unwrap();
        assert_eq!(r.verdict.unwrap().as_str(), "NOT_SOLVABLE_PROVEN");
        let c = r.counts.unwrap();
        assert_eq!((c.p_pos, c.p_neg, c.n), (2, 1, 3));
        let o = go(&["classify", "--op", "-X^2 - Y^2"]);
        assert_eq!(Report::from_json(&o.output).unwrap().verdict.unwrap().as_str(), "SOLVABLE_CONDITIONAL");
        assert_eq!(go(&["classify", "--op", "X*Y - Y*X"]).code, 3);
        assert_eq!(go(&["classify", "--op", "X^2 +* Y"]).code, 2);
    }

    #[test]
    fn scan_validation_and_table() {
        assert_eq!(go(&["scan", "--op", "-X^2 - Y^2", "--gamma-range", "10:1:8"]).code, 2);
        let o = go(&["scan", "--op", "-X^2 - Y^2", "--gamma-range", "1:10:4", "--format", "tabular"]);
        assert_eq!(o.code, 0);
        let lines: Vec<&str> = o.output.lines().collect();
        assert_eq!(lines[0], "sign,gamma,sigma_min,p,q");
        assert_eq!(lines.len(), 6);
        assert!(lines[5].contains("limit_point_flag=false"));
    }

    #[test]
    fn verify_exit_codes() {
        let o = go(&["verify", "--format", "tabular"]);
        assert_eq!(o.code, 0, "{}", o.output);
        let bad = go(&["verify", "--inject-root-misorder", "--format", "tabular"]);
        assert_eq!(bad.code, 4);
        assert!(bad.output.lines().any(|l| l.contains("root_ordering,FAIL")));
        assert_eq!(o.output.lines().filter(|l| l.starts_with("# harness")).count(), 9);
    }

    #[test]
    fn gamma_and_window_parsing() {
        assert_eq!(parse_gamma("2,1").unwrap(), C64::new(2.0, 1.0));
        assert!(parse_gamma("0").is_err());
        assert_eq!(go(&["basis", "--op", "-X^2 - Y^2", "--window", "5:1"]).code, 2);
    }
}
