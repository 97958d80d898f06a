//! Command-line front end: `classify`, `selfsimilar`, `search`, `verify`.
//!
//! Exit codes: 0 on success or a positive verdict, 2 when the run completes
//! without a certificate (or outside the two-shock regime for `classify`),
//! 1 on any error or failed verification.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::certificate::{certify, verify_certificate, Certificate, CertificateStatus};
use crate::dissipation::energy_levels;
use crate::riemann::{solve_middle_state, two_shock_condition, SelfSimilarTwoShock};
use crate::scenario::Scenario;
use crate::solver::{scan, self_similar_rate, GridRange, SearchReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

pub const CERTIFICATE_FILE: &str = "certificate.toml";
pub const GRID_FILE: &str = "grid.csv";

/// Column order of the grid dump.
pub const CSV_HEADER: &str = "rho1,C,status,feasible,beta,nu_minus,nu_plus,m_trace,m_det,m_adm_left,m_adm_right,D_sub";

#[derive(Debug, Parser)]
#[command(name = "disslab", version, about = "Energy dissipation of two-shock Riemann solutions versus fan subsolutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether the data produce an admissible 1-shock and 3-shock.
    Classify(RunArgs),
    /// Middle state, shock speeds, energy levels and dissipation rate.
    Selfsimilar(RunArgs),
    /// Scan (rho1, C), write the best certificate and the grid dump.
    Search(RunArgs),
    /// Replay every check recorded in a certificate.
    Verify {
        certificate: PathBuf,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long = "L", value_name = "FLOAT")]
    pub box_half_width: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "grid-rho1", value_name = "A:B:N")]
    pub grid_rho1: Option<GridRange>,
    #[arg(long = "grid-C", value_name = "A:B:N")]
    pub grid_c: Option<GridRange>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "margin-floor")]
    pub margin_floor: Option<f64>,
    /// Also print a machine-readable TOML block.
    #[arg(long)]
    pub machine: bool,
}

impl RunArgs {
    pub fn load(&self) -> anyhow::Result<Scenario> {
        let mut s = Scenario::load(&self.scenario)?;
        if let Some(l) = self.box_half_width {
            s.options.box_half_width = l;
        }
        if let Some(seed) = self.seed {
            s.options.seed = seed;
        }
        if let Some(t) = self.tol {
            s.options.residual_tol = t;
        }
        if let Some(f) = self.margin_floor {
            s.options.margin_floor = f;
        }
        if self.grid_rho1.is_some() || self.grid_c.is_some() {
            let mut grid = s.grid.unwrap_or(crate::solver::Grid {
                rho1: GridRange::new(1.0, 1.0, 0),
                c: GridRange::new(1.0, 1.0, 0),
            });
            if let Some(r) = self.grid_rho1 {
                grid.rho1 = r;
            }
            if let Some(c) = self.grid_c {
                grid.c = c;
            }
            s.grid = Some(grid);
        }
        s.validate()?;
        Ok(s)
    }
}

pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

pub fn run<W: Write>(command: &Command, out: &mut W) -> anyhow::Result<i32> {
    match command {
        Command::Classify(args) => cmd_classify(&args.load()?, out),
        Command::Selfsimilar(args) => cmd_selfsimilar(&args.load()?, args.machine, out),
        Command::Search(args) => cmd_search(&args.load()?, &args.out, out),
        Command::Verify { certificate } => cmd_verify(certificate, out),
    }
}

pub fn cmd_classify<W: Write>(scenario: &Scenario, out: &mut W) -> anyhow::Result<i32> {
    let check = two_shock_condition(&scenario.data, &scenario.law());
    let verdict = if check.holds { "yes" } else { "no" };
    writeln!(out, "two-shock: {verdict}, margin {}", check.margin + 0.0)?;
    if scenario.data.tangential().is_none() {
        writeln!(out, "tangential velocities differ")?;
    }
    Ok(if check.holds { EXIT_OK } else { EXIT_NEGATIVE })
}

#[derive(Serialize)]
struct SelfSimilarBlock {
    gamma: f64,
    #[serde(rename = "L")]
    box_half_width: f64,
    solution: SelfSimilarTwoShock,
    e_minus: f64,
    e_m: f64,
    e_plus: f64,
    d_self: f64,
}

pub fn cmd_selfsimilar<W: Write>(scenario: &Scenario, machine: bool, out: &mut W) -> anyhow::Result<i32> {
    let law = scenario.law();
    let data = &scenario.data;
    let shock = solve_middle_state(data, &law)?;
    let levels = energy_levels(data, &law, &shock);
    let l = scenario.options.box_half_width;
    let d_self = self_similar_rate(data, &law, &shock, l);
    writeln!(out, "rho_m  = {}", shock.rho_m)?;
    writeln!(out, "v_bar  = {}", shock.v_bar)?;
    writeln!(out, "nu1    = {}", shock.nu1)?;
    writeln!(out, "nu2    = {}", shock.nu2)?;
    writeln!(out, "lax    = {} {}", shock.lax_ok_1, shock.lax_ok_3)?;
    writeln!(out, "E      = {} {} {}", levels.e_minus, levels.e_m, levels.e_plus)?;
    writeln!(out, "D_self = {d_self} (L = {l})")?;
    if machine {
        let block = SelfSimilarBlock {
            gamma: law.gamma(),
            box_half_width: l,
            solution: shock,
            e_minus: levels.e_minus,
            e_m: levels.e_m,
            e_plus: levels.e_plus,
            d_self,
        };
        writeln!(out, "---")?;
        write!(out, "{}", toml::to_string_pretty(&block)?)?;
    }
    Ok(EXIT_OK)
}

fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Grid dump, one row per grid point in scan order.
pub fn grid_csv(report: &SearchReport) -> String {
    let mut s = String::with_capacity(128 * (report.points.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for p in &report.points {
        let c = p.candidate.as_ref();
        let m = c.map(|c| c.margins);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            field(Some(p.rho1)),
            field(Some(p.c)),
            p.status.as_str(),
            p.is_feasible(),
            field(c.map(|c| c.sub.beta)),
            field(c.map(|c| c.sub.partition.nu_minus)),
            field(c.map(|c| c.sub.partition.nu_plus)),
            field(m.map(|m| m.m_trace)),
            field(m.map(|m| m.m_det)),
            field(m.map(|m| m.m_adm_left)),
            field(m.map(|m| m.m_adm_right)),
            field(c.map(|c| c.d_sub)),
        );
    }
    s
}

pub fn cmd_search<W: Write>(scenario: &Scenario, out_dir: &Path, out: &mut W) -> anyhow::Result<i32> {
    let law = scenario.law();
    let data = &scenario.data;
    let Some(grid) = scenario.grid else {
        bail!("scenario has no [grid] section and no --grid-rho1/--grid-C given");
    };
    let report = scan(data, &law, &grid, scenario.options.box_half_width, &scenario.solve_options())?;

    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let csv_path = out_dir.join(GRID_FILE);
    std::fs::write(&csv_path, grid_csv(&report)).with_context(|| format!("writing {}", csv_path.display()))?;

    writeln!(out, "grid points: {}, feasible: {}", report.points.len(), report.feasible_count())?;
    writeln!(out, "D_self = {}", report.d_self)?;
    writeln!(out, "grid dump: {}", csv_path.display())?;
    let Some(best) = report.best() else {
        writeln!(out, "no feasible subsolution on this grid")?;
        return Ok(EXIT_NEGATIVE);
    };
    let cert = certify(&scenario.name, data, &law, &best.sub, &scenario.certify_config())?;
    let cert_path = out_dir.join(CERTIFICATE_FILE);
    std::fs::write(&cert_path, cert.to_toml()?).with_context(|| format!("writing {}", cert_path.display()))?;
    writeln!(
        out,
        "best: rho1 = {}, C = {}, D_sub = {}, gap = {}",
        best.sub.rho1, best.sub.c, cert.dissipation.d_sub, cert.dissipation.gap
    )?;
    writeln!(out, "certificate: {}", cert_path.display())?;
    Ok(match cert.status {
        CertificateStatus::DissipationDominant => {
            writeln!(out, "verdict: self-similar solution is not entropy rate admissible")?;
            EXIT_OK
        }
        CertificateStatus::FeasibleNotDominant => {
            writeln!(out, "verdict: feasible but not dissipation-dominant")?;
            EXIT_NEGATIVE
        }
    })
}

pub fn cmd_verify<W: Write>(path: &Path, out: &mut W) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = match Certificate::from_toml(&text) {
        Ok(c) => c,
        Err(e) => {
            writeln!(out, "FAIL parse: {e}")?;
            return Ok(EXIT_ERROR);
        }
    };
    let report = verify_certificate(&cert);
    for c in &report.checks {
        writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_ERROR })
}
