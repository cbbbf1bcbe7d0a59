//! Command-line front end: verification campaigns, operator iteration
//! tables, wandering-set tables, spiral sampling, and lattice scans, emitted
//! as CSV or JSON with a provenance footer. Exit codes: 0 pass, 1 numerical
//! failure, 2 usage error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gaussdyn::fourier::{self, HyperbolaMeasure, LatticeCross};
use gaussdyn::grid::{ClosedForm, Grid, GridFunction};
use gaussdyn::hilbert::{DecayClass, LineFunction};
use gaussdyn::maps::{self, MapFamily, MapParams, WanderingQuery, WanderingWeight};
use gaussdyn::quad::PvConfig;
use gaussdyn::special;
use gaussdyn::transfer::{self, OperatorConfig, OperatorKind};
use gaussdyn::verify::{self, Overrides};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "gaussdyn",
    version,
    about = "Gauss-type interval maps, their transfer operators, and the \
             Hilbert/Fourier identities around them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (tables) or directory (verify). Defaults to stdout /
    /// current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Seed for any randomized test-function selection.
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Record real wall-clock timings in table columns. Off by default so
    /// reruns with identical flags produce identical files.
    #[arg(long, default_value_t = false)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification campaigns and write a report per campaign.
    Verify {
        /// Campaign ids, or "all".
        #[arg(required = true)]
        ids: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
        /// Override the scan resolution used by wandering campaigns.
        #[arg(long)]
        resolution: Option<usize>,
        /// Override the iteration depth used by decay campaigns.
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Iterate an operator on a named function and tabulate norms.
    Iterate {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Map parameter (β for the τ family, γ for the σ family).
        #[arg(long)]
        param: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Input: const1, lambda1, kappa1, kappa-<alpha>, zero-mean-split,
        /// indicator:a:b or bump:a:b.
        #[arg(long, default_value = "const1")]
        f: String,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// Output grid: panels per interval (8 nodes per panel).
        #[arg(long, default_value_t = 96)]
        grid: usize,
        /// Series tail tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Restrict norms to [a, b], written a:b.
        #[arg(long, allow_hyphen_values = true)]
        sub: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate wandering-set measures against the geometric bounds.
    Wandering {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Map parameter, strictly inside (0, 1): the bound degenerates at 1.
        #[arg(long)]
        param: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "auto")]
        weight: WeightArg,
        #[arg(long, default_value_t = 100_000)]
        resolution: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample the sici spiral ci(πx) + i si(πx).
    Spiral {
        #[arg(long, default_value_t = 0.1)]
        x_min: f64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan |û| of a measure over a truncated lattice cross.
    Lattice {
        /// Density: f0, poisson[:eps] or bump:a:b.
        #[arg(long, default_value = "f0")]
        density: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Mass parameter M of the hyperbola.
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        mass: f64,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Subt,
    Subs,
    TransferT,
    TransferS,
    KoopmanL,
    KoopmanG,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sigma,
    Tau,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Auto,
    Lambda1,
    Kappa1,
    Lebesgue,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                gaussdyn::Error::InvalidInput(_) | gaussdyn::Error::UnknownCampaign { .. } => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(cli: Cli) -> gaussdyn::Result<ExitCode> {
    match cli.command {
        Command::Verify {
            ids,
            output,
            resolution,
            n_max,
        } => cmd_verify(ids, output, resolution, n_max),
        Command::Iterate {
            kind,
            param,
            beta,
            gamma,
            f,
            n_max,
            grid,
            tol,
            sub,
            output,
        } => cmd_iterate(
            kind,
            pick_param(param, beta, gamma)?,
            &f,
            n_max,
            grid,
            tol,
            sub,
            output,
        ),
        Command::Wandering {
            family,
            param,
            beta,
            gamma,
            n_max,
            weight,
            resolution,
            output,
        } => cmd_wandering(
            family,
            pick_param(param, beta, gamma)?,
            n_max,
            weight,
            resolution,
            output,
        ),
        Command::Spiral {
            x_min,
            x_max,
            step,
            output,
        } => cmd_spiral(x_min, x_max, step, output),
        Command::Lattice {
            density,
            alpha,
            beta,
            mass,
            m_max,
            n_max,
            output,
        } => cmd_lattice(&density, alpha, beta, mass, m_max, n_max, output),
    }
}

fn pick_param(param: Option<f64>, beta: Option<f64>, gamma: Option<f64>) -> gaussdyn::Result<f64> {
    param
        .or(beta)
        .or(gamma)
        .ok_or_else(|| gaussdyn::Error::InvalidInput("missing --param (or --beta/--gamma)".into()))
}

/// Writes atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> gaussdyn::Result<()> {
    let file_name = path.file_name().unwrap_or_default().to_string_lossy();
    let tmp = match path.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(d) => d.join(format!(".{file_name}.tmp")),
        None => PathBuf::from(format!(".{file_name}.tmp")),
    };
    fs::write(&tmp, contents)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| gaussdyn::Error::InvalidInput(format!("cannot write {path:?}: {e}")))
}

fn emit(path: Option<&Path>, contents: &str) -> gaussdyn::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    footer: Vec<String>,
}

impl CsvTable {
    fn new(header: Vec<&'static str>) -> CsvTable {
        CsvTable {
            header,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn footer_line(&mut self, line: String) {
        self.footer.push(line);
    }

    fn render(&self, provenance: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        for line in &self.footer {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# gaussdyn {VERSION} {provenance}");
        out
    }

    fn render_json(&self, provenance: &str) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (key, cell) in self.header.iter().zip(row) {
                    let value = cell
                        .parse::<f64>()
                        .map(|v| serde_json::json!(v))
                        .unwrap_or_else(|_| serde_json::json!(cell));
                    obj.insert((*key).to_string(), value);
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "rows": rows,
            "footer": self.footer,
            "provenance": format!("gaussdyn {VERSION} {provenance}"),
        });
        format!("{doc:#}\n")
    }

    fn emit_as(&self, format: Format, provenance: &str, path: Option<&Path>) -> gaussdyn::Result<()> {
        match format {
            Format::Csv => emit(path, &self.render(provenance)),
            Format::Json => emit(path, &self.render_json(provenance)),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn cmd_verify(
    ids: Vec<String>,
    output: OutputArgs,
    resolution: Option<usize>,
    n_max: Option<usize>,
) -> gaussdyn::Result<ExitCode> {
    let overrides = Overrides { resolution, n_max };
    let selected: Vec<String> = if ids.len() == 1 && ids[0] == "all" {
        verify::campaign_ids()
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        ids
    };
    // Validate all ids up front so typos exit with a usage error.
    for id in &selected {
        if !verify::campaign_ids().contains(&id.as_str()) {
            return Err(gaussdyn::Error::UnknownCampaign {
                id: id.clone(),
                known: verify::campaign_ids().join(", "),
            });
        }
    }
    let dir = output.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)
        .map_err(|e| gaussdyn::Error::InvalidInput(format!("cannot create {dir:?}: {e}")))?;
    let mut all_pass = true;
    for id in &selected {
        let start = Instant::now();
        let report = verify::run_campaign(id, output.seed, &overrides)?;
        all_pass &= report.pass;
        let path = dir.join(format!("report-{}.json", id.replace('.', "_")));
        write_atomic(&path, &report.canonical_json())?;
        println!(
            "{}  {id}  ({} checks, {:.1?})",
            if report.pass { "pass" } else { "FAIL" },
            report.checks.len(),
            start.elapsed()
        );
        if !report.pass {
            for c in report.checks.iter().filter(|c| !c.pass) {
                println!(
                    "    -> {}: measured {:.6e} vs bound {:.6e}",
                    c.description, c.measured, c.bound
                );
            }
        }
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_two(spec: &str) -> gaussdyn::Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(gaussdyn::Error::InvalidInput(format!(
            "expected a:b, got {spec:?}"
        )));
    }
    let a = parts[0]
        .parse::<f64>()
        .map_err(|e| gaussdyn::Error::InvalidInput(e.to_string()))?;
    let b = parts[1]
        .parse::<f64>()
        .map_err(|e| gaussdyn::Error::InvalidInput(e.to_string()))?;
    Ok((a, b))
}

#[allow(clippy::too_many_arguments)]
fn cmd_iterate(
    kind: KindArg,
    param: f64,
    fspec: &str,
    n_max: usize,
    grid_panels: usize,
    tol: f64,
    sub: Option<String>,
    output: OutputArgs,
) -> gaussdyn::Result<ExitCode> {
    let kind = match kind {
        KindArg::Subt => OperatorKind::sub_t(param)?,
        KindArg::Subs => OperatorKind::sub_s(param)?,
        KindArg::TransferT => OperatorKind::transfer_tp(param)?,
        KindArg::TransferS => OperatorKind::transfer_sp(param)?,
        KindArg::KoopmanL => OperatorKind::koopman_l(param)?,
        KindArg::KoopmanG => OperatorKind::koopman_g(param)?,
    };
    let (a, b) = kind.domain();
    let breaks: Vec<f64> = if a < 0.0 {
        vec![-param, 0.0, param]
    } else {
        vec![param.min(b - 1e-12)]
    };
    let grid = Arc::new(Grid::with_breakpoints(a, b, &breaks, grid_panels.max(8), 8)?);
    let mut cfg = OperatorConfig::for_kind(&kind).with_grid(grid.clone());
    cfg.tail_tol = tol;

    let f = named_grid_function(fspec, &grid)?;
    let sub = sub.map(|s| parse_two(&s)).transpose()?;

    let start = Instant::now();
    let rows = transfer::decay_profile(&kind, &f, n_max, sub, &cfg)?;
    let elapsed_ms = if output.timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };

    let mut table = CsvTable::new(vec!["n", "l1", "sup", "elapsed_ms"]);
    for r in &rows {
        table.push_row(vec![
            r.n.to_string(),
            num(r.l1),
            num(r.sup),
            elapsed_ms.to_string(),
        ]);
    }
    let provenance = format!(
        "iterate param={param} f={fspec} n_max={n_max} grid={grid_panels} tol={tol:e} seed={}",
        output.seed
    );
    table.emit_as(output.format, &provenance, output.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn named_grid_function(spec: &str, grid: &Arc<Grid>) -> gaussdyn::Result<GridFunction> {
    let lower = spec.to_ascii_lowercase();
    Ok(match lower.as_str() {
        "const1" => GridFunction::from_fn(grid.clone(), |_| 1.0),
        "lambda1" => GridFunction::from_form(grid.clone(), ClosedForm::Lambda1),
        "kappa1" => GridFunction::from_form(grid.clone(), ClosedForm::Kappa1),
        "zero-mean-split" => GridFunction::from_fn(grid.clone(), |x| {
            if x > 0.0 && x <= 0.5 {
                1.0
            } else if x >= -0.5 && x < 0.0 {
                -1.0
            } else {
                0.0
            }
        }),
        _ if lower.starts_with("kappa-") => {
            let alpha = lower["kappa-".len()..]
                .parse::<f64>()
                .map_err(|e| gaussdyn::Error::InvalidInput(e.to_string()))?;
            GridFunction::from_form(grid.clone(), ClosedForm::Kappa { alpha })
        }
        _ if lower.starts_with("indicator:") => {
            let (a, b) = parse_two(&lower["indicator:".len()..])?;
            GridFunction::from_form(grid.clone(), ClosedForm::Indicator { lo: a, hi: b })
        }
        _ if lower.starts_with("bump:") => {
            let (a, b) = parse_two(&lower["bump:".len()..])?;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            GridFunction::from_fn(grid.clone(), move |x| {
                let u = (x - mid) / half;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - u * u).powi(2)
                }
            })
        }
        _ => {
            return Err(gaussdyn::Error::InvalidInput(format!(
                "unknown function spec {spec:?}; expected const1, lambda1, kappa1, \
                 kappa-<alpha>, zero-mean-split, indicator:a:b or bump:a:b"
            )))
        }
    })
}

fn cmd_wandering(
    family: FamilyArg,
    param: f64,
    n_max: usize,
    weight: WeightArg,
    resolution: usize,
    output: OutputArgs,
) -> gaussdyn::Result<ExitCode> {
    if !(param > 0.0 && param < 1.0) {
        return Err(gaussdyn::Error::InvalidInput(format!(
            "the geometric bound requires the parameter strictly inside (0,1); got {param}"
        )));
    }
    let params = match family {
        FamilyArg::Sigma => MapParams::new(MapFamily::SigmaGauss, param)?,
        FamilyArg::Tau => MapParams::new(MapFamily::TauGauss, param)?,
    };
    let weight = match (weight, family) {
        (WeightArg::Lambda1, _) => WanderingWeight::Lambda1,
        (WeightArg::Kappa1, _) => WanderingWeight::Kappa1,
        (WeightArg::Lebesgue, _) => WanderingWeight::Lebesgue,
        (WeightArg::Auto, FamilyArg::Sigma) => WanderingWeight::Lambda1,
        (WeightArg::Auto, FamilyArg::Tau) => WanderingWeight::Kappa1,
    };

    let mut table = CsvTable::new(vec!["N", "measure", "bound", "violation"]);
    let mut violations = 0usize;
    for depth in 1..=n_max.max(1) {
        let q = WanderingQuery::new(params, depth)?;
        let measure = maps::wandering_measure(&q, weight, resolution.max(1000));
        let bound = maps::wandering_bound(&q)?;
        let violated = measure > bound + 1e-4;
        violations += violated as usize;
        table.push_row(vec![
            depth.to_string(),
            num(measure),
            num(bound),
            (violated as u8).to_string(),
        ]);
    }
    table.footer_line(format!("violations {violations}"));
    let provenance = format!(
        "wandering family={} param={param} n_max={n_max} resolution={resolution} seed={}",
        match family {
            FamilyArg::Sigma => "sigma",
            FamilyArg::Tau => "tau",
        },
        output.seed
    );
    table.emit_as(output.format, &provenance, output.out.as_deref())?;
    Ok(if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_spiral(x_min: f64, x_max: f64, step: f64, output: OutputArgs) -> gaussdyn::Result<ExitCode> {
    if !(x_min > 0.0 && x_max >= x_min && step > 0.0) {
        return Err(gaussdyn::Error::InvalidInput(
            "need 0 < x_min <= x_max and step > 0".into(),
        ));
    }
    let mut table = CsvTable::new(vec!["x", "ci_pi_x", "si_pi_x", "modulus"]);
    let mut min_mod = f64::INFINITY;
    let mut x = x_min;
    while x <= x_max + 1e-12 {
        let (si, ci) = special::sici(std::f64::consts::PI * x)?;
        let modulus = (si * si + ci * ci).sqrt();
        min_mod = min_mod.min(modulus);
        table.push_row(vec![num(x), num(ci), num(si), num(modulus)]);
        x += step;
    }
    table.footer_line(format!("min_modulus {}", num(min_mod)));
    let provenance = format!(
        "spiral x_min={x_min} x_max={x_max} step={step} seed={}",
        output.seed
    );
    table.emit_as(output.format, &provenance, output.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lattice(
    density: &str,
    alpha: f64,
    beta: f64,
    mass: f64,
    m_max: usize,
    n_max: usize,
    output: OutputArgs,
) -> gaussdyn::Result<ExitCode> {
    let lower = density.to_ascii_lowercase();
    let mu = match lower.as_str() {
        "f0" => HyperbolaMeasure::new(
            LineFunction::new(DecayClass::InverseSquare, fourier::f0_normalized),
            mass,
        )?,
        _ if lower.starts_with("poisson") => {
            let eps = lower
                .strip_prefix("poisson:")
                .map(|s| s.parse::<f64>())
                .transpose()
                .map_err(|e| gaussdyn::Error::InvalidInput(e.to_string()))?
                .unwrap_or(1.0);
            HyperbolaMeasure::new(
                LineFunction::new(DecayClass::InverseSquare, move |t| {
                    if t > 0.0 {
                        eps / (std::f64::consts::PI * (eps * eps + t * t))
                    } else {
                        0.0
                    }
                }),
                mass,
            )?
        }
        _ if lower.starts_with("bump:") => {
            let (a, b) = parse_two(&lower["bump:".len()..])?;
            HyperbolaMeasure::new(LineFunction::smooth_bump(a, b), mass)?
        }
        _ => {
            return Err(gaussdyn::Error::InvalidInput(format!(
                "unknown density {density:?}; expected f0, poisson[:eps] or bump:a:b"
            )))
        }
    };
    let cross = LatticeCross::new(alpha, beta, m_max, n_max)?;
    let cfg = PvConfig::default();
    let scan = fourier::lattice_residual_scan(&mu, &cross, &cfg);

    let mut table = CsvTable::new(vec!["xi1", "xi2", "abs_value", "status"]);
    let mut failures = 0usize;
    for e in &scan.entries {
        let (status, value) = match (&e.value, &e.error) {
            (Some(v), _) => ("ok".to_string(), v.norm()),
            (None, Some(err)) => {
                failures += 1;
                (format!("error: {err}"), f64::NAN)
            }
            _ => unreachable!(),
        };
        table.push_row(vec![num(e.point.0), num(e.point.1), num(value), status]);
    }
    table.footer_line(format!("max_residual {}", num(scan.max_residual)));
    let provenance = format!(
        "lattice density={density} alpha={alpha} beta={beta} mass={mass} \
         m_max={m_max} n_max={n_max} seed={}",
        output.seed
    );
    table.emit_as(output.format, &provenance, output.out.as_deref())?;
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
