use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use typea::cli::{self, Report};
use typea::clifford::SignConvention;
use typea::Error;

/// Exact verification suites for type A A-infinity algebras and their mirrors.
#[derive(Parser)]
#[command(name = "typea", version)]
struct Cli {
    /// Write the JSON certificate to this path (relative paths resolve under
    /// $TYPEA_SCRATCH when it is set).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Na {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    a: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Degree bookkeeping in the grading data.
    #[command(subcommand)]
    Grading(GradingCmd),
    /// Reduced Gröbner basis of a polynomial file.
    Groebner {
        #[arg(long)]
        input: PathBuf,
        /// `lex:u1>u2>...`, `deglex:...` or `block:r1>r2|u1>u2`.
        #[arg(long)]
        order: String,
    },
    /// Explicit Gröbner family and relations of the Jacobian ring.
    Jacobian {
        #[command(flatten)]
        na: Na,
        /// Also run the invariant-ring and local checks at r = 1.
        #[arg(long)]
        specialize_r: bool,
    },
    /// Critical points of the superpotential.
    Superpotential {
        #[command(flatten)]
        na: Na,
        #[arg(long)]
        hessians: bool,
    },
    /// Quantum cohomology algebras.
    #[command(subcommand)]
    Quantum(QuantumCmd),
    /// Clifford algebras and their Hochschild cohomology.
    #[command(subcommand)]
    Clifford(CliffordCmd),
    /// A-infinity tables, weak bounding cochains, gauges and group actions.
    #[command(subcommand)]
    Ainf(AinfCmd),
    /// Minimal model of the Koszul matrix factorization.
    MinimalModel {
        #[command(flatten)]
        na: Na,
        #[arg(long, default_value_t = 1)]
        rdeg: u32,
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long)]
        stability_check: bool,
        /// Write the A-infinity tables in text format to this path.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Chained reports.
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum GradingCmd {
    /// Solutions of the degree equations for length-one cochains (`--t`) or polyvectors (`--total`).
    Enumerate {
        #[command(flatten)]
        na: Na,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "total")]
        t: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        total: Option<i64>,
        #[arg(long, requires = "total")]
        truncated: bool,
    },
}

#[derive(Subcommand)]
enum QuantumCmd {
    /// The cubic surface.
    Cubic,
    /// The hyperplane algebra for type (n, a).
    Hyperplane {
        #[command(flatten)]
        na: Na,
    },
    /// An algebra from a structure-constant file.
    Load {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Plain,
    Koszul,
}

#[derive(Subcommand)]
enum CliffordCmd {
    /// Hochschild cohomology from the bar complex.
    Hh {
        #[arg(long)]
        n: Option<usize>,
        /// `diag:q1,q2,...`; defaults to the unit form on `n` generators.
        #[arg(long)]
        form: Option<String>,
        #[arg(long, default_value_t = 4)]
        s_max: usize,
        #[arg(long, value_enum, default_value_t = Convention::Plain)]
        convention: Convention,
    },
    /// Isomorphism witness or refutation.
    Iso {
        #[arg(long)]
        form_a: String,
        #[arg(long)]
        form_b: String,
    },
}

#[derive(Subcommand)]
enum AinfCmd {
    /// Check the A-infinity relations of a table file.
    Verify {
        #[arg(long)]
        tables: PathBuf,
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Weak bounding cochains and the disk potential of the model.
    DiskPotential {
        #[command(flatten)]
        na: Na,
        #[arg(long)]
        max_points: Option<usize>,
    },
    /// First-order gauge reconstruction and obstruction.
    Gauge {
        #[command(flatten)]
        na: Na,
        #[arg(long, default_value_t = 3)]
        gauge_arity: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
    },
    /// Group action, Fourier isomorphism and character units.
    Group {
        #[command(flatten)]
        na: Na,
        #[arg(long, default_value_t = 2)]
        fourier_arity: usize,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    /// jacobian, superpotential, quantum hyperplane, minimal-model and disk potential.
    All {
        #[command(flatten)]
        na: Na,
    },
}

fn resolve(path: PathBuf) -> PathBuf {
    match std::env::var_os("TYPEA_SCRATCH") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: PathBuf, text: &str) -> Result<(), String> {
    let path = resolve(path);
    std::fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn usage_error(e: &Error, path: &[&str]) -> ExitCode {
    let mut cmd = Cli::command();
    cmd.build();
    for p in path {
        match cmd.find_subcommand(p) {
            Some(s) => cmd = s.clone(),
            None => break,
        }
    }
    eprintln!("error: {e}\n\n{}", cmd.render_usage());
    ExitCode::from(2)
}

fn run(command: Command, json: Option<PathBuf>) -> ExitCode {
    let mut tables_out = None;
    let (path, result): (Vec<&str>, Result<Report, Error>) = match command {
        Command::Grading(GradingCmd::Enumerate { na, t, total, truncated }) => (vec!["grading", "enumerate"], cli::grading_enumerate(na.n, na.a, t, total, truncated)),
        Command::Groebner { input, order } => (vec!["groebner"], read(&input).and_then(|text| cli::groebner(&text, &order))),
        Command::Jacobian { na, specialize_r } => (vec!["jacobian"], cli::jacobian(na.n, na.a, specialize_r)),
        Command::Superpotential { na, hessians } => (vec!["superpotential"], cli::superpotential(na.n, na.a, hessians)),
        Command::Quantum(QuantumCmd::Cubic) => (vec!["quantum", "cubic"], cli::quantum_cubic()),
        Command::Quantum(QuantumCmd::Hyperplane { na }) => (vec!["quantum", "hyperplane"], cli::quantum_hyperplane(na.n, na.a)),
        Command::Quantum(QuantumCmd::Load { file }) => (vec!["quantum", "load"], read(&file).and_then(|text| cli::quantum_load(&text))),
        Command::Clifford(CliffordCmd::Hh { n, form, s_max, convention }) => {
            let conv = match convention {
                Convention::Plain => SignConvention::Plain,
                Convention::Koszul => SignConvention::Koszul,
            };
            let form = match (n, form) {
                (Some(n), Some(f)) if f.split(',').count() != n => Err(Error::Invalid(format!("form `{f}` does not have {n} entries"))),
                (_, Some(f)) => Ok(f),
                (Some(n), None) if n > 0 => Ok(format!("diag:{}", vec!["1"; n].join(","))),
                _ => Err(Error::Invalid("give --n or --form".into())),
            };
            (vec!["clifford", "hh"], form.and_then(|f| cli::clifford_hh(&f, s_max, conv)))
        }
        Command::Clifford(CliffordCmd::Iso { form_a, form_b }) => (vec!["clifford", "iso"], cli::clifford_iso_report(&form_a, &form_b)),
        Command::Ainf(AinfCmd::Verify { tables, max_arity }) => (vec!["ainf", "verify"], read(&tables).and_then(|text| cli::ainf_verify_text(&text, max_arity))),
        Command::Ainf(AinfCmd::DiskPotential { na, max_points }) => (vec!["ainf", "disk-potential"], cli::ainf_disk_potential(na.n, na.a, max_points)),
        Command::Ainf(AinfCmd::Gauge { na, gauge_arity, seed }) => (vec!["ainf", "gauge"], cli::ainf_gauge(na.n, na.a, gauge_arity, seed)),
        Command::Ainf(AinfCmd::Group { na, fourier_arity }) => (vec!["ainf", "group"], cli::ainf_group(na.n, na.a, fourier_arity)),
        Command::MinimalModel { na, rdeg, arity, stability_check, tables } => {
            let result = cli::minimal_model(na.n, na.a, rdeg, arity.unwrap_or(na.n), stability_check).map(|(r, t)| {
                tables_out = tables.zip(t);
                r
            });
            (vec!["minimal-model"], result)
        }
        Command::Report(ReportCmd::All { na }) => (vec!["report", "all"], cli::report_all(na.n, na.a)),
    };
    let report = match result {
        Ok(r) => r,
        Err(e @ (Error::Invalid(_) | Error::Parse(_))) => return usage_error(&e, &path),
        Err(e) => {
            let mut r = Report::new(&path.join(" "), &[]);
            r.check("command completed", "internal", false, e.to_string());
            r
        }
    };
    print!("{}", report.render_text());
    let mut io_ok = true;
    if let Some((p, t)) = tables_out {
        if let Err(e) = write(p, &t.to_text()) {
            eprintln!("error: {e}");
            io_ok = false;
        }
    }
    if let Some(p) = json {
        if let Err(e) = write(p, &report.to_json()) {
            eprintln!("error: {e}");
            io_ok = false;
        }
    }
    if report.passed() && io_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli.command, cli.json)
}
