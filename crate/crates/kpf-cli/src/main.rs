//! `kpf`: transform evaluation, inversion studies, variation reports and
//! lacunary bound tables as CSV or JSON.

mod commands;
mod config;
mod error;
mod table;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use table::Format;

#[derive(Parser, Debug)]
#[command(name = "kpf", version, about = "Fourier transforms and inversion for bounded-variation functions of two variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transform values with the per-rung window ladder.
    Transform(Flags),
    /// Kernel-form inversion along an (alpha, beta) ladder.
    Invert(Flags),
    /// Inversion residuals on a lattice around a point.
    Study(Flags),
    /// Vitali, section and tail variations.
    Variation(Flags),
    /// Lacunary sums against their bounds.
    Lacunary(Flags),
    /// The function catalog.
    Catalog(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// key=value file; flags given on the command line win.
    #[arg(long)]
    config: Option<String>,
    /// Catalog entry name.
    #[arg(long)]
    function: Option<String>,
    /// x,y (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    point: Vec<String>,
    /// xi,eta (repeatable).
    #[arg(long, allow_hyphen_values = true)]
    freq: Vec<String>,
    /// Comma-separated alpha ladder.
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated beta ladder.
    #[arg(long)]
    beta: Option<String>,
    /// Stages of the default ladder alpha = 4^(1-k), beta = 4^k.
    #[arg(long)]
    ladder: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Engine tolerance inside inversion stages.
    #[arg(long)]
    inner_tol: Option<String>,
    /// direct, stieltjes or oracle.
    #[arg(long)]
    route: Option<String>,
    /// Skip the product structure of separable functions.
    #[arg(long)]
    force_generic: bool,
    /// x_lo,x_hi,y_lo,y_hi (inf allowed).
    #[arg(long, allow_hyphen_values = true)]
    rect: Option<String>,
    /// Tail starts for the variation report.
    #[arg(long)]
    tails: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    /// pow2 or geometric:R.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    lm1: bool,
    #[arg(long)]
    lm2: bool,
    #[arg(long)]
    moricz: bool,
    /// Comma-separated t values.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    /// Comma-separated tail starts for lm2.
    #[arg(long)]
    m: Option<String>,
    /// Block index limit N = M for --moricz.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    terms: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl Flags {
    fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v.clone());
            }
        };
        put("function", &self.function);
        put("alpha", &self.alpha);
        put("beta", &self.beta);
        put("ladder", &self.ladder);
        put("tol", &self.tol);
        put("inner-tol", &self.inner_tol);
        put("route", &self.route);
        put("rect", &self.rect);
        put("tails", &self.tails);
        put("radius", &self.radius);
        put("grid", &self.grid);
        put("rule", &self.rule);
        put("t", &self.t);
        put("m", &self.m);
        put("n", &self.n);
        put("terms", &self.terms);
        put("samples", &self.samples);
        put("out", &self.out);
        put("format", &self.format);
        for (k, v) in [("point", &self.point), ("freq", &self.freq)] {
            if !v.is_empty() {
                m.insert(k.to_string(), v.join(";"));
            }
        }
        for (k, on) in [("force-generic", self.force_generic), ("lm1", self.lm1), ("lm2", self.lm2), ("moricz", self.moricz)] {
            if on {
                m.insert(k.to_string(), "true".into());
            }
        }
        m
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("KPF_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::Config(format!("KPF_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn execute(name: &str, flags: &Flags) -> (Option<String>, Result<(), CliError>) {
    let c = match RunConfig::build(name, flags.config.as_deref(), flags.to_map()) {
        Ok(c) => c,
        Err(e) => return (None, Err(e)),
    };
    let hash = c.hash();
    let run = || -> Result<(), CliError> {
        let default = if name == "catalog" { "json" } else { "csv" };
        let format: Format = c.str_or("format", default).parse()?;
        let (table, failure) = match name {
            "transform" => commands::transform(&c)?,
            "invert" => commands::invert(&c)?,
            "study" => commands::study(&c)?,
            "variation" => commands::variation(&c)?,
            "lacunary" => commands::lacunary(&c)?,
            _ => commands::catalog_dump(&c)?,
        };
        match c.str("out") {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p).map_err(|e| CliError::Config(format!("cannot write {p}: {e}")))?);
                table.write(format, &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                table.write(format, &mut w)?;
            }
        }
        failure.map_or(Ok(()), Err)
    };
    (Some(hash), run())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                std::process::exit(0);
            }
            let err = CliError::Config(e.render().to_string().trim().to_string());
            eprintln!("{}", err.record(None, None));
            std::process::exit(err.exit_code());
        }
    };
    let (name, flags) = match &cli.command {
        Command::Transform(f) => ("transform", f),
        Command::Invert(f) => ("invert", f),
        Command::Study(f) => ("study", f),
        Command::Variation(f) => ("variation", f),
        Command::Lacunary(f) => ("lacunary", f),
        Command::Catalog(f) => ("catalog", f),
    };
    if let Err(e) = threads() {
        eprintln!("{}", e.record(Some(name), None));
        std::process::exit(e.exit_code());
    }
    let (hash, result) = execute(name, flags);
    if let Err(e) = result {
        eprintln!("{}", e.record(Some(name), hash.as_deref()));
        std::process::exit(e.exit_code());
    }
}
