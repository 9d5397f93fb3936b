use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sphere_arith::experiments::{self, ExperimentConfig, ExperimentRecord};
use sphere_arith::hecke::simultaneous_eigenbasis;
use sphere_arith::lfunc::{central_value, root_number_fit, AfeParams, BadFactor, FormData, LKind, LSeriesSpec};
use sphere_arith::quat::OrderKind;
use sphere_arith::theta::theta_series;
use sphere_arith::{Error, Result};

#[derive(Parser)]
#[command(name = "sphere-arith", version, about = "Hecke eigenfunctions on S², theta lifts and triple product L-values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON config; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    order: Option<Order>,
    #[arg(long, global = true)]
    nu_min: Option<u32>,
    #[arg(long, global = true)]
    nu_max: Option<u32>,
    /// Comma-separated odd primes.
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Comma-separated moment orders.
    #[arg(long, global = true, value_delimiter = ',')]
    q: Option<Vec<u32>>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Lipschitz,
    Hurwitz,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Form,
    Sym3,
    Triple,
}

#[derive(Subcommand)]
enum Command {
    /// Simultaneous Hecke eigenbasis tables.
    Eigenbasis,
    /// Theta series of the invariant eigenfunctions.
    Theta {
        #[arg(long, default_value_t = 50)]
        n_max: usize,
    },
    /// Central values against the predicted formula.
    IdentityCheck,
    /// Mass of eigenfunctions against a fixed eigenfunction.
    Mass,
    /// Moments of eigenfunctions.
    Moments,
    /// Third moments of eigenfunctions.
    ThirdMoment,
    /// Central value of an L-function of one eigenform.
    Lvalue {
        #[arg(long, default_value_t = 4)]
        nu: u32,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum, default_value_t = Kind::Triple)]
        kind: Kind,
    },
}

fn config(common: &Common) -> Result<ExperimentConfig> {
    let mut c = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = common.order {
        c.order = match o {
            Order::Lipschitz => OrderKind::Lipschitz,
            Order::Hurwitz => OrderKind::Hurwitz,
        };
    }
    if let Some(v) = common.nu_min {
        c.nu_min = v;
    }
    if let Some(v) = common.nu_max {
        c.nu_max = v;
    }
    if let Some(v) = &common.primes {
        c.primes = v.clone();
    }
    if let Some(v) = &common.q {
        c.moments = v.clone();
    }
    if let Some(v) = &common.out {
        c.out_dir = Some(v.clone());
    }
    c.validate()?;
    Ok(c)
}

fn write_or_print(dir: Option<&Path>, name: &str, body: &str) -> Result<()> {
    match dir {
        Some(d) => {
            fs::create_dir_all(d).map_err(|e| Error::file(d, e))?;
            let path = d.join(name);
            fs::write(&path, body).map_err(|e| Error::file(&path, e))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn records(c: &ExperimentConfig, stem: &str, recs: Vec<ExperimentRecord>) -> Result<()> {
    match &c.out_dir {
        Some(d) => {
            for p in experiments::emit(&recs, d, stem)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", experiments::to_csv(&recs)?),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let c = config(&cli.common)?;
    let out = c.out_dir.as_deref();
    match cli.command {
        Command::Eigenbasis => {
            for nu in c.nu_min..=c.nu_max {
                let sys = simultaneous_eigenbasis(nu, &c.primes, c.order_spec())?;
                for w in &sys.warnings {
                    eprintln!("nu {nu}: {w}");
                }
                write_or_print(out, &format!("eigenbasis_nu{nu}.txt"), &sys.to_table())?;
            }
        }
        Command::Theta { n_max } => {
            for nu in c.nu_min..=c.nu_max {
                let sys = simultaneous_eigenbasis(nu, &c.primes, c.order_spec())?;
                for i in 0..sys.len() {
                    let Some(form) = sys.exact_eigenform(i) else {
                        eprintln!("nu {nu}: eigenfunction {i} has irrational coefficients, skipped");
                        continue;
                    };
                    let theta = theta_series(&form.poly, c.order_spec(), n_max)?;
                    let theta = theta.normalized().unwrap_or(theta);
                    write_or_print(out, &format!("theta_nu{nu}_{i}.txt"), &theta.to_text())?;
                }
            }
        }
        Command::IdentityCheck => {
            let report = experiments::run_identity(&c)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            write_or_print(out, "identity.json", &json)?;
            if let Some(r) = report.ratio {
                eprintln!(
                    "ratio {r:.12} ± {:.1e} (target {}), consistent: {}",
                    report.ratio_error.unwrap_or(f64::NAN),
                    report.target,
                    report.consistent
                );
            }
            if !report.consistent {
                return Err(Error::numerical("ratios disagree across triples"));
            }
        }
        Command::Mass => records(&c, "mass", experiments::run_mass(&c)?)?,
        Command::Moments => records(&c, "moments", experiments::run_moments(&c)?)?,
        Command::ThirdMoment => records(&c, "third_moment", experiments::run_third_moment(&c)?)?,
        Command::Lvalue { nu, index, kind } => {
            if c.order != OrderKind::Hurwitz {
                return Err(Error::Config("L-values need the Hurwitz order".into()));
            }
            let sys = simultaneous_eigenbasis(nu, &c.primes, c.order_spec())?;
            if index >= sys.len() {
                return Err(Error::Config(format!("degree {nu} has {} eigenfunctions", sys.len())));
            }
            let form = sys
                .exact_eigenform(index)
                .ok_or_else(|| Error::precondition("eigenfunction has irrational coefficients"))?;
            let data = FormData::from_eigenform(&form, c.coefficients as u64, format!("nu{nu}_{index}"))?;
            let kind = match kind {
                Kind::Form => LKind::Form,
                Kind::Sym3 => LKind::Sym3,
                Kind::Triple => LKind::Triple,
            };
            let params = AfeParams::default();
            let (spec, _) = LSeriesSpec::for_form(kind, &data, c.coefficients, &BadFactor::Derived)?;
            let fit = root_number_fit(&spec, &params)?;
            let spec = spec.with_sign(fit.sign);
            let value = central_value(&spec, &params)?;
            write_or_print(out, &format!("lseries_nu{nu}_{index}_{}.txt", kind.name()), &spec.to_text())?;
            println!("{}", serde_json::to_string_pretty(&serde_json::json!({ "root_number": fit, "central_value": value }))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
