//! Command-line front end. Every subcommand prints JSON records (one per line)
//! except `asymptotics --compare`, which prints a CSV table.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;

use surfmap::asymptotics::{compare, constellation_asymptotics, hypermap_asymptotics, AsymptoticFormula};
use surfmap::bijection::verify_roundtrip;
use surfmap::oracle::{self, Counting, EnumSpec, Mode, DEFAULT_DART_CAP};
use surfmap::schemes::{dominant_pairs, enumerate_cubic_schemes, enumerate_schemes, enumerate_typings};
use surfmap::series::{
    critical_constants, h_tau_identity_check, mn_check, puiseux_fit, verify_kernel_derivatives, PuiseuxQuantity,
};

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "surfmap", version, about = "Hypermaps and constellations on surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hyper,
    Const,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Hyper => Mode::Hypermap,
            ModeArg::Const => Mode::Constellation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Kernel,
    Htau,
    Puiseux,
    Mn,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count rooted maps of a given genus and size by exhaustive enumeration.
    Enumerate {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value = "hyper")]
        mode: ModeArg,
        /// Count rooted-pointed maps instead.
        #[arg(long)]
        pointed: bool,
        /// Write every map in text form to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DART_CAP)]
        cap: usize,
    },
    /// Run mob/map_of both ways on every rooted-pointed hypermap up to a size.
    VerifyBijection {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        max_size: usize,
    },
    /// List schemes of a genus, with typing counts and dominant constants.
    Schemes {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Only cubic (dominant) schemes.
        #[arg(long)]
        dominant: bool,
    },
    /// Critical point and singular constants of the planar series.
    Constants {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        /// Significant digits kept in the output.
        #[arg(long)]
        precision: Option<usize>,
    },
    /// Numerical and exact checks on the generating series.
    Series {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        /// Type of the cells (all types when omitted).
        #[arg(long)]
        tau: Option<usize>,
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Largest |n| compared.
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Asymptotic formula, optionally against exact counts.
    Asymptotics {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<usize>,
        #[arg(long, value_enum, default_value = "const")]
        mode: ModeArg,
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

fn round_sig(x: f64, digits: Option<usize>) -> f64 {
    match digits {
        Some(p) if x.is_finite() && p > 0 => format!("{:.*e}", p - 1, x).parse().unwrap_or(x),
        _ => x,
    }
}

fn emit(v: serde_json::Value) {
    println!("{v}");
}

fn summary(f: &AsymptoticFormula) -> serde_json::Value {
    json!({
        "genus": f.g, "m": f.m, "degrees": f.degrees, "mode": f.mode,
        "prefactor": f.prefactor, "exponent": f.exponent, "growth_rate": f.growth_rate,
        "period": f.period, "tg": f.t_g, "Sg": f.s_g,
    })
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Enumerate { m, degrees, genus, size, mode, pointed, emit: out, cap } => {
            let counting = if pointed { Counting::RootedPointed } else { Counting::Rooted };
            let spec = EnumSpec::new(m, &degrees, genus, size, mode.into(), counting)?;
            let count = match out {
                Some(path) => {
                    let maps = oracle::enumerate(&spec, cap)?;
                    let text: String = maps.iter().map(|(map, _)| map.to_text() + "\n").collect();
                    fs::write(&path, text)?;
                    maps.len().to_string()
                }
                None => oracle::count(&spec, cap)?.to_string(),
            };
            emit(json!({ "g": genus, "n": size, "count": count }));
            Ok(true)
        }
        Cmd::VerifyBijection { m, degrees, genus, max_size } => {
            let mut ok = true;
            for n in 1..=max_size {
                let rep = verify_roundtrip(m, &degrees, genus, n)?;
                ok &= rep.holds();
                emit(json!({ "pass": rep.holds(), "report": rep }));
            }
            Ok(ok)
        }
        Cmd::Schemes { genus, m, dominant } => {
            let schemes = if dominant { enumerate_cubic_schemes(genus) } else { enumerate_schemes(genus) };
            let pairs = if genus >= 1 { dominant_pairs(genus).ok() } else { None };
            for s in &schemes {
                let is_cubic = s.is_cubic();
                let c_sum = match (&pairs, is_cubic) {
                    (Some((cubic, pairs)), true) => {
                        let idx = cubic.iter().position(|c| c.map() == s.map());
                        pairs
                            .iter()
                            .filter(|p| Some(p.scheme) == idx)
                            .fold(BigRational::zero(), |acc, p| acc + &p.c)
                            .to_string()
                    }
                    _ => "0".to_string(),
                };
                emit(json!({
                    "scheme": s.map().to_text(),
                    "n_vertices": s.n_vertices(),
                    "n_edges": s.n_edges(),
                    "typing_count": enumerate_typings(s, m).len(),
                    "dominant": is_cubic,
                    "c_sum": c_sum,
                }));
            }
            Ok(true)
        }
        Cmd::Constants { m, degrees, precision } => {
            let c = critical_constants(m, &degrees)?;
            let r = |x| round_sig(x, precision);
            emit(json!({
                "m": c.m, "degrees": c.degrees,
                "t_c": r(c.t_c), "beta": r(c.beta), "gamma": r(c.gamma), "z_c": r(c.z_c),
                "growth_rate": r(c.growth_rate()), "period": c.period(),
                "closed_form": c.singleton,
            }));
            Ok(true)
        }
        Cmd::Series { check, m, degrees, tau, order, n_max } => series_check(check, m, &degrees, tau, order, n_max),
        Cmd::Asymptotics { genus, m, degrees, mode, compare: cmp, max_n } => {
            let mode: Mode = mode.into();
            if cmp {
                let (f, rows) = compare(genus, m, &degrees, mode, max_n)?;
                println!("n,exact,predicted,ratio");
                for r in &rows {
                    println!("{},{},{:e},{}", r.n, r.exact, r.predicted, r.ratio);
                }
                eprintln!("{}", summary(&f));
            } else {
                let f = match mode {
                    Mode::Constellation => constellation_asymptotics(genus, m, &degrees)?,
                    Mode::Hypermap => hypermap_asymptotics(genus, m, &degrees)?,
                };
                emit(summary(&f));
            }
            Ok(true)
        }
    }
}

fn series_check(
    check: Check,
    m: usize,
    degrees: &[usize],
    tau: Option<usize>,
    order: usize,
    n_max: usize,
) -> Result<bool> {
    match check {
        Check::Kernel => {
            let rep = verify_kernel_derivatives(m, degrees)?;
            let pass = rep.holds(1e-10);
            emit(json!({ "check": "kernel", "pass": pass, "report": rep }));
            Ok(pass)
        }
        Check::Htau => {
            let taus: Vec<usize> = match tau {
                Some(t) => vec![t],
                None => (1..m).collect(),
            };
            let mut ok = true;
            for t in taus {
                let rep = h_tau_identity_check(m, degrees, t, n_max as i64, order)?;
                ok &= rep.holds();
                emit(json!({
                    "check": "htau", "tau": t, "order": order, "n_max": n_max,
                    "pass": rep.holds(), "first_mismatch": rep.first_mismatch,
                }));
            }
            Ok(ok)
        }
        Check::Puiseux => {
            let mut ok = true;
            for q in [PuiseuxQuantity::Planar, PuiseuxQuantity::Alpha1, PuiseuxQuantity::C1] {
                let fit = puiseux_fit(q, m, degrees)?;
                let pass = fit.slope_error() < 0.02 && fit.amplitude_error() < 0.05;
                ok &= pass;
                emit(json!({
                    "check": "puiseux", "pass": pass,
                    "slope_error": fit.slope_error(), "amplitude_error": fit.amplitude_error(), "fit": fit,
                }));
            }
            Ok(ok)
        }
        Check::Mn => {
            let rep = mn_check(m, degrees, n_max, 10)?;
            let pass = rep.max_residual <= 1e-8;
            emit(json!({ "check": "mn", "pass": pass, "max_residual": rep.max_residual, "rows": rep.rows }));
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
