//! `sextic`: field data, unit lattices, theta sums, torus scans and the batch
//! verification suite from the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use sextic::report::{emit_report, Format, Meta, Report, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use sextic::theta::{ArakelovPoint, ThetaContext};
use sextic::units::{lattice_for_conductor, log_unit_lattice, TorusPoint};
use sextic::verify::{run_all, scan_field, FieldData, ScanReport, VerifyConfig};
use sextic::{enumerate_short, Error, Real, Scalar, SexticField};

#[derive(Parser, Debug)]
#[command(name = "sextic", version, about = "Computations in imaginary cyclic sextic fields")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Floating precision in bits: 24 (f32) or 53 (f64).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Tower data, integral basis and Gram matrix of O_F.
    Field {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
    },
    /// Log-unit lattice of O_K.
    Units {
        #[arg(long)]
        p: u64,
    },
    /// Elements of O_F with ||f||^2 <= bound, one per sign, as CSV.
    ShortVectors {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 21)]
        bound: i64,
    },
    /// k0, h0 and the split of the sum at one point of the torus.
    Theta {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha2: f64,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// h0 over a grid of the fundamental domain.
    ScanTorus {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Run the batch checks.
    Verify {
        /// Glob on check ids, e.g. 'table1.*'.
        #[arg(long)]
        only: Option<String>,
        /// Report format when writing to a file or with --json unset: json or csv.
        #[arg(long)]
        format: Option<String>,
        /// Sweep both list universes for mixed short elements.
        #[arg(long)]
        exhaustive: bool,
        /// Record wall-clock times and a timestamp (breaks byte-identical reports).
        #[arg(long)]
        timing: bool,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedConductor(_) | Error::NotSquarefree(_) | Error::Precondition(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Settings after merging the config file with flags.
struct Settings {
    verify: VerifyConfig,
    threads: Option<usize>,
}

fn settings(g: &Global) -> Result<Settings, Failure> {
    let mut verify = VerifyConfig::default();
    let mut threads = None;
    if let Some(path) = &g.config {
        for (k, v) in read_config(path)? {
            if k == "threads" {
                threads = Some(v.parse().map_err(|_| Failure::Usage(format!("bad threads value {v:?}")))?);
            } else {
                verify.set(&k, &v)?;
            }
        }
    }
    if let Some(t) = g.threads {
        threads = Some(t);
    }
    if let Some(p) = g.precision {
        verify.precision = p;
    }
    if verify.precision != 24 && verify.precision != 53 {
        return Err(Failure::Usage(format!("precision must be 24 or 53, got {}", verify.precision)));
    }
    Ok(Settings { verify, threads })
}

fn write_out(g: &Global, body: &str) -> Result<(), Failure> {
    match &g.out {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::Run(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap_or_default() + "\n"
}

fn cmd_field(g: &Global, p: u64, d: u64) -> Result<i32, Failure> {
    let f = SexticField::new(p, d)?;
    let desc = f.descriptor();
    let body = if g.json {
        pretty(&desc)
    } else {
        let t = &f.tower;
        let mut s = format!(
            "F = K(sqrt(-{d})), conductor {p}\nt = {}, Delta_k = {}, Delta_F = {}, n = {}\ngram:\n",
            t.t, t.delta_k, t.delta_f, t.n
        );
        for row in f.o_f.gram_strings() {
            s.push_str(&format!("  {}\n", row.join(" ")));
        }
        s
    };
    write_out(g, &body)?;
    Ok(EXIT_PASS)
}

fn units_json<T: Real>(p: u64) -> Result<Value, Failure> {
    Ok(lattice_for_conductor::<T>(p)?.to_json())
}

fn cmd_units(g: &Global, s: &Settings, p: u64) -> Result<i32, Failure> {
    let v = if s.verify.precision == 24 { units_json::<f32>(p)? } else { units_json::<f64>(p)? };
    let body = if g.json {
        pretty(&v)
    } else {
        format!(
            "lambda = {}\nregulator = {}\nb1 = {}\nb2 = {}\n",
            v["lambda"], v["regulator"], v["b1"], v["b2"]
        )
    };
    write_out(g, &body)?;
    Ok(EXIT_PASS)
}

fn cmd_short(g: &Global, p: u64, d: u64, bound: i64) -> Result<i32, Failure> {
    let f = SexticField::new(p, d)?;
    let set = enumerate_short(&f.o_f.exact_gram(), &BigRational::from_integer(BigInt::from(bound)))?;
    let body = if g.json {
        let rows: Vec<Value> = set.vectors.iter().map(|v| json!({"norm": v.norm.to_string(), "coords": v.coords})).collect();
        pretty(&json!({"bound": bound, "vectors": rows}))
    } else {
        set.to_csv()
    };
    write_out(g, &body)?;
    Ok(EXIT_PASS)
}

fn theta_json<T: Real + Scalar>(p: u64, d: u64, a1: f64, a2: f64, eps: f64) -> Result<Value, Failure> {
    let fd = FieldData::new(p, d)?;
    let lat = log_unit_lattice::<T>(&fd.field.o_cubic)?;
    let tp = TorusPoint::from_alpha(T::lit(a1), T::lit(a2), &lat);
    let pt = ArakelovPoint::from_w(tp.w)?;
    let ctx = ThetaContext::<T>::new(&fd.field.o_f, fd.field.tower.embedding_residues())?;
    let eps = T::lit(eps);
    let k = ctx.k0(&pt, eps)?;
    let (h, unc) = k.h0();
    let s = ctx.sum_split(&pt, eps)?;
    let f = |x: T| Scalar::to_f64(&x);
    Ok(json!({
        "u": pt.u.map(f),
        "w": pt.w.map(f),
        "k0": f(k.partial_sum),
        "tail": f(k.tail_bound),
        "h0": f(h),
        "h0_uncertainty": f(unc),
        "radius": f(k.radius),
        "terms": k.terms_used,
        "sigma1": f(s.sigma1),
        "sigma2": f(s.sigma2),
        "sigma3": f(s.sigma3),
        "counts": {"s1": s.s1_count, "s21": s.s21_count, "s22": s.s22_count},
    }))
}

fn cmd_theta(g: &Global, s: &Settings, p: u64, d: u64, a1: f64, a2: f64, eps: Option<f64>) -> Result<i32, Failure> {
    if !(a1 > -0.5 && a1 <= 0.5 && a2 > -0.5 && a2 <= 0.5) {
        return Err(Failure::Usage("alpha1, alpha2 must lie in (-1/2, 1/2]".into()));
    }
    let eps = eps.unwrap_or(s.verify.eps);
    let v = if s.verify.precision == 24 {
        theta_json::<f32>(p, d, a1, a2, eps)?
    } else {
        theta_json::<f64>(p, d, a1, a2, eps)?
    };
    let body = if g.json {
        pretty(&v)
    } else {
        format!(
            "k0 in [{}, {} + {}]\nh0 = {} (rel. uncertainty {})\nsigma1 = {}, sigma2 = {}, sigma3 = {}\ncounts = {}\n",
            v["k0"], v["k0"], v["tail"], v["h0"], v["h0_uncertainty"], v["sigma1"], v["sigma2"], v["sigma3"], v["counts"]
        )
    };
    write_out(g, &body)?;
    Ok(EXIT_PASS)
}

fn scan_any(p: u64, d: u64, n1: usize, n2: usize, eps: f64, precision: u32) -> Result<ScanReport, Failure> {
    let fd = FieldData::new(p, d)?;
    Ok(if precision == 24 {
        scan_field(&fd, &log_unit_lattice::<f32>(&fd.field.o_cubic)?, n1, n2, eps as f32)?
    } else {
        scan_field(&fd, fd.lattice()?, n1, n2, eps)?
    })
}

fn cmd_scan(g: &Global, s: &Settings, p: u64, d: u64, n1: Option<usize>, n2: Option<usize>, eps: Option<f64>) -> Result<i32, Failure> {
    let n1 = n1.unwrap_or(s.verify.grid);
    let n2 = n2.unwrap_or(n1);
    let r = scan_any(p, d, n1, n2, eps.unwrap_or(s.verify.eps), s.verify.precision)?;
    let resolved = r.margin.abs() > r.error;
    let mut v = serde_json::to_value(&r).map_err(|e| Failure::Run(e.to_string()))?;
    v["max_at_origin"] = json!(r.max_at_origin());
    v["resolved"] = json!(resolved);
    let body = if g.json {
        pretty(&v)
    } else {
        format!(
            "field ({p},{d}), grid {n1}x{n2}\nmaximum at ({}, {})\nh0(0) = {:.15e}\nbest off origin = {:.15e}\nmargin = {:e} (error {:e})\ntau-symmetry defect = {:e} over {} pairs\n",
            r.max_location.0, r.max_location.1, r.h0_at_origin, r.max_off_origin, r.margin, r.error, r.symmetry_defect, r.symmetry_pairs
        )
    };
    write_out(g, &body)?;
    if !resolved {
        eprintln!("margin {:e} not resolved at error {:e}", r.margin, r.error);
        return Ok(EXIT_FAIL);
    }
    Ok(if r.max_at_origin() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_verify(g: &Global, s: Settings, only: Option<String>, format: Option<String>, exhaustive: bool, timing: bool) -> Result<i32, Failure> {
    let mut cfg = s.verify;
    if only.is_some() {
        cfg.only = only;
    }
    cfg.exhaustive |= exhaustive;
    cfg.timing |= timing;
    let format = match format.as_deref() {
        None if g.json || g.out.is_some() => Some(Format::Json),
        None => None,
        Some("json") => Some(Format::Json),
        Some("csv") => Some(Format::Csv),
        Some(other) => return Err(Failure::Usage(format!("unknown format {other:?}"))),
    };
    let suite = run_all(&cfg)?;
    let report = Report::new(Meta::new(cfg.to_map(), cfg.timing), suite);
    match format {
        Some(f) => Ok(emit_report(&report, f, g.out.as_deref())?),
        None => {
            print!("{}", report.to_text());
            Ok(report.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let s = settings(&cli.global)?;
    if let Some(n) = s.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let g = &cli.global;
    match cli.cmd {
        Cmd::Field { p, d } => cmd_field(g, p, d),
        Cmd::Units { p } => cmd_units(g, &s, p),
        Cmd::ShortVectors { p, d, bound } => cmd_short(g, p, d, bound),
        Cmd::Theta { p, d, alpha1, alpha2, eps } => cmd_theta(g, &s, p, d, alpha1, alpha2, eps),
        Cmd::ScanTorus { p, d, n1, n2, eps } => cmd_scan(g, &s, p, d, n1, n2, eps),
        Cmd::Verify { only, format, exhaustive, timing } => cmd_verify(g, s, only, format, exhaustive, timing),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(c) => c,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            EXIT_FAIL
        }
    };
    ExitCode::from(code as u8)
}
