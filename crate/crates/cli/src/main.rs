use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heegner_lab::bounds::{self, CsvRow};
use heegner_lab::discriminant::{Caps, CAP_ENV};
use heegner_lab::heegner;
use heegner_lab::matrix::parse_rat;
use heegner_lab::named::{build_named_lattice, LatticeParams};
use heegner_lab::report;
use heegner_lab::weil::{build_weil_rep, signature_parameter, DEFAULT_TOLERANCE};
use heegner_lab::{arith, Error};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "heegner-lab", version, about = "Lattice, Heegner divisor and K3 moduli bound computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format. CSV is available for flat reports only.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Wrap the payload in an envelope with tool and parameter metadata.
    #[arg(long, global = true)]
    meta: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Named lattices.
    Lattice {
        #[command(subcommand)]
        command: LatticeCmd,
    },
    /// Weil representation of a named lattice.
    Weil {
        #[command(subcommand)]
        command: WeilCmd,
    },
    /// Heegner divisor indices.
    Heegner {
        #[command(subcommand)]
        command: HeegnerCmd,
    },
    /// Embedding of the K3 lattice of degree d into E8^3 + U^2, with its Kudla moment matrix.
    Embed {
        #[arg(long)]
        d: Option<i64>,
        /// Inclusive range `a:b`; odd values are skipped.
        #[arg(long, value_parser = parse_range)]
        d_range: Option<(i64, i64)>,
    },
    /// Admissibility of d = 2g - 2 for the cubic, Gushel-Mukai and Hilbert-square routes.
    Admissible {
        #[command(flatten)]
        genus: GenusArgs,
        #[arg(long)]
        d: Option<i64>,
    },
    /// Irrationality bound certificates.
    Bound {
        #[command(flatten)]
        genus: GenusArgs,
    },
    /// Growth inequalities.
    Growth {
        #[command(subcommand)]
        command: GrowthCmd,
    },
}

#[derive(Args)]
struct LatticeArgs {
    /// One of U, A1, A2, E8, rank1, Lambda_C, Lambda_GM, Lambda_HK, Lambda_HK_prim, Lambda_d, Lambda_sharp.
    #[arg(long)]
    name: String,
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    delta: Option<i64>,
    #[arg(long)]
    d: Option<i64>,
}

#[derive(Args)]
struct GenusArgs {
    #[arg(long)]
    g: Option<i64>,
    /// Inclusive range `a:b`.
    #[arg(long, value_parser = parse_range)]
    g_range: Option<(i64, i64)>,
    /// Largest n considered for Hilbert-square witnesses; unbounded when omitted.
    #[arg(long)]
    n_max: Option<i64>,
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Gram matrix, signature, determinant, discriminant form and level.
    Info(LatticeArgs),
}

#[derive(Subcommand)]
enum WeilCmd {
    /// Check S^4 = I, (ST)^3 = S^2, T^N = I and unitarity.
    Check {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Include the S and T matrices in the output.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Subcommand)]
enum HeegnerCmd {
    /// Special cubic fourfolds of discriminant d.
    Cubic {
        #[arg(long)]
        d: Option<i64>,
        /// Inclusive range `a:b`; values outside d ≡ 0, 2 (mod 6) are skipped.
        #[arg(long, value_parser = parse_range)]
        d_range: Option<(i64, i64)>,
    },
    /// Gushel-Mukai fourfolds of discriminant d, with labelling witnesses.
    Gm {
        #[arg(long)]
        d: Option<i64>,
        /// Inclusive range `a:b`; values outside d ≡ 0, 2, 4 (mod 8) are skipped.
        #[arg(long, value_parser = parse_range)]
        d_range: Option<(i64, i64)>,
    },
    /// Hyperkähler fourfolds of K3^[2] type with polarization (2n, delta).
    Hk {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        delta: i64,
        #[arg(long)]
        d: i64,
    },
    /// Hilbert-square route for genus g through K3^[2] moduli of degree 2n.
    Hilb {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        n: i64,
    },
}

#[derive(Subcommand)]
enum GrowthCmd {
    /// m^(k-1) <= sigma_(k-1)(m) <= zeta(k-1) m^(k-1) on a range of m.
    Sandwich {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        m_max: u64,
    },
    /// Log-log slope of a series: sigma_(k-1)(m) for m <= m-max, or a CSV file of `index,value`.
    Estimate {
        #[arg(long, conflicts_with = "series")]
        k: Option<u32>,
        #[arg(long, default_value_t = 1000)]
        m_max: u64,
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// 2^omega(n) <= d(n), with equality exactly on squarefree n.
    Divisors {
        #[arg(long, default_value_t = 1_000_000)]
        n_max: u32,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Res<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

/// Documents produced by one command, plus whether every verification held.
struct Output {
    docs: Vec<Value>,
    csv: Option<Vec<CsvRow>>,
    verified: bool,
}

impl Output {
    fn new() -> Self {
        Output { docs: Vec::new(), csv: None, verified: true }
    }

    fn push(&mut self, doc: impl Serialize) {
        self.docs.push(serde_json::to_value(doc).expect("serializable payload"));
    }

    fn rows(&mut self, rows: Vec<CsvRow>) {
        self.csv.get_or_insert_with(Vec::new).extend(rows);
    }
}

fn lattice(args: &LatticeArgs) -> Res<heegner_lab::lattice::IntegerLattice> {
    let params = LatticeParams { n: args.n, delta: args.delta, d: args.d };
    Ok(build_named_lattice(&args.name, params)?)
}

fn single_or_range(one: Option<i64>, range: Option<(i64, i64)>, what: &str) -> Res<(Vec<i64>, bool)> {
    match (one, range) {
        (Some(x), None) => Ok((vec![x], false)),
        (None, Some((a, b))) => Ok(((a..=b).collect(), true)),
        (Some(_), Some(_)) => usage(format!("give either --{what} or --{what}-range, not both")),
        (None, None) => usage(format!("one of --{what} or --{what}-range is required")),
    }
}

fn genera(args: &GenusArgs) -> Res<Vec<i64>> {
    let (gs, _) = single_or_range(args.g, args.g_range, "g")?;
    if let Some(&g) = gs.iter().find(|&&g| g < 2) {
        return usage(format!("g must be at least 2, got {g}"));
    }
    Ok(gs)
}

fn n_max(args: &GenusArgs, d: i64) -> i64 {
    args.n_max.unwrap_or(d / 2)
}

fn run(cli: &Cli) -> Res<Output> {
    let mut out = Output::new();
    match &cli.command {
        Command::Lattice { command: LatticeCmd::Info(args) } => {
            out.push(report::lattice_info(&lattice(args)?)?);
        }
        Command::Weil { command: WeilCmd::Check { lattice: args, tol, dump } } => {
            if !(*tol > 0.0) {
                return usage("--tol must be positive");
            }
            let l = lattice(args)?;
            let check = report::weil_check(&l, *tol)?;
            out.verified = check.pass();
            let mut doc = serde_json::to_value(&check).expect("serializable");
            if *dump {
                let group = heegner_lab::discriminant::DiscriminantGroup::new(&l)?;
                let w = build_weil_rep(&group, signature_parameter(&l)?)?;
                doc["matrices"] = serde_json::to_value(&w).expect("serializable");
            }
            out.push(doc);
        }
        Command::Heegner { command } => heegner_cmd(command, &mut out)?,
        Command::Embed { d, d_range } => {
            let (ds, ranged) = single_or_range(*d, *d_range, "d")?;
            for d in ds {
                if ranged && (d < 2 || d % 2 != 0) {
                    continue;
                }
                let w = heegner::embed_k3_lattice(d)?;
                out.verified &= w.pass();
                out.push(&w);
            }
        }
        Command::Admissible { genus, d } => {
            let ds: Vec<i64> = match d {
                Some(d) => {
                    if genus.g.is_some() || genus.g_range.is_some() {
                        return usage("give either --d or --g/--g-range");
                    }
                    vec![*d]
                }
                None => genera(genus)?.into_iter().map(|g| 2 * g - 2).collect(),
            };
            for d in ds {
                let r = bounds::admissibility(d, n_max(genus, d))?;
                out.rows(r.csv_rows());
                out.push(&r);
            }
        }
        Command::Bound { genus } => {
            for g in genera(genus)? {
                let c = bounds::irr_bound_certificate(g, n_max(genus, 2 * g - 2))?;
                out.push(&c);
            }
        }
        Command::Growth { command } => growth_cmd(command, &mut out)?,
    }
    Ok(out)
}

fn heegner_cmd(cmd: &HeegnerCmd, out: &mut Output) -> Res<()> {
    match cmd {
        HeegnerCmd::Cubic { d, d_range } => {
            let (ds, ranged) = single_or_range(*d, *d_range, "d")?;
            for d in ds {
                match heegner::cubic_heegner_index(d) {
                    Ok(idx) => out.push(json!({ "d": d, "index": idx })),
                    Err(_) if ranged => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        HeegnerCmd::Gm { d, d_range } => {
            let (ds, ranged) = single_or_range(*d, *d_range, "d")?;
            for d in ds {
                let res = heegner::gm_heegner_index(d).and_then(|i| Ok((i, heegner::gm_residue_vector(d)?)));
                match res {
                    Ok((indices, witnesses)) => {
                        out.verified &= witnesses.iter().all(|w| w.checks.pass);
                        out.push(json!({ "d": d, "indices": indices, "witnesses": witnesses }));
                    }
                    Err(_) if ranged => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        HeegnerCmd::Hk { n, delta, d } => out.push(heegner::hk_heegner_index(*n, *delta, *d)?),
        HeegnerCmd::Hilb { g, n } => out.push(heegner::hilb_square_route(*g, *n)?),
    }
    Ok(())
}

fn read_series(path: &PathBuf) -> Res<Vec<(BigRational, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Failure::Usage(e.to_string()))?;
        if rec.len() != 2 || rec[0].starts_with('#') {
            continue;
        }
        let Ok(index) = parse_rat(&rec[0]) else { continue };
        let value: f64 = rec[1].parse().map_err(|_| Failure::Usage(format!("bad value `{}`", &rec[1])))?;
        out.push((index, value));
    }
    Ok(out)
}

fn growth_cmd(cmd: &GrowthCmd, out: &mut Output) -> Res<()> {
    match cmd {
        GrowthCmd::Sandwich { k, m_max } => {
            let r = bounds::sandwich_check(*k, 1, *m_max)?;
            out.verified = r.pass;
            out.rows(r.csv_rows());
            out.push(&r);
        }
        GrowthCmd::Estimate { k, m_max, series } => {
            let (pts, source) = match (k, series) {
                (_, Some(path)) => (read_series(path)?, json!({ "file": path.display().to_string() })),
                (Some(k), None) => {
                    if *k < 1 {
                        return usage("--k must be positive");
                    }
                    let mut pts = Vec::new();
                    for m in 1..=*m_max {
                        let s = arith::sigma_power(k - 1, m)?;
                        pts.push((BigRational::from_integer(m.into()), s.to_f64().unwrap_or(f64::INFINITY)));
                    }
                    (pts, json!({ "sigma": k - 1, "m_max": m_max }))
                }
                (None, None) => return usage("one of --k or --series is required"),
            };
            let slope = bounds::growth_exponent_estimate(&pts)?;
            out.push(json!({ "series": source, "points": pts.len(), "slope": slope }));
        }
        GrowthCmd::Divisors { n_max } => {
            let r = bounds::divisor_bound_check(1, *n_max)?;
            out.verified = r.pass;
            out.rows(vec![CsvRow {
                input: format!("1:{n_max}"),
                clause: "2^omega(n) <= d(n), equality iff squarefree".into(),
                pass: r.pass,
            }]);
            out.push(&r);
        }
    }
    Ok(())
}

fn render(cli: &Cli, out: &Output) -> Res<String> {
    match cli.format {
        Format::Csv => {
            let Some(rows) = &out.csv else {
                return usage("CSV output is only available for `admissible`, `growth sandwich` and `growth divisors`");
            };
            if cli.meta {
                return usage("--meta requires JSON output");
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8 csv"))
        }
        Format::Json if cli.meta => {
            let caps = Caps::from_env();
            let args: Vec<String> = std::env::args().skip(1).collect();
            let doc = json!({
                "meta": {
                    "tool": "heegner-lab",
                    "version": env!("CARGO_PKG_VERSION"),
                    "args": args,
                    "table_cap": caps.table,
                    "cap_env": CAP_ENV,
                    "conventions": {
                        "rationals": "strings a/b",
                        "fm_partner_count": "2^max(omega(g-1)-1, 0)",
                    },
                },
                "payload": out.docs,
            });
            Ok(format!("{doc}\n"))
        }
        Format::Json => Ok(out.docs.iter().map(|d| format!("{d}\n")).collect()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| Ok((render(&cli, &out)?, out.verified)));
    match result {
        Ok((text, verified)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text),
                None => std::io::stdout().lock().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
