//! The `ulrich` command line: every engine of `ulrich-core` as a subcommand.
//!
//! Exit codes: 0 on success or a positive verdict, 1 on a negative verdict
//! (failed verification, no rank-1 bundle, forced dimension not integral),
//! 2 on usage or input errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use ulrich_core::gallery::{self, FIXTURE_NAMES};
use ulrich_core::numerology::{
    bott_dimension, chi_omega, chi_ulrich, omega_profile, rank1_classify, rank2_chern, resolution_ranks,
    ulrich_profile, CohomologyProfile, NumerologyError, UlrichContext,
};
use ulrich_core::resolution::{
    cohomology_table, ulrich_verdict, LinearResolution, Provenance, UlrichCertificate, VerifyOptions, DEFAULT_SAMPLES,
    DEFAULT_SEED,
};
use ulrich_core::search::{search_ulrich, SearchConfig, SearchMode};
use ulrich_core::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ulrich", version, about = "Cohomology numerology and certified Ulrich bundles on projective space")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
struct ContextArgs {
    /// Dimension of the projective space.
    #[arg(short = 'n')]
    n: usize,
    /// Veronese degree.
    #[arg(short = 'd')]
    d: u32,
    /// Rank of the bundle.
    #[arg(short = 'r')]
    r: u32,
}

impl ContextArgs {
    fn ctx(&self) -> Result<UlrichContext, Failure> {
        UlrichContext::new(self.n, self.d, self.r).map_err(Failure::from)
    }
}

#[derive(Debug, Clone, Args)]
struct ResolutionSource {
    /// A named gallery fixture.
    #[arg(long, conflicts_with = "resolution")]
    gallery: Option<String>,
    /// A JSON file with `context` and `differentials`.
    #[arg(long, value_name = "FILE")]
    resolution: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Euler characteristic chi(E(p)), or chi(E(p) x Omega^j(j)) with -j.
    #[command(allow_negative_numbers = true)]
    Chi {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(short = 'p')]
        p: i64,
        #[arg(short = 'j')]
        j: Option<usize>,
    },
    /// Cohomology h^0..h^n of E(t), or of E(t) x Omega^j(j) with -j.
    #[command(allow_negative_numbers = true)]
    Profile {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(short = 't')]
        t: i64,
        #[arg(short = 'j')]
        j: Option<usize>,
    },
    /// Cohomology table over a twist window, from the closed form or from
    /// an explicit resolution.
    #[command(allow_negative_numbers = true)]
    Table {
        #[arg(short = 'n')]
        n: Option<usize>,
        #[arg(short = 'd')]
        d: Option<u32>,
        #[arg(short = 'r')]
        r: Option<u32>,
        #[arg(long = "from")]
        from: i64,
        #[arg(long = "to")]
        to: i64,
        #[arg(short = 'j')]
        j: Option<usize>,
        #[command(flatten)]
        source: ResolutionSource,
    },
    /// Ranks a_1..a_n of the linear resolution.
    Ranks {
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// h^q(P^n, Omega^p(t)) by Bott's formula.
    #[command(allow_negative_numbers = true)]
    Bott {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'p')]
        p: i64,
        #[arg(short = 'q')]
        q: i64,
        #[arg(short = 't')]
        t: i64,
    },
    /// Chern classes forced on a rank-2 Ulrich bundle.
    Chern {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: u32,
    },
    /// The twist a with O(a) Ulrich, if any (exit 1 if none).
    Rank1 {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: u32,
    },
    /// Verify a resolution and print its certificate, or re-verify one.
    Verify {
        #[command(flatten)]
        source: ResolutionSource,
        /// Re-verify a certificate file.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["gallery", "resolution"])]
        certificate: Option<PathBuf>,
        /// Seed of the random pre-screening points.
        #[arg(long)]
        seed: Option<u64>,
        /// Check every twist of the definition, even for rank 2.
        #[arg(long)]
        full: bool,
    },
    /// List gallery fixtures, or print one.
    Gallery { name: Option<String> },
    /// Search for new certified resolutions.
    Search {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Comma-separated coefficient pool, e.g. 0,1 or -1,0,1.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        pool: String,
        #[arg(long)]
        budget: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Random)]
        mode: Mode,
        /// First candidate index in exhaustive mode.
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for certificate files and the run manifest.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Random,
    Exhaustive,
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
    output: Option<String>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into(), output: None }
    }

    fn negative(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into(), output: None }
    }
}

impl From<NumerologyError> for Failure {
    fn from(e: NumerologyError) -> Self {
        match e {
            NumerologyError::Integrality(_) => Failure::negative(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

/// Renders profiles as a table: one row per twist (ascending), columns
/// `h^0 .. h^n`. The text form marks each row's nonzero entry with `*`.
pub fn render_table(n: usize, profiles: &[CohomologyProfile], format: Format) -> Result<String, String> {
    if let Some(p) = profiles.iter().find(|p| p.values.len() != n + 1) {
        return Err(format!("profile at twist {} has {} entries, expected {}", p.twist, p.values.len(), n + 1));
    }
    let mut rows: Vec<&CohomologyProfile> = profiles.iter().collect();
    rows.sort_by_key(|p| p.twist);
    let mut s = String::new();
    match format {
        Format::Json => {
            let rows: Vec<Value> = rows.iter().map(|p| json!({"twist": p.twist, "h": p.values})).collect();
            s = serde_json::to_string(&json!({"n": n, "rows": rows})).expect("json");
            s.push('\n');
        }
        Format::Csv => {
            let header: Vec<String> = std::iter::once("twist".to_string()).chain((0..=n).map(|q| format!("h{q}"))).collect();
            writeln!(s, "{}", header.join(",")).unwrap();
            for p in rows {
                let cells: Vec<String> =
                    std::iter::once(p.twist.to_string()).chain(p.values.iter().map(u64::to_string)).collect();
                writeln!(s, "{}", cells.join(",")).unwrap();
            }
        }
        Format::Text => {
            let header: Vec<String> = std::iter::once("twist".to_string()).chain((0..=n).map(|q| format!("h^{q}"))).collect();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|p| {
                    std::iter::once(p.twist.to_string())
                        .chain(p.values.iter().map(|&v| if v == 0 { "0".to_string() } else { format!("{v}*") }))
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|c| body.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| -> String {
                let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                padded.join("  ")
            };
            writeln!(s, "{}", line(&header)).unwrap();
            for r in &body {
                writeln!(s, "{}", line(r)).unwrap();
            }
        }
    }
    Ok(s)
}

fn load_resolution(source: &ResolutionSource) -> Result<(LinearResolution, String), Failure> {
    if let Some(name) = &source.gallery {
        let f = gallery::fixture(name).map_err(|e| Failure::input(e.to_string()))?;
        let res = LinearResolution::new(f.context, f.differentials).map_err(|e| Failure::input(e.to_string()))?;
        return Ok((res, format!("gallery:{name}")));
    }
    if let Some(path) = &source.resolution {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let res: LinearResolution =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        return Ok((res, format!("file:{}", path.display())));
    }
    Err(Failure::input("give --gallery NAME or --resolution FILE"))
}

fn scalar(format: Format, key: &str, value: String, extra: Value) -> String {
    match format {
        Format::Json => {
            let mut obj = extra;
            obj[key] = Value::String(value);
            format!("{}\n", serde_json::to_string(&obj).expect("json"))
        }
        _ => format!("{value}\n"),
    }
}

fn parse_pool(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',')
        .map(|v| Rational::from_str(v).map_err(|e| Failure::input(format!("--pool: {e}"))))
        .collect()
}

fn display_matrix(m: &[Vec<String>]) -> String {
    let widths: Vec<usize> =
        (0..m.first().map_or(0, Vec::len)).map(|c| m.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        writeln!(s, "  [ {} ]", cells.join("  ")).unwrap();
    }
    s
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<String, Failure> {
    let format = if cli.json { Format::Json } else { cli.format };
    match &cli.command {
        Command::Chi { ctx, p, j } => {
            let c = ctx.ctx()?;
            let value = match j {
                Some(j) => chi_omega(&c, *p, *j)?,
                None => chi_ulrich(&c, *p),
            };
            Ok(scalar(format, "chi", value.to_string(), json!({"context": c, "p": p, "j": j})))
        }
        Command::Profile { ctx, t, j } => {
            let c = ctx.ctx()?;
            let profile = match j {
                Some(j) => omega_profile(&c, *t, *j)?,
                None => ulrich_profile(&c, *t)?,
            };
            render_table(c.n, &[profile], format).map_err(Failure::input)
        }
        Command::Table { n, d, r, from, to, j, source } => {
            let profiles: Vec<CohomologyProfile>;
            let dim;
            if source.gallery.is_some() || source.resolution.is_some() {
                if j.is_some() {
                    return Err(Failure::input("-j is only available for the closed-form table"));
                }
                let (res, _) = load_resolution(source)?;
                dim = res.ctx().n;
                profiles = cohomology_table(&res, *from, *to).map_err(|e| Failure::negative(e.to_string()))?;
            } else {
                let (Some(n), Some(d), Some(r)) = (n, d, r) else {
                    return Err(Failure::input("give -n, -d, -r or a resolution source"));
                };
                let c = UlrichContext::new(*n, *d, *r)?;
                dim = c.n;
                profiles = (*from..=*to)
                    .map(|t| match j {
                        Some(j) => omega_profile(&c, t, *j),
                        None => ulrich_profile(&c, t),
                    })
                    .collect::<Result<_, _>>()?;
            }
            render_table(dim, &profiles, format).map_err(Failure::input)
        }
        Command::Ranks { ctx } => {
            let c = ctx.ctx()?;
            let sig = resolution_ranks(&c)?;
            let text: Vec<String> = sig.ranks.iter().map(u64::to_string).collect();
            Ok(match format {
                Format::Json => format!("{}\n", json!({"context": c, "ranks": sig.ranks, "pointwise_ranks": sig.pointwise_ranks()})),
                Format::Csv => format!("{}\n", text.join(",")),
                Format::Text => format!("{}\n", text.join(" ")),
            })
        }
        Command::Bott { n, p, q, t } => {
            let v = bott_dimension(*n, *p, *q, *t)?;
            Ok(scalar(format, "h", v.to_string(), json!({"n": n, "p": p, "q": q, "t": t})))
        }
        Command::Chern { n, d } => {
            let (c1, c2) = rank2_chern(*n, *d)?;
            let obstructed = !c2.is_integer();
            Ok(match format {
                Format::Json => format!("{}\n", json!({"n": n, "d": d, "c1": c1, "c2": c2, "obstructed": obstructed})),
                Format::Csv => format!("c1,c2,obstructed\n{c1},{c2},{obstructed}\n"),
                Format::Text => {
                    let note = if obstructed { " (not an integer: no rank-2 Ulrich bundle)" } else { "" };
                    format!("c1 = {c1}\nc2 = {c2}{note}\n")
                }
            })
        }
        Command::Rank1 { n, d } => match rank1_classify(*n, *d) {
            Some(a) => Ok(scalar(format, "twist", a.to_string(), json!({"n": n, "d": d}))),
            None => Err(Failure::negative(format!("no rank-1 Ulrich bundle for (P^{n}, O({d}))"))),
        },
        Command::Verify { source, certificate, seed, full } => {
            if let Some(path) = certificate {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                let cert = UlrichCertificate::from_json(&text).map_err(|e| Failure::input(e.to_string()))?;
                return match cert.reverify() {
                    Ok(again) if again.content_hash == cert.content_hash => Ok(format!("{}\n", again.to_json())),
                    Ok(again) => Err(Failure::negative(format!(
                        "re-verification produced hash {}, certificate has {}",
                        again.content_hash, cert.content_hash
                    ))),
                    Err(f) => Err(Failure { code: 1, message: f.to_string(), output: Some(report_json(&f.report)) }),
                };
            }
            let (res, origin) = load_resolution(source)?;
            let opts = VerifyOptions { seed: seed.unwrap_or(DEFAULT_SEED), samples: DEFAULT_SAMPLES, full_definition: *full };
            match ulrich_verdict(&res, &opts) {
                Ok(mut cert) => {
                    cert.provenance = Provenance { source: origin, ..cert.provenance };
                    Ok(format!("{}\n", cert.to_json()))
                }
                Err(f) => Err(Failure { code: 1, message: f.to_string(), output: Some(report_json(&f.report)) }),
            }
        }
        Command::Gallery { name } => match name {
            None => Ok(match format {
                Format::Json => format!("{}\n", json!(FIXTURE_NAMES)),
                _ => FIXTURE_NAMES.iter().map(|n| format!("{n}\n")).collect(),
            }),
            Some(name) => {
                let f = gallery::fixture(name).map_err(|e| Failure::input(e.to_string()))?;
                Ok(match format {
                    Format::Text => {
                        let c = f.context;
                        let mut s = format!("{} on (P^{}, O({})), rank {}\n", f.name, c.n, c.d, c.r);
                        for (j, m) in f.display.iter().enumerate() {
                            writeln!(s, "D_{} (displayed, stored as its transpose):", j + 1).unwrap();
                            s.push_str(&display_matrix(m));
                        }
                        s
                    }
                    _ => format!("{}\n", serde_json::to_string_pretty(&f).expect("json")),
                })
            }
        },
        Command::Search { ctx, pool, budget, seed, mode, start, jobs, out_dir } => {
            let c = ctx.ctx()?;
            let start = BigUint::from_str(start).map_err(|e| Failure::input(format!("--start: {e}")))?;
            let mode = match mode {
                Mode::Random => SearchMode::Random,
                Mode::Exhaustive => SearchMode::Exhaustive,
            };
            let cfg = SearchConfig { ctx: c, pool: parse_pool(pool)?, budget: *budget, seed: *seed, mode, start, jobs: *jobs };
            let outcome = search_ulrich(&cfg).map_err(|e| Failure::input(e.to_string()))?;
            if let Some(dir) = out_dir {
                write_results(dir, &outcome).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
            }
            let manifest = serde_json::to_string_pretty(&outcome.manifest).expect("json");
            if let Some(first) = outcome.certificates.first() {
                let _ = writeln!(err, "first certificate: candidate {}", first.provenance.candidate_index.as_deref().unwrap_or("?"));
            }
            Ok(format!("{manifest}\n"))
        }
    }
}

fn report_json(report: &ulrich_core::resolution::VerificationReport) -> String {
    format!("{}\n", serde_json::to_string_pretty(report).expect("json"))
}

fn write_results(dir: &std::path::Path, outcome: &ulrich_core::search::SearchOutcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for cert in &outcome.certificates {
        let index = cert.provenance.candidate_index.as_deref().unwrap_or("0");
        std::fs::write(dir.join(format!("certificate-{index}.json")), cert.to_json() + "\n")?;
    }
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&outcome.manifest).expect("json") + "\n")
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    let (code, body) = match execute(&cli, err) {
        Ok(body) => (0, Some(body)),
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            (f.code, f.output)
        }
    };
    if let Some(body) = body {
        match &cli.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, body) {
                    let _ = writeln!(err, "error: {}: {e}", path.display());
                    return 2;
                }
            }
            None => {
                let _ = out.write_all(body.as_bytes());
            }
        }
    }
    code
}
