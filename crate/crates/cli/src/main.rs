use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nilstab::aut::{Endo, EndoJson, HomMap};
use nilstab::json::JsonInt;
use nilstab::nilgroup::{parse_element, FreeNilpotentGroup, GroupElement};
use nilstab::stability::{cokernel, snf, stability_scan, FinAbJson};
use nilstab::{lyndon_basis, witt_rank, IntMatrix, ModuleSpec};

const DEFAULT_MAX_RANK: usize = 6;
const DEFAULT_MAX_CLASS: usize = 6;

#[derive(Parser)]
#[command(name = "nilstab", version, about = "Free nilpotent groups, their automorphisms, and degree-zero stability scans")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Lift the default bounds on rank and class.
    #[arg(long, global = true)]
    unsafe_bounds: bool,

    /// Print timings and extra detail.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone, Copy)]
struct Params {
    /// Rank (number of generators).
    #[arg(short = 'r', long = "rank")]
    r: usize,
    /// Nilpotency class.
    #[arg(short = 'c', long = "class")]
    c: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Table of Witt ranks, cross-checked against Lyndon word counts.
    Witt {
        #[arg(short = 'r', long = "rank", default_value_t = 4)]
        r_max: usize,
        #[arg(short = 'n', long = "degree", default_value_t = 6)]
        n_max: usize,
    },
    /// Lyndon words of one degree with their bracketings.
    Lyndon {
        #[arg(short = 'r', long = "rank")]
        r: usize,
        #[arg(short = 'n', long = "degree")]
        n: usize,
    },
    /// Product of two elements in collected form.
    Mul {
        #[command(flatten)]
        params: Params,
        /// Recompute through the Magnus series ring and compare.
        #[arg(long)]
        oracle: bool,
        a: String,
        b: String,
    },
    /// Inverse of an element.
    Inv {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        oracle: bool,
        a: String,
    },
    /// Commutator `a^-1 b^-1 a b`.
    Comm {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        oracle: bool,
        a: String,
        b: String,
    },
    /// Seeded property suite for the Lie ring, the group and its automorphisms.
    Verify {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases per property.
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Lift an automorphism of N_r^c, given by generator images, to a higher class.
    AutLift {
        #[command(flatten)]
        params: Params,
        /// Target class (default c + 1).
        #[arg(long)]
        to: Option<usize>,
        #[arg(required = true)]
        images: Vec<String>,
    },
    /// The kernel isomorphism: flat of an automorphism given by images, or sharp of --matrix.
    KernelIso {
        #[command(flatten)]
        params: Params,
        /// A witt(r, c) x r matrix such as "1,0;0,1".
        #[arg(long, conflicts_with = "images")]
        matrix: Option<String>,
        images: Vec<String>,
    },
    /// Degree-zero stability scan of H_0(Aut(N_r^c); M_r) over a range of ranks.
    Scan {
        /// Module expression, e.g. "hom(std, ext(2, dual))".
        #[arg(long)]
        spec: String,
        #[arg(short = 'c', long = "class")]
        c: usize,
        /// Inclusive rank range such as 1..4.
        #[arg(short = 'r', long = "range")]
        range: RankRange,
        /// Exit 0 even when the scan does not stabilize.
        #[arg(long)]
        allow_unstable: bool,
    },
    /// Smith normal form of an integer matrix such as "2,4;6,8".
    Snf { matrix: String },
}

#[derive(Clone, Debug)]
struct RankRange(RangeInclusive<usize>);

impl FromStr for RankRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad bound `{x}`: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((lo, hi)) => (parse(lo)?, parse(hi.strip_prefix('=').unwrap_or(hi))?),
            None => {
                let r = parse(s)?;
                (r, r)
            }
        };
        if lo == 0 || lo > hi {
            return Err(format!("empty or invalid range `{s}`"));
        }
        Ok(RankRange(lo..=hi))
    }
}

/// Failure modes, mapped to exit codes.
enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// A check, cross-check or scan did not pass: exit 1.
    Failed(String),
    /// Two independent computations disagree: exit 3.
    Internal(String),
}

impl From<nilstab::Error> for Failure {
    fn from(e: nilstab::Error) -> Self {
        match e {
            nilstab::Error::Internal(m) => Failure::Internal(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(format!("write failed: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(format!("serialization failed: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Internal(format!("csv output failed: {e}"))
    }
}

type Outcome = Result<(), Failure>;

struct Bounds {
    rank: usize,
    class: usize,
}

impl Bounds {
    fn from_env(unsafe_bounds: bool) -> Result<Self, Failure> {
        if unsafe_bounds {
            return Ok(Bounds {
                rank: usize::MAX,
                class: usize::MAX,
            });
        }
        let class = match std::env::var("NILSTAB_MAX_CLASS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("NILSTAB_MAX_CLASS must be a positive integer, got `{v}`")))?,
            Err(_) => DEFAULT_MAX_CLASS,
        };
        Ok(Bounds {
            rank: DEFAULT_MAX_RANK,
            class,
        })
    }

    fn check(&self, r: usize, c: usize) -> Outcome {
        if r == 0 || c == 0 {
            return Err(Failure::Usage(format!("rank and class must be at least 1 (got r = {r}, c = {c})")));
        }
        if r > self.rank {
            return Err(Failure::Usage(format!(
                "rank {r} exceeds the bound {}; pass --unsafe-bounds to override",
                self.rank
            )));
        }
        if c > self.class {
            return Err(Failure::Usage(format!(
                "class {c} exceeds the bound {}; set NILSTAB_MAX_CLASS or pass --unsafe-bounds",
                self.class
            )));
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(&cli, &mut out).and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Failed(m)) => {
            if !m.is_empty() {
                eprintln!("nilstab: {m}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("nilstab: error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("nilstab: internal error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> Outcome {
    let bounds = Bounds::from_env(cli.unsafe_bounds)?;
    match &cli.command {
        Command::Witt { r_max, n_max } => cmd_witt(cli, out, &bounds, *r_max, *n_max),
        Command::Lyndon { r, n } => cmd_lyndon(cli, out, &bounds, *r, *n),
        Command::Mul { params, oracle, a, b } => {
            let g = group(&bounds, params)?;
            let (x, y) = (element(&g, a)?, element(&g, b)?);
            let z = x.mul(&y)?;
            if *oracle {
                compare(&z, &g.peel(&(&x.magnus() * &y.magnus()))?)?;
            }
            print_element(cli, out, &z)
        }
        Command::Inv { params, oracle, a } => {
            let g = group(&bounds, params)?;
            let x = element(&g, a)?;
            let z = x.inv();
            if *oracle {
                compare(&z, &g.peel(&x.magnus().inverse()?)?)?;
            }
            print_element(cli, out, &z)
        }
        Command::Comm { params, oracle, a, b } => {
            let g = group(&bounds, params)?;
            let (x, y) = (element(&g, a)?, element(&g, b)?);
            let z = x.comm(&y)?;
            if *oracle {
                compare(&z, &g.peel(&x.magnus().group_commutator(&y.magnus())?)?)?;
            }
            print_element(cli, out, &z)
        }
        Command::Verify { params, seed, samples } => cmd_verify(cli, out, &bounds, params, *seed, *samples),
        Command::AutLift { params, to, images } => cmd_aut_lift(cli, out, &bounds, params, *to, images),
        Command::KernelIso { params, matrix, images } => {
            cmd_kernel_iso(cli, out, &bounds, params, matrix.as_deref(), images)
        }
        Command::Scan {
            spec,
            c,
            range,
            allow_unstable,
        } => cmd_scan(cli, out, &bounds, spec, *c, &range.0, *allow_unstable),
        Command::Snf { matrix } => cmd_snf(cli, out, matrix),
    }
}

fn group(bounds: &Bounds, p: &Params) -> Result<FreeNilpotentGroup, Failure> {
    bounds.check(p.r, p.c)?;
    Ok(FreeNilpotentGroup::new(p.r, p.c)?)
}

fn element(g: &FreeNilpotentGroup, text: &str) -> Result<GroupElement, Failure> {
    parse_element(g, text).map_err(|e| Failure::Usage(format!("in `{text}`: {e}")))
}

fn compare(collected: &GroupElement, oracle: &GroupElement) -> Outcome {
    if collected == oracle {
        Ok(())
    } else {
        Err(Failure::Internal(format!(
            "collected result {collected} disagrees with the Magnus oracle {oracle}"
        )))
    }
}

fn print_element(cli: &Cli, out: &mut impl Write, g: &GroupElement) -> Outcome {
    match cli.format {
        Format::Text => writeln!(out, "{g}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&g.to_json())?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["commutator", "exponent"])?;
            for (word, e) in g.exponent_map() {
                w.write_record([word.to_string(), e.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WittRow {
    r: usize,
    n: usize,
    rank: JsonInt,
}

fn cmd_witt(cli: &Cli, out: &mut impl Write, bounds: &Bounds, r_max: usize, n_max: usize) -> Outcome {
    if r_max == 0 || n_max == 0 {
        return Err(Failure::Usage("bounds must be at least 1".into()));
    }
    if !cli.unsafe_bounds && (r_max > bounds.rank.max(10) || n_max > 12) {
        return Err(Failure::Usage("table too large; pass --unsafe-bounds to override".into()));
    }
    let mut rows = Vec::new();
    for r in 1..=r_max {
        for n in 1..=n_max {
            let rank = witt_rank(r as u64, n as u64)?;
            let count = lyndon_basis(r, n).len();
            if rank != count.into() {
                return Err(Failure::Failed(format!(
                    "witt_rank({r}, {n}) = {rank} but there are {count} Lyndon words"
                )));
            }
            rows.push(WittRow {
                r,
                n,
                rank: JsonInt(rank),
            });
        }
    }
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rows)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["r", "n", "rank"])?;
            for row in &rows {
                w.write_record([row.r.to_string(), row.n.to_string(), row.rank.0.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in 1..=r_max {
                let line: Vec<String> = rows
                    .iter()
                    .filter(|row| row.r == r)
                    .map(|row| row.rank.0.to_string())
                    .collect();
                writeln!(out, "r={r}: {}", line.join(", "))?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct LyndonRow {
    word: String,
    bracket: String,
}

fn cmd_lyndon(cli: &Cli, out: &mut impl Write, bounds: &Bounds, r: usize, n: usize) -> Outcome {
    bounds.check(r, n.max(1))?;
    if n == 0 {
        return Err(Failure::Usage("degree must be at least 1".into()));
    }
    let rows: Vec<LyndonRow> = lyndon_basis(r, n)
        .iter()
        .map(|w| LyndonRow {
            word: w.to_string(),
            bracket: w.bracketing().to_string(),
        })
        .collect();
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&rows)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["word", "bracket"])?;
            for row in &rows {
                w.write_record([&row.word, &row.bracket])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for row in &rows {
                writeln!(out, "{}  {}", row.word, row.bracket)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn cmd_verify(cli: &Cli, out: &mut impl Write, bounds: &Bounds, p: &Params, seed: u64, samples: usize) -> Outcome {
    bounds.check(p.r, p.c)?;
    let checks = nilstab::verify::run_suite(p.r, p.c, seed, samples)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    match cli.format {
        Format::Json => {
            let rows: Vec<CheckRow> = checks
                .iter()
                .map(|c| CheckRow {
                    name: c.name,
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string(&rows)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "passed", "detail"])?;
            for c in &checks {
                w.write_record([c.name, if c.passed { "true" } else { "false" }, &c.detail])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                write!(out, "{status}  {}", c.name)?;
                if cli.verbose > 0 {
                    write!(out, "  ({:.1?})", c.elapsed)?;
                }
                if !c.passed {
                    write!(out, ": {}", c.detail)?;
                }
                writeln!(out)?;
            }
            writeln!(out, "{} of {} checks passed at r = {}, c = {}, seed {seed}", checks.len() - failed, checks.len(), p.r, p.c)?;
        }
    }
    if failed > 0 {
        return Err(Failure::Failed(format!("{failed} checks failed")));
    }
    Ok(())
}

fn parse_images(g: &FreeNilpotentGroup, images: &[String]) -> Result<Endo, Failure> {
    if images.len() != g.rank() {
        return Err(Failure::Usage(format!(
            "expected {} generator images, got {}",
            g.rank(),
            images.len()
        )));
    }
    let images: Vec<GroupElement> = images.iter().map(|s| element(g, s)).collect::<Result<_, _>>()?;
    Ok(Endo::from_images(images)?)
}

fn print_endo(cli: &Cli, out: &mut impl Write, e: &Endo) -> Outcome {
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string::<EndoJson>(&e.to_json())?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["generator", "image"])?;
            for (i, g) in e.images().iter().enumerate() {
                w.write_record([letter(i), g.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            for (i, g) in e.images().iter().enumerate() {
                writeln!(out, "{} -> {g}", letter(i))?;
            }
        }
    }
    Ok(())
}

fn letter(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

fn cmd_aut_lift(
    cli: &Cli,
    out: &mut impl Write,
    bounds: &Bounds,
    p: &Params,
    to: Option<usize>,
    images: &[String],
) -> Outcome {
    let g = group(bounds, p)?;
    let target = to.unwrap_or(p.c + 1);
    bounds.check(p.r, target)?;
    let e = parse_images(&g, images)?;
    if !e.is_automorphism() {
        return Err(Failure::Usage(format!(
            "not an automorphism: abelianization {} has determinant other than ±1",
            e.abelianization_matrix()
        )));
    }
    let lifted = e.lift_to(target)?;
    let mut back = lifted.clone();
    while back.class() > p.c {
        back = back.project()?;
    }
    if back != e {
        return Err(Failure::Internal("projection of the lift differs from the input".into()));
    }
    print_endo(cli, out, &lifted)
}

#[derive(Serialize)]
struct KernelJson {
    rank: usize,
    class: usize,
    kernel_rank: JsonInt,
    rows: Vec<String>,
    matrix: Vec<Vec<JsonInt>>,
    images: EndoJson,
}

fn cmd_kernel_iso(
    cli: &Cli,
    out: &mut impl Write,
    bounds: &Bounds,
    p: &Params,
    matrix: Option<&str>,
    images: &[String],
) -> Outcome {
    let g = group(bounds, p)?;
    if p.c < 2 {
        return Err(Failure::Usage("the kernel is trivial in class 1".into()));
    }
    let (beta, e) = match matrix {
        Some(text) => {
            let m = IntMatrix::parse(text)?;
            let beta = HomMap::new(p.r, p.c, m)?;
            let e = beta.sharp()?;
            if e.flat()? != beta {
                return Err(Failure::Internal("flat(sharp(β)) differs from β".into()));
            }
            (beta, e)
        }
        None => {
            let e = parse_images(&g, images)?;
            let beta = e.flat().map_err(|err| match err {
                nilstab::Error::NotCentral(m) => Failure::Internal(m),
                other => Failure::Usage(other.to_string()),
            })?;
            if beta.sharp()? != e {
                return Err(Failure::Internal("sharp(flat(α)) differs from α".into()));
            }
            (beta, e)
        }
    };
    let rows: Vec<String> = g.degree_range(p.c).map(|i| g.basis()[i].to_string()).collect();
    let kernel_rank = nilstab::aut::kernel_rank(p.r, p.c)?;
    match cli.format {
        Format::Json => {
            let json = KernelJson {
                rank: p.r,
                class: p.c,
                kernel_rank: JsonInt(kernel_rank),
                rows,
                matrix: beta
                    .matrix()
                    .to_rows()
                    .into_iter()
                    .map(|row| row.into_iter().map(JsonInt).collect())
                    .collect(),
                images: e.to_json(),
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["commutator".to_string()];
            header.extend((0..p.r).map(letter));
            w.write_record(&header)?;
            for (i, word) in rows.iter().enumerate() {
                let mut record = vec![word.clone()];
                record.extend(beta.matrix().row(i).iter().map(ToString::to_string));
                w.write_record(&record)?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "kernel rank {kernel_rank} = {} * witt({}, {})", p.r, p.r, p.c)?;
            writeln!(out, "flat: {}", beta.matrix())?;
            writeln!(out, "rows: {}", rows.join(", "))?;
            for (i, img) in e.images().iter().enumerate() {
                writeln!(out, "{} -> {img}", letter(i))?;
            }
        }
    }
    Ok(())
}

fn cmd_scan(
    cli: &Cli,
    out: &mut impl Write,
    bounds: &Bounds,
    spec: &str,
    c: usize,
    range: &RangeInclusive<usize>,
    allow_unstable: bool,
) -> Outcome {
    bounds.check(*range.end(), c)?;
    let spec = ModuleSpec::parse(spec).map_err(|e| Failure::Usage(format!("in spec `{spec}`: {e}")))?;
    let report = stability_scan(&spec, c, *range.start(), *range.end())?;
    match cli.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(&report.to_json())?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["r", "free_rank", "invariant_factors", "map_to_next_is_iso"])?;
            for e in &report.entries {
                let factors: Vec<String> = e.value.invariant_factors.iter().map(ToString::to_string).collect();
                w.write_record([
                    e.r.to_string(),
                    e.value.free_rank.to_string(),
                    factors.join(";"),
                    e.map_to_next_is_iso.map(|b| b.to_string()).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "H_0(Aut(N_r^{c}); {spec})")?;
            for e in &report.entries {
                let iso = match e.map_to_next_is_iso {
                    Some(true) => "  -> iso",
                    Some(false) => "  -> not iso",
                    None => "",
                };
                writeln!(out, "r={}: {}{iso}", e.r, e.value)?;
            }
            match report.stabilized_from {
                Some(r) => writeln!(out, "stabilized from r = {r}")?,
                None => writeln!(out, "not stabilized in range")?,
            }
        }
    }
    if report.stabilized_from.is_none() && !allow_unstable {
        return Err(Failure::Failed(String::new()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SnfJson {
    u: Vec<Vec<JsonInt>>,
    d: Vec<Vec<JsonInt>>,
    v: Vec<Vec<JsonInt>>,
    cokernel: FinAbJson,
}

fn rows_json(m: &IntMatrix) -> Vec<Vec<JsonInt>> {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(JsonInt).collect())
        .collect()
}

fn cmd_snf(cli: &Cli, out: &mut impl Write, text: &str) -> Outcome {
    let a = IntMatrix::parse(text)?;
    let s = snf(&a);
    let coker = cokernel(&a);
    match cli.format {
        Format::Json => {
            let json = SnfJson {
                u: rows_json(&s.u),
                d: rows_json(&s.d),
                v: rows_json(&s.v),
                cokernel: FinAbJson::from(&coker),
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "diagonal"])?;
            for (i, d) in s.diagonal().iter().enumerate() {
                w.write_record([(i + 1).to_string(), d.to_string()])?;
            }
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "D = {}", s.d)?;
            writeln!(out, "U = {}", s.u)?;
            writeln!(out, "V = {}", s.v)?;
            writeln!(out, "cokernel: {coker}")?;
        }
    }
    Ok(())
}
