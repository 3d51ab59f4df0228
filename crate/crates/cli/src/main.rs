use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prodcode::codespec::CodeSpec;
use prodcode::decoders::{DecoderId, Orientation, DEFAULT_MAX_ITERS};
use prodcode::postproc::Technique;
use prodcode::selftest::{self, Fault, SelftestOptions};
use prodcode::sim::{self, SimConfig, SimStats, StopRule, CSV_HEADER};

const EXIT_USAGE: u8 = 1;
const EXIT_PROPERTY: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "prodcode", version, about = "Reed-Solomon product code decoder simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one decoder over a sweep of channel probabilities.
    Simulate(SimulateArgs),
    /// Simulate several decoders on shared channel realizations.
    Compare(CompareArgs),
    /// Run the brute-force oracle property checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Product code, e.g. rs(16,8,4)xrs(16,8,6). The first factor is the
    /// column code.
    #[arg(long)]
    code: CodeSpec,
    /// Comma-separated channel symbol error probabilities.
    #[arg(long, value_delimiter = ',', conflicts_with = "p_range", required_unless_present = "p_range")]
    p_list: Vec<f64>,
    /// Geometric sweep START:STOP:POINTS.
    #[arg(long, value_parser = parse_p_range)]
    p_range: Option<PRange>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stop a point once every decoder has this many frame errors.
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_frames: u64,
    /// column-first or row-first.
    #[arg(long, default_value = "column-first", value_parser = parse_orientation)]
    orientation: Orientation,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    /// CSV output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "PRODCODE_THREADS")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// iterative, gmd, gd, or combined.
    #[arg(long, default_value = "iterative")]
    decoder: String,
    /// Post-processing applied on iterative stalls: kreshchuk, emmadi,
    /// condo, proposed.
    #[arg(long, value_parser = parse_technique)]
    pp: Option<Technique>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated decoders, e.g. iterative,kreshchuk,proposed,gmd,gd.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_decoder)]
    decoders: Vec<DecoderId>,
    /// Give each decoder its own channel realizations.
    #[arg(long)]
    unpaired: bool,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Smaller oracle sample sizes.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Test hook: run with a deliberately broken component.
    #[arg(long, hide = true, value_parser = parse_fault)]
    inject_fault: Option<Fault>,
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    Orientation::parse(s).ok_or_else(|| format!("unknown orientation '{s}'"))
}

fn parse_technique(s: &str) -> Result<Technique, String> {
    Technique::parse(s).ok_or_else(|| format!("unknown post-processing technique '{s}'"))
}

fn parse_decoder(s: &str) -> Result<DecoderId, String> {
    DecoderId::parse(s.trim()).ok_or_else(|| format!("unknown decoder '{s}'"))
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    Fault::parse(s).ok_or_else(|| format!("unknown fault '{s}'"))
}

#[derive(Debug, Clone)]
struct PRange(Vec<f64>);

fn parse_p_range(s: &str) -> Result<PRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err("expected START:STOP:POINTS".into());
    };
    let a: f64 = a.parse().map_err(|_| format!("bad start '{a}'"))?;
    let b: f64 = b.parse().map_err(|_| format!("bad stop '{b}'"))?;
    let n: usize = n.parse().map_err(|_| format!("bad point count '{n}'"))?;
    if !(a > 0.0 && b > 0.0 && a <= 1.0 && b <= 1.0) || n == 0 {
        return Err("range endpoints must lie in (0,1] and POINTS must be positive".into());
    }
    if n == 1 {
        return Ok(PRange(vec![a]));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok(PRange(
        (0..n)
            .map(|i| {
                let v = (la + (lb - la) * i as f64 / (n - 1) as f64).exp();
                // keep the printed values short and reproducible
                format!("{v:.4e}").parse().unwrap()
            })
            .collect(),
    ))
}

fn simulate_decoder(name: &str, pp: Option<Technique>) -> Result<DecoderId, String> {
    let base = DecoderId::parse(name).ok_or_else(|| format!("unknown decoder '{name}'"))?;
    Ok(match (base, pp) {
        (d, None) => d,
        (DecoderId::Iterative | DecoderId::IterativePp(_), Some(t)) => DecoderId::IterativePp(t),
        (DecoderId::Combined(_), Some(t)) => DecoderId::Combined(t),
        (d, Some(_)) => return Err(format!("--pp does not apply to decoder '{}'", d.name())),
    })
}

fn build_config(c: &CommonArgs, decoders: Vec<DecoderId>, paired: bool) -> SimConfig {
    let p_values = c.p_range.clone().map(|r| r.0).unwrap_or_else(|| c.p_list.clone());
    let mut cfg = SimConfig::new(c.code, decoders, p_values);
    cfg.stop = StopRule {
        min_frame_errors: c.min_errors,
        max_frames: c.max_frames,
    };
    cfg.seed = c.seed;
    cfg.orientation = c.orientation;
    cfg.max_iters = c.max_iters;
    cfg.threads = c.threads;
    cfg.paired = paired;
    cfg
}

fn run_sim(cfg: &SimConfig, out: Option<&PathBuf>) -> Result<(), String> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let io_err = |e: io::Error| prodcode::Error::Config(format!("write failed: {e}"));
    writeln!(sink, "{CSV_HEADER}").and_then(|_| sink.flush()).map_err(|e| e.to_string())?;
    let rows: Vec<SimStats> = sim::run_sweep(cfg, |s| {
        writeln!(sink, "{}", s.csv_row()).map_err(io_err)?;
        sink.flush().map_err(io_err)?;
        eprintln!("{s}");
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    if rows.is_empty() {
        return Err("no channel probabilities given".into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Simulate(a) => {
            let id = simulate_decoder(&a.decoder, a.pp)?;
            let cfg = build_config(&a.common, vec![id], true);
            run_sim(&cfg, a.common.out.as_ref())?;
        }
        Command::Compare(a) => {
            let mut ids = a.decoders.clone();
            ids.dedup();
            let cfg = build_config(&a.common, ids, !a.unpaired);
            run_sim(&cfg, a.common.out.as_ref())?;
        }
        Command::Selftest(a) => {
            let opts = SelftestOptions {
                quick: a.quick,
                seed: a.seed,
                fault: a.inject_fault,
            };
            let results = selftest::run_all(&opts);
            let mut ok = true;
            for r in &results {
                println!("{r}");
                ok &= r.passed();
            }
            if !ok {
                return Ok(ExitCode::from(EXIT_PROPERTY));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
