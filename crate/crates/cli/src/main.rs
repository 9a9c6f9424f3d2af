mod args;
mod render;
mod verify;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::ExitCode;

use clap::Parser;
use pathmc_core::chain::run_with;
use pathmc_core::oracle::{build_transition_matrix, enumerate_family};
use pathmc_core::{
    coupling_time, default_steps, estimate_functional, Cftp, CouplingOutcome, FamilySpec, Init, PathError,
    PathRecord, WeightMode, WeightTable,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use args::{
    CftpArgs, Cli, Command, EnumerateArgs, Format, MixArgs, RenderArgs, RenderFormat, SampleArgs, Statistic,
    StatsArgs, VerifyArgs,
};

#[derive(Debug)]
enum CliError {
    Path(PathError),
    Input(String),
    Output(std::io::Error),
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        CliError::Path(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Path(e) if e.is_validation() => 2,
            CliError::Path(PathError::SizeGuard { .. } | PathError::NotCoalesced { .. }) => 3,
            CliError::Path(_) => 4,
            CliError::Input(_) => 2,
            CliError::Output(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Path(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Output(e) => write!(f, "writing output: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Worker pool capped by `PATHMC_THREADS` when set.
fn pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("PATHMC_THREADS") {
        let threads: usize = v
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| CliError::Input(format!("PATHMC_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| CliError::Path(PathError::InvariantViolation(format!("thread pool: {e}"))))
}

/// Runs `job(k)` for `k = 0..count` in parallel, results in order of `k`.
fn ordered<T: Send>(count: u64, job: impl Fn(u64) -> pathmc_core::Result<T> + Sync) -> CliResult<Vec<T>> {
    let results = pool()?.install(|| (0..count).into_par_iter().map(&job).collect::<Vec<_>>());
    Ok(results.into_iter().collect::<pathmc_core::Result<Vec<T>>>()?)
}

fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(CliError::Output)?;
    out.flush().map_err(CliError::Output)
}

fn json_line(out: &mut String, value: &impl Serialize) {
    out.push_str(&serde_json::to_string(value).expect("report serializes"));
    out.push('\n');
}

fn check_tv_target(tv_target: f64) -> CliResult<()> {
    if tv_target > 0.0 && tv_target < 1.0 {
        Ok(())
    } else {
        Err(PathError::InvalidParams(format!("--tv-target must lie in (0, 1), got {tv_target}")).into())
    }
}

fn check_samples(samples: u64) -> CliResult<()> {
    if samples == 0 {
        return Err(PathError::InvalidParams("--samples must be at least 1".into()).into());
    }
    Ok(())
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Sample(a) => cmd_sample(a),
        Command::Cftp(a) => cmd_cftp(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Mix(a) => cmd_mix(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Render(a) => cmd_render(a),
    }
}

#[derive(Serialize)]
struct SampleRecord {
    #[serde(flatten)]
    record: PathRecord,
    final_height: i64,
    seed: u64,
    steps: u64,
}

fn cmd_sample(a: SampleArgs) -> CliResult<()> {
    let spec = a.family.spec()?;
    check_tv_target(a.tv_target)?;
    check_samples(a.samples)?;
    if a.trace == Some(0) {
        return Err(PathError::InvalidParams("--trace needs K >= 1".into()).into());
    }
    if a.trace.is_some() && a.samples > 1 {
        return Err(PathError::InvalidParams("--trace works with a single sample".into()).into());
    }
    let steps = a.steps.unwrap_or_else(|| default_steps(spec.n(), a.tv_target));
    let table = WeightTable::new(spec.n(), a.weights.into());
    let mut out = String::new();

    if let Some(every) = a.trace {
        let mut trace = String::new();
        let path = run_with(&spec, &table, steps, a.seed, Init::Top, |t, p| {
            if t % every == 0 {
                let rec = json!({ "t": t, "word": p.word_string(), "final": p.final_height(), "max": p.max_height() });
                json_line(&mut trace, &rec);
            }
        })?;
        out.push_str(&trace);
        json_line(&mut out, &sample_record(&spec, &path, a.seed, steps));
        return emit(&out);
    }

    let paths = ordered(a.samples, |k| {
        let seed = a.seed.wrapping_add(k);
        run_with(&spec, &table, steps, seed, Init::Top, |_, _| {}).map(|p| sample_record(&spec, &p, seed, steps))
    })?;
    for p in &paths {
        json_line(&mut out, p);
    }
    emit(&out)
}

fn sample_record(spec: &FamilySpec, path: &pathmc_core::LatticePath, seed: u64, steps: u64) -> SampleRecord {
    SampleRecord {
        record: PathRecord::new(spec, path),
        final_height: path.final_height(),
        seed,
        steps,
    }
}

#[derive(Serialize)]
struct CftpRecord {
    #[serde(flatten)]
    record: PathRecord,
    final_height: i64,
    seed: u64,
    tau_final: u64,
    tuples_consumed: u64,
}

fn cmd_cftp(a: CftpArgs) -> CliResult<()> {
    let spec = a.family.spec()?;
    check_samples(a.samples)?;
    if a.tau0 == 0 || a.tau0 > a.cap {
        return Err(PathError::InvalidParams("--tau0 must lie in [1, --cap]".into()).into());
    }
    let table = WeightTable::new(spec.n(), a.weights.into());
    let sampler = Cftp::new(&spec, &table).tau0(a.tau0).cap(a.cap);
    let records = ordered(a.samples, |k| {
        let seed = a.seed.wrapping_add(k);
        sampler.sample(seed).map(|r| CftpRecord {
            record: PathRecord::new(&spec, &r.path),
            final_height: r.path.final_height(),
            seed,
            tau_final: r.tau_final,
            tuples_consumed: r.tuples_consumed,
        })
    })?;
    let mut out = String::new();
    for r in &records {
        json_line(&mut out, r);
    }
    emit(&out)
}

fn cmd_enumerate(a: EnumerateArgs) -> CliResult<()> {
    let spec = a.family.spec()?;
    let e = enumerate_family(&spec)?;
    let mut out = String::new();
    if a.count {
        json_line(&mut out, &json!({ "count": e.len() }));
    } else {
        for p in e.members() {
            json_line(&mut out, &PathRecord::new(&spec, p));
        }
    }
    emit(&out)
}

fn cmd_verify(a: VerifyArgs) -> CliResult<()> {
    let spec = a.family.spec()?;
    let report = verify::run(a.check, &spec, a.weights.into(), a.tmix_cap)?;
    let mut out = String::new();
    json_line(&mut out, &report);
    emit(&out)
}

#[derive(Serialize)]
struct MixRow {
    n: usize,
    family: String,
    a: i64,
    b: i64,
    mode: WeightMode,
    metric: &'static str,
    value: f64,
    seed: Option<u64>,
}

fn cmd_mix(a: MixArgs) -> CliResult<()> {
    let specs = a.family.specs()?;
    check_samples(a.samples)?;
    let mode: WeightMode = a.weights.into();
    let mut rows = Vec::new();
    for spec in &specs {
        let table = WeightTable::new(spec.n(), mode);
        let (metric, value, seed) = if a.exact {
            let e = enumerate_family(spec)?;
            let p = build_transition_matrix(spec, &table, &e)?;
            ("tmix", p.exact_tmix(a.cap)? as f64, None)
        } else {
            let times = ordered(a.samples, |k| match coupling_time(spec, &table, a.seed.wrapping_add(k), a.cap) {
                CouplingOutcome::Coalesced(t) => Ok(t),
                CouplingOutcome::NotCoalesced(cap) => Err(PathError::NotCoalesced { cap }),
            })?;
            match a.statistic {
                Statistic::Mean => (
                    "mean_coupling_time",
                    times.iter().map(|&t| t as f64).sum::<f64>() / times.len() as f64,
                    Some(a.seed),
                ),
                Statistic::Median => ("median_coupling_time", median(times), Some(a.seed)),
            }
        };
        rows.push(MixRow {
            n: spec.n(),
            family: spec.constraint().kind().to_string(),
            a: spec.params().a(),
            b: spec.params().b(),
            mode,
            metric,
            value,
            seed,
        });
    }
    let mut out = String::new();
    match a.format {
        Format::Csv => {
            out.push_str("n,family,a,b,mode,metric,value,seed\n");
            for r in &rows {
                let mode = match r.mode {
                    WeightMode::Quadratic => "quadratic",
                    WeightMode::Uniform => "uniform",
                };
                let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
                writeln!(out, "{},{},{},{},{mode},{},{},{seed}", r.n, r.family, r.a, r.b, r.metric, r.value).unwrap();
            }
        }
        Format::Jsonl => rows.iter().for_each(|r| json_line(&mut out, r)),
    }
    emit(&out)
}

fn median(mut values: Vec<u64>) -> f64 {
    values.sort_unstable();
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2] as f64
    } else {
        (values[m / 2 - 1] + values[m / 2]) as f64 / 2.0
    }
}

fn cmd_stats(a: StatsArgs) -> CliResult<()> {
    let spec = a.family.spec()?;
    check_tv_target(a.tv_target)?;
    check_samples(a.samples)?;
    let steps = a.steps.unwrap_or_else(|| default_steps(spec.n(), a.tv_target));
    if steps == 0 {
        return Err(PathError::InvalidParams("estimator needs at least one step".into()).into());
    }
    let table = WeightTable::new(spec.n(), a.weights.into());
    let estimates = ordered(a.samples, |k| {
        let seed = a.seed.wrapping_add(k);
        estimate_functional(&spec, &table, steps, seed, a.functional).map(|v| (seed, v))
    })?;
    let mut out = String::new();
    for (seed, estimate) in estimates {
        json_line(
            &mut out,
            &json!({ "functional": a.functional.name(), "estimate": estimate, "steps": steps, "seed": seed }),
        );
    }
    emit(&out)
}

fn cmd_render(a: RenderArgs) -> CliResult<()> {
    if a.width < 40 || a.height < 40 {
        return Err(PathError::InvalidParams("--width and --height must be at least 40".into()).into());
    }
    let text = match a.input.as_deref() {
        None => read_stdin()?,
        Some(p) if p.as_os_str() == "-" => read_stdin()?,
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("reading {}: {e}", p.display())))?,
    };
    let line = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .nth(a.index)
        .ok_or_else(|| CliError::Input(format!("input has no record at index {}", a.index)))?;
    let (spec, path) = PathRecord::from_json(line)?.load()?;
    let rendered = match a.format {
        RenderFormat::Svg => render::svg(&spec, &path, a.width, a.height),
        RenderFormat::Ascii => render::ascii(&spec, &path),
    };
    match a.output {
        Some(p) => std::fs::write(&p, rendered).map_err(CliError::Output),
        None => emit(&rendered),
    }
}

fn read_stdin() -> CliResult<String> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| CliError::Input(format!("reading stdin: {e}")))?;
    Ok(s)
}
