//! Command-line front door: generate, verify, analyze, tables, simulate,
//! export.
//!
//! Exit codes: 0 success, 2 usage (from the argument parser), 3 input
//! parse/validation failure, 4 verification or configured-check failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use scod_core::analysis::{
    check_tables, papr_flat_qam, render_tables_json, render_tables_text, row_papr,
    signaling_complexity, Family,
};
use scod_core::coeff::rat_display;
use scod_core::combinatorics::{dimension_exponent, nonzero_columns, span_s};
use scod_core::construction::{g_cell, partition_permutation, ConstructionRoute, HRowStream};
use scod_core::design::DesignMatrix;
use scod_core::format::{entry_display, parse, render, scale_display, FileFormat};
use scod_core::gram::scod_violation;
use scod_core::reference::yuen_design;
use scod_core::sim::{
    run_campaign, snr_at_ser, ConstellationKind, PowerMode, SerEstimate, SimConfig,
};

const EXIT_PARSE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "scod",
    about = "Construct, verify, analyze and simulate square complex orthogonal designs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a design and write it out.
    Generate(GenerateArgs),
    /// Re-derive and check the structural properties of a design.
    Verify(VerifyArgs),
    /// Report rate, zero-fraction, power and signaling metrics.
    Analyze(AnalyzeArgs),
    /// Emit the reference tables; optionally self-check them.
    Tables(TablesArgs),
    /// Run a Monte Carlo symbol-error-rate campaign from a config file.
    Simulate(SimulateArgs),
    /// Convert a design file between the text and JSON formats.
    Export(ExportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Order exponent: the design is 2^a x 2^a.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    a: u32,
    /// Design family: g (classical) or h (reduced zeros).
    #[arg(long)]
    family: String,
    /// Construction route for family h.
    #[arg(long, default_value = "premultiply")]
    route: String,
    #[arg(long, default_value = "text")]
    format: String,
    /// Output file (stdout when absent). Relative paths resolve against
    /// $SCOD_OUT_DIR when that is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Order exponent of a freshly built design (with --family).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    a: Option<u32>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value = "premultiply")]
    route: String,
    /// Verify a design file instead of a built family member.
    #[arg(long)]
    path: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
    a: Option<u32>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    path: Option<PathBuf>,
    /// Constellation size M for the signaling-complexity report.
    #[arg(long, default_value_t = 16)]
    constellation_size: u32,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct TablesArgs {
    /// Compare the emitted tables against embedded expected values and
    /// exit non-zero on mismatch.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Path to a TOML campaign config, or a built-in preset name
    /// (fig1_desk, peak_a3).
    #[arg(long)]
    config: String,
    /// Write tab-separated result records here (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExportArgs {
    /// Input design file, text or JSON (auto-detected).
    #[arg(long = "in")]
    input: PathBuf,
    /// Target format.
    #[arg(long)]
    to: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_PARSE)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("SCOD_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_output(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            let p = resolve_out(p);
            std::fs::write(&p, content)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

/// Orders above this are written row-by-row from closed forms instead of
/// materializing the full grid.
const MAX_MATERIALIZED_A: u32 = 12;

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<ExitCode> {
    let family = Family::from_str(&args.family).map_err(anyhow::Error::msg)?;
    let route = ConstructionRoute::from_str(&args.route).map_err(anyhow::Error::msg)?;
    let format = FileFormat::from_str(&args.format).map_err(anyhow::Error::msg)?;
    if args.a <= MAX_MATERIALIZED_A {
        let design = family.build(args.a, route)?;
        write_output(&args.out, &render(&design, format))?;
    } else {
        if format != FileFormat::Text {
            anyhow::bail!(
                "orders above 2^{MAX_MATERIALIZED_A} stream as text only; use --format text"
            );
        }
        if family == Family::H && route != ConstructionRoute::Premultiply {
            anyhow::bail!("streamed generation supports --route premultiply only");
        }
        write_output(&args.out, &stream_design_text(args.a, family))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn stream_design_text(a: u32, family: Family) -> String {
    let n = 1u64 << a;
    let k = a as usize + 1;
    let scale_num = match family {
        Family::G => 0,
        Family::H => -((a - dimension_exponent(a)) as i32),
    };
    let mut out = String::new();
    out.push_str("scod-design v1\n");
    out.push_str(&format!("n {n}\nk {k}\nscale_num {scale_num}\n"));
    out.push_str(&format!("scale {}\n", scale_display(scale_num)));
    let h_stream = (family == Family::H).then(|| HRowStream::new(a));
    for r in 0..n {
        let mut row = vec!["0".to_string(); n as usize];
        match &h_stream {
            Some(s) => {
                for (c, e) in s.row(r) {
                    row[c as usize] = entry_display(&e);
                }
            }
            None => {
                for &c in nonzero_columns(a, r).expect("in range").elements() {
                    row[c as usize] = entry_display(&g_cell(a, r, c));
                }
            }
        }
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

struct CheckReport {
    failures: u32,
}

impl CheckReport {
    fn new() -> CheckReport {
        CheckReport { failures: 0 }
    }

    fn record(&mut self, name: &str, ok: bool, detail: &str) {
        if ok {
            let suffix = if detail.is_empty() {
                String::new()
            } else {
                format!(" ({detail})")
            };
            println!("PASS  {name}{suffix}");
        } else {
            println!("FAIL  {name}: {detail}");
            self.failures += 1;
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let mut report = CheckReport::new();
    let (design, family_info): (DesignMatrix, Option<(u32, Family, ConstructionRoute)>) =
        match (&args.path, args.a, &args.family) {
            (Some(p), _, _) => {
                let content = std::fs::read_to_string(p)
                    .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", p.display()))?;
                match parse(&content) {
                    Ok(d) => (d, None),
                    Err(e) => {
                        eprintln!("parse error: {e}");
                        return Ok(ExitCode::from(EXIT_PARSE));
                    }
                }
            }
            (None, Some(a), Some(f)) => {
                let family = Family::from_str(f).map_err(anyhow::Error::msg)?;
                let route =
                    ConstructionRoute::from_str(&args.route).map_err(anyhow::Error::msg)?;
                (family.build(a, route)?, Some((a, family, route)))
            }
            _ => anyhow::bail!("either --path or both --a and --family are required"),
        };

    match scod_violation(&design) {
        None => report.record("orthogonality", true, "exact"),
        Some(v) => report.record(
            "orthogonality",
            false,
            &format!("Gram cell ({},{}) = {}", v.row, v.col, v.cell),
        ),
    }
    report.record(
        "restricted entries",
        design.is_restricted(),
        "all non-zero entries are unit multiples of one variable",
    );

    if let Some((a, family, route)) = family_info {
        let support_ok = match family {
            Family::G => (0..design.n()).all(|i| {
                let expect: Vec<usize> = nonzero_columns(a, i as u64)
                    .unwrap()
                    .elements()
                    .iter()
                    .map(|&c| c as usize)
                    .collect();
                design.row_support(i) == expect
            }),
            Family::H => {
                // Every row combines one whole span coset of base rows; the
                // partition route additionally permutes the rows, so map
                // each row back to the base row it was built from.
                let span = span_s(a);
                let perm = (route == ConstructionRoute::Partition)
                    .then(|| partition_permutation(a));
                (0..design.n()).all(|i| {
                    let source = perm.as_ref().map_or(i, |p| p[i]);
                    let mut expect: std::collections::BTreeSet<usize> = Default::default();
                    for &s in span.elements() {
                        for &c in nonzero_columns(a, s ^ source as u64).unwrap().elements() {
                            expect.insert(c as usize);
                        }
                    }
                    design.row_support(i) == expect.into_iter().collect::<Vec<_>>()
                })
            }
        };
        report.record("row supports", support_ok, "match the closed-form index sets");
        let zf = design.zero_fraction();
        let expect = family.zero_fraction(a);
        report.record(
            "zero fraction",
            zf == expect,
            &format!("{} (expected {})", rat_display(zf), rat_display(expect)),
        );
    } else {
        println!(
            "INFO  zero fraction {} over {} cells",
            rat_display(design.zero_fraction()),
            design.n() * design.n()
        );
    }

    if report.failures == 0 {
        println!("all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(EXIT_VERIFY))
    }
}

fn load_or_build(
    a: Option<u32>,
    family: &Option<String>,
    path: &Option<PathBuf>,
) -> anyhow::Result<Result<DesignMatrix, ExitCode>> {
    match (path, a, family) {
        (Some(p), _, _) => {
            let content = std::fs::read_to_string(p)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", p.display()))?;
            match parse(&content) {
                Ok(d) => Ok(Ok(d)),
                Err(e) => {
                    eprintln!("parse error: {e}");
                    Ok(Err(ExitCode::from(EXIT_PARSE)))
                }
            }
        }
        (None, Some(a), Some(f)) => {
            let family = Family::from_str(f).map_err(anyhow::Error::msg)?;
            Ok(Ok(family.build(a, ConstructionRoute::Premultiply)?))
        }
        _ => anyhow::bail!("either --path or both --a and --family are required"),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<ExitCode> {
    let design = match load_or_build(args.a, &args.family, &args.path)? {
        Ok(d) => d,
        Err(code) => return Ok(code),
    };
    let (levels, class) = signaling_complexity(&design, args.constellation_size);
    let zf = design.zero_fraction();
    let papr = papr_flat_qam(&design);
    // Sampled peak-to-average alongside the exact flat-constellation value;
    // the measured number depends on the constellation's own peak factor.
    let measured_kind = match args.constellation_size {
        4 => Some(("qpsk", ConstellationKind::Qpsk)),
        16 => Some(("qam16", ConstellationKind::Qam16)),
        _ => None,
    };
    let measured = measured_kind
        .map(|(label, kind)| (label, scod_core::sim::measure_papr(&design, kind, 2_000, 1)));
    match FileFormat::from_str(&args.format).map_err(anyhow::Error::msg)? {
        FileFormat::Text => {
            println!("n {}", design.n());
            println!("k {}", design.k());
            println!("rate {}", rat_display(design.rate()));
            println!("scale {}", scale_display(design.scale_num()));
            println!("zero_fraction {}", rat_display(zf));
            println!("p_zero {}", rat_display(zf));
            match papr {
                Ok(p) => println!("papr_flat {}", rat_display(p)),
                Err(_) => {
                    let per_row: Vec<String> =
                        row_papr(&design).iter().map(|r| rat_display(*r)).collect();
                    println!("papr_per_row {}", per_row.join(" "));
                }
            }
            println!(
                "signaling_class {} ({} levels at M = {})",
                class.label(),
                levels,
                args.constellation_size
            );
        }
        FileFormat::Json => {
            let papr_value = papr.map(rat_display).ok();
            let body = serde_json::json!({
                "n": design.n(),
                "k": design.k(),
                "rate": rat_display(design.rate()),
                "scale_num": design.scale_num(),
                "zero_fraction": rat_display(zf),
                "p_zero": rat_display(zf),
                "papr_flat": papr_value,
                "signaling_class": class.label(),
                "signaling_levels": levels.to_string(),
                "constellation_size": args.constellation_size,
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_tables(args: TablesArgs) -> anyhow::Result<ExitCode> {
    match FileFormat::from_str(&args.format).map_err(anyhow::Error::msg)? {
        FileFormat::Text => print!("{}", render_tables_text()),
        FileFormat::Json => println!("{}", render_tables_json()),
    }
    if args.check {
        match check_tables() {
            Ok(()) => println!("self-check: all embedded values match"),
            Err(e) => {
                eprintln!("self-check failed: {e}");
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    /// Designs to run: "g", "h" (require `a`) or "gy" (order-8 reference).
    designs: Vec<String>,
    #[serde(default)]
    a: Option<u32>,
    constellation: String,
    power_mode: String,
    snr_db: Vec<f64>,
    #[serde(default = "default_rx")]
    rx_antennas: usize,
    trials_per_point: u64,
    #[serde(default = "default_target_errors")]
    target_errors: u64,
    seed: u64,
    /// Optional end-of-run check: "ci-overlap", "db-shift" or "none".
    #[serde(default)]
    check: Option<String>,
    /// SER level at which db-shift reads the horizontal offset.
    #[serde(default = "default_ser_reference")]
    ser_reference: f64,
}

fn default_rx() -> usize {
    1
}

fn default_target_errors() -> u64 {
    200
}

fn default_ser_reference() -> f64 {
    1e-3
}

fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig1_desk" => Some(include_str!("../../../configs/fig1_desk.toml")),
        "peak_a3" => Some(include_str!("../../../configs/peak_a3.toml")),
        _ => None,
    }
}

fn build_campaign_design(id: &str, a: Option<u32>) -> anyhow::Result<DesignMatrix> {
    match id {
        "gy" => Ok(yuen_design()),
        "g" | "h" => {
            let a = a.ok_or_else(|| anyhow::anyhow!("config needs `a` for design '{id}'"))?;
            if a > MAX_MATERIALIZED_A {
                anyhow::bail!("simulation supports a <= {MAX_MATERIALIZED_A}");
            }
            let family = Family::from_str(id).map_err(anyhow::Error::msg)?;
            Ok(family.build(a, ConstructionRoute::Premultiply)?)
        }
        other => anyhow::bail!("unknown design '{other}' (expected g|h|gy)"),
    }
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let content = match preset(&args.config) {
        Some(embedded) => embedded.to_string(),
        None => std::fs::read_to_string(&args.config)
            .map_err(|e| anyhow::anyhow!("cannot read config '{}': {e}", args.config))?,
    };
    let file: CampaignFile = match toml::from_str(&content) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("config validation error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let constellation = match ConstellationKind::from_str(&file.constellation) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config validation error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    let power_mode = match PowerMode::from_str(&file.power_mode) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config validation error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    if file.designs.is_empty() {
        eprintln!("config validation error: designs list is empty");
        return Ok(ExitCode::from(EXIT_PARSE));
    }
    let seed = args.seed.unwrap_or(file.seed);

    let mut curves: Vec<(String, Vec<SerEstimate>)> = Vec::new();
    let mut records = String::from(
        "design\tpower_mode\tconstellation\tsnr_db\tser\tsymbol_errors\tsymbols_sent\tci95\n",
    );
    for id in &file.designs {
        let design = build_campaign_design(id, file.a)?;
        let config = SimConfig {
            design,
            design_id: id.clone(),
            constellation,
            snr_db: file.snr_db.clone(),
            power_mode,
            rx_antennas: file.rx_antennas,
            trials_per_point: file.trials_per_point,
            rng_seed: seed,
            target_errors: file.target_errors,
        };
        if let Err(errors) = config.validate() {
            for e in &errors {
                eprintln!("config validation error: {e}");
            }
            return Ok(ExitCode::from(EXIT_PARSE));
        }
        eprintln!("running {id}: {} SNR points", file.snr_db.len());
        let curve = run_campaign(&config);
        for p in &curve {
            records.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:.6e}\t{}\t{}\t{:.3e}\n",
                id,
                file.power_mode,
                file.constellation,
                p.snr_db,
                p.ser,
                p.symbol_errors,
                p.symbols_sent,
                p.ci95_halfwidth
            ));
        }
        curves.push((id.clone(), curve));
    }
    write_output(&args.out, &records)?;

    let check = file.check.as_deref().unwrap_or("none");
    match check {
        "none" => {}
        "ci-overlap" => {
            let mut ok = true;
            for i in 0..curves.len() {
                for j in i + 1..curves.len() {
                    for (p, q) in curves[i].1.iter().zip(&curves[j].1) {
                        if !p.ci_overlaps(q) {
                            eprintln!(
                                "check: {} and {} disagree at {} dB ({:.3e} vs {:.3e})",
                                curves[i].0, curves[j].0, p.snr_db, p.ser, q.ser
                            );
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                return Ok(ExitCode::from(EXIT_VERIFY));
            }
            eprintln!("check: curves coincide within 95% intervals");
        }
        "db-shift" => {
            if curves.len() < 2 {
                anyhow::bail!("db-shift check needs at least two designs");
            }
            let a = file.a.ok_or_else(|| anyhow::anyhow!("db-shift needs `a`"))?;
            let expected = 10.0 * f64::from(1u32 << (a - dimension_exponent(a))).log10();
            let s0 = snr_at_ser(&curves[0].1, file.ser_reference);
            let s1 = snr_at_ser(&curves[1].1, file.ser_reference);
            match (s0, s1) {
                (Some(x0), Some(x1)) => {
                    let shift = x0 - x1;
                    eprintln!(
                        "check: measured shift {shift:.2} dB between {} and {} (expected {expected:.2})",
                        curves[0].0, curves[1].0
                    );
                    if (shift - expected).abs() > 0.5 {
                        return Ok(ExitCode::from(EXIT_VERIFY));
                    }
                }
                _ => {
                    eprintln!(
                        "check: curves do not cross ser = {:.1e}; extend the grid",
                        file.ser_reference
                    );
                    return Ok(ExitCode::from(EXIT_VERIFY));
                }
            }
        }
        other => anyhow::bail!("unknown check '{other}' (expected ci-overlap|db-shift|none)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(args: ExportArgs) -> anyhow::Result<ExitCode> {
    let format = FileFormat::from_str(&args.to).map_err(anyhow::Error::msg)?;
    let content = std::fs::read_to_string(&args.input)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", args.input.display()))?;
    let design = match parse(&content) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("parse error: {e}");
            return Ok(ExitCode::from(EXIT_PARSE));
        }
    };
    write_output(&args.out, &render(&design, format))?;
    Ok(ExitCode::SUCCESS)
}
