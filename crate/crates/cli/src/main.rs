use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use minsat::classify::{self, theorem1_formula, theorem1_record, theorem1_stabilizer, RunOptions, SearchConfig};
use minsat::codes::{covering_radius_is_2, export_code};
use minsat::collineation::group_order;
use minsat::field::{prime_power, FieldSpec, FieldTable};
use minsat::groups::{fingerprint, label};
use minsat::report::{self, ResultsHeader};
use minsat::verify;
use minsat::{PlaneModel, PointSet, Variant};

#[derive(Parser)]
#[command(name = "minsat", version, about = "Classify minimal 1-saturating sets in PG(2,q)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field order, a prime power in 2..=32
    #[arg(long)]
    q: u32,
    /// Modulus coefficients, low degree first, leading 1 included (e.g. 1,0,1 for x^2+1)
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    /// Equivalence group: pgl or pgammal (default: pgammal unless q is prime)
    #[arg(long)]
    variant: Option<Variant>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify minimal 1-saturating sets with size in [k-min, k-max]
    Classify(ClassifyArgs),
    /// Cross-check the classifier against brute force (q <= 4)
    Verify(FieldArgs),
    /// Stabilizer of a point set given by indices
    Stabilizer(PointsArgs),
    /// The frame-free class: a line plus an external point
    Theorem1(FieldArgs),
    /// Write the parity-check matrix of a point set
    ExportCode(ExportArgs),
    /// Print the table for one or more results files
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ClassifyArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    k_min: usize,
    #[arg(long)]
    k_max: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// Size of the breadth-first seed sets (default 6, clamped to k-min)
    #[arg(long)]
    seed_size: Option<usize>,
    /// Extra breadth-first levels used to cut work units
    #[arg(long, default_value_t = 1)]
    prefix_depth: usize,
    /// Records kept in memory before spilling sorted runs to disk
    #[arg(long, default_value_t = 1 << 20)]
    spill_cap: usize,
    /// Output directory for results.jsonl, aggregate.json and run-config.toml
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Continue from an existing checkpoint
    #[arg(long)]
    resume: bool,
    /// Flush the checkpoint after this many finished work units
    #[arg(long, default_value_t = 16)]
    checkpoint_every: usize,
    /// Leave out the frame-free class even when q+2 is in range
    #[arg(long)]
    frame_only: bool,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct PointsArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated point indices
    #[arg(long, value_delimiter = ',', required = true)]
    points: Vec<u16>,
    /// Also print the group elements
    #[arg(long)]
    elements: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Comma-separated point indices (default: the line-plus-point set)
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<u16>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Results files written by `classify`
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Also write the merged aggregate here
    #[arg(long)]
    aggregate: Option<PathBuf>,
}

/// Effective configuration of a classify run, written next to the results.
#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'static str,
    q: u32,
    modulus: Vec<u32>,
    modulus_poly: String,
    variant: Variant,
    k_min: usize,
    k_max: usize,
    seed_size: usize,
    prefix_depth: usize,
    workers: usize,
    spill_cap: usize,
    normalization: &'static str,
    out: &'a Path,
    checkpoint: Option<&'a Path>,
    resume: bool,
}

fn plane(args: &FieldArgs) -> Result<(PlaneModel, Variant)> {
    let Some((p, h)) = prime_power(args.q) else { bail!("q = {} is not a prime power", args.q) };
    let spec = match &args.modulus {
        Some(m) => FieldSpec::new(p, h, m.clone()),
        None => FieldSpec::for_order(args.q)?,
    };
    let field = FieldTable::build(spec).with_context(|| format!("cannot build GF({})", args.q))?;
    Ok((PlaneModel::build(field), args.variant.unwrap_or_else(|| Variant::default_for(args.q))))
}

fn point_set(m: &PlaneModel, pts: &[u16]) -> Result<PointSet> {
    let n = m.num_points() as u16;
    if let Some(p) = pts.iter().find(|&&p| p >= n) {
        bail!("point index {p} out of range 0..{n}");
    }
    let s = PointSet::from_indices(pts.iter().copied());
    if s.len() != pts.len() {
        bail!("repeated point index");
    }
    Ok(s)
}

fn cmd_classify(a: &ClassifyArgs) -> Result<()> {
    let (m, variant) = plane(&a.field)?;
    let mut cfg = SearchConfig::new(&m, a.k_min, a.k_max);
    cfg.variant = variant;
    cfg.prefix_depth = a.prefix_depth;
    cfg.spill_cap = a.spill_cap;
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(s) = a.seed_size {
        cfg.seed_size = s;
    }
    cfg.validate(&m)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;

    let spec = m.field().spec();
    let rc = RunConfig {
        command: "classify",
        q: cfg.q,
        modulus: spec.modulus.clone(),
        modulus_poly: spec.modulus_string(),
        variant,
        k_min: cfg.k_min,
        k_max: cfg.k_max,
        seed_size: cfg.seed_size,
        prefix_depth: cfg.prefix_depth,
        workers: cfg.workers,
        spill_cap: cfg.spill_cap,
        normalization: report::NORMALIZATION,
        out: &a.out,
        checkpoint: a.checkpoint.as_deref(),
        resume: a.resume,
    };
    fs::write(a.out.join("run-config.toml"), toml::to_string(&rc)?)?;

    let opts = RunOptions {
        checkpoint: a.checkpoint.clone(),
        resume: a.resume,
        checkpoint_every: a.checkpoint_every,
        progress: !a.quiet,
    };
    let out = classify::run(&m, &cfg, &opts)?;
    let mut records = out.records;
    if !a.frame_only && (cfg.k_min..=cfg.k_max).contains(&(m.q() + 2)) {
        records.push(theorem1_record(&m, variant)?);
    }
    let header = ResultsHeader::new(cfg.q, spec.modulus.clone(), variant);
    let f = fs::File::create(a.out.join("results.jsonl"))?;
    report::write_results(std::io::BufWriter::new(f), &header, &records)?;
    let agg = report::aggregate(&header, &records);
    fs::write(a.out.join("aggregate.json"), report::aggregate_json(&agg)?)?;
    if !a.quiet {
        eprintln!(
            "{} classes from {} work units ({} resumed), {} search nodes",
            records.len(),
            out.units,
            out.resumed_units,
            out.stats.nodes
        );
    }
    print!("{}", report::format_table(&agg.rows));
    Ok(())
}

fn check(ok: bool, what: &str, failures: &mut usize) {
    println!("{} {what}", if ok { "PASS" } else { "FAIL" });
    if !ok {
        *failures += 1;
    }
}

fn cmd_verify(a: &FieldArgs) -> Result<bool> {
    let (m, variant) = plane(a)?;
    if m.q() > 4 {
        bail!("verify runs brute-force oracles and needs q <= 4");
    }
    let q = m.q();
    let mut failures = 0;

    let oracle = verify::oracle_classify(&m, variant)?;
    let mut cfg = SearchConfig::new(&m, 4, q + 2);
    cfg.seed_size = 4;
    cfg.variant = variant;
    let mut records = classify::classify(&m, &cfg)?;
    records.push(theorem1_record(&m, variant)?);
    let expect = verify::summarize_oracle(&oracle, variant);
    let got = verify::summarize_records(&records);
    println!("oracle: {expect:?}");
    println!("search: {got:?}");
    check(expect == got, "class counts and stabilizer orders match the brute-force oracle", &mut failures);
    check(
        classify::verify_class_counts(&m, &records, variant)?,
        "orbit-stabilizer sums match the labeled counts",
        &mut failures,
    );
    let frame_free: Vec<_> = oracle.iter().filter(|c| !c.contains_frame).collect();
    check(
        frame_free.len() == 1 && frame_free[0].k == q + 2,
        "exactly one frame-free class, of size q+2",
        &mut failures,
    );
    for v in [Variant::Pgl, Variant::PGammaL] {
        let direct = theorem1_stabilizer(&m, v)?.len() as u64;
        check(
            direct == theorem1_formula(q as u32, v)?,
            &format!("line-plus-point stabilizer in {v}: direct {direct}"),
            &mut failures,
        );
    }
    let mut agree = true;
    for s in verify::all_minimal_sets(&m)? {
        let h = export_code(&m, &s)?;
        agree &= covering_radius_is_2(m.field(), &h)?;
    }
    check(agree, "every minimal set exports a covering-radius-2 code", &mut failures);
    Ok(failures == 0)
}

fn cmd_stabilizer(a: &PointsArgs) -> Result<()> {
    let (m, variant) = plane(&a.field)?;
    let s = point_set(&m, &a.points)?;
    let (order, elements) = classify::stabilizer(&m, &s, variant)?;
    let fp = fingerprint(m.field(), &elements)?;
    println!("{}", m.describe(&s));
    println!("variant {variant}, order {order}, label {}", label(&fp));
    println!("element orders {:?}, center {}", fp.element_orders, fp.center_order);
    if a.elements {
        for g in &elements {
            println!("{:?}", g.to_values());
        }
    }
    Ok(())
}

fn cmd_theorem1(a: &FieldArgs) -> Result<bool> {
    let (m, variant) = plane(a)?;
    let r = theorem1_record(&m, variant)?;
    let q = m.q() as u32;
    let formula = theorem1_formula(q, variant)?;
    let direct = r.stab_order();
    println!("{}", m.describe(&r.set()));
    println!("size {}, stab {direct}", r.k);
    println!(
        "|{}(3,{q})| = {}, direct count {direct}: {}",
        if variant == Variant::Pgl { "PGL" } else { "PGammaL" },
        group_order(q, variant)?,
        if direct == formula { "agrees" } else { "DISAGREES" }
    );
    Ok(direct == formula)
}

fn cmd_export(a: &ExportArgs) -> Result<()> {
    let (m, _) = plane(&a.field)?;
    let s = match &a.points {
        Some(p) => point_set(&m, p)?,
        None => classify::theorem1_points(&m),
    };
    let h = export_code(&m, &s)?;
    let text = h.to_text();
    match &a.out {
        Some(p) => fs::write(p, &text)?,
        None => print!("{text}"),
    }
    eprintln!("covering radius 2: {}", covering_radius_is_2(m.field(), &h)?);
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let mut all = Vec::new();
    let mut first = None;
    for p in &a.inputs {
        let f = fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
        let (h, recs) = report::read_results(BufReader::new(f))?;
        first.get_or_insert(h);
        all.extend(recs);
    }
    let rows = report::aggregate_rows(&all);
    print!("{}", report::format_table(&rows));
    if let (Some(path), Some(h)) = (&a.aggregate, first) {
        fs::write(path, report::aggregate_json(&report::aggregate(&h, &all))?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Classify(a) => cmd_classify(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Stabilizer(a) => cmd_stabilizer(a).map(|_| true),
        Command::Theorem1(a) => cmd_theorem1(a),
        Command::ExportCode(a) => cmd_export(a).map(|_| true),
        Command::Report(a) => cmd_report(a).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
