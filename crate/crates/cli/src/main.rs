//! `latdisc` command-line driver.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use latdisc::arith::{cardinality_check, ratio_spread, tables_for_lambdas, ArithTables, CardinalityRow};
use latdisc::body::{inspect_profile, BodyGeometry};
use latdisc::config::RunConfig;
use latdisc::lattice::{brute_count, count_points, discrepancy_scan, ScanRecord};
use latdisc::lemma::{
    random_instances, rhs_terms, run_construction, search_witness_with, tables_for_pipeline, LemmaInstance,
    LemmaWitness, PipelineOptions, RandomInstanceSpec, SearchOptions,
};
use latdisc::report::{annotated_csv_document, csv_document, key_value_document};
use latdisc::spectrum::{borel_mean, build_series, spectral_link_report, tables_for_grid, BorelResult, CoeffModel, LinkRow, SpectralSeries};

#[derive(Debug, Parser)]
#[command(name = "latdisc", version, about = "Lattice point discrepancy experiments for convex bodies of revolution")]
struct Cli {
    /// TOML run configuration; defaults apply to every missing key.
    #[arg(long, global = true, env = "LATDISC_CONFIG")]
    config: Option<PathBuf>,

    /// Worker threads (0 = available parallelism). Never changes results.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for the random lemma instances.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the output here instead of standard output or `output.dir`.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Log verbosity (-v info, -vv debug).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Body geometry.
    #[command(subcommand)]
    Body(BodyCommand),
    /// Lattice points in the dilate `sqrt(t) B`.
    Count {
        #[arg(long)]
        t: Option<f64>,
        /// Also count with the brute-force oracle.
        #[arg(long)]
        brute: bool,
    },
    /// Discrepancy over a grid of `t`.
    Scan {
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Arithmetic tables and the sets `S_{Λ,K}`.
    #[command(subcommand)]
    Arith(ArithCommand),
    /// Frequency classes of the damped exponential sum.
    Spectrum {
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        coeff: Option<CoeffModel>,
        #[arg(long)]
        eps0: Option<f64>,
    },
    /// Gamma-weighted mean of the lattice rest.
    Borel {
        #[arg(long)]
        t: Option<f64>,
    },
    /// Borel mean against the scaled exponential sum over a grid.
    Link {
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        coeff: Option<CoeffModel>,
        #[arg(long)]
        eps0: Option<f64>,
    },
    /// Witness search and the full resonance construction.
    #[command(subcommand)]
    Lemma(LemmaCommand),
}

#[derive(Debug, Subcommand)]
enum BodyCommand {
    /// Validate the profile and print derived constants.
    Check,
}

#[derive(Debug, Subcommand)]
enum ArithCommand {
    /// Rows `n, spf, r2, omega, a1`.
    Table {
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Exact `|S_{Λ,K}|` against the predicted main term.
    SLambda {
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long)]
        beta: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Write the scanned `(t, sum)` pairs to this CSV file.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum LemmaCommand {
    /// Search the configured instance, or the seeded random suite when none is given.
    Search {
        #[command(flatten)]
        samples: SampleArgs,
    },
    /// Choose Λ, build M, check the side conditions, and search for a witness.
    Pipeline {
        #[arg(long = "T")]
        big_t: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long = "L")]
        big_l: Option<u64>,
        #[arg(long)]
        c0: Option<f64>,
        #[command(flatten)]
        samples: SampleArgs,
    },
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Fold command-line overrides into the configuration so the echoed header is complete.
fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) {
    set(&mut cfg.workers, cli.workers);
    set(&mut cfg.seed, cli.seed);
    match &cli.command {
        Command::Count { t, brute } => {
            set(&mut cfg.count.t, *t);
            cfg.count.brute |= *brute;
        }
        Command::Scan { t_min, t_max, step } => {
            set(&mut cfg.scan.t_min, *t_min);
            set(&mut cfg.scan.t_max, *t_max);
            set(&mut cfg.scan.step, *step);
        }
        Command::Arith(ArithCommand::Table { from, to }) => {
            set(&mut cfg.arith.from, *from);
            set(&mut cfg.arith.to, *to);
        }
        Command::Arith(ArithCommand::SLambda { lambda, beta }) => {
            set(&mut cfg.arith.lambdas, lambda.clone());
            set(&mut cfg.arith.beta, *beta);
        }
        Command::Spectrum { t, coeff, eps0 } => {
            set(&mut cfg.spectrum.t, *t);
            set(&mut cfg.spectrum.coeff, *coeff);
            set(&mut cfg.spectrum.eps0, *eps0);
        }
        Command::Borel { t } => set(&mut cfg.borel.t, *t),
        Command::Link { t_min, t_max, n, coeff, eps0 } => {
            set(&mut cfg.link.t_min, *t_min);
            set(&mut cfg.link.t_max, *t_max);
            set(&mut cfg.link.n, *n);
            set(&mut cfg.spectrum.coeff, *coeff);
            set(&mut cfg.spectrum.eps0, *eps0);
        }
        Command::Lemma(LemmaCommand::Pipeline { big_t, beta, big_l, c0, .. }) => {
            set(&mut cfg.lemma.t, *big_t);
            set(&mut cfg.lemma.beta, *beta);
            set(&mut cfg.lemma.l, *big_l);
            set(&mut cfg.lemma.c0, *c0);
        }
        Command::Body(_) | Command::Lemma(LemmaCommand::Search { .. }) => {}
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Body(BodyCommand::Check) => "body check",
        Command::Count { .. } => "count",
        Command::Scan { .. } => "scan",
        Command::Arith(ArithCommand::Table { .. }) => "arith table",
        Command::Arith(ArithCommand::SLambda { .. }) => "arith s-lambda",
        Command::Spectrum { .. } => "spectrum",
        Command::Borel { .. } => "borel",
        Command::Link { .. } => "link",
        Command::Lemma(LemmaCommand::Search { .. }) => "lemma search",
        Command::Lemma(LemmaCommand::Pipeline { .. }) => "lemma pipeline",
    }
}

fn geometry(cfg: &RunConfig) -> Result<BodyGeometry> {
    BodyGeometry::with_tolerances(cfg.body.clone(), cfg.tolerances).context("body rejected")
}

fn emit(cli: &Cli, cfg: &RunConfig, name: &str, ext: &str, doc: &str) -> Result<()> {
    let target = match (&cli.out, &cfg.output.dir) {
        (Some(path), _) => Some(path.clone()),
        (None, Some(dir)) => Some(Path::new(dir).join(format!("{}.{ext}", name.replace(' ', "_")))),
        (None, None) => None,
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?;
            info!("wrote {}", path.display());
        }
        None => print!("{doc}"),
    }
    Ok(())
}

fn write_samples(path: &Path, cfg: &RunConfig, name: &str, witness: &LemmaWitness) -> Result<()> {
    let rows = witness.samples.iter().flatten().map(|(t, v)| format!("{t},{v}"));
    let doc = csv_document(name, cfg, &["t", "sum"], rows);
    fs::write(path, doc).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    let name = command_name(&cli.command);
    match &cli.command {
        Command::Body(BodyCommand::Check) => {
            let t = &cfg.tolerances;
            let report = inspect_profile(&cfg.body, t.validation_grid, t.curvature_tol)?;
            let mut kv = report.key_values();
            if !report.accepted {
                emit(cli, cfg, name, "txt", &key_value_document(name, cfg, &kv))?;
                bail!("profile rejected: {}", report.reason.unwrap_or_default());
            }
            let g = geometry(cfg)?;
            let r = g.rect;
            for (k, v) in [
                ("volume", g.volume),
                ("c1", g.c1),
                ("c2", g.c2),
                ("z_min", g.z_range.0),
                ("z_max", g.z_range.1),
                ("a1", r.a1),
                ("a2", r.a2),
                ("a3", r.a3),
                ("a4", r.a4),
            ] {
                kv.push((k.into(), v.to_string()));
            }
            emit(cli, cfg, name, "txt", &key_value_document(name, cfg, &kv))
        }
        Command::Count { .. } => {
            let g = geometry(cfg)?;
            let t = cfg.count.t;
            if !(t >= 0.0 && t.is_finite()) {
                bail!("count needs a finite t >= 0, got {t}");
            }
            let n = count_points(&g, t).count;
            let (cols, row): (&[&str], String) = if cfg.count.brute {
                (&["t", "count", "brute"], format!("{t},{n},{}", brute_count(&g, t)?))
            } else {
                (&["t", "count"], format!("{t},{n}"))
            };
            emit(cli, cfg, name, "csv", &csv_document(name, cfg, cols, [row]))
        }
        Command::Scan { .. } => {
            let grid = cfg.scan.grid()?;
            let g = geometry(cfg)?;
            let records = discrepancy_scan(&g, &grid)?;
            let doc = csv_document(name, cfg, &ScanRecord::COLUMNS, records.iter().map(ScanRecord::csv_row));
            emit(cli, cfg, name, "csv", &doc)
        }
        Command::Arith(ArithCommand::Table { .. }) => {
            let a = &cfg.arith;
            if a.from > a.to {
                bail!("arith table range [{}, {}] is empty", a.from, a.to);
            }
            let tables = ArithTables::build_window(a.from, a.to)?;
            let rows = tables.rows(a.from, a.to)?;
            let doc = csv_document(
                name,
                cfg,
                &["n", "spf", "r2", "omega", "a1"],
                rows.iter().map(|(n, spf, r2, om, a1)| format!("{n},{spf},{r2},{om},{}", u8::from(*a1))),
            );
            emit(cli, cfg, name, "csv", &doc)
        }
        Command::Arith(ArithCommand::SLambda { .. }) => {
            let g = geometry(cfg)?;
            let a = &cfg.arith;
            let (a1, a2) = (g.rect.a1, g.rect.a2);
            let tables = tables_for_lambdas(&a.lambdas, a1, a2)?;
            let rows = cardinality_check(&tables, &a.lambdas, a.beta, a1, a2)?;
            let notes = [
                ("a1".to_string(), a1.to_string()),
                ("a2".to_string(), a2.to_string()),
                ("ratio_spread".to_string(), ratio_spread(&rows).map_or("none".into(), |s| s.to_string())),
            ];
            let doc = annotated_csv_document(name, cfg, &notes, &CardinalityRow::COLUMNS, rows.iter().map(CardinalityRow::csv_row));
            emit(cli, cfg, name, "csv", &doc)
        }
        Command::Spectrum { .. } => {
            let g = geometry(cfg)?;
            let s = &cfg.spectrum;
            let tables = tables_for_grid(&[s.t], s.eps0)?;
            let series = build_series(&g, &tables, s.t, s.coeff, s.eps0)?;
            let notes = [
                ("X".to_string(), series.x.to_string()),
                ("cutoff".to_string(), series.cutoff.to_string()),
                ("classes".to_string(), series.len().to_string()),
            ];
            let doc = annotated_csv_document(name, cfg, &notes, &SpectralSeries::COLUMNS, series.csv_rows());
            emit(cli, cfg, name, "csv", &doc)
        }
        Command::Borel { .. } => {
            let g = geometry(cfg)?;
            let b = borel_mean(&g, cfg.borel.t)?;
            emit(cli, cfg, name, "csv", &csv_document(name, cfg, &BorelResult::COLUMNS, [b.csv_row()]))
        }
        Command::Link { .. } => {
            let g = geometry(cfg)?;
            let grid = cfg.link.grid()?;
            let s = &cfg.spectrum;
            let tables = tables_for_grid(&grid, s.eps0)?;
            let report = spectral_link_report(&g, &tables, &grid, s.coeff, s.eps0)?;
            let notes = [
                ("scale".to_string(), report.scale.to_string()),
                ("pearson".to_string(), report.pearson.map_or("none".into(), |p| p.to_string())),
            ];
            let doc = annotated_csv_document(name, cfg, &notes, &LinkRow::COLUMNS, report.rows.iter().map(LinkRow::csv_row));
            emit(cli, cfg, name, "csv", &doc)
        }
        Command::Lemma(LemmaCommand::Search { samples }) => {
            let l = &cfg.lemma;
            let opts = SearchOptions { step: l.step, budget: l.budget, exhaustive: false, keep_samples: samples.samples.is_some() };
            match l.explicit_instance() {
                Some(inst) => {
                    let inst = inst?;
                    let w = search_witness_with(&inst, opts)?;
                    let mut kv = instance_summary(&inst);
                    kv.extend(w.key_values());
                    if let Some(path) = &samples.samples {
                        write_samples(path, cfg, name, &w)?;
                    }
                    emit(cli, cfg, name, "txt", &key_value_document(name, cfg, &kv))
                }
                None => {
                    let spec = RandomInstanceSpec::default();
                    let insts = random_instances(cfg.seed, l.instances, &spec);
                    let mut rows = Vec::with_capacity(insts.len());
                    let mut met = 0;
                    for (i, inst) in insts.iter().enumerate() {
                        let w = search_witness_with(inst, SearchOptions { keep_samples: false, ..opts })?;
                        met += usize::from(w.met);
                        rows.push(format!(
                            "{i},{},{},{},{},{},{},{},{},{}",
                            inst.l,
                            inst.m.len(),
                            inst.f.len(),
                            w.rhs_bound,
                            w.sum_value,
                            w.t,
                            w.met,
                            w.capped,
                            w.grid_points
                        ));
                    }
                    let notes = [
                        ("seed".to_string(), cfg.seed.to_string()),
                        ("met".to_string(), format!("{met}/{}", insts.len())),
                    ];
                    let cols = ["instance", "L", "M_card", "terms", "rhs_bound", "sum_value", "witness_t", "met", "capped", "grid_points"];
                    emit(cli, cfg, name, "csv", &annotated_csv_document(name, cfg, &notes, &cols, rows))
                }
            }
        }
        Command::Lemma(LemmaCommand::Pipeline { samples, .. }) => {
            let g = geometry(cfg)?;
            let l = &cfg.lemma;
            let opts = PipelineOptions {
                beta: l.beta,
                c0: l.c0,
                l: l.l,
                eps0: cfg.spectrum.eps0,
                model: cfg.spectrum.coeff,
                xh_bound: l.xh_bound,
                search: SearchOptions { step: l.step, budget: l.budget, exhaustive: false, keep_samples: samples.samples.is_some() },
            };
            let tables = tables_for_pipeline(&g, l.t, &opts)?;
            let report = run_construction(&g, &tables, l.t, &opts)?;
            if let Some(path) = &samples.samples {
                write_samples(path, cfg, name, &report.witness)?;
            }
            emit(cli, cfg, name, "txt", &key_value_document(name, cfg, &report.key_values()))
        }
    }
}

fn instance_summary(inst: &LemmaInstance) -> Vec<(String, String)> {
    let terms = rhs_terms(inst);
    vec![
        ("terms".into(), inst.f.len().to_string()),
        ("Lambda".into(), inst.big_lambda.to_string()),
        ("L".into(), inst.l.to_string()),
        ("M_card".into(), inst.m.len().to_string()),
        ("T".into(), inst.t.to_string()),
        ("interval_end".into(), inst.interval_end().to_string()),
        ("conforming".into(), inst.conforming().to_string()),
        ("resonance_mass".into(), terms.resonance.to_string()),
        ("low_frequency_mass".into(), terms.low_frequency.to_string()),
        ("total_mass".into(), terms.total_mass.to_string()),
    ]
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = (|| -> Result<()> {
        let mut cfg = match &cli.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        apply_overrides(&cli, &mut cfg);
        if cfg.workers > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build_global()
                .context("configuring the worker pool")?;
        }
        run(&cli, &cfg)
    })();
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
