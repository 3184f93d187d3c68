use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use bearing_fis::clustering::ClusterSet;
use bearing_fis::config::Config;
use bearing_fis::datasets::{
    extract_from_source, synth_feature_table, CsvSource, ImsSource, PhmSource, SynthConfig, WindowSource,
    DEFAULT_BATCH,
};
use bearing_fis::features::{parse_feature_set, FeatureTable};
use bearing_fis::fis::{TsFisModel, Variant};
use bearing_fis::pipeline::{self, NamedTable};

#[derive(Parser)]
#[command(name = "bearing-fis", version, about = "Fuzzy-model remaining-useful-life estimation for rolling bearings")]
struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Savitzky-Golay frame length for RUL smoothing (odd).
    #[arg(long, global = true)]
    sg_frame: Option<usize>,

    /// Seed recorded in the configuration and used by `synth`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// More log output on stderr (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Phm,
    Ims,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Baseline,
    Weighted,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Baseline => Variant::Baseline,
            VariantArg::Weighted => Variant::Weighted,
        }
    }
}

#[derive(clap::Args)]
struct ClusterArgs {
    /// Influence radius of subtractive clustering.
    #[arg(long)]
    ra: Option<f64>,
    /// Squash radius (defaults to 1.25 * ra).
    #[arg(long)]
    rb: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a feature table from a recording directory.
    Features {
        dir: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        /// Comma-separated list of rms, se, ae, lle, cd, diae.
        #[arg(long, default_value = "rms")]
        features: String,
        /// IMS column (0-based).
        #[arg(long, default_value_t = 0)]
        channel: usize,
        /// Sampling rate in Hz for `--format csv`.
        #[arg(long)]
        sample_rate: Option<f64>,
        /// Seconds between windows for `--format csv`.
        #[arg(long)]
        interval: Option<f64>,
        /// Leave the life-ratio column empty (recording does not end at failure).
        #[arg(long)]
        unlabeled: bool,
        /// Windows read in parallel per batch.
        #[arg(long, default_value_t = DEFAULT_BATCH)]
        batch: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Identify a model from labeled feature tables (one per bearing).
    Train {
        #[arg(required = true)]
        tables: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "weighted")]
        variant: VariantArg,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write the cluster centers as CSV.
        #[arg(long)]
        dump_clusters: Option<PathBuf>,
    },
    /// Estimate life ratio and RUL for every row of a feature table.
    Predict {
        table: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Output CSV (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a model on labeled feature tables.
    Evaluate {
        #[arg(required = true)]
        tables: Vec<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Directory for curves.csv and summary.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train both variants on the same data and compare them on the same test tables.
    Benchmark {
        #[arg(long, num_args = 1.., required = true)]
        train: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        test: Vec<PathBuf>,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic labeled feature table.
    Synth {
        #[arg(long, default_value_t = 3)]
        regimes: usize,
        #[arg(long, default_value_t = 10_000.0)]
        lifetime: f64,
        /// Noise standard deviation relative to the feature range.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 200)]
        observations: usize,
        #[arg(long, default_value_t = 1)]
        features: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(cli: &Cli, cluster: Option<&ClusterArgs>) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(frame) = cli.sg_frame {
        cfg.filter.frame = frame;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(c) = cluster {
        if let Some(ra) = c.ra {
            cfg.cluster.ra = ra;
            cfg.cluster.rb = 1.25 * ra;
        }
        if let Some(rb) = c.rb {
            cfg.cluster.rb = rb;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn table_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn read_tables(paths: &[PathBuf]) -> Result<Vec<NamedTable>> {
    paths
        .iter()
        .map(|p| Ok(NamedTable::new(table_name(p), FeatureTable::read_csv_file(p)?)))
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_clusters(clusters: &ClusterSet, names: &[String], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "rule,row,{},rho", names.join(","))?;
    for (j, (c, row)) in clusters.centers.iter().zip(&clusters.center_rows).enumerate() {
        let vals: Vec<String> = c.iter().map(f64::to_string).collect();
        writeln!(w, "{},{},{}", j + 1, row + 1, vals.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn print_model(model: &TsFisModel) {
    println!("rules: {}", model.rule_count());
    if let Some(time) = model.time_clusters() {
        for (j, c) in time.clusters.iter().enumerate() {
            println!(
                "rule {}: prior {:.6} time centroid {:.3} s time variance {:.3} s^2",
                j + 1,
                c.prior,
                c.centroid,
                c.variance
            );
        }
    }
}

fn extract(source: &dyn ErasedSource, features: &str, cfg: &Config, labeled: bool, batch: usize, out: &Path) -> Result<()> {
    let fs = parse_feature_set(features)?;
    let start = Instant::now();
    let table = source.extract(&fs, cfg, labeled, batch)?;
    table.write_csv(create(out)?)?;
    println!("windows: {}", table.len());
    println!("seconds: {:.3}", start.elapsed().as_secs_f64());
    Ok(())
}

/// Object-safe wrapper over the three directory layouts.
trait ErasedSource {
    fn extract(
        &self,
        fs: &[bearing_fis::features::Feature],
        cfg: &Config,
        labeled: bool,
        batch: usize,
    ) -> bearing_fis::Result<FeatureTable>;
}

impl<S: WindowSource> ErasedSource for S {
    fn extract(
        &self,
        fs: &[bearing_fis::features::Feature],
        cfg: &Config,
        labeled: bool,
        batch: usize,
    ) -> bearing_fis::Result<FeatureTable> {
        info!("{}: {} windows", self.bearing_id(), self.len());
        extract_from_source(self, fs, &cfg.features, labeled, batch)
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Features {
            dir,
            format,
            features,
            channel,
            sample_rate,
            interval,
            unlabeled,
            batch,
            out,
        } => {
            let cfg = load_config(cli, None)?;
            // Validate the feature list before touching the data.
            parse_feature_set(features)?;
            let source: Box<dyn ErasedSource> = match format {
                Format::Phm => Box::new(PhmSource::open(dir)?),
                Format::Ims => Box::new(ImsSource::open(dir, *channel)?),
                Format::Csv => {
                    let (Some(rate), Some(step)) = (sample_rate, interval) else {
                        return Err(bearing_fis::Error::Config(
                            "--format csv needs --sample-rate and --interval".into(),
                        )
                        .into());
                    };
                    Box::new(CsvSource::open(dir, *rate, *step)?)
                }
            };
            extract(source.as_ref(), features, &cfg, !unlabeled, *batch, out)
        }
        Command::Train {
            tables,
            variant,
            cluster,
            out,
            dump_clusters,
        } => {
            let cfg = load_config(cli, Some(cluster))?;
            let data = read_tables(tables)?;
            let (clusters, model) = pipeline::train(&data, &cfg, (*variant).into())?;
            model.save(out)?;
            if let Some(path) = dump_clusters {
                write_clusters(&clusters, model.feature_set(), path)?;
            }
            print_model(&model);
            Ok(())
        }
        Command::Predict { table, model, out } => {
            let cfg = load_config(cli, None)?;
            let model = TsFisModel::load(model)?;
            let table = FeatureTable::read_csv_file(table)?;
            let rows = pipeline::predict(&model, &table, &cfg.filter)?;
            match out {
                Some(path) => pipeline::write_predictions_csv(&rows, create(path)?)?,
                None => pipeline::write_predictions_csv(&rows, io::stdout().lock())?,
            }
            Ok(())
        }
        Command::Evaluate { tables, model, out } => {
            let cfg = load_config(cli, None)?;
            let model = TsFisModel::load(model)?;
            let data = read_tables(tables)?;
            let report = pipeline::evaluate(&model, &data, &cfg.filter)?;
            std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
            report.write_curves_csv(create(&out.join("curves.csv"))?)?;
            report.write_summary_csv(create(&out.join("summary.csv"))?)?;
            for b in &report.bearings {
                println!("{} RRMSE {:.6}", b.bearing, b.rrmse);
            }
            println!("ARRMSE {:.6}", report.arrmse()?);
            Ok(())
        }
        Command::Benchmark { train, test, cluster, out } => {
            let cfg = load_config(cli, Some(cluster))?;
            let train = read_tables(train)?;
            let test = read_tables(test)?;
            let runs = pipeline::benchmark(&train, &test, &cfg)?;
            pipeline::write_benchmark_csv(&runs, create(out)?)?;
            for run in &runs {
                println!(
                    "{}: rules {} ARRMSE {:.6} seconds {:.3}",
                    run.variant,
                    run.rules,
                    run.report.arrmse()?,
                    run.seconds
                );
            }
            Ok(())
        }
        Command::Synth {
            regimes,
            lifetime,
            noise,
            observations,
            features,
            out,
        } => {
            let cfg = load_config(cli, None)?;
            let synth = SynthConfig {
                regimes: *regimes,
                lifetime: *lifetime,
                noise: *noise,
                observations: *observations,
                features: *features,
            };
            let table = synth_feature_table(cfg.seed, &synth)?;
            table.write_csv(create(out)?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e
                .chain()
                .any(|c| c.downcast_ref::<bearing_fis::Error>().is_some_and(|e| e.is_config()));
            if config_error {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
