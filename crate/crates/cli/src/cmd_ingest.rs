use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use enose_core::ingest::{
    config_hash, featurize, parse_trials, synthesize_dataset, FeatureExtractor, IngestConfig,
};
use enose_core::signature::{build_library, QuantizerConfig};

use crate::output::{echo_command, write_file};

/// Environment variable holding the default dataset directory.
pub const DATA_ENV: &str = "ENOSE_BENCH_DATA";

#[derive(Args)]
pub struct IngestArgs {
    /// Generate a synthetic dataset instead of reading files.
    #[arg(long)]
    pub synthetic: bool,

    /// Dataset directory (defaults to $ENOSE_BENCH_DATA when set).
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,

    /// Library file to write.
    #[arg(long)]
    pub out: PathBuf,

    /// Manifest file to write (defaults to `<out>.manifest.json`).
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Seed for dataset synthesis and template selection.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,

    // Synthetic-mode parameters.
    #[arg(long, default_value_t = 10)]
    pub odorants: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 72)]
    pub n: usize,
    #[arg(long, default_value_t = 15)]
    pub vmax: u16,

    // Dataset-mode parameters.
    #[arg(long, default_value_t = 16)]
    pub levels: u32,
    #[arg(long, default_value_t = 0.0)]
    pub feature_min: f64,
    #[arg(long, default_value_t = 60000.0)]
    pub feature_max: f64,
    /// Feature extractor: `max` or `mean:<start>-<end>` (sample indices).
    #[arg(long, default_value = "max")]
    pub feature: String,
    /// Keep only trials of this odorant.
    #[arg(long)]
    pub odorant: Option<String>,
    /// Keep only trials at this location.
    #[arg(long)]
    pub location: Option<String>,
    /// Keep only trials with this date token.
    #[arg(long)]
    pub date: Option<String>,
}

fn parse_feature(text: &str) -> Result<FeatureExtractor> {
    if text == "max" {
        return Ok(FeatureExtractor::MaxResponse);
    }
    if let Some(window) = text.strip_prefix("mean:") {
        if let Some((start, end)) = window.split_once('-') {
            return Ok(FeatureExtractor::MeanSteadyWindow {
                start: start.parse().context("feature window start")?,
                end: end.parse().context("feature window end")?,
            });
        }
    }
    bail!("invalid feature `{text}`: expected `max` or `mean:<start>-<end>`");
}

pub fn run(args: IngestArgs) -> Result<()> {
    let manifest_path = args.manifest.clone().unwrap_or_else(|| {
        let mut path = args.out.clone();
        path.set_extension("manifest.json");
        path
    });

    if args.synthetic {
        echo_command(&[
            "ingest".into(),
            "--synthetic".into(),
            format!("--odorants {}", args.odorants),
            format!("--trials {}", args.trials),
            format!("--n {}", args.n),
            format!("--vmax {}", args.vmax),
            format!("--seed {}", args.seed),
            format!("--out {}", args.out.display()),
        ]);
        let dataset = synthesize_dataset(args.odorants, args.trials, args.n, args.vmax, args.seed)?;
        let library = build_library(&dataset, args.seed)?;
        write_file(&args.out, &library.to_json_string()?)?;

        let manifest = serde_json::json!({
            "mode": "synthetic",
            "num_odorants": args.odorants,
            "trials_per_odorant": args.trials,
            "n": args.n,
            "vmax": args.vmax,
            "seed": args.seed,
        });
        write_file(&manifest_path, &format!("{:#}\n", manifest))?;
        println!(
            "library: {} templates, n={}, vmax={}",
            library.len(),
            library.n(),
            library.vmax()
        );
        return Ok(());
    }

    let data_dir = match args.data.clone().or_else(|| std::env::var_os(DATA_ENV).map(Into::into)) {
        Some(dir) => dir,
        None => bail!("choose --synthetic or --data <DIR> (or set {DATA_ENV})"),
    };

    let quantizer = QuantizerConfig::new(args.levels, args.feature_min, args.feature_max)?;
    let mut config = IngestConfig::with_quantizer(quantizer);
    config.feature = parse_feature(&args.feature)?;
    config.odorant_filter = args.odorant.clone();
    config.location_filter = args.location.clone();
    config.date_filter = args.date.clone();

    echo_command(&[
        "ingest".into(),
        format!("--data {}", data_dir.display()),
        format!("--levels {}", args.levels),
        format!("--feature-min {}", args.feature_min),
        format!("--feature-max {}", args.feature_max),
        format!("--feature {}", args.feature),
        format!("--seed {}", args.seed),
        format!("--out {}", args.out.display()),
    ]);

    let outcome = parse_trials(&data_dir, &config)?;
    if outcome.trials.is_empty() {
        bail!(
            "no trials parsed from {} (filters: odorant={:?} location={:?} date={:?})",
            data_dir.display(),
            config.odorant_filter,
            config.location_filter,
            config.date_filter
        );
    }

    let mut samples = BTreeMap::new();
    for trial in &outcome.trials {
        let signature = featurize(trial, &config)
            .with_context(|| format!("featurizing {}", trial.source.display()))?;
        samples
            .entry(trial.label.clone())
            .or_insert_with(Vec::new)
            .push(signature);
    }
    let library = build_library(&samples, args.seed)?;
    write_file(&args.out, &library.to_json_string()?)?;

    let manifest = serde_json::json!({
        "mode": "dataset",
        "data_dir": data_dir.display().to_string(),
        "config_hash": config_hash(&config),
        "seed": args.seed,
        "total_warnings": outcome.manifest.total_warnings,
        "files": outcome.manifest.files,
    });
    write_file(&manifest_path, &format!("{:#}\n", manifest))?;

    println!(
        "parsed {} trials from {} files ({} warnings)",
        outcome.trials.len(),
        outcome.manifest.files.len(),
        outcome.manifest.total_warnings
    );
    println!(
        "library: {} templates, n={}, vmax={}",
        library.len(),
        library.n(),
        library.vmax()
    );
    Ok(())
}
