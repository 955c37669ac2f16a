use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use clap::Args;

use enose_core::classifier::{ClassifierConfig, Metric};
use enose_core::experiment::{run_benchmark, BenchmarkConfig, ClassifierKind};
use enose_core::noise::NoiseSpec;
use enose_core::report::{accuracy_csv, benchmark_plot_csv, class_counts_csv, to_json_pretty};
use enose_core::signature::TemplateLibrary;

use crate::output::{echo_command, with_pool, write_file};

#[derive(Args)]
pub struct BenchArgs {
    /// Template library JSON file.
    #[arg(long)]
    pub lib: PathBuf,

    /// Classifier: `forced_choice`, `nn`, or `modified_dennler`.
    #[arg(long, default_value = "nn")]
    pub classifier: String,

    /// Rejection threshold in [0, 1].
    #[arg(long, default_value_t = 0.75)]
    pub theta: f64,

    /// Metric for the nearest-neighbor classifier: `manhattan` or `jaccard`.
    #[arg(long, default_value = "manhattan")]
    pub metric: String,

    /// Noise spec: `impulse:<p>`, `impulse:<lo>-<hi>`, `additive:<k>`, `random`.
    #[arg(long, default_value = "impulse:0.2-0.8")]
    pub noise: String,

    #[arg(long, default_value_t = 100)]
    pub sims: usize,

    /// Test samples per odorant per simulation.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Worker threads for simulations (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,

    #[arg(long, default_value = "reports/bench")]
    pub out_dir: PathBuf,
}

pub fn run(args: BenchArgs) -> Result<()> {
    let classifier: ClassifierKind = args.classifier.parse()?;
    let metric: Metric = args.metric.parse()?;
    let noise: NoiseSpec = args.noise.parse()?;
    let classifier_cfg = ClassifierConfig::new(args.theta, metric)?;

    let config = BenchmarkConfig {
        samples_per_odorant: args.samples,
        num_simulations: args.sims,
        noise,
        classifier,
        classifier_cfg,
        base_seed: args.seed,
    };
    config.validate()?;

    echo_command(&[
        "bench".into(),
        format!("--lib {}", args.lib.display()),
        format!("--classifier {classifier}"),
        format!("--theta {}", args.theta),
        format!("--metric {metric}"),
        format!("--noise {noise}"),
        format!("--sims {}", args.sims),
        format!("--samples {}", args.samples),
        format!("--seed {}", args.seed),
        format!("--out-dir {}", args.out_dir.display()),
    ]);

    let library = TemplateLibrary::load(&args.lib)?;
    let started = Instant::now();
    let report = with_pool(args.workers, || run_benchmark(&config, &library))??;
    // Timing goes to stderr only; report files stay byte-stable.
    eprintln!("benchmark wall time: {:.3}s", started.elapsed().as_secs_f64());

    write_file(&args.out_dir.join("bench.json"), &to_json_pretty(&report)?)?;
    write_file(&args.out_dir.join("bench_accuracy.csv"), &accuracy_csv(&report))?;
    write_file(&args.out_dir.join("bench_classes.csv"), &class_counts_csv(&report))?;
    write_file(
        &args.out_dir.join("bench_plot.csv"),
        &benchmark_plot_csv(&[(&classifier.to_string(), &report)]),
    )?;

    println!(
        "{}: mean accuracy {:.4} +/- {:.4} over {} simulations (reference nn benchmark: {:.3})",
        classifier,
        report.mean_accuracy,
        report.std_accuracy,
        args.sims,
        report.reference_nn_accuracy
    );
    Ok(())
}
