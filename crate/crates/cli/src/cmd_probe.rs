use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args};
use serde::Deserialize;

use enose_core::classifier::{
    classify_forced_choice, classify_modified_dennler, classify_nn_threshold,
    ClassificationOutcome, ClassifierConfig, Metric,
};
use enose_core::noise::{additive_offset, random_signature, stream_domain, SeedSpec};
use enose_core::signature::{Signature, TemplateLibrary};

use crate::output::echo_command;

#[derive(Args)]
#[command(group(
    ArgGroup::new("source")
        .required(true)
        .args(["values", "input_file", "template", "random"]),
))]
pub struct ProbeArgs {
    /// Template library JSON file.
    #[arg(long)]
    pub lib: PathBuf,

    /// Inline signature: comma-separated levels, e.g. `3,0,15,...`.
    #[arg(long)]
    pub values: Option<String>,

    /// Signature file: a JSON array or an object with a `values` array.
    #[arg(long)]
    pub input_file: Option<PathBuf>,

    /// Use the library template with this label as the input.
    #[arg(long)]
    pub template: Option<String>,

    /// Perturb the chosen template by +1 on every element.
    #[arg(long, requires = "template")]
    pub plus_one: bool,

    /// Generate a uniform random signature.
    #[arg(long)]
    pub random: bool,

    /// Seed for --random.
    #[arg(long, default_value_t = 1)]
    pub probe_seed: u64,

    /// Rejection threshold for the thresholded classifiers.
    #[arg(long, default_value_t = 0.75)]
    pub theta: f64,

    /// Emit JSON instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SignatureFile {
    Bare(Vec<u16>),
    Object { values: Vec<u16> },
}

fn load_input(args: &ProbeArgs, library: &TemplateLibrary) -> Result<(Signature, String)> {
    if let Some(text) = &args.values {
        let values = text
            .split(',')
            .map(|v| v.trim().parse::<u16>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .context("parsing --values (expected comma-separated integers)")?;
        return Ok((
            Signature::new(values, library.vmax())?,
            format!("--values {text}"),
        ));
    }
    if let Some(path) = &args.input_file {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let parsed: SignatureFile =
            serde_json::from_str(&text).context("parsing signature file")?;
        let values = match parsed {
            SignatureFile::Bare(values) | SignatureFile::Object { values } => values,
        };
        return Ok((
            Signature::new(values, library.vmax())?,
            format!("--input-file {}", path.display()),
        ));
    }
    if let Some(label) = &args.template {
        let (_, template) = library
            .templates()
            .iter()
            .find(|(l, _)| l == label)
            .with_context(|| format!("no template labeled '{label}' in the library"))?;
        let mut echo = format!("--template {label}");
        let signature = if args.plus_one {
            echo.push_str(" --plus-one");
            additive_offset(template, 1)
        } else {
            template.clone()
        };
        return Ok((signature, echo));
    }
    if args.random {
        let seed = SeedSpec::new(args.probe_seed, stream_domain::RANDOM_VECTOR).stream(0, 0);
        return Ok((
            random_signature(library.n(), library.vmax(), &seed)?,
            format!("--random --probe-seed {}", args.probe_seed),
        ));
    }
    bail!("no input source given");
}

pub fn run(args: ProbeArgs) -> Result<()> {
    let library = TemplateLibrary::load(&args.lib)?;
    let (input, source_echo) = load_input(&args, &library)?;
    echo_command(&[
        "probe".into(),
        format!("--lib {}", args.lib.display()),
        source_echo,
        format!("--theta {}", args.theta),
    ]);

    let cfg = ClassifierConfig::new(args.theta, Metric::ManhattanSimilarity)?;
    let forced = classify_forced_choice(&input, &library)?;
    let nn = classify_nn_threshold(&input, &library, &cfg)?;
    let modified = classify_modified_dennler(&input, &library, &cfg)?;

    if args.json {
        let doc = serde_json::json!({
            "input": { "values": input.values(), "vmax": input.vmax() },
            "theta": args.theta,
            "outcomes": {
                "forced_choice": forced,
                "nn_threshold": nn,
                "modified_dennler": modified,
            },
        });
        println!("{doc:#}");
        return Ok(());
    }

    println!("input: {} elements, vmax {}", input.len(), input.vmax());
    println!();
    println!("{:<18} {:<20} {}", "classifier", "decision", "reported");
    for (name, outcome) in [
        ("forced_choice", &forced),
        ("nn_threshold", &nn),
        ("modified_dennler", &modified),
    ] {
        println!(
            "{:<18} {:<20} {:.4}",
            name,
            outcome.decision.to_string(),
            outcome.reported_similarity.value()
        );
    }

    // The full score vectors: forced choice reports template-vs-template
    // coefficients, the thresholded classifiers report true input-to-template
    // similarities.
    println!();
    println!(
        "{:<18} {:>14} {:>14} {:>16}",
        "template", "forced_choice", "nn_threshold", "modified_dennler"
    );
    let rows = |o: &ClassificationOutcome, k: usize| o.per_template_scores[k].1.value();
    for (k, (label, _)) in library.templates().iter().enumerate() {
        println!(
            "{:<18} {:>14.4} {:>14.4} {:>16.4}",
            label,
            rows(&forced, k),
            rows(&nn, k),
            rows(&modified, k)
        );
    }
    Ok(())
}
