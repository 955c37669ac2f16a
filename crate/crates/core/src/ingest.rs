//! Dataset ingestion: parses wind-tunnel sensor-array trial files into
//! per-trial feature vectors and quantized signatures, and provides a
//! synthetic generator so the whole suite runs without the public dataset.
//!
//! The trial-file column layout is configuration, not code: the parser reads
//! a declared column mapping and ships with a default (whitespace- or
//! comma-delimited rows, column 0 = time, columns 1..=72 = sensors) that must
//! be validated against the dataset documentation on first ingest.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::noise::{stream_domain, SeedSpec};
use crate::signature::{quantize, QuantizerConfig, Signature};
use crate::similarity::manhattan_similarity;

/// Sensor channels in the wind-tunnel array.
pub const SENSOR_CHANNELS: usize = 72;

/// Per-channel scalar feature extracted from a trial's time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureExtractor {
    /// Maximum response over the trial; the simplest concentration-correlated
    /// scalar.
    MaxResponse,
    /// Mean over the sample-index window `[start, end)`.
    MeanSteadyWindow { start: usize, end: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestConfig {
    /// File column -> sensor index; entry `i` is the file column holding
    /// sensor `i`.
    pub sensor_columns: Vec<usize>,
    pub feature: FeatureExtractor,
    pub quantizer: QuantizerConfig,
    pub odorant_filter: Option<String>,
    pub location_filter: Option<String>,
    pub date_filter: Option<String>,
    /// Accepted file extensions (lowercase, no dot).
    pub extensions: Vec<String>,
}

impl IngestConfig {
    /// The documented default mapping: column 0 is time, columns 1..=72 are
    /// the sensors in index order.
    pub fn with_quantizer(quantizer: QuantizerConfig) -> Self {
        IngestConfig {
            sensor_columns: (1..=SENSOR_CHANNELS).collect(),
            feature: FeatureExtractor::MaxResponse,
            quantizer,
            odorant_filter: None,
            location_filter: None,
            date_filter: None,
            extensions: vec!["csv".into(), "dat".into(), "txt".into()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensor_columns.len() != SENSOR_CHANNELS {
            return Err(Error::Config(format!(
                "column mapping must cover exactly {SENSOR_CHANNELS} sensors, got {}",
                self.sensor_columns.len()
            )));
        }
        let mut sorted = self.sensor_columns.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.sensor_columns.len() {
            return Err(Error::Config("column mapping contains duplicates".into()));
        }
        if let FeatureExtractor::MeanSteadyWindow { start, end } = self.feature {
            if start >= end {
                return Err(Error::Config(format!(
                    "steady window [{start}, {end}) is empty"
                )));
            }
        }
        self.quantizer.validate()
    }
}

/// One trial: an odorant presentation recorded across all sensor channels.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub label: String,
    pub location: Option<String>,
    pub date: Option<String>,
    /// `series[channel][t]`, exactly one entry per mapped sensor.
    pub series: Vec<Vec<f64>>,
    pub source: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileIngest {
    pub path: String,
    pub label: String,
    pub lines: usize,
    pub malformed_lines: usize,
    pub skipped: bool,
}

/// Provenance record written next to every ingested library.
#[derive(Debug, Clone, Serialize)]
pub struct IngestManifest {
    pub config_hash: String,
    pub total_warnings: usize,
    pub files: Vec<FileIngest>,
}

#[derive(Debug)]
pub struct IngestOutcome {
    pub trials: Vec<TrialRecord>,
    pub manifest: IngestManifest,
}

/// SHA-256 of the canonical JSON form of the config.
pub fn config_hash(config: &IngestConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Splits a filename stem into (odorant, location, date) on underscores.
fn parse_stem(stem: &str) -> (String, Option<String>, Option<String>) {
    let mut parts = stem.splitn(3, '_');
    let label = parts.next().unwrap_or_default().to_string();
    let location = parts.next().map(str::to_string);
    let date = parts.next().map(str::to_string);
    (label, location, date)
}

#[cfg(feature = "fs")]
pub fn parse_trials(dir: &std::path::Path, config: &IngestConfig) -> Result<IngestOutcome> {
    config.validate()?;
    if !dir.is_dir() {
        return Err(Error::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }

    let mut paths: Vec<PathBuf> = walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|entry| entry.ok())
        .filter(|entry| entry.file_type().is_file())
        .map(|entry| entry.into_path())
        .filter(|path| {
            path.extension()
                .and_then(|e| e.to_str())
                .map(|e| config.extensions.iter().any(|x| x == &e.to_lowercase()))
                .unwrap_or(false)
        })
        .collect();
    // Merge order is sorted filename order, independent of directory walk
    // order.
    paths.sort();

    let max_column = *config.sensor_columns.iter().max().expect("mapping non-empty");
    let mut trials = Vec::new();
    let mut files = Vec::new();
    let mut total_warnings = 0usize;

    for path in paths {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        let (label, location, date) = parse_stem(stem);
        if let Some(filter) = &config.odorant_filter {
            if &label != filter {
                continue;
            }
        }
        if let Some(filter) = &config.location_filter {
            if location.as_deref() != Some(filter.as_str()) {
                continue;
            }
        }
        if let Some(filter) = &config.date_filter {
            if date.as_deref() != Some(filter.as_str()) {
                continue;
            }
        }

        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) => {
                total_warnings += 1;
                files.push(FileIngest {
                    path: path.display().to_string(),
                    label,
                    lines: 0,
                    malformed_lines: 0,
                    skipped: true,
                });
                let _ = err;
                continue;
            }
        };

        let mut series: Vec<Vec<f64>> = vec![Vec::new(); SENSOR_CHANNELS];
        let mut lines = 0usize;
        let mut malformed = 0usize;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            lines += 1;
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if fields.len() <= max_column {
                malformed += 1;
                continue;
            }
            let mut row = Vec::with_capacity(SENSOR_CHANNELS);
            let mut ok = true;
            for &col in &config.sensor_columns {
                match fields[col].parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(v),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                malformed += 1;
                continue;
            }
            for (channel, value) in row.into_iter().enumerate() {
                series[channel].push(value);
            }
        }

        let parsed_rows = series[0].len();
        total_warnings += malformed;
        if parsed_rows == 0 {
            // Zero parseable rows: per-file parse error, file skipped and
            // counted.
            total_warnings += 1;
            files.push(FileIngest {
                path: path.display().to_string(),
                label,
                lines,
                malformed_lines: malformed,
                skipped: true,
            });
            continue;
        }

        files.push(FileIngest {
            path: path.display().to_string(),
            label: label.clone(),
            lines,
            malformed_lines: malformed,
            skipped: false,
        });
        trials.push(TrialRecord {
            label,
            location,
            date,
            series,
            source: path,
        });
    }

    Ok(IngestOutcome {
        trials,
        manifest: IngestManifest {
            config_hash: config_hash(config),
            total_warnings,
            files,
        },
    })
}

/// Extracts the per-channel scalar feature and quantizes it.
pub fn featurize(trial: &TrialRecord, config: &IngestConfig) -> Result<Signature> {
    config.validate()?;
    if trial.series.len() != config.sensor_columns.len() {
        return Err(Error::LengthMismatch {
            left: config.sensor_columns.len(),
            right: trial.series.len(),
        });
    }
    let mut features = Vec::with_capacity(trial.series.len());
    for (channel, samples) in trial.series.iter().enumerate() {
        if samples.is_empty() {
            return Err(Error::Data {
                channel,
                message: "empty time series".into(),
            });
        }
        let value = match config.feature {
            FeatureExtractor::MaxResponse => samples.iter().copied().fold(f64::MIN, f64::max),
            FeatureExtractor::MeanSteadyWindow { start, end } => {
                if end > samples.len() {
                    return Err(Error::Data {
                        channel,
                        message: format!(
                            "steady window end {end} exceeds series length {}",
                            samples.len()
                        ),
                    });
                }
                let window = &samples[start..end];
                window.iter().sum::<f64>() / window.len() as f64
            }
        };
        features.push(value);
    }
    quantize(&features, &config.quantizer)
}

/// Parameters for the synthetic dataset generator.
#[derive(Debug, Clone, Copy)]
pub struct SynthesisOptions {
    pub num_odorants: usize,
    pub trials_per_odorant: usize,
    pub n: usize,
    pub vmax: u16,
    /// Required pairwise Manhattan similarity bound between prototypes
    /// (strict).
    pub separation_bound: f64,
    /// Per-element probability of a +/-1 jitter step in each trial.
    pub jitter_rate: f64,
}

impl SynthesisOptions {
    pub fn new(num_odorants: usize, trials_per_odorant: usize, n: usize, vmax: u16) -> Self {
        SynthesisOptions {
            num_odorants,
            trials_per_odorant,
            n,
            vmax,
            separation_bound: 0.5,
            jitter_rate: 0.25,
        }
    }
}

/// Odorant vocabulary of the wind-tunnel dataset, in sorted order; indexes
/// past the vocabulary fall back to numbered labels.
const ODORANT_NAMES: [&str; 10] = [
    "acetaldehyde",
    "acetone",
    "ammonia",
    "benzene",
    "butanol",
    "carbon_monoxide",
    "ethylene",
    "methane",
    "methanol",
    "toluene",
];

fn odorant_label(index: usize) -> String {
    ODORANT_NAMES
        .get(index)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("odorant_{index:02}"))
}

/// Generates a labeled synthetic dataset: well-separated prototypes plus
/// small per-trial jitter, deterministic in the seed.
///
/// Prototype elements take the two extreme levels `0` and `vmax - 1`; the
/// headroom below `vmax` keeps additive `+1` probes saturation-free. A seeded
/// repair loop then pushes prototypes apart until every pair satisfies the
/// separation bound, erroring out if the bound is unattainable.
pub fn synthesize_dataset(
    num_odorants: usize,
    trials_per_odorant: usize,
    n: usize,
    vmax: u16,
    seed: u64,
) -> Result<BTreeMap<String, Vec<Signature>>> {
    synthesize_dataset_with(
        &SynthesisOptions::new(num_odorants, trials_per_odorant, n, vmax),
        seed,
    )
}

pub fn synthesize_dataset_with(
    opts: &SynthesisOptions,
    seed: u64,
) -> Result<BTreeMap<String, Vec<Signature>>> {
    if opts.num_odorants == 0 || opts.trials_per_odorant == 0 || opts.n == 0 {
        return Err(Error::Config(
            "synthesis counts must all be at least 1".into(),
        ));
    }
    if opts.vmax < 2 {
        return Err(Error::Config(
            "synthesis needs vmax >= 2 to leave +1 headroom below the bound".into(),
        ));
    }
    if !(0.0..=1.0).contains(&opts.separation_bound) || !(0.0..=1.0).contains(&opts.jitter_rate) {
        return Err(Error::Config(
            "separation bound and jitter rate must lie in [0, 1]".into(),
        ));
    }

    let mut labels: Vec<String> = (0..opts.num_odorants).map(odorant_label).collect();
    labels.sort();

    // Prototypes draw from one stream; jitter for odorant o, trial t draws
    // from stream (o + 1, t).
    let mut rng = SeedSpec::new(seed, stream_domain::SYNTHESIS).stream(0, 0).rng();
    let prototypes = generate_prototypes(opts, &mut rng)?;

    let hi = opts.vmax - 1;
    let mut dataset = BTreeMap::new();
    for (o, label) in labels.iter().enumerate() {
        let mut trials = Vec::with_capacity(opts.trials_per_odorant);
        for t in 0..opts.trials_per_odorant {
            let mut jitter_rng = SeedSpec::new(seed, stream_domain::SYNTHESIS)
                .stream(o as u64 + 1, t as u64)
                .rng();
            let values: Vec<u16> = prototypes[o]
                .iter()
                .map(|&v| {
                    if opts.jitter_rate > 0.0 && jitter_rng.gen_bool(opts.jitter_rate) {
                        let up = jitter_rng.gen_bool(0.5);
                        if up {
                            (v + 1).min(hi)
                        } else {
                            v.saturating_sub(1)
                        }
                    } else {
                        v
                    }
                })
                .collect();
            trials.push(Signature::new(values, opts.vmax)?);
        }
        dataset.insert(label.clone(), trials);
    }
    Ok(dataset)
}

/// Balanced split families over at most ten points, encoded as membership
/// bitmasks. Every pair of points is cut (separated) by the same number of
/// splits: 2 of 3 for the small family, 10 of 18 for the large one.
fn split_family(num_points: usize) -> Vec<u16> {
    if num_points <= 4 {
        // The three balanced splits of {0..3}.
        return vec![0b0011, 0b0101, 0b1001];
    }
    // Translates over Z9 of {inf, 0, 1, 3, 7} and {0, 2, 3, 4, 8}, with the
    // extra point mapped to index 9. Every pair of the ten points lies on the
    // same side in exactly 8 of the 18 blocks.
    let mut blocks = Vec::with_capacity(18);
    for i in 0..9u16 {
        let mut mask = 1u16 << 9;
        for a in [0u16, 1, 3, 7] {
            mask |= 1 << ((a + i) % 9);
        }
        blocks.push(mask);
    }
    for i in 0..9u16 {
        let mut mask = 0u16;
        for c in [0u16, 2, 3, 4, 8] {
            mask |= 1 << ((c + i) % 9);
        }
        blocks.push(mask);
    }
    blocks
}

/// Lays out well-separated two-level prototypes.
///
/// Columns cycle through a balanced split family; each prototype reads its
/// side of the split (seeded orientation flip per column, seeded assignment
/// of prototypes to split points). At the default geometry (10 prototypes,
/// n = 72, vmax = 15) every pair disagrees in exactly 40 positions, for a
/// pairwise similarity of 1 - 40*14/1080 ~ 0.481. Geometries the layout
/// cannot separate fall back to bounded random restarts and then error.
fn generate_prototypes(
    opts: &SynthesisOptions,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<Vec<Vec<u16>>> {
    let hi = opts.vmax - 1;
    let satisfies_bound = |protos: &[Vec<u16>]| -> bool {
        let sigs: Vec<Signature> = protos
            .iter()
            .map(|v| Signature::new(v.clone(), opts.vmax).expect("in bounds"))
            .collect();
        for j in 0..sigs.len() {
            for k in (j + 1)..sigs.len() {
                let sim = manhattan_similarity(&sigs[j], &sigs[k])
                    .expect("shapes agree")
                    .value();
                if sim >= opts.separation_bound {
                    return false;
                }
            }
        }
        true
    };

    if opts.num_odorants <= 10 {
        let family = split_family(opts.num_odorants);
        let num_points = if opts.num_odorants <= 4 { 4 } else { 10 };
        let mut points: Vec<u16> = (0..num_points as u16).collect();
        shuffle(&mut points, rng);
        let assigned = &points[..opts.num_odorants];

        let mut prototypes = vec![Vec::with_capacity(opts.n); opts.num_odorants];
        for col in 0..opts.n {
            let mask = family[col % family.len()];
            let flip = rng.gen_bool(0.5);
            for (p, &point) in assigned.iter().enumerate() {
                let in_block = (mask >> point) & 1 == 1;
                prototypes[p].push(if in_block != flip { hi } else { 0 });
            }
        }
        if satisfies_bound(&prototypes) {
            return Ok(prototypes);
        }
    }

    // Fresh seeded draws for geometries off the layout's sweet spot.
    for _ in 0..512 {
        let candidate: Vec<Vec<u16>> = (0..opts.num_odorants)
            .map(|_| {
                (0..opts.n)
                    .map(|_| if rng.gen_bool(0.5) { hi } else { 0 })
                    .collect()
            })
            .collect();
        if satisfies_bound(&candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::Config(format!(
        "could not reach pairwise similarity < {} for {} prototypes of length {} at vmax {}",
        opts.separation_bound, opts.num_odorants, opts.n, opts.vmax
    )))
}

/// Fisher-Yates; rand's slice shuffle lives behind features we do not pull in.
fn shuffle<T>(items: &mut [T], rng: &mut rand_chacha::ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::build_library;

    fn default_config() -> IngestConfig {
        IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 16.0).unwrap())
    }

    #[test]
    fn config_validation_catches_bad_mappings() {
        let mut cfg = default_config();
        cfg.sensor_columns.pop();
        assert!(cfg.validate().is_err());

        let mut cfg = default_config();
        cfg.sensor_columns[0] = cfg.sensor_columns[1];
        assert!(cfg.validate().is_err());

        let mut cfg = default_config();
        cfg.feature = FeatureExtractor::MeanSteadyWindow { start: 5, end: 5 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn featurize_is_deterministic_and_uses_max() {
        let cfg = default_config();
        let mut series = vec![vec![0.0, 1.0, 0.5]; SENSOR_CHANNELS];
        series[3] = vec![0.0, 7.9, 2.0];
        let trial = TrialRecord {
            label: "acetone".into(),
            location: None,
            date: None,
            series,
            source: PathBuf::from("inline"),
        };
        let a = featurize(&trial, &cfg).unwrap();
        let b = featurize(&trial, &cfg).unwrap();
        assert_eq!(a, b);
        // Peak 7.9 under min=0, max=16, 16 levels -> level 7.
        assert_eq!(a.values()[3], 7);
        assert_eq!(a.values()[0], 1);
    }

    #[test]
    fn featurize_constant_at_max_hits_vmax() {
        let cfg = default_config();
        let trial = TrialRecord {
            label: "x".into(),
            location: None,
            date: None,
            series: vec![vec![16.0; 4]; SENSOR_CHANNELS],
            source: PathBuf::from("inline"),
        };
        let s = featurize(&trial, &cfg).unwrap();
        assert!(s.values().iter().all(|&v| v == 15));
    }

    #[test]
    fn featurize_names_the_empty_channel() {
        let cfg = default_config();
        let mut series = vec![vec![1.0]; SENSOR_CHANNELS];
        series[41].clear();
        let trial = TrialRecord {
            label: "x".into(),
            location: None,
            date: None,
            series,
            source: PathBuf::from("inline"),
        };
        match featurize(&trial, &cfg) {
            Err(Error::Data { channel, .. }) => assert_eq!(channel, 41),
            other => panic!("expected data error, got {other:?}"),
        }
    }

    #[test]
    fn steady_window_mean_feature() {
        let mut cfg = default_config();
        cfg.feature = FeatureExtractor::MeanSteadyWindow { start: 1, end: 3 };
        let mut series = vec![vec![0.0, 2.0, 4.0, 100.0]; SENSOR_CHANNELS];
        series[0] = vec![0.0, 8.0, 8.0, 100.0];
        let trial = TrialRecord {
            label: "x".into(),
            location: None,
            date: None,
            series,
            source: PathBuf::from("inline"),
        };
        let s = featurize(&trial, &cfg).unwrap();
        assert_eq!(s.values()[0], 8);
        assert_eq!(s.values()[1], 3);
    }

    #[test]
    fn synthetic_prototypes_satisfy_separation_bound() {
        for seed in [1u64, 2, 3, 4, 5] {
            let dataset = synthesize_dataset(10, 1, 72, 15, seed).unwrap();
            let lib = build_library(&dataset, seed).unwrap();
            for j in 0..lib.len() {
                for k in (j + 1)..lib.len() {
                    let sim = manhattan_similarity(lib.get(j).unwrap().1, lib.get(k).unwrap().1)
                        .unwrap()
                        .value();
                    // Jitter is +/-1 per member, so trial-to-trial similarity
                    // stays close to the prototype bound.
                    assert!(
                        sim < 0.55,
                        "seed {seed}: templates {j},{k} too similar ({sim})"
                    );
                }
            }
        }
    }

    #[test]
    fn synthetic_prototype_separation_exact_on_prototypes() {
        // Zero jitter exposes the prototypes themselves.
        let mut opts = SynthesisOptions::new(10, 1, 72, 15);
        opts.jitter_rate = 0.0;
        for seed in [7u64, 8, 9, 10, 11] {
            let dataset = synthesize_dataset_with(&opts, seed).unwrap();
            let sigs: Vec<&Signature> = dataset.values().map(|v| &v[0]).collect();
            for j in 0..sigs.len() {
                for k in (j + 1)..sigs.len() {
                    let sim = manhattan_similarity(sigs[j], sigs[k]).unwrap().value();
                    assert!(sim < 0.5, "seed {seed}: pair {j},{k} at {sim}");
                }
            }
        }
    }

    #[test]
    fn synthetic_dataset_is_seed_deterministic_and_headroomed() {
        let a = synthesize_dataset(10, 20, 72, 15, 42).unwrap();
        let b = synthesize_dataset(10, 20, 72, 15, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        assert!(a.keys().next().unwrap() < a.keys().last().unwrap());
        for trials in a.values() {
            assert_eq!(trials.len(), 20);
            for t in trials {
                assert!(t.max_value() <= 14, "values must leave +1 headroom");
            }
        }
    }

    #[test]
    fn synthesis_rejects_impossible_requests() {
        assert!(synthesize_dataset(0, 1, 72, 15, 1).is_err());
        assert!(synthesize_dataset(10, 0, 72, 15, 1).is_err());
        assert!(synthesize_dataset(10, 1, 0, 15, 1).is_err());
        assert!(synthesize_dataset(10, 1, 72, 1, 1).is_err());

        // Bound 0 can never hold for more than one prototype.
        let mut opts = SynthesisOptions::new(3, 1, 8, 15);
        opts.separation_bound = 0.0;
        assert!(synthesize_dataset_with(&opts, 1).is_err());
    }

    #[test]
    fn config_hash_tracks_config_changes() {
        let a = default_config();
        let mut b = default_config();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.feature = FeatureExtractor::MeanSteadyWindow { start: 0, end: 4 };
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}

#[cfg(all(test, feature = "fs"))]
mod fs_tests {
    use super::*;

    /// Writes a fixture trial file: 73 columns (time + 72 sensors),
    /// whitespace-delimited.
    fn write_fixture(dir: &std::path::Path, name: &str, rows: &[Vec<f64>]) {
        let mut text = String::new();
        for row in rows {
            let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            text.push_str(&fields.join(" "));
            text.push('\n');
        }
        std::fs::write(dir.join(name), text).unwrap();
    }

    fn fixture_row(t: f64, base: f64) -> Vec<f64> {
        let mut row = vec![t];
        row.extend((0..SENSOR_CHANNELS).map(|c| base + c as f64));
        row
    }

    #[test]
    fn empty_directory_parses_to_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 16.0).unwrap());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert!(out.trials.is_empty());
        assert_eq!(out.manifest.total_warnings, 0);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 16.0).unwrap());
        assert!(matches!(
            parse_trials(std::path::Path::new("/nonexistent/enose"), &cfg),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn fixture_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![fixture_row(0.0, 1.5), fixture_row(1.0, 2.25)];
        write_fixture(dir.path(), "toluene_L4_20110115.csv", &rows);

        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 100.0).unwrap());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert_eq!(out.trials.len(), 1);
        let trial = &out.trials[0];
        assert_eq!(trial.label, "toluene");
        assert_eq!(trial.location.as_deref(), Some("L4"));
        assert_eq!(trial.date.as_deref(), Some("20110115"));
        for (channel, series) in trial.series.iter().enumerate() {
            assert_eq!(series, &vec![1.5 + channel as f64, 2.25 + channel as f64]);
        }
        assert_eq!(out.manifest.total_warnings, 0);
    }

    #[test]
    fn corrupt_line_is_skipped_with_one_warning() {
        let dir = tempfile::tempdir().unwrap();
        let mut rows = vec![fixture_row(0.0, 1.0)];
        rows.push(fixture_row(1.0, 2.0));
        write_fixture(dir.path(), "acetone_L1.dat", &rows);
        // Append one corrupt line.
        let path = dir.path().join("acetone_L1.dat");
        let mut text = std::fs::read_to_string(&path).unwrap();
        text.push_str("0.5 garbage\n");
        std::fs::write(&path, text).unwrap();

        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 100.0).unwrap());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert_eq!(out.trials.len(), 1, "trial is retained");
        assert_eq!(out.manifest.total_warnings, 1);
        assert_eq!(out.manifest.files[0].malformed_lines, 1);
        assert_eq!(out.trials[0].series[0].len(), 2);
    }

    #[test]
    fn unparseable_file_is_skipped_and_logged() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("benzene_L2.csv"), "not numbers at all\n").unwrap();
        write_fixture(dir.path(), "toluene_L1.csv", &[fixture_row(0.0, 3.0)]);

        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 100.0).unwrap());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert_eq!(out.trials.len(), 1);
        let skipped: Vec<_> = out.manifest.files.iter().filter(|f| f.skipped).collect();
        assert_eq!(skipped.len(), 1);
        assert!(skipped[0].path.contains("benzene"));
        // One malformed line plus the skipped-file warning.
        assert_eq!(out.manifest.total_warnings, 2);
    }

    #[test]
    fn filters_select_matching_files_only() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), "toluene_L1_1.csv", &[fixture_row(0.0, 1.0)]);
        write_fixture(dir.path(), "toluene_L2_1.csv", &[fixture_row(0.0, 1.0)]);
        write_fixture(dir.path(), "acetone_L1_1.csv", &[fixture_row(0.0, 1.0)]);

        let mut cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 100.0).unwrap());
        cfg.odorant_filter = Some("toluene".into());
        cfg.location_filter = Some("L1".into());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert_eq!(out.trials.len(), 1);
        assert_eq!(out.trials[0].label, "toluene");

        cfg.odorant_filter = Some("nonexistent".into());
        let out = parse_trials(dir.path(), &cfg).unwrap();
        assert!(out.trials.is_empty());
        assert_eq!(out.manifest.total_warnings, 0);
    }

    #[test]
    fn parse_then_featurize_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "methane_L3.csv",
            &[fixture_row(0.0, 0.5), fixture_row(1.0, 7.0)],
        );
        let cfg = IngestConfig::with_quantizer(QuantizerConfig::new(16, 0.0, 100.0).unwrap());
        let one = parse_trials(dir.path(), &cfg).unwrap();
        let two = parse_trials(dir.path(), &cfg).unwrap();
        let a = featurize(&one.trials[0], &cfg).unwrap();
        let b = featurize(&two.trials[0], &cfg).unwrap();
        assert_eq!(a, b);
    }
}
