//! Quantized sensor signatures and the labeled template library.
//!
//! A [`Signature`] is the unit everything downstream operates on: a
//! fixed-length vector of quantized integer sensor levels, compared
//! element-wise by exact equality (never floating point). A
//! [`TemplateLibrary`] is an ordered set of labeled signatures sharing one
//! length `n` and one level bound `vmax`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{stream_domain, SeedSpec};

/// A fixed-length vector of quantized sensor levels in `[0, vmax]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    values: Vec<u16>,
    vmax: u16,
}

impl Signature {
    /// Validates bounds: every value must lie in `[0, vmax]` and the vector
    /// must be non-empty.
    pub fn new(values: Vec<u16>, vmax: u16) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("signature must not be empty".into()));
        }
        for (index, &value) in values.iter().enumerate() {
            if value > vmax {
                return Err(Error::ValueOutOfRange { index, value, vmax });
            }
        }
        Ok(Signature { values, vmax })
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vmax(&self) -> u16 {
        self.vmax
    }

    pub fn max_value(&self) -> u16 {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

/// Maps raw real-valued features onto `levels` integer bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    pub levels: u32,
    pub feature_min: f64,
    pub feature_max: f64,
}

impl QuantizerConfig {
    pub fn new(levels: u32, feature_min: f64, feature_max: f64) -> Result<Self> {
        let cfg = QuantizerConfig {
            levels,
            feature_min,
            feature_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::Config(format!(
                "quantizer needs at least 2 levels, got {}",
                self.levels
            )));
        }
        if self.levels > u16::MAX as u32 + 1 {
            return Err(Error::Config(format!(
                "quantizer supports at most {} levels, got {}",
                u16::MAX as u32 + 1,
                self.levels
            )));
        }
        if !self.feature_min.is_finite()
            || !self.feature_max.is_finite()
            || self.feature_min >= self.feature_max
        {
            return Err(Error::Config(format!(
                "quantizer range [{}, {}] invalid: need finite feature_min < feature_max",
                self.feature_min, self.feature_max
            )));
        }
        Ok(())
    }

    /// Highest level produced by this quantizer.
    pub fn vmax(&self) -> u16 {
        (self.levels - 1) as u16
    }
}

/// Bins a raw feature vector: out-of-range features are clipped (real sensor
/// data has outliers), then `floor((x - min) / (max - min) * levels)` clamped
/// to `levels - 1`.
pub fn quantize(features: &[f64], config: &QuantizerConfig) -> Result<Signature> {
    config.validate()?;
    let span = config.feature_max - config.feature_min;
    let mut values = Vec::with_capacity(features.len());
    for (index, &x) in features.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFiniteFeature { index });
        }
        let clipped = x.clamp(config.feature_min, config.feature_max);
        let raw = ((clipped - config.feature_min) / span * config.levels as f64).floor();
        let level = (raw as i64).clamp(0, config.levels as i64 - 1) as u16;
        values.push(level);
    }
    Signature::new(values, config.vmax())
}

/// Midpoint of each occupied bin, the left inverse used to state the
/// requantization-idempotence property.
pub fn dequantize_midpoint(s: &Signature, config: &QuantizerConfig) -> Result<Vec<f64>> {
    config.validate()?;
    if s.vmax() != config.vmax() {
        return Err(Error::VmaxMismatch {
            left: s.vmax(),
            right: config.vmax(),
        });
    }
    let width = (config.feature_max - config.feature_min) / config.levels as f64;
    Ok(s.values()
        .iter()
        .map(|&v| config.feature_min + (v as f64 + 0.5) * width)
        .collect())
}

/// Ordered set of labeled templates sharing one `n` and one `vmax`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateLibrary {
    n: usize,
    vmax: u16,
    templates: Vec<(String, Signature)>,
}

impl TemplateLibrary {
    /// Validates the shared-shape and unique-label invariants.
    pub fn new(templates: Vec<(String, Signature)>) -> Result<Self> {
        let (first_label, first) = templates
            .first()
            .ok_or_else(|| Error::Config("template library must not be empty".into()))?;
        let n = first.len();
        let vmax = first.vmax();
        let _ = first_label;
        for (label, sig) in &templates {
            if sig.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: sig.len(),
                });
            }
            if sig.vmax() != vmax {
                return Err(Error::VmaxMismatch {
                    left: vmax,
                    right: sig.vmax(),
                });
            }
            let duplicates = templates.iter().filter(|(l, _)| l == label).count();
            if duplicates != 1 {
                return Err(Error::Config(format!("duplicate template label '{label}'")));
            }
        }
        Ok(TemplateLibrary { n, vmax, templates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vmax(&self) -> u16 {
        self.vmax
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn templates(&self) -> &[(String, Signature)] {
        &self.templates
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.templates.iter().map(|(l, _)| l.as_str())
    }

    pub fn get(&self, index: usize) -> Option<(&str, &Signature)> {
        self.templates.get(index).map(|(l, s)| (l.as_str(), s))
    }

    /// Highest value stored anywhere in the library.
    pub fn max_value(&self) -> u16 {
        self.templates
            .iter()
            .map(|(_, s)| s.max_value())
            .max()
            .unwrap_or(0)
    }

    /// Membership check used when an input signature meets the library.
    pub fn check_compatible(&self, s: &Signature) -> Result<()> {
        if s.len() != self.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: s.len(),
            });
        }
        if s.vmax() != self.vmax {
            return Err(Error::VmaxMismatch {
                left: self.vmax,
                right: s.vmax(),
            });
        }
        Ok(())
    }

    /// Serializes to the interchange document. Field order is fixed
    /// (`n`, `vmax`, `templates`) so output is byte-stable.
    pub fn to_json_string(&self) -> Result<String> {
        let doc = LibraryDoc {
            n: self.n,
            vmax: self.vmax,
            templates: self
                .templates
                .iter()
                .map(|(label, sig)| TemplateDoc {
                    label: label.clone(),
                    values: sig.values().to_vec(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&doc)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: LibraryDoc = serde_json::from_str(text)?;
        let templates = doc
            .templates
            .into_iter()
            .map(|t| Ok((t.label, Signature::new(t.values, doc.vmax)?)))
            .collect::<Result<Vec<_>>>()?;
        let lib = TemplateLibrary::new(templates)?;
        if lib.n() != doc.n {
            return Err(Error::LengthMismatch {
                left: doc.n,
                right: lib.n(),
            });
        }
        Ok(lib)
    }

    #[cfg(feature = "fs")]
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    #[cfg(feature = "fs")]
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct LibraryDoc {
    n: usize,
    vmax: u16,
    templates: Vec<TemplateDoc>,
}

#[derive(Serialize, Deserialize)]
struct TemplateDoc {
    label: String,
    values: Vec<u16>,
}

/// Builds a library by drawing exactly one signature per label, uniformly at
/// random from that label's candidates.
///
/// Labels are processed in sorted order and label index `i` draws from the
/// stream `(seed, LIBRARY, 0, i)`, so the outcome is a function of
/// `(samples, seed)` only.
pub fn build_library(samples: &BTreeMap<String, Vec<Signature>>, seed: u64) -> Result<TemplateLibrary> {
    let mut templates = Vec::with_capacity(samples.len());
    for (i, (label, candidates)) in samples.iter().enumerate() {
        if candidates.is_empty() {
            return Err(Error::Config(format!(
                "no candidate signatures for label '{label}'"
            )));
        }
        let mut rng = SeedSpec::new(seed, stream_domain::LIBRARY)
            .stream(0, i as u64)
            .rng();
        let idx = rng.gen_range(0..candidates.len());
        templates.push((label.clone(), candidates[idx].clone()));
    }
    TemplateLibrary::new(templates)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(levels: u32, min: f64, max: f64) -> QuantizerConfig {
        QuantizerConfig::new(levels, min, max).unwrap()
    }

    #[test]
    fn quantize_clips_at_both_ends() {
        let c = cfg(16, 0.0, 16.0);
        let lo = quantize(&[0.0, -3.0, 0.0], &c).unwrap();
        assert_eq!(lo.values(), &[0, 0, 0]);
        let hi = quantize(&[16.0, 99.0, 16.0], &c).unwrap();
        assert_eq!(hi.values(), &[15, 15, 15]);
    }

    #[test]
    fn quantize_floor_formula() {
        // floor(7.9 / 16 * 16) = 7
        let c = cfg(16, 0.0, 16.0);
        let s = quantize(&[7.9], &c).unwrap();
        assert_eq!(s.values(), &[7]);
    }

    #[test]
    fn quantize_rejects_non_finite() {
        let c = cfg(16, 0.0, 1.0);
        assert!(matches!(
            quantize(&[0.5, f64::NAN], &c),
            Err(Error::NonFiniteFeature { index: 1 })
        ));
        assert!(quantize(&[f64::INFINITY], &c).is_err());
    }

    #[test]
    fn quantizer_config_validation() {
        assert!(QuantizerConfig::new(1, 0.0, 1.0).is_err());
        assert!(QuantizerConfig::new(16, 1.0, 1.0).is_err());
        assert!(QuantizerConfig::new(16, 2.0, 1.0).is_err());
        assert!(QuantizerConfig::new(16, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn signature_rejects_out_of_range_values() {
        assert!(Signature::new(vec![0, 16], 15).is_err());
        assert!(Signature::new(vec![], 15).is_err());
        assert!(Signature::new(vec![0, 15], 15).is_ok());
    }

    #[test]
    fn library_enforces_shared_shape_and_unique_labels() {
        let a = Signature::new(vec![1, 2, 3], 15).unwrap();
        let b = Signature::new(vec![1, 2], 15).unwrap();
        let c = Signature::new(vec![1, 2, 3], 7).unwrap();

        assert!(TemplateLibrary::new(vec![]).is_err());
        assert!(TemplateLibrary::new(vec![("x".into(), a.clone()), ("y".into(), b)]).is_err());
        assert!(TemplateLibrary::new(vec![("x".into(), a.clone()), ("y".into(), c)]).is_err());
        assert!(TemplateLibrary::new(vec![("x".into(), a.clone()), ("x".into(), a.clone())]).is_err());

        let lib = TemplateLibrary::new(vec![("x".into(), a.clone()), ("y".into(), a)]).unwrap();
        assert_eq!(lib.n(), 3);
        assert_eq!(lib.vmax(), 15);
        assert_eq!(lib.len(), 2);
    }

    #[test]
    fn library_json_round_trip_is_byte_stable() {
        let a = Signature::new(vec![0, 5, 15], 15).unwrap();
        let b = Signature::new(vec![3, 3, 3], 15).unwrap();
        let lib = TemplateLibrary::new(vec![("ammonia".into(), a), ("toluene".into(), b)]).unwrap();

        let text = lib.to_json_string().unwrap();
        let parsed = TemplateLibrary::from_json_str(&text).unwrap();
        assert_eq!(parsed, lib);
        assert_eq!(parsed.to_json_string().unwrap(), text);

        // Field order is part of the format.
        let n_pos = text.find("\"n\"").unwrap();
        let vmax_pos = text.find("\"vmax\"").unwrap();
        let templates_pos = text.find("\"templates\"").unwrap();
        assert!(n_pos < vmax_pos && vmax_pos < templates_pos);
    }

    #[test]
    fn build_library_singleton_choice_ignores_seed() {
        let sig = Signature::new(vec![1, 2, 3], 15).unwrap();
        let mut samples = BTreeMap::new();
        samples.insert("only".to_string(), vec![sig.clone()]);
        for seed in [0u64, 1, 999] {
            let lib = build_library(&samples, seed).unwrap();
            assert_eq!(lib.get(0).unwrap().1, &sig);
        }
    }

    #[test]
    fn build_library_is_deterministic() {
        let mut samples = BTreeMap::new();
        for label in ["a", "b", "c"] {
            let candidates = (0..20)
                .map(|v| Signature::new(vec![v, v, v], 63).unwrap())
                .collect();
            samples.insert(label.to_string(), candidates);
        }
        let one = build_library(&samples, 42).unwrap();
        let two = build_library(&samples, 42).unwrap();
        assert_eq!(one, two);
        assert_eq!(
            one.to_json_string().unwrap(),
            two.to_json_string().unwrap()
        );
    }

    #[test]
    fn build_library_matches_reference_draw() {
        // Oracle: re-implement the documented derivation (SplitMix64 finalizer
        // chain feeding ChaCha8) without calling SeedSpec.
        fn mix(mut z: u64) -> u64 {
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }
        fn reference_stream_seed(base: u64, domain: u64, sim: u64, sample: u64) -> u64 {
            const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
            let mut acc = mix(base ^ GAMMA);
            for w in [domain, sim, sample] {
                acc = mix(acc.wrapping_add(GAMMA) ^ w);
            }
            acc
        }

        let seed = 7u64;
        let mut samples = BTreeMap::new();
        let labels: Vec<String> = (0..10).map(|i| format!("odorant_{i:02}")).collect();
        for (li, label) in labels.iter().enumerate() {
            let candidates: Vec<Signature> = (0..20)
                .map(|t| Signature::new(vec![(li * 20 + t) as u16; 4], 255).unwrap())
                .collect();
            samples.insert(label.clone(), candidates);
        }

        let lib = build_library(&samples, seed).unwrap();
        for (i, label) in labels.iter().enumerate() {
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(reference_stream_seed(
                seed, 1, // stream_domain::LIBRARY
                0, i as u64,
            ));
            let expect_idx = rng.gen_range(0..20usize);
            let expected = &samples[label][expect_idx];
            assert_eq!(lib.get(i).unwrap().1, expected, "label {label}");
        }
    }

    #[test]
    fn dequantize_midpoint_then_requantize_is_identity() {
        let c = cfg(16, -4.0, 12.0);
        let s = quantize(&[-4.0, 0.0, 3.7, 11.9, 12.0], &c).unwrap();
        let mid = dequantize_midpoint(&s, &c).unwrap();
        let again = quantize(&mid, &c).unwrap();
        assert_eq!(again, s);
    }
}
