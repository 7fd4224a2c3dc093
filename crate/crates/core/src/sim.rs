//! Seeded data-generating processes.
//!
//! Randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with a
//! 64-bit integer. Replication `r` of an experiment seeded with `s` uses
//! `s ^ splitmix64(r)`, see [`replication_seed`]. Uniform draws on `(0, 1]`
//! are `1 − U` with `U` uniform on `[0, 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::{default_names, Dataset};
use crate::error::{Error, Result};
use crate::theory::{AdditiveFunction, Component, Term};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r` under base seed `seed`.
pub fn replication_seed(seed: u64, r: u64) -> u64 {
    seed ^ splitmix64(r)
}

/// Uniform on `(0, 1]`.
pub fn uniform_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DgpName {
    Model1,
    Model2,
    Model3,
    Model4,
    Overfit5,
    SimpleLinear,
    Cubic1d,
}

impl DgpName {
    pub const ALL: [DgpName; 7] = [
        DgpName::Model1,
        DgpName::Model2,
        DgpName::Model3,
        DgpName::Model4,
        DgpName::Overfit5,
        DgpName::SimpleLinear,
        DgpName::Cubic1d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DgpName::Model1 => "model1",
            DgpName::Model2 => "model2",
            DgpName::Model3 => "model3",
            DgpName::Model4 => "model4",
            DgpName::Overfit5 => "overfit5",
            DgpName::SimpleLinear => "simple_linear",
            DgpName::Cubic1d => "cubic1d",
        }
    }

    fn required_params(self) -> &'static [&'static str] {
        match self {
            DgpName::SimpleLinear => &["c0", "c1"],
            _ => &[],
        }
    }

    fn optional_params(self) -> &'static [(&'static str, f64)] {
        match self {
            DgpName::Overfit5 => &[("beta", 1.0)],
            DgpName::SimpleLinear => &[("noise_covariates", 0.0)],
            _ => &[],
        }
    }
}

impl fmt::Display for DgpName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DgpName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DgpName::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "data-generating process", name: s.to_string() })
    }
}

/// A named data-generating process with its parameters, sample size and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpSpec {
    pub name: DgpName,
    pub params: BTreeMap<String, f64>,
    pub n: usize,
    pub seed: u64,
}

impl DgpSpec {
    pub fn new(name: DgpName, n: usize, seed: u64) -> Self {
        Self { name, params: BTreeMap::new(), n, seed }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// `simple_linear` with the given intercept and slope.
    pub fn simple_linear(c0: f64, c1: f64, n: usize, seed: u64) -> Self {
        Self::new(DgpName::SimpleLinear, n, seed).with("c0", c0).with("c1", c1)
    }

    fn param(&self, key: &str) -> Result<f64> {
        if let Some(&v) = self.params.get(key) {
            return Ok(v);
        }
        self.name
            .optional_params()
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::invalid(format!("{} needs parameter `{key}`", self.name)))
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        for key in self.name.required_params() {
            self.param(key)?;
        }
        for key in self.params.keys() {
            let known = self.name.required_params().contains(&key.as_str())
                || self.name.optional_params().iter().any(|(k, _)| k == key);
            if !known {
                return Err(Error::invalid(format!("{} has no parameter `{key}`", self.name)));
            }
        }
        for (key, v) in &self.params {
            if !v.is_finite() {
                return Err(Error::invalid(format!("parameter `{key}` is not finite")));
            }
        }
        Ok(())
    }
}

/// Noiseless regression function and covariate layout of a process.
struct Layout {
    g: AdditiveFunction,
    /// Covariates are uniform on `(low, 1]`.
    low: f64,
    noise: Noise,
}

enum Noise {
    None,
    Gaussian(f64),
    /// Standard deviation `scale · x_feature`.
    Heteroskedastic { feature: usize, scale: f64 },
}

fn layout(spec: &DgpSpec) -> Result<Layout> {
    let unit = (0.0, 1.0);
    let pad = |terms: Vec<Component>, p: usize| -> Vec<Term> {
        let mut out: Vec<Term> = terms.into_iter().map(|c| Term::new(c, unit)).collect();
        out.resize_with(p, || Term::new(Component::Zero, unit));
        out
    };
    let layout = match spec.name {
        DgpName::Model1 => Layout {
            g: AdditiveFunction::new(
                0.0,
                pad([10.0, 8.0, 6.0, 2.0].map(|beta| Component::Linear { beta }).to_vec(), 10),
            ),
            low: 0.0,
            noise: Noise::Gaussian(2.0),
        },
        DgpName::Model2 => Layout {
            g: AdditiveFunction::new(
                0.0,
                pad([10.0, 8.0, 6.0, 2.0].map(|beta| Component::Quadratic { beta }).to_vec(), 10),
            ),
            low: 0.0,
            noise: Noise::Gaussian(2.0),
        },
        DgpName::Model3 => Layout {
            g: AdditiveFunction::new(
                0.0,
                pad(
                    vec![
                        Component::Linear { beta: 6.0 },
                        Component::Linear { beta: 10.0 },
                        Component::Step { beta: 8.0, cut: 0.5 },
                        Component::Step { beta: 4.0, cut: 0.6 },
                    ],
                    10,
                ),
            ),
            low: 0.0,
            noise: Noise::Gaussian(2.0),
        },
        DgpName::Model4 => Layout {
            g: AdditiveFunction::new(
                0.0,
                pad(
                    vec![
                        Component::RampAbove { beta: 6.0, cut: 0.5 },
                        Component::Sqrt { beta: 10.0 },
                        Component::SinHalfPi { beta: 8.0 },
                        Component::CosPi { beta: 4.0 },
                    ],
                    10,
                ),
            ),
            low: 0.0,
            noise: Noise::Gaussian(2.0),
        },
        DgpName::Overfit5 => {
            let beta = spec.param("beta")?;
            Layout {
                g: AdditiveFunction::new(
                    0.0,
                    pad(
                        [10.0, 8.0, 6.0].map(|c| Component::Linear { beta: c * beta }).to_vec(),
                        5,
                    ),
                ),
                low: 0.0,
                noise: Noise::Heteroskedastic { feature: 2, scale: 10.0 },
            }
        }
        DgpName::SimpleLinear => {
            let c0 = spec.param("c0")?;
            let c1 = spec.param("c1")?;
            let extra = spec.param("noise_covariates")?;
            if extra < 0.0 || extra.fract() != 0.0 {
                return Err(Error::invalid("noise_covariates must be a non-negative integer"));
            }
            Layout {
                g: AdditiveFunction::new(c0, pad(vec![Component::Linear { beta: c1 }], 1 + extra as usize)),
                low: 0.0,
                noise: Noise::Gaussian(1.0),
            }
        }
        DgpName::Cubic1d => Layout {
            g: AdditiveFunction::new(0.0, vec![Term::new(Component::Cubic { beta: 1.0 }, (-1.0, 1.0))]),
            low: -1.0,
            noise: Noise::None,
        },
    };
    Ok(layout)
}

/// Draws a sample and returns it with the noiseless regression function.
///
/// Rows are drawn one at a time: the `p` covariates in column order, then the
/// noise term.
pub fn generate(spec: &DgpSpec) -> Result<(Dataset, AdditiveFunction)> {
    spec.validate()?;
    let Layout { g, low, noise } = layout(spec)?;
    let p = g.n_features();
    let mut rng = rng_from_seed(spec.seed);
    let mut columns = vec![Vec::with_capacity(spec.n); p];
    let mut response = Vec::with_capacity(spec.n);
    let width = 1.0 - low;
    let mut point = vec![0.0; p];
    for _ in 0..spec.n {
        for (j, x) in point.iter_mut().enumerate() {
            *x = low + width * uniform_open_closed(&mut rng);
            columns[j].push(*x);
        }
        let eps = match noise {
            Noise::None => 0.0,
            Noise::Gaussian(sd) => sd * standard_normal(&mut rng),
            Noise::Heteroskedastic { feature, scale } => scale * point[feature] * standard_normal(&mut rng),
        };
        response.push(g.eval(&point) + eps);
    }
    let data = Dataset::new(columns, response, default_names(p), "y")?;
    Ok((data, g))
}

/// Parses `key=value` parameter strings.
pub fn parse_params<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("parameter `{pair}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("parameter `{pair}` has a non-numeric value")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let (ma, mb) = (mean(a), mean(b));
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn same_seed_same_sample() {
        let spec = DgpSpec::new(DgpName::Model3, 50, 11);
        let (a, _) = generate(&spec).unwrap();
        let (b, _) = generate(&spec).unwrap();
        assert_eq!(a, b);
        let (c, _) = generate(&DgpSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shapes_and_domains() {
        for name in DgpName::ALL {
            let spec = match name {
                DgpName::SimpleLinear => DgpSpec::simple_linear(1.0, 0.5, 200, 1).with("noise_covariates", 4.0),
                _ => DgpSpec::new(name, 200, 1),
            };
            let (d, g) = generate(&spec).unwrap();
            let p = match name {
                DgpName::Overfit5 | DgpName::SimpleLinear => 5,
                DgpName::Cubic1d => 1,
                _ => 10,
            };
            assert_eq!(d.n_features(), p, "{name}");
            assert_eq!(g.n_features(), p, "{name}");
            let low = if name == DgpName::Cubic1d { -1.0 } else { 0.0 };
            for col in d.columns() {
                assert!(col.iter().all(|&x| x > low && x <= 1.0), "{name}");
            }
        }
    }

    #[test]
    fn cubic_is_noiseless() {
        let (d, g) = generate(&DgpSpec::new(DgpName::Cubic1d, 500, 4)).unwrap();
        for i in 0..d.n_rows() {
            let x = d.value(i, 0);
            assert_eq!(d.response()[i], x * x * x);
            assert_eq!(g.eval(&[x]), x * x * x);
        }
    }

    #[test]
    fn pure_noise_is_uncorrelated_with_x() {
        let (d, _) = generate(&DgpSpec::simple_linear(1.0, 0.0, 10_000, 5)).unwrap();
        assert!(correlation(d.column(0), d.response()).abs() < 0.05);
    }

    #[test]
    fn model1_mean_matches_law_of_large_numbers() {
        let (d, _) = generate(&DgpSpec::new(DgpName::Model1, 100_000, 9)).unwrap();
        assert!((mean(d.response()) - 13.0).abs() < 0.1);
    }

    #[test]
    fn residual_variance_matches_noise_model() {
        // Nominal variances: 4 for models 1-4, E[(10 x3)^2] = 100/3 for overfit5,
        // 1 for simple_linear.
        let cases = [
            (DgpSpec::new(DgpName::Model1, 100_000, 1), 4.0),
            (DgpSpec::new(DgpName::Model2, 100_000, 2), 4.0),
            (DgpSpec::new(DgpName::Model3, 100_000, 3), 4.0),
            (DgpSpec::new(DgpName::Model4, 100_000, 4), 4.0),
            (DgpSpec::new(DgpName::Overfit5, 100_000, 5), 100.0 / 3.0),
            (DgpSpec::simple_linear(1.0, 1.0, 100_000, 6), 1.0),
        ];
        for (spec, nominal) in cases {
            let (d, g) = generate(&spec).unwrap();
            let resid: Vec<f64> = (0..d.n_rows()).map(|i| d.response()[i] - g.eval(&d.row(i))).collect();
            let m = mean(&resid);
            let var = resid.iter().map(|r| (r - m).powi(2)).sum::<f64>() / resid.len() as f64;
            assert!((var / nominal - 1.0).abs() < 0.05, "{}: {var} vs {nominal}", spec.name);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(generate(&DgpSpec::new(DgpName::SimpleLinear, 10, 0)).is_err());
        assert!(generate(&DgpSpec::simple_linear(1.0, 1.0, 0, 0)).is_err());
        assert!(generate(&DgpSpec::new(DgpName::Model1, 10, 0).with("beta", 2.0)).is_err());
        assert!("model9".parse::<DgpName>().is_err());
        assert_eq!("overfit5".parse::<DgpName>().unwrap(), DgpName::Overfit5);
    }

    #[test]
    fn parse_params_pairs() {
        let p = parse_params(["c0=1", "c1 = 0.5"]).unwrap();
        assert_eq!(p["c0"], 1.0);
        assert_eq!(p["c1"], 0.5);
        assert!(parse_params(["c0"]).is_err());
        assert!(parse_params(["c0=x"]).is_err());
    }

    #[test]
    fn replication_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|r| replication_seed(42, r)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
