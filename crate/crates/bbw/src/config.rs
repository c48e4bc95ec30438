//! Experiment configuration files.

use std::path::Path;

use bbw_core::{min_knots, KnotGrid, KnotHierarchy, SmoothFamily, SmoothFunction};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One member of a building family, or a projection target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Power { degree: u32 },
    Sin { freq: f64 },
    Cos { freq: f64 },
    Exp { rate: f64 },
    CenteredPower { degree: u32, center: f64 },
}

impl FunctionSpec {
    pub fn to_function(&self) -> SmoothFunction {
        match *self {
            FunctionSpec::Power { degree } => SmoothFunction::power(degree),
            FunctionSpec::Sin { freq } => SmoothFunction::sine(freq),
            FunctionSpec::Cos { freq } => SmoothFunction::cosine(freq),
            FunctionSpec::Exp { rate } => SmoothFunction::exponential(rate),
            FunctionSpec::CenteredPower { degree, center } => {
                SmoothFunction::centered_power(degree, center)
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        let finite = match *self {
            FunctionSpec::Power { .. } => true,
            FunctionSpec::Sin { freq } | FunctionSpec::Cos { freq } => freq.is_finite(),
            FunctionSpec::Exp { rate } => rate.is_finite(),
            FunctionSpec::CenteredPower { center, .. } => center.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(format!("non-finite parameter in {self:?}"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Insertion {
    Midpoint,
}

/// Knots given level by level, or generated from a coarse grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KnotSpec {
    Explicit(Vec<Vec<f64>>),
    Generated {
        coarse: Vec<f64>,
        levels: usize,
        insertion: Insertion,
    },
}

fn default_moments() -> usize {
    2
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub order: usize,
    pub family: Vec<FunctionSpec>,
    pub knots: KnotSpec,
    #[serde(default = "default_moments")]
    pub vanishing_moments: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub target: Option<FunctionSpec>,
}

/// A configuration that passed validation, with its family and hierarchy
/// already built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub family: SmoothFamily,
    pub hierarchy: KnotHierarchy,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("bad config: {e}")))
    }

    fn levels(&self) -> Result<Vec<Vec<f64>>, CliError> {
        match &self.knots {
            KnotSpec::Explicit(levels) => Ok(levels.clone()),
            KnotSpec::Generated {
                coarse,
                levels,
                insertion: Insertion::Midpoint,
            } => {
                let mut out = vec![coarse.clone()];
                for _ in 0..*levels {
                    let last = out.last().unwrap();
                    let mut next = Vec::with_capacity(2 * last.len());
                    for w in last.windows(2) {
                        next.push(w[0]);
                        next.push(0.5 * (w[0] + w[1]));
                    }
                    next.extend(last.last());
                    out.push(next);
                }
                Ok(out)
            }
        }
    }

    /// Checks every precondition and builds the family and hierarchy.
    pub fn validate(&self) -> Result<Experiment, CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        if self.order < 2 {
            return bad(format!("order must be at least 2, got {}", self.order));
        }
        if self.family.len() != self.order {
            return bad(format!(
                "order is {} but the family has {} members",
                self.order,
                self.family.len()
            ));
        }
        for f in self.family.iter().chain(&self.target) {
            f.check().map_err(CliError::Input)?;
        }
        if self.family[0] != (FunctionSpec::Power { degree: 0 })
            || self.family[1] != (FunctionSpec::Power { degree: 1 })
        {
            return bad("the family must start with {\"kind\":\"power\",\"degree\":0} and {\"kind\":\"power\",\"degree\":1}".into());
        }
        if self.vanishing_moments != 2 {
            return bad(format!(
                "only 2 vanishing moments are supported, got {}",
                self.vanishing_moments
            ));
        }
        if self.samples < 2 {
            return bad(format!("samples must be at least 2, got {}", self.samples));
        }
        if let KnotSpec::Generated { levels, .. } = self.knots {
            if levels > 12 {
                return bad(format!("at most 12 midpoint levels are supported, got {levels}"));
            }
        }
        let levels = self.levels()?;
        if levels.is_empty() {
            return bad("no knot levels given".into());
        }
        let required = min_knots(self.order);
        let mut grids = Vec::with_capacity(levels.len());
        for (j, knots) in levels.into_iter().enumerate() {
            check_knots(j, &knots, required)?;
            grids.push(
                KnotGrid::new(knots).map_err(|e| CliError::Input(format!("level {j}: {e}")))?,
            );
        }
        let hierarchy = KnotHierarchy::new(grids).map_err(|e| CliError::Input(e.to_string()))?;
        let family = SmoothFamily::new(self.family.iter().map(FunctionSpec::to_function).collect())
            .map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Experiment {
            config: self.clone(),
            family,
            hierarchy,
        })
    }
}

fn check_knots(level: usize, knots: &[f64], required: usize) -> Result<(), CliError> {
    if knots.len() < required {
        return Err(CliError::Input(format!(
            "level {level} has {} knots; order needs at least {required}",
            knots.len()
        )));
    }
    if let Some(i) = knots.iter().position(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("level {level}: knot {i} is not finite")));
    }
    for (i, w) in knots.windows(2).enumerate() {
        if w[0] == w[1] {
            return Err(CliError::Input(format!(
                "level {level}: duplicate knot {} at positions {} and {}",
                w[0],
                i,
                i + 1
            )));
        }
        if w[1] < w[0] {
            return Err(CliError::Input(format!(
                "level {level}: knot {} at position {} is smaller than its predecessor {}",
                w[1],
                i + 1,
                w[0]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::parse(
            r#"{"order": 2,
                "family": [{"kind":"power","degree":0},{"kind":"power","degree":1}],
                "knots": {"coarse": [0, 0.5, 1], "levels": 1, "insertion": "midpoint"}}"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_and_midpoints() {
        let c = base();
        assert_eq!((c.vanishing_moments, c.samples, c.target.clone()), (2, 1000, None));
        let e = c.validate().unwrap();
        assert_eq!(e.hierarchy.level(1).knots(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn explicit_levels() {
        let mut c = base();
        c.knots = KnotSpec::Explicit(vec![vec![0.0, 0.4, 1.0], vec![0.0, 0.1, 0.4, 0.9, 1.0]]);
        assert_eq!(c.validate().unwrap().hierarchy.len(), 2);
    }

    #[test]
    fn rejections() {
        let mut c = base();
        c.knots = KnotSpec::Explicit(vec![vec![0.0, 0.3, 0.3, 1.0]]);
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("duplicate knot 0.3"), "{msg}");

        let mut c = base();
        c.family.swap(0, 1);
        assert!(c.validate().is_err());

        let mut c = base();
        c.order = 1;
        c.family.pop();
        assert!(c.validate().unwrap_err().to_string().contains("order"));

        let mut c = base();
        c.vanishing_moments = 3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn descriptor_vocabulary() {
        let f: Vec<FunctionSpec> = serde_json::from_str(
            r#"[{"kind":"sin","freq":1},{"kind":"cos","freq":2},{"kind":"exp","rate":-1},
                {"kind":"centered_power","degree":2,"center":0.5}]"#,
        )
        .unwrap();
        assert_eq!(f[3], FunctionSpec::CenteredPower { degree: 2, center: 0.5 });
        assert!(serde_json::from_str::<FunctionSpec>(r#"{"kind":"bessel"}"#).is_err());
    }
}
