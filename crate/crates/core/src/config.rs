//! Engine and world parameters. Every field has a default; scenario files
//! only need to name what they change.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::graph::InferenceStrategy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OvcParams {
    pub sectors: u32,
    pub rings: u32,
    pub r0: f64,
    pub growth: f64,
}

impl Default for OvcParams {
    fn default() -> Self {
        Self {
            sectors: 24,
            rings: 10,
            r0: 0.25,
            growth: 1.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    /// Lattice period in meters.
    pub period: f64,
    /// Cells per phase axis.
    pub resolution: u32,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            period: 2.0,
            resolution: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispParams {
    pub sectors: u32,
    pub rings: u32,
    pub d0: f64,
    pub growth: f64,
    /// Displacements shorter than this encode as `ZERO`.
    pub still: f64,
}

impl Default for DispParams {
    fn default() -> Self {
        Self {
            sectors: 16,
            rings: 8,
            d0: 0.5,
            growth: 1.4,
            still: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngramParams {
    pub dim: u32,
    pub active: u32,
    pub overlap_max: u32,
}

impl Default for EngramParams {
    fn default() -> Self {
        Self {
            dim: 2048,
            active: 40,
            overlap_max: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescriptorParams {
    pub dim: u32,
    pub active: u32,
    pub recall_threshold: f64,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            dim: 256,
            active: 16,
            recall_threshold: 0.75,
        }
    }
}

/// Sensory noise: per-axis Gaussian jitter on the sensed vector and random
/// bit swaps on the sensed descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub flips: u32,
}

impl NoiseSpec {
    pub const OFF: NoiseSpec = NoiseSpec {
        sigma: 0.0,
        flips: 0,
    };
}

/// How the engine reads an object-vector cell out of the grid constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// Track the lattice translate itself; cells and edges come from exact
    /// grid-consistent vectors.
    #[default]
    Translate,
    /// Compare decoded cell centers only; edges join decoded centers.
    DecodedCenter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub heading_bins: u32,
    pub ovc: OvcParams,
    pub grid: GridParams,
    pub disp: DispParams,
    pub engram: EngramParams,
    pub descriptor: DescriptorParams,
    /// How attention shifts obtain a relation; `null` disables relation lookup.
    pub strategy: Option<InferenceStrategy>,
    pub readout: Readout,
    pub noise: NoiseSpec,
    /// Longest allowed single MOVE, meters.
    pub max_step: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            heading_bins: 72,
            ovc: OvcParams::default(),
            grid: GridParams::default(),
            disp: DispParams::default(),
            engram: EngramParams::default(),
            descriptor: DescriptorParams::default(),
            strategy: Some(InferenceStrategy::WithReverse),
            readout: Readout::Translate,
            noise: NoiseSpec::OFF,
            max_step: 0.5,
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError(msg()))
    }
}

fn positive(name: &str, x: f64) -> Result<(), ConfigError> {
    check(x.is_finite() && x > 0.0, || {
        format!("{name} must be positive and finite, got {x}")
    })
}

impl Config {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check(self.heading_bins >= 1, || {
            "heading_bins must be at least 1".into()
        })?;

        let o = &self.ovc;
        check(o.sectors >= 1 && o.rings >= 1, || {
            "ovc needs at least one sector and ring".into()
        })?;
        positive("ovc.r0", o.r0)?;
        check(o.growth.is_finite() && o.growth > 1.0, || {
            format!("ovc.growth must exceed 1, got {}", o.growth)
        })?;

        positive("grid.period", self.grid.period)?;
        check(self.grid.resolution >= 1, || {
            "grid.resolution must be at least 1".into()
        })?;

        let d = &self.disp;
        check(d.sectors >= 1 && d.rings >= 1, || {
            "disp needs at least one sector and ring".into()
        })?;
        positive("disp.d0", d.d0)?;
        check(d.growth.is_finite() && d.growth > 1.0, || {
            format!("disp.growth must exceed 1, got {}", d.growth)
        })?;
        check(
            d.still.is_finite() && d.still >= 0.0 && d.still < d.d0 * d.growth,
            || format!("disp.still must lie in [0, d0·growth), got {}", d.still),
        )?;

        let e = &self.engram;
        check(
            e.active >= 1 && e.active <= e.dim && e.dim <= u16::MAX as u32 + 1,
            || {
                format!(
                    "engram needs 1 <= active <= dim <= 65536, got {}/{}",
                    e.active, e.dim
                )
            },
        )?;
        let f = &self.descriptor;
        check(
            f.active >= 1 && f.active <= f.dim && f.dim <= u16::MAX as u32 + 1,
            || {
                format!(
                    "descriptor needs 1 <= active <= dim <= 65536, got {}/{}",
                    f.active, f.dim
                )
            },
        )?;
        check((0.0..=1.0).contains(&f.recall_threshold), || {
            format!(
                "descriptor.recall_threshold must lie in [0, 1], got {}",
                f.recall_threshold
            )
        })?;

        check(
            self.noise.sigma.is_finite() && self.noise.sigma >= 0.0,
            || format!("noise.sigma must be non-negative, got {}", self.noise.sigma),
        )?;
        check(self.noise.flips <= f.active, || {
            "noise.flips cannot exceed descriptor.active".into()
        })?;
        positive("max_step", self.max_step)
    }

    /// Object-vector range `r0·g^rings`.
    pub fn ovc_range(&self) -> f64 {
        self.ovc.r0 * self.ovc.growth.powi(self.ovc.rings as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        c.validate().unwrap();
        assert!((c.ovc_range() - 7.2318).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = Config::default();
        c.grid.period = -2.0;
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.ovc.growth = 1.0;
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.descriptor.recall_threshold = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: Config =
            serde_json::from_str(r#"{"grid": {"period": 4.0}, "strategy": null}"#).unwrap();
        assert_eq!(c.grid.period, 4.0);
        assert_eq!(c.grid.resolution, 20);
        assert_eq!(c.strategy, None);
        let c: Config = serde_json::from_str("{}").unwrap();
        assert_eq!(c, Config::default());
        assert!(serde_json::from_str::<Config>(r#"{"gird": {}}"#).is_err());
    }
}
