//! Population codes: head direction, object-vector cells, the grid module
//! and displacement cells.

pub mod disp;
pub mod frame;
pub mod grid;
pub mod logpolar;
pub mod ovc;

pub use disp::{DispBin, DispCode};
pub use frame::{allo_to_ego, ego_to_allo, wrap_angle, AlloVector, EgoVector, Heading, Point};
pub use grid::{GridCell, GridModule, GridPhase};
pub use ovc::{OvcCell, OvcCode};

use crate::config::Config;

/// Tolerance for continuous comparisons at meter scale.
pub const EPS_GEOM: f64 = 1e-9;

/// All code books of one engine, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeBook {
    pub heading_bins: u32,
    pub ovc: OvcCode,
    pub grid: GridModule,
    pub disp: DispCode,
}

impl CodeBook {
    pub fn new(config: &Config) -> Self {
        Self {
            heading_bins: config.heading_bins,
            ovc: OvcCode::new(&config.ovc),
            grid: GridModule::new(&config.grid),
            disp: DispCode::new(&config.disp),
        }
    }

    pub fn heading(&self, angle: f64) -> Heading {
        Heading::new(angle, self.heading_bins)
    }
}
