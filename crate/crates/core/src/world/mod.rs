//! Ground-truth 2-D world: point-landmark parts, the agent pose, a noisy
//! sensory channel and the oracle queries tests check the engine against.

pub mod trajectory;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::codes::{
    allo_to_ego, ego_to_allo, wrap_angle, AlloVector, EgoVector, GridModule, GridPhase, Heading,
    Point,
};
use crate::config::{Config, NoiseSpec};
use crate::engine::Observation;
use crate::error::WorldError;
use crate::graph::{Descriptor, EnvironmentId};
use crate::rng::{stream, Stream};

const MAX_REJECTIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub id: u32,
    pub position: Point,
    pub descriptor: Descriptor,
}

/// Axis-aligned rectangle `[0, width] × [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }

    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }
}

/// Scenario vocabulary. Serialized externally tagged, e.g. `{"move": [0.3, 0]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Egocentric step `(forward, left)` in meters.
    Move(f64, f64),
    /// Counterclockwise turn in radians.
    Turn(f64),
    Attend(u32),
    Consolidate(usize),
}

impl Action {
    /// Compact text form used in metrics rows.
    pub fn label(&self) -> String {
        match self {
            Action::Move(x, y) => format!("MOVE({x},{y})"),
            Action::Turn(t) => format!("TURN({t})"),
            Action::Attend(p) => format!("ATTEND({p})"),
            Action::Consolidate(h) => format!("CONSOLIDATE({h})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActionOutcome {
    /// Egocentric displacement actually executed.
    pub executed: EgoVector,
    pub clipped: bool,
}

/// Parameters for a randomly packed world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldGen {
    pub n_parts: usize,
    pub bounds: Bounds,
    pub min_separation: f64,
}

impl Default for WorldGen {
    fn default() -> Self {
        Self {
            n_parts: 8,
            bounds: Bounds {
                width: 10.0,
                height: 10.0,
            },
            min_separation: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct World {
    parts: Vec<Part>,
    agent: Point,
    heading: f64,
    bounds: Bounds,
    environment: EnvironmentId,
    sensor_range: f64,
    descriptor_dim: u32,
    max_step: f64,
    noise_rng: ChaCha8Rng,
}

/// Rejection-samples part positions at least `min_separation` apart.
pub fn pack_positions<R: Rng + ?Sized>(
    spec: &WorldGen,
    rng: &mut R,
) -> Result<Vec<Point>, WorldError> {
    let mut placed: Vec<Point> = Vec::with_capacity(spec.n_parts);
    let mut rejections = 0;
    while placed.len() < spec.n_parts {
        let p = Point::new(
            rng.random::<f64>() * spec.bounds.width,
            rng.random::<f64>() * spec.bounds.height,
        );
        if placed.iter().all(|q| q.distance(&p) >= spec.min_separation) {
            placed.push(p);
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(WorldError::PackingInfeasible {
                    n_parts: spec.n_parts,
                    min_separation: spec.min_separation,
                });
            }
        }
    }
    Ok(placed)
}

impl World {
    /// A world with the given parts; the agent starts at `agent` facing `heading`.
    pub fn new(
        parts: Vec<Part>,
        bounds: Bounds,
        agent: Point,
        heading: f64,
        environment: EnvironmentId,
        config: &Config,
        seed: u64,
    ) -> Self {
        Self {
            parts,
            agent,
            heading: wrap_angle(heading),
            bounds,
            environment,
            sensor_range: config.ovc_range(),
            descriptor_dim: config.descriptor.dim,
            max_step: config.max_step,
            noise_rng: stream(seed, Stream::Noise),
        }
    }

    /// Packs `spec.n_parts` parts with random descriptors; the agent starts
    /// at the center facing angle 0. Deterministic in `seed`.
    pub fn generate(spec: &WorldGen, config: &Config, seed: u64) -> Result<Self, WorldError> {
        let mut rng = stream(seed, Stream::World);
        let positions = pack_positions(spec, &mut rng)?;
        let parts = positions
            .into_iter()
            .enumerate()
            .map(|(i, position)| Part {
                id: i as u32,
                position,
                descriptor: Descriptor::random(
                    &mut rng,
                    config.descriptor.dim,
                    config.descriptor.active,
                ),
            })
            .collect();
        Ok(Self::new(
            parts,
            spec.bounds,
            spec.bounds.center(),
            0.0,
            0,
            config,
            seed,
        ))
    }

    pub fn with_environment(mut self, environment: EnvironmentId) -> Self {
        self.environment = environment;
        self
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn part(&self, id: u32) -> Result<&Part, WorldError> {
        self.parts
            .iter()
            .find(|p| p.id == id)
            .ok_or(WorldError::UnknownPart(id))
    }

    pub fn agent(&self) -> Point {
        self.agent
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn environment(&self) -> EnvironmentId {
        self.environment
    }

    pub fn sensor_range(&self) -> f64 {
        self.sensor_range
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    /// Places the agent; used by scripted setups and tests.
    pub fn teleport(&mut self, agent: Point, heading: f64) {
        self.agent = agent;
        self.heading = wrap_angle(heading);
    }

    fn heading_code(&self) -> Heading {
        Heading::new(self.heading, 1)
    }

    /// Exact allocentric vector from the agent to a part.
    pub fn true_allo_vector(&self, id: u32) -> Result<AlloVector, WorldError> {
        Ok(self.part(id)?.position - self.agent)
    }

    pub fn true_phase(&self, grid: &GridModule, p: Point) -> GridPhase {
        grid.world_to_phase(p)
    }

    pub fn true_part_phase(&self, grid: &GridModule, id: u32) -> Result<GridPhase, WorldError> {
        Ok(grid.world_to_phase(self.part(id)?.position))
    }

    /// Senses one part. With noise on, the vector gets per-axis Gaussian
    /// jitter and the descriptor `flips` bit swaps.
    pub fn sense(&mut self, id: u32, noise: NoiseSpec) -> Result<Observation, WorldError> {
        let part = self.part(id)?;
        let truth = part.position - self.agent;
        let distance = truth.norm();
        if distance == 0.0 {
            return Err(WorldError::AgentOnPart(id));
        }
        if distance > self.sensor_range {
            return Err(WorldError::OutOfSensorRange {
                part: id,
                distance,
                max: self.sensor_range,
            });
        }
        let descriptor = part.descriptor.clone();
        let mut ego = allo_to_ego(truth, &self.heading_code());
        if noise.sigma > 0.0 {
            let n = Normal::new(0.0, noise.sigma).expect("sigma validated non-negative");
            ego.dx += n.sample(&mut self.noise_rng);
            ego.dy += n.sample(&mut self.noise_rng);
        }
        let descriptor =
            descriptor.with_swaps(&mut self.noise_rng, noise.flips, self.descriptor_dim);
        Ok(Observation {
            ego,
            descriptor,
            environment: self.environment,
        })
    }

    pub fn apply_action(&mut self, action: Action) -> Result<ActionOutcome, WorldError> {
        match action {
            Action::Move(fx, fy) => {
                let step = EgoVector::new(fx, fy);
                if !step.is_finite() || step.norm() > self.max_step + 1e-12 {
                    return Err(WorldError::InvalidAction(format!(
                        "step ({fx}, {fy}) exceeds max_step {}",
                        self.max_step
                    )));
                }
                let heading = self.heading_code();
                let target = self.agent + ego_to_allo(step, &heading);
                let landed = self.bounds.clamp(target);
                let clipped = landed != target;
                let executed = if clipped {
                    allo_to_ego(landed - self.agent, &heading)
                } else {
                    step
                };
                self.agent = landed;
                Ok(ActionOutcome { executed, clipped })
            }
            Action::Turn(dtheta) => {
                if !dtheta.is_finite() {
                    return Err(WorldError::InvalidAction(format!("turn {dtheta}")));
                }
                self.heading = wrap_angle(self.heading + dtheta);
                Ok(ActionOutcome::default())
            }
            Action::Attend(id) => {
                self.part(id)?;
                Ok(ActionOutcome::default())
            }
            Action::Consolidate(hops) => {
                if hops == 0 {
                    return Err(WorldError::InvalidAction(
                        "consolidate needs hop_limit >= 1".into(),
                    ));
                }
                Ok(ActionOutcome::default())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn one_part_world(pos: Point) -> World {
        let config = Config::default();
        let mut rng = stream(1, Stream::World);
        let parts = vec![Part {
            id: 0,
            position: pos,
            descriptor: Descriptor::random(&mut rng, 256, 16),
        }];
        let bounds = Bounds {
            width: 10.0,
            height: 10.0,
        };
        let mut w = World::new(parts, bounds, Point::new(0.0, 0.0), 0.0, 0, &config, 1);
        w.teleport(Point::new(0.0, 0.0), 0.0);
        w
    }

    #[test]
    fn noiseless_sensing() {
        let mut w = one_part_world(Point::new(1.0, 0.0));
        let obs = w.sense(0, NoiseSpec::OFF).unwrap();
        assert_eq!(obs.ego, EgoVector::new(1.0, 0.0));
        assert_eq!(obs.descriptor, w.parts()[0].descriptor);
        w.teleport(Point::new(0.0, 0.0), FRAC_PI_2);
        let obs = w.sense(0, NoiseSpec::OFF).unwrap();
        assert!(obs.ego.dx.abs() < 1e-12 && (obs.ego.dy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sensing_errors() {
        let mut w = one_part_world(Point::new(0.0, 0.0));
        assert_eq!(w.sense(0, NoiseSpec::OFF), Err(WorldError::AgentOnPart(0)));
        assert_eq!(w.sense(4, NoiseSpec::OFF), Err(WorldError::UnknownPart(4)));
        let mut w = one_part_world(Point::new(9.0, 9.0));
        assert!(matches!(
            w.sense(0, NoiseSpec::OFF),
            Err(WorldError::OutOfSensorRange { .. })
        ));
    }

    #[test]
    fn moves_and_turns() {
        let mut w = one_part_world(Point::new(3.0, 3.0));
        w.teleport(Point::new(5.0, 5.0), 0.0);
        w.apply_action(Action::Move(0.0, 0.0)).unwrap();
        assert_eq!(w.agent(), Point::new(5.0, 5.0));
        w.apply_action(Action::Turn(TAU)).unwrap();
        assert!(w.heading().abs() < 1e-12 || (w.heading() - TAU).abs() < 1e-12);
        w.teleport(Point::new(5.0, 5.0), FRAC_PI_2);
        w.apply_action(Action::Move(0.5, 0.0)).unwrap();
        assert!(w.agent().distance(&Point::new(5.0, 5.5)) < 1e-12);
        assert!(w.apply_action(Action::Move(0.6, 0.0)).is_err());
        assert_eq!(
            w.apply_action(Action::Attend(9)),
            Err(WorldError::UnknownPart(9))
        );
        assert!(w.apply_action(Action::Consolidate(0)).is_err());
    }

    #[test]
    fn moves_clip_at_bounds() {
        let mut w = one_part_world(Point::new(3.0, 3.0));
        w.teleport(Point::new(9.8, 5.0), 0.0);
        let out = w.apply_action(Action::Move(0.5, 0.0)).unwrap();
        assert!(out.clipped);
        assert_eq!(w.agent(), Point::new(10.0, 5.0));
        assert!((out.executed.dx - 0.2).abs() < 1e-12);
    }

    #[test]
    fn generation_is_deterministic_and_separated() {
        let c = Config::default();
        let spec = WorldGen::default();
        let a = World::generate(&spec, &c, 42).unwrap();
        let b = World::generate(&spec, &c, 42).unwrap();
        assert_eq!(a.parts(), b.parts());
        assert_eq!(a.parts().len(), 8);
        for (i, p) in a.parts().iter().enumerate() {
            assert!(a.bounds().contains(p.position));
            for q in &a.parts()[i + 1..] {
                assert!(p.position.distance(&q.position) >= 1.0);
            }
        }
        let empty = World::generate(&WorldGen { n_parts: 0, ..spec }, &c, 1).unwrap();
        assert!(empty.parts().is_empty());
    }

    #[test]
    fn infeasible_packing() {
        let spec = WorldGen {
            n_parts: 50,
            bounds: Bounds {
                width: 2.0,
                height: 2.0,
            },
            min_separation: 1.0,
        };
        assert!(matches!(
            World::generate(&spec, &Config::default(), 3),
            Err(WorldError::PackingInfeasible { .. })
        ));
    }

    #[test]
    fn noise_stream_does_not_touch_world_stream() {
        let c = Config::default();
        let a = World::generate(&WorldGen::default(), &c, 9).unwrap();
        let mut b = World::generate(&WorldGen::default(), &c, 9).unwrap();
        b.sense(
            0,
            NoiseSpec {
                sigma: 0.1,
                flips: 2,
            },
        )
        .ok();
        assert_eq!(a.parts(), b.parts());
    }
}
