//! Scenario files: engine config, world, seed, actions and metric bounds.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codes::Point;
use crate::config::Config;
use crate::error::{HarnessError, WorldError};
use crate::graph::{Descriptor, EnvironmentId};
use crate::rng::{stream, Stream};
use crate::world::trajectory::{exploration, learn_revisit, random_walk};
use crate::world::{Action, Bounds, Part, World, WorldGen};

use super::metrics::SUMMARY_METRICS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub config: Config,
    #[serde(default)]
    pub world: WorldSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub actions: Actions,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSpec {
    /// Number of randomly packed parts; ignored when `parts` is given.
    pub n_parts: usize,
    /// `[width, height]` in meters.
    pub bounds: [f64; 2],
    pub min_separation: f64,
    /// Inline parts. Omitted descriptors are drawn from the seed.
    pub parts: Option<Vec<PartSpec>>,
    /// Defaults to the center of the bounds, heading 0.
    pub agent: Option<AgentSpec>,
    pub environment: EnvironmentId,
}

impl Default for WorldSpec {
    fn default() -> Self {
        let gen = WorldGen::default();
        Self {
            n_parts: gen.n_parts,
            bounds: [gen.bounds.width, gen.bounds.height],
            min_separation: gen.min_separation,
            parts: None,
            agent: None,
            environment: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    pub id: u32,
    pub position: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor_bits: Option<Vec<u16>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub position: [f64; 2],
    #[serde(default)]
    pub heading: f64,
}

/// An explicit action list, or a generator expanded against the world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Actions {
    List(Vec<Action>),
    Generated(Generator),
}

impl Default for Actions {
    fn default() -> Self {
        Actions::List(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Attend every part, wander, attend every part again in reverse.
    LearnRevisit { wander_steps: usize },
    /// Attend one part, then random moves keeping it in range.
    RandomWalk {
        part: u32,
        steps: usize,
        #[serde(default = "default_min_distance")]
        min_distance: f64,
    },
    /// Mixed moves and attention, `steps` actions in total.
    Exploration { steps: usize },
}

fn default_min_distance() -> f64 {
    0.3
}

/// Bounds on one summary metric, checked after the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertion {
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

fn schema(msg: impl Into<String>) -> HarnessError {
    HarnessError::Schema(msg.into())
}

impl Scenario {
    /// Reads the raw JSON document; see [`Scenario::from_value`].
    pub fn read_value(path: &Path) -> Result<Value, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| schema(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| schema(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_value(Self::read_value(path)?)
    }

    /// Parses and validates a scenario document.
    pub fn from_value(value: Value) -> Result<Self, HarnessError> {
        let s: Scenario = serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.config.validate().map_err(|e| schema(e.to_string()))?;
        let w = &self.world;
        if !w.bounds.iter().all(|b| b.is_finite() && *b > 0.0) {
            return Err(schema(format!(
                "world.bounds must be positive, got {:?}",
                w.bounds
            )));
        }
        if !(w.min_separation.is_finite() && w.min_separation >= 0.0) {
            return Err(schema("world.min_separation must be non-negative"));
        }
        let bounds = self.bounds();
        if let Some(parts) = &w.parts {
            let mut ids: Vec<u32> = parts.iter().map(|p| p.id).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|x| x[0] == x[1]) {
                return Err(schema("world.parts ids must be unique"));
            }
            for p in parts {
                let pos = Point::new(p.position[0], p.position[1]);
                if !(pos.x.is_finite() && pos.y.is_finite() && bounds.contains(pos)) {
                    return Err(schema(format!(
                        "part {} lies outside the world bounds",
                        p.id
                    )));
                }
                if let Some(bits) = &p.descriptor_bits {
                    if Descriptor::from_bits(bits.clone(), self.config.descriptor.dim).is_none() {
                        return Err(schema(format!(
                            "part {} descriptor_bits must be non-empty, strictly increasing and below {}",
                            p.id, self.config.descriptor.dim
                        )));
                    }
                }
            }
        }
        if let Some(agent) = &w.agent {
            let pos = Point::new(agent.position[0], agent.position[1]);
            if !(pos.x.is_finite()
                && pos.y.is_finite()
                && agent.heading.is_finite()
                && bounds.contains(pos))
            {
                return Err(schema(
                    "world.agent must be a finite pose inside the bounds",
                ));
            }
        }
        let referenced: Vec<u32> = match &self.actions {
            Actions::List(list) => list
                .iter()
                .filter_map(|a| match a {
                    Action::Attend(id) => Some(*id),
                    _ => None,
                })
                .collect(),
            Actions::Generated(Generator::RandomWalk { part, .. }) => vec![*part],
            Actions::Generated(_) => Vec::new(),
        };
        for id in referenced {
            if !self.part_ids().contains(&id) {
                return Err(schema(format!("action references unknown part {id}")));
            }
        }
        if let Actions::List(list) = &self.actions {
            for (i, a) in list.iter().enumerate() {
                let bad = match *a {
                    Action::Move(x, y) => !(x.is_finite() && y.is_finite()),
                    Action::Turn(t) => !t.is_finite(),
                    Action::Consolidate(h) => h == 0,
                    Action::Attend(_) => false,
                };
                if bad {
                    return Err(schema(format!("action {i} is malformed: {}", a.label())));
                }
            }
        }
        for a in &self.assertions {
            if !SUMMARY_METRICS.contains(&a.metric.as_str()) {
                return Err(schema(format!(
                    "assertion on unknown metric {:?}",
                    a.metric
                )));
            }
            if a.min.is_none() && a.max.is_none() {
                return Err(schema(format!(
                    "assertion on {} needs min or max",
                    a.metric
                )));
            }
        }
        Ok(())
    }

    fn bounds(&self) -> Bounds {
        Bounds {
            width: self.world.bounds[0],
            height: self.world.bounds[1],
        }
    }

    fn part_ids(&self) -> Vec<u32> {
        match &self.world.parts {
            Some(parts) => parts.iter().map(|p| p.id).collect(),
            None => (0..self.world.n_parts as u32).collect(),
        }
    }

    /// The ground-truth world this scenario describes.
    pub fn build_world(&self) -> Result<World, WorldError> {
        let bounds = self.bounds();
        let gen = WorldGen {
            n_parts: self.world.n_parts,
            bounds,
            min_separation: self.world.min_separation,
        };
        let desc = &self.config.descriptor;
        let mut rng = stream(self.seed, Stream::World);
        let parts = match &self.world.parts {
            None => {
                let mut world = World::generate(&gen, &self.config, self.seed)?;
                if let Some(agent) = &self.world.agent {
                    world.teleport(
                        Point::new(agent.position[0], agent.position[1]),
                        agent.heading,
                    );
                }
                return Ok(world.with_environment(self.world.environment));
            }
            Some(specs) => specs
                .iter()
                .map(|p| Part {
                    id: p.id,
                    position: Point::new(p.position[0], p.position[1]),
                    descriptor: match &p.descriptor_bits {
                        Some(bits) => {
                            Descriptor::from_bits(bits.clone(), desc.dim).expect("validated")
                        }
                        None => Descriptor::random(&mut rng, desc.dim, desc.active),
                    },
                })
                .collect(),
        };
        let (agent, heading) = match &self.world.agent {
            Some(a) => (Point::new(a.position[0], a.position[1]), a.heading),
            None => (bounds.center(), 0.0),
        };
        Ok(World::new(
            parts,
            bounds,
            agent,
            heading,
            self.world.environment,
            &self.config,
            self.seed,
        ))
    }

    /// The concrete action list, expanding a generator against `world`.
    pub fn resolve_actions(&self, world: &World) -> Vec<Action> {
        let mut rng = stream(self.seed, Stream::Trajectory);
        match &self.actions {
            Actions::List(list) => list.clone(),
            Actions::Generated(Generator::LearnRevisit { wander_steps }) => {
                learn_revisit(world, *wander_steps, &mut rng)
            }
            Actions::Generated(Generator::RandomWalk {
                part,
                steps,
                min_distance,
            }) => random_walk(world, *part, *steps, *min_distance, &mut rng),
            Actions::Generated(Generator::Exploration { steps }) => {
                exploration(world, *steps, &mut rng)
            }
        }
    }
}

/// Packs a world exactly as [`Scenario::build_world`] would and returns it
/// as inline parts, for writing self-contained scenario files.
pub fn inline_parts(
    spec: &WorldSpec,
    config: &Config,
    seed: u64,
) -> Result<Vec<PartSpec>, WorldError> {
    let gen = WorldGen {
        n_parts: spec.n_parts,
        bounds: Bounds {
            width: spec.bounds[0],
            height: spec.bounds[1],
        },
        min_separation: spec.min_separation,
    };
    let world = World::generate(&gen, config, seed)?;
    Ok(world
        .parts()
        .iter()
        .map(|p| PartSpec {
            id: p.id,
            position: [p.position.x, p.position.y],
            descriptor_bits: Some(p.descriptor.bits().to_vec()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_document_is_a_valid_scenario() {
        let s = Scenario::from_value(json!({})).unwrap();
        assert_eq!(s.actions, Actions::List(vec![]));
        assert_eq!(s.world.n_parts, 8);
    }

    #[test]
    fn explicit_actions_parse() {
        let s = Scenario::from_value(json!({
            "actions": [{"attend": 1}, {"move": [0.2, 0.0]}, {"turn": 0.5}, {"consolidate": 2}]
        }))
        .unwrap();
        assert_eq!(
            s.actions,
            Actions::List(vec![
                Action::Attend(1),
                Action::Move(0.2, 0.0),
                Action::Turn(0.5),
                Action::Consolidate(2)
            ])
        );
    }

    #[test]
    fn generator_parses() {
        let s = Scenario::from_value(
            json!({"actions": {"generator": "learn_revisit", "wander_steps": 5}}),
        )
        .unwrap();
        assert_eq!(
            s.actions,
            Actions::Generated(Generator::LearnRevisit { wander_steps: 5 })
        );
    }

    #[test]
    fn schema_errors() {
        for bad in [
            json!({"bogus": 1}),
            json!({"config": {"grid": {"period": -1.0}}}),
            json!({"actions": [{"attend": 8}]}),
            json!({"actions": [{"consolidate": 0}]}),
            json!({"actions": [{"fly": 1}]}),
            json!({"assertions": [{"metric": "nope", "min": 0}]}),
            json!({"assertions": [{"metric": "prediction_accuracy"}]}),
            json!({"world": {"parts": [{"id": 0, "position": [20, 1]}]}}),
            json!({"world": {"parts": [{"id": 0, "position": [1, 1]}, {"id": 0, "position": [2, 2]}]}}),
            json!({"world": {"parts": [{"id": 0, "position": [1, 1], "descriptor_bits": [3, 2]}]}}),
        ] {
            let err = Scenario::from_value(bad.clone()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn inline_parts_match_generated_world() {
        let s = Scenario::from_value(json!({"seed": 9})).unwrap();
        let generated = s.build_world().unwrap();
        let parts = inline_parts(&s.world, &s.config, 9).unwrap();
        let mut inline = s.clone();
        inline.world.parts = Some(parts);
        let built = inline.build_world().unwrap();
        assert_eq!(generated.parts(), built.parts());
    }
}
