//! Scripted action sequences over a world.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::{Action, World};
use crate::codes::{ego_to_allo, AlloVector, EgoVector, Heading, Point};

/// Greedy nearest-neighbour ordering of the parts, starting from the part
/// closest to the agent.
pub fn nearest_neighbour_tour(world: &World) -> Vec<u32> {
    let mut left: Vec<(u32, Point)> = world.parts().iter().map(|p| (p.id, p.position)).collect();
    let mut order = Vec::with_capacity(left.len());
    let mut here = world.agent();
    while !left.is_empty() {
        let (i, _) = left
            .iter()
            .enumerate()
            .min_by(|a, b| here.distance(&a.1 .1).total_cmp(&here.distance(&b.1 .1)))
            .expect("non-empty");
        let (id, pos) = left.remove(i);
        order.push(id);
        here = pos;
    }
    order
}

/// Ordering of the parts whose hops, sorted longest first, are
/// lexicographically smallest: the longest hop is as short as possible, then
/// the second longest, and so on. Exhaustive for up to 9 parts, greedy
/// nearest-neighbour beyond.
pub fn short_hop_tour(world: &World) -> Vec<u32> {
    let parts = world.parts();
    if parts.len() > 9 {
        return nearest_neighbour_tour(world);
    }
    let hops = |order: &[usize]| {
        let mut h: Vec<f64> = order
            .windows(2)
            .map(|w| parts[w[0]].position.distance(&parts[w[1]].position))
            .collect();
        h.sort_by(|a, b| b.total_cmp(a));
        h
    };
    let mut order: Vec<usize> = (0..parts.len()).collect();
    let mut best = order.clone();
    let mut best_hops = hops(&order);
    permute(&mut order, 0, &mut |o| {
        let h = hops(o);
        if h.iter()
            .zip(&best_hops)
            .map(|(a, b)| a.total_cmp(b))
            .find(|c| c.is_ne())
            == Some(std::cmp::Ordering::Less)
        {
            best = o.to_vec();
            best_hops = h;
        }
    });
    best.into_iter().map(|i| parts[i].id).collect()
}

fn permute(v: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

fn in_range(world: &World, agent: Point, id: u32, margin: f64) -> bool {
    let d = world
        .part(id)
        .map(|p| p.position.distance(&agent))
        .unwrap_or(f64::INFINITY);
    d > margin && d <= world.sensor_range() - margin
}

/// Proposes a random egocentric step of length at most `max_step`.
fn random_step<R: Rng + ?Sized>(rng: &mut R, max_step: f64) -> (f64, f64) {
    let len = rng.random::<f64>() * max_step;
    let dir = rng.random::<f64>() * TAU;
    (len * dir.cos(), len * dir.sin())
}

fn landing(agent: Point, heading: f64, step: (f64, f64)) -> Point {
    agent + ego_to_allo(EgoVector::new(step.0, step.1), &Heading::new(heading, 1))
}

/// Attend every part once along a short-hop tour, wander for
/// `wander_steps` moves while keeping every part in sensor range, then attend
/// the parts again in reverse order.
pub fn learn_revisit<R: Rng + ?Sized>(
    world: &World,
    wander_steps: usize,
    rng: &mut R,
) -> Vec<Action> {
    let tour = short_hop_tour(world);
    let mut actions: Vec<Action> = tour.iter().map(|&id| Action::Attend(id)).collect();
    let margin = 0.05;
    let mut agent = world.agent();
    let heading = world.heading();
    let mut moved = 0;
    let mut tries = 0;
    while moved < wander_steps && tries < wander_steps * 200 {
        tries += 1;
        let step = random_step(rng, world.max_step());
        let next = landing(agent, heading, step);
        let ok = world.bounds().contains(next)
            && tour.iter().all(|&id| in_range(world, next, id, margin));
        if ok {
            actions.push(Action::Move(step.0, step.1));
            agent = next;
            moved += 1;
        }
    }
    actions.extend(tour.iter().rev().map(|&id| Action::Attend(id)));
    actions
}

/// Attend `part`, then take `steps` random moves (with an occasional turn)
/// that keep the agent in bounds and the part inside `(min_distance, range - margin]`.
pub fn random_walk<R: Rng + ?Sized>(
    world: &World,
    part: u32,
    steps: usize,
    min_distance: f64,
    rng: &mut R,
) -> Vec<Action> {
    let mut actions = vec![Action::Attend(part)];
    let mut agent = world.agent();
    let mut heading = world.heading();
    let mut taken = 0;
    while taken < steps {
        if rng.random::<f64>() < 0.1 {
            let turn = (rng.random::<f64>() - 0.5) * PI;
            heading += turn;
            actions.push(Action::Turn(turn));
            continue;
        }
        let step = random_step(rng, world.max_step());
        let next = landing(agent, heading, step);
        let d = world
            .part(part)
            .map(|p| p.position.distance(&next))
            .unwrap_or(0.0);
        if world.bounds().contains(next) && d > min_distance && d <= world.sensor_range() - 0.05 {
            actions.push(Action::Move(step.0, step.1));
            agent = next;
            taken += 1;
        }
    }
    actions
}

/// A long mixed trajectory of `steps` actions: attend every part from the
/// start, then random moves and attention to parts that are in range.
pub fn exploration<R: Rng + ?Sized>(world: &World, steps: usize, rng: &mut R) -> Vec<Action> {
    let mut actions: Vec<Action> = nearest_neighbour_tour(world)
        .into_iter()
        .map(Action::Attend)
        .collect();
    actions.truncate(steps);
    let mut agent = world.agent();
    let heading = world.heading();
    let mut last_attended = actions.last().and_then(|a| match a {
        Action::Attend(id) => Some(*id),
        _ => None,
    });
    while actions.len() < steps {
        if rng.random::<f64>() < 0.3 {
            let visible: Vec<u32> = world
                .parts()
                .iter()
                .map(|p| p.id)
                .filter(|&id| in_range(world, agent, id, 0.05) && Some(id) != last_attended)
                .collect();
            if !visible.is_empty() {
                let id = visible[rng.random_range(0..visible.len())];
                actions.push(Action::Attend(id));
                last_attended = Some(id);
                continue;
            }
        }
        let step = random_step(rng, world.max_step());
        let next = landing(agent, heading, step);
        if world.bounds().contains(next) {
            actions.push(Action::Move(step.0, step.1));
            agent = next;
        }
    }
    actions
}

/// Sum of allocentric displacements of the MOVE actions, for checks.
pub fn net_displacement(actions: &[Action], start_heading: f64) -> AlloVector {
    let mut heading = start_heading;
    let mut total = AlloVector::ZERO;
    for a in actions {
        match *a {
            Action::Move(x, y) => {
                total += ego_to_allo(EgoVector::new(x, y), &Heading::new(heading, 1))
            }
            Action::Turn(t) => heading += t,
            _ => {}
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::rng::{stream, Stream};
    use crate::world::WorldGen;

    fn world(seed: u64) -> World {
        World::generate(&WorldGen::default(), &Config::default(), seed).unwrap()
    }

    #[test]
    fn tour_visits_every_part_once() {
        let w = world(4);
        let mut t = nearest_neighbour_tour(&w);
        t.sort_unstable();
        assert_eq!(t, (0..8).collect::<Vec<u32>>());
    }

    #[test]
    fn learn_revisit_touches_each_part_twice() {
        let w = world(5);
        let acts = learn_revisit(&w, 10, &mut stream(5, Stream::Trajectory));
        for id in 0..8 {
            assert_eq!(acts.iter().filter(|a| **a == Action::Attend(id)).count(), 2);
        }
    }

    #[test]
    fn random_walk_keeps_part_in_range() {
        let mut w = world(6);
        let acts = random_walk(&w, 2, 300, 0.3, &mut stream(6, Stream::Trajectory));
        assert_eq!(
            acts.iter()
                .filter(|a| matches!(a, Action::Move(..)))
                .count(),
            300
        );
        for a in acts {
            w.apply_action(a).unwrap();
            let d = w.true_allo_vector(2).unwrap().norm();
            assert!(d > 0.3 - 1e-9 && d <= w.sensor_range());
        }
    }

    #[test]
    fn exploration_has_requested_length() {
        let w = world(7);
        for n in [5, 100] {
            assert_eq!(
                exploration(&w, n, &mut stream(7, Stream::Trajectory)).len(),
                n
            );
        }
    }
}
