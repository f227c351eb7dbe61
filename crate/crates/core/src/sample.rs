//! Seeded random inputs: words, quasi-surfaces, orientations, and alternative
//! representatives of diagrams.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{canonical_conjugacy, reduce_word, ConjClass, GroupWord, Letter};
use crate::diagram::{ExplicitDiagram, LaneDiagram};
use crate::error::Result;
use crate::surface::{DiskSpec, EdgeSpec, GateOrientation, GraphSpec, QuasiSurface, QuasiSurfaceSpec};

pub type Rng64 = ChaCha8Rng;

/// Independent generator for case `index` of a run with the given seed.
pub fn case_rng(seed: u64, index: u64) -> Rng64 {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A reduced word of length at most `max_len` (letters drawn uniformly, then
/// reduced).
pub fn random_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> GroupWord {
    if rank == 0 {
        return GroupWord::identity();
    }
    let n = rng.gen_range(0..=max_len);
    let letters = (0..n).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen())).collect();
    reduce_word(&GroupWord::new(letters))
}

/// A nontrivial word of length between 1 and `max_len`, without cancellations.
pub fn random_nontrivial_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> GroupWord {
    let n = rng.gen_range(1..=max_len.max(1));
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    while letters.len() < n {
        let l = Letter::new(rng.gen_range(0..rank), rng.gen());
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    GroupWord::new(letters)
}

pub fn random_class(rng: &mut impl Rng, rank: usize, max_len: usize) -> ConjClass {
    canonical_conjugacy(&random_word(rng, rank, max_len))
}

pub fn random_omega(rng: &mut impl Rng, gates: usize) -> GateOrientation {
    GateOrientation::from_signs((0..gates).map(|_| if rng.gen() { 1 } else { -1 }).collect())
}

/// A random connected quasi-surface of positive rank with at most two disks,
/// at most four gates in total (at least one per disk), and a graph with at
/// most three vertices and three edges.
pub fn random_surface(rng: &mut impl Rng) -> QuasiSurface {
    loop {
        if let Ok(qs) = QuasiSurface::build(random_spec(rng)) {
            if qs.rank() > 0 {
                return qs;
            }
        }
    }
}

pub fn random_spec(rng: &mut impl Rng) -> QuasiSurfaceSpec {
    let disks = rng.gen_range(1..=2);
    let gates = rng.gen_range(disks..=4);
    let nv = rng.gen_range(1..=3);
    let ne = rng.gen_range(0..=3);
    let vertices: Vec<String> = (0..nv).map(|i| format!("v{}", i + 1)).collect();
    let edges = (0..ne)
        .map(|_| {
            EdgeSpec::Pair(
                vertices[rng.gen_range(0..nv)].clone(),
                vertices[rng.gen_range(0..nv)].clone(),
            )
        })
        .collect();
    let mut counts = vec![1; disks];
    for _ in disks..gates {
        counts[rng.gen_range(0..disks)] += 1;
    }
    let mut gluing = BTreeMap::new();
    let mut next = 0;
    let disk_specs = counts
        .iter()
        .map(|&c| {
            let names: Vec<String> = (0..c)
                .map(|_| {
                    next += 1;
                    format!("c{next}")
                })
                .collect();
            for n in &names {
                gluing.insert(n.clone(), vertices[rng.gen_range(0..nv)].clone());
            }
            DiskSpec { gates: names }
        })
        .collect();
    QuasiSurfaceSpec {
        disks: disk_specs,
        graph: GraphSpec { vertices, edges },
        gluing,
        basepoint: "v1".to_string(),
    }
}

/// Random reassignment of depths within every lane.
pub fn redepth(rng: &mut impl Rng, d: &LaneDiagram) -> LaneDiagram {
    let mut out = d.clone();
    for (_, arcs) in d.lane_arcs() {
        let mut depths: Vec<u32> = (1..=arcs.len() as u32).collect();
        depths.shuffle(rng);
        for ((l, s), depth) in arcs.into_iter().zip(depths) {
            out.set_depth(l, s, depth);
        }
    }
    out
}

/// Insert a trivial detour (a full turn or a reroute) at a random arc of a
/// random loop. Returns `false` when the family has no arcs.
pub fn insert_random_detour(rng: &mut impl Rng, qs: &QuasiSurface, d: &mut LaneDiagram) -> bool {
    let arcs: Vec<(usize, usize)> = d
        .loops
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.arcs().map(move |(s, _)| (i, s)))
        .collect();
    let Some(&(l, s)) = arcs.choose(rng) else {
        return false;
    };
    match rng.gen_range(0..3) {
        0 => d.insert_turn(qs, l, s, true),
        1 => d.insert_turn(qs, l, s, false),
        _ => d.reroute(qs, l, s),
    }
    true
}

/// The lane diagram with crossing points moved along the gates by random
/// adjacent transpositions, and the surface crossings this forces.
pub fn perturb(rng: &mut impl Rng, qs: &QuasiSurface, d: &LaneDiagram, swaps: usize) -> Result<ExplicitDiagram> {
    let mut orders = d.generic(qs).gate_orders;
    let movable: Vec<usize> = (0..orders.len()).filter(|&k| orders[k].len() >= 2).collect();
    if !movable.is_empty() {
        for _ in 0..swaps {
            let k = *movable.choose(rng).expect("nonempty");
            let i = rng.gen_range(0..orders[k].len() - 1);
            orders[k].swap(i, i + 1);
        }
    }
    ExplicitDiagram::realize(qs, d.clone(), orders)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surfaces_respect_bounds() {
        let mut rng = case_rng(7, 0);
        for _ in 0..200 {
            let qs = random_surface(&mut rng);
            assert!(qs.rank() > 0);
            assert!(qs.disk_count() <= 2 && qs.gate_count() <= 4);
            assert!(qs.vertex_count() <= 3 && qs.y_edge_count() <= 3);
            assert!((0..qs.disk_count()).all(|d| !qs.disk_gates(d).is_empty()));
        }
    }

    #[test]
    fn case_streams_are_deterministic_and_distinct() {
        let a = random_word(&mut case_rng(1, 5), 3, 8);
        let b = random_word(&mut case_rng(1, 5), 3, 8);
        assert_eq!(a, b);
        let words: Vec<GroupWord> = (0..20).map(|i| random_nontrivial_word(&mut case_rng(1, i), 3, 8)).collect();
        assert!(words.iter().any(|w| *w != words[0]));
    }

    #[test]
    fn redepth_keeps_lanes_valid() {
        let qs = crate::fixtures::qg1();
        let mut rng = case_rng(3, 0);
        let x = random_class(&mut rng, 2, 8);
        let y = random_class(&mut rng, 2, 8);
        let d = crate::diagram::family_of(&qs, &[&x, &y]).unwrap();
        let r = redepth(&mut rng, &d);
        r.validate(&qs).unwrap();
        assert_eq!(r.classes(&qs), d.classes(&qs));
    }
}
