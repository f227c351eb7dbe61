//! Loop diagrams in lane normal form and the generic-position data the forms
//! are computed from.
//!
//! A lane of a disk with gates `c_0, …, c_{n-1}` (counterclockwise) is the
//! strip of boundary between `c_l` and `c_{l+1}`; a [`DiskArc`] in lane `l`
//! joins these two gates, nested by depth (depth 1 hugs the boundary). A loop
//! is a cyclic sequence of arcs and edge paths in `Y`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{ConjClass, GroupWord, Letter};
use crate::error::{Error, Result};
use crate::surface::{QuasiSurface, Step};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiskArc {
    pub disk: usize,
    pub lane: usize,
    pub depth: u32,
    /// Forward arcs run from `c_lane` to `c_{lane+1}`.
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SingularPath {
    pub start: usize,
    /// Edges of `Y` with a flag for traversal against the edge's direction.
    pub edges: Vec<(usize, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Arc(DiskArc),
    Path(SingularPath),
}

/// One closed loop. The empty sequence is the constant loop.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopDiagram {
    pub segments: Vec<Segment>,
}

/// A family of loops whose arcs have pairwise distinct depths in every lane.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaneDiagram {
    pub loops: Vec<LoopDiagram>,
}

pub type LaneKey = (usize, usize);

impl DiskArc {
    fn gate_at(qs: &QuasiSurface, disk: usize, position: usize) -> usize {
        let gates = qs.disk_gates(disk);
        gates[position % gates.len()]
    }

    /// Gate at the `c_lane` end.
    pub fn lower_gate(&self, qs: &QuasiSurface) -> usize {
        Self::gate_at(qs, self.disk, self.lane)
    }

    /// Gate at the `c_{lane+1}` end.
    pub fn upper_gate(&self, qs: &QuasiSurface) -> usize {
        Self::gate_at(qs, self.disk, self.lane + 1)
    }

    pub fn entry_gate(&self, qs: &QuasiSurface) -> usize {
        if self.forward {
            self.lower_gate(qs)
        } else {
            self.upper_gate(qs)
        }
    }

    pub fn exit_gate(&self, qs: &QuasiSurface) -> usize {
        if self.forward {
            self.upper_gate(qs)
        } else {
            self.lower_gate(qs)
        }
    }

    /// Position of this arc's endpoint on `gate` in the counterclockwise order
    /// along that gate: arcs of the preceding lane by increasing depth, then
    /// arcs of the following lane by decreasing depth.
    fn order_key(&self, at_lower_end: bool) -> (u8, i64) {
        if at_lower_end {
            (1, -(self.depth as i64))
        } else {
            (0, self.depth as i64)
        }
    }
}

impl Segment {
    fn steps(&self, qs: &QuasiSurface) -> Vec<Step> {
        match self {
            Segment::Arc(a) => vec![
                qs.entry_step(a.entry_gate(qs)),
                qs.exit_step(a.exit_gate(qs)),
            ],
            Segment::Path(p) => p
                .edges
                .iter()
                .map(|&(edge, reversed)| Step {
                    edge,
                    forward: !reversed,
                })
                .collect(),
        }
    }

    fn start(&self, qs: &QuasiSurface) -> usize {
        match self {
            Segment::Arc(a) => qs.gate(a.entry_gate(qs)).vertex,
            Segment::Path(p) => p.start,
        }
    }

    fn end(&self, qs: &QuasiSurface) -> usize {
        match self {
            Segment::Arc(a) => qs.gate(a.exit_gate(qs)).vertex,
            Segment::Path(p) => p
                .edges
                .iter()
                .fold(p.start, |v, &(e, reversed)| {
                    let (a, b) = qs.edge(e);
                    if reversed {
                        if b == v { a } else { usize::MAX }
                    } else if a == v {
                        b
                    } else {
                        usize::MAX
                    }
                }),
        }
    }
}

impl LoopDiagram {
    pub fn constant() -> Self {
        LoopDiagram::default()
    }

    pub fn steps(&self, qs: &QuasiSurface) -> Vec<Step> {
        self.segments.iter().flat_map(|s| s.steps(qs)).collect()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, &DiskArc)> {
        self.segments.iter().enumerate().filter_map(|(i, s)| match s {
            Segment::Arc(a) => Some((i, a)),
            Segment::Path(_) => None,
        })
    }

    fn validate(&self, qs: &QuasiSurface) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            match s {
                Segment::Arc(a) => {
                    if a.disk >= qs.disk_count() {
                        return Err(Error::Diagram(format!("segment {i}: no disk {}", a.disk)));
                    }
                    let n = qs.disk_gates(a.disk).len();
                    if a.lane >= n {
                        return Err(Error::Diagram(format!(
                            "segment {i}: disk {} has {n} lanes, got lane {}",
                            a.disk, a.lane
                        )));
                    }
                    if a.depth == 0 {
                        return Err(Error::Diagram(format!("segment {i}: depth must be positive")));
                    }
                }
                Segment::Path(p) => {
                    if p.start >= qs.vertex_count() {
                        return Err(Error::Diagram(format!("segment {i}: no vertex {}", p.start)));
                    }
                    if let Some(&(e, _)) = p.edges.iter().find(|(e, _)| *e >= qs.y_edge_count()) {
                        return Err(Error::Diagram(format!("segment {i}: no edge {e} in Y")));
                    }
                    if s.end(qs) == usize::MAX {
                        return Err(Error::Diagram(format!("segment {i}: edge path is not connected")));
                    }
                }
            }
        }
        let n = self.segments.len();
        for i in 0..n {
            let next = (i + 1) % n;
            if self.segments[i].end(qs) != self.segments[next].start(qs) {
                return Err(Error::Diagram(format!(
                    "segment {i} ends at vertex `{}` but segment {next} starts at `{}`",
                    qs.vertex_name(self.segments[i].end(qs)),
                    qs.vertex_name(self.segments[next].start(qs))
                )));
            }
        }
        Ok(())
    }

    /// Generator letters and gate crossings along the loop, read from the
    /// start of its first segment.
    pub fn trace(&self, qs: &QuasiSurface) -> LoopTrace {
        let mut t = LoopTrace::default();
        for (i, s) in self.segments.iter().enumerate() {
            match s {
                Segment::Arc(a) => {
                    let (entry, exit) = (a.entry_gate(qs), a.exit_gate(qs));
                    let entry_index = t.crossings.len();
                    t.crossings.push(Crossing {
                        gate: entry,
                        sign: 1,
                        segment: i,
                        rot: t.gens.len(),
                    });
                    t.gens.extend(qs.step_letter(qs.entry_step(entry)));
                    let rot = t.gens.len();
                    t.gens.extend(qs.step_letter(qs.exit_step(exit)));
                    t.crossings.push(Crossing {
                        gate: exit,
                        sign: -1,
                        segment: i,
                        rot: t.gens.len(),
                    });
                    t.arcs.push(ArcTrace {
                        segment: i,
                        disk: a.disk,
                        entry: entry_index,
                        exit: entry_index + 1,
                        rot,
                    });
                }
                Segment::Path(_) => {
                    t.gens.extend(qs.steps_to_letters(&s.steps(qs)));
                }
            }
        }
        t
    }

    pub fn class(&self, qs: &QuasiSurface) -> ConjClass {
        ConjClass::from_letters(qs.steps_to_letters(&self.steps(qs)))
    }

    /// The loop as a word based at the start of its first segment.
    pub fn based_word(&self, qs: &QuasiSurface) -> GroupWord {
        crate::algebra::reduce_word(&GroupWord::new(qs.steps_to_letters(&self.steps(qs))))
    }
}

impl LaneDiagram {
    pub fn new(loops: Vec<LoopDiagram>) -> Self {
        LaneDiagram { loops }
    }

    pub fn single(l: LoopDiagram) -> Self {
        LaneDiagram { loops: vec![l] }
    }

    pub fn validate(&self, qs: &QuasiSurface) -> Result<()> {
        let mut seen: HashMap<(usize, usize, u32), usize> = HashMap::new();
        for (i, l) in self.loops.iter().enumerate() {
            l.validate(qs)
                .map_err(|e| Error::Diagram(format!("loop {i}: {}", e.to_string().trim_start_matches("invalid diagram: "))))?;
            for (_, a) in l.arcs() {
                if let Some(j) = seen.insert((a.disk, a.lane, a.depth), i) {
                    return Err(Error::Diagram(format!(
                        "loops {j} and {i} share depth {} in lane {} of disk {}",
                        a.depth, a.lane, a.disk
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn classes(&self, qs: &QuasiSurface) -> Vec<ConjClass> {
        self.loops.iter().map(|l| l.class(qs)).collect()
    }

    pub fn traces(&self, qs: &QuasiSurface) -> Vec<LoopTrace> {
        self.loops.iter().map(|l| l.trace(qs)).collect()
    }

    /// Arcs of each lane as `(loop, segment)`, sorted by depth.
    pub fn lane_arcs(&self) -> BTreeMap<LaneKey, Vec<(usize, usize)>> {
        let mut out: BTreeMap<LaneKey, Vec<(u32, usize, usize)>> = BTreeMap::new();
        for (i, l) in self.loops.iter().enumerate() {
            for (s, a) in l.arcs() {
                out.entry((a.disk, a.lane)).or_default().push((a.depth, i, s));
            }
        }
        out.into_iter()
            .map(|(k, mut v)| {
                v.sort_unstable();
                (k, v.into_iter().map(|(_, i, s)| (i, s)).collect())
            })
            .collect()
    }

    pub fn set_depth(&mut self, loop_index: usize, segment: usize, depth: u32) {
        if let Segment::Arc(a) = &mut self.loops[loop_index].segments[segment] {
            a.depth = depth;
        }
    }

    fn max_depth(&self, key: LaneKey) -> u32 {
        self.loops
            .iter()
            .flat_map(|l| l.arcs().map(|(_, a)| *a))
            .filter(|a| (a.disk, a.lane) == key)
            .map(|a| a.depth)
            .max()
            .unwrap_or(0)
    }

    /// Crossing orders from the lane rule, with no surface crossings.
    pub fn generic(&self, qs: &QuasiSurface) -> GenericFamily {
        let traces = self.traces(qs);
        let mut keyed: Vec<Vec<((u8, i64), PointRef)>> = vec![Vec::new(); qs.gate_count()];
        for (i, (l, t)) in self.loops.iter().zip(&traces).enumerate() {
            for arc in &t.arcs {
                let Segment::Arc(a) = &l.segments[arc.segment] else {
                    unreachable!()
                };
                for (c, at_lower) in [(arc.entry, a.forward), (arc.exit, !a.forward)] {
                    let gate = t.crossings[c].gate;
                    keyed[gate].push((
                        a.order_key(at_lower),
                        PointRef {
                            loop_index: i,
                            crossing: c,
                        },
                    ));
                }
            }
        }
        let orders = keyed
            .into_iter()
            .map(|mut v| {
                v.sort_by_key(|(k, _)| *k);
                v.into_iter().map(|(_, p)| p).collect()
            })
            .collect();
        GenericFamily::new(traces, orders, Vec::new())
    }

    /// Replace the arc at `segment` by a full turn around its disk starting at
    /// its entry gate, followed by the arc itself. The turn is homotopically
    /// trivial; new arcs get fresh outermost depths.
    pub fn insert_turn(&mut self, qs: &QuasiSurface, loop_index: usize, segment: usize, ccw: bool) {
        let Segment::Arc(arc) = self.loops[loop_index].segments[segment].clone() else {
            return;
        };
        let n = qs.disk_gates(arc.disk).len();
        let start = if arc.forward { arc.lane } else { (arc.lane + 1) % n };
        let mut hops = Vec::new();
        for t in 0..n {
            let lane = if ccw {
                (start + t) % n
            } else {
                (start + 2 * n - t - 1) % n
            };
            hops.push((lane, ccw));
        }
        let mut replacement = self.hop_segments(qs, arc.disk, &hops);
        replacement.push(Segment::Arc(arc));
        self.loops[loop_index]
            .segments
            .splice(segment..=segment, replacement);
    }

    /// Replace the arc at `segment` by hops around the other side of its disk.
    pub fn reroute(&mut self, qs: &QuasiSurface, loop_index: usize, segment: usize) {
        let Segment::Arc(arc) = self.loops[loop_index].segments[segment].clone() else {
            return;
        };
        let n = qs.disk_gates(arc.disk).len();
        let hops: Vec<(usize, bool)> = if n == 1 {
            vec![(0, !arc.forward)]
        } else if arc.forward {
            (1..n).map(|t| ((arc.lane + n - t) % n, false)).collect()
        } else {
            (1..n).map(|t| ((arc.lane + t) % n, true)).collect()
        };
        let mut replacement = self.hop_segments(qs, arc.disk, &hops);
        replacement.pop();
        self.loops[loop_index]
            .segments
            .splice(segment..=segment, replacement);
    }

    /// Arcs for the given `(lane, forward)` hops, each followed by an empty
    /// path at its exit gate.
    fn hop_segments(&self, qs: &QuasiSurface, disk: usize, hops: &[(usize, bool)]) -> Vec<Segment> {
        let mut depths: HashMap<usize, u32> = HashMap::new();
        let mut out = Vec::new();
        for &(lane, forward) in hops {
            let d = depths
                .entry(lane)
                .or_insert_with(|| self.max_depth((disk, lane)));
            *d += 1;
            let a = DiskArc {
                disk,
                lane,
                depth: *d,
                forward,
            };
            out.push(Segment::Arc(a));
            out.push(Segment::Path(SingularPath {
                start: qs.gate(a.exit_gate(qs)).vertex,
                edges: Vec::new(),
            }));
        }
        out
    }
}

/// A crossing of a loop with a gate: `+1` entering the disk, `-1` leaving.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub gate: usize,
    pub sign: i64,
    pub segment: usize,
    /// Rotation point in the loop's generator sequence for the loop based at
    /// the glued vertex of the gate at this crossing.
    pub rot: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ArcTrace {
    pub segment: usize,
    pub disk: usize,
    pub entry: usize,
    pub exit: usize,
    /// Rotation point for the loop based inside the arc.
    pub rot: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoopTrace {
    /// Generator letters along the loop, not reduced.
    pub gens: Vec<Letter>,
    pub crossings: Vec<Crossing>,
    pub arcs: Vec<ArcTrace>,
}

impl LoopTrace {
    pub fn rotation(&self, r: usize) -> impl Iterator<Item = Letter> + '_ {
        self.gens[r..].iter().chain(&self.gens[..r]).copied()
    }

    pub fn class(&self) -> ConjClass {
        ConjClass::from_letters(self.gens.iter().copied())
    }

    pub fn arc_at(&self, segment: usize) -> Option<&ArcTrace> {
        self.arcs.iter().find(|a| a.segment == segment)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointRef {
    pub loop_index: usize,
    pub crossing: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArcRef {
    pub loop_index: usize,
    pub segment: usize,
}

/// A transverse crossing of two arcs in a disk. `sign` is `ε_r(first, second)`;
/// the opposite order has the opposite sign.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceCrossing {
    pub first: ArcRef,
    pub second: ArcRef,
    pub sign: i64,
}

impl SurfaceCrossing {
    /// `(ε_r(a,b), arc of a, arc of b)` if this crossing is between loops `a` and `b`.
    pub fn oriented(&self, a: usize, b: usize) -> Option<(i64, ArcRef, ArcRef)> {
        if self.first.loop_index == a && self.second.loop_index == b {
            Some((self.sign, self.first, self.second))
        } else if self.first.loop_index == b && self.second.loop_index == a {
            Some((-self.sign, self.second, self.first))
        } else {
            None
        }
    }
}

/// Everything the forms need: loop traces, the counterclockwise order of
/// crossing points along each gate, and crossings inside the disks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericFamily {
    pub traces: Vec<LoopTrace>,
    pub gate_orders: Vec<Vec<PointRef>>,
    pub surface: Vec<SurfaceCrossing>,
    positions: Vec<Vec<usize>>,
}

impl GenericFamily {
    pub fn new(traces: Vec<LoopTrace>, gate_orders: Vec<Vec<PointRef>>, surface: Vec<SurfaceCrossing>) -> Self {
        let mut positions: Vec<Vec<usize>> = traces.iter().map(|t| vec![0; t.crossings.len()]).collect();
        for order in &gate_orders {
            for (i, p) in order.iter().enumerate() {
                positions[p.loop_index][p.crossing] = i;
            }
        }
        GenericFamily {
            traces,
            gate_orders,
            surface,
            positions,
        }
    }

    /// Index of a crossing point in the counterclockwise order of its gate.
    pub fn position(&self, p: PointRef) -> usize {
        self.positions[p.loop_index][p.crossing]
    }

    /// Crossings of loop `l` with gate `k`, as indices into its crossing list.
    pub fn crossings_at(&self, l: usize, k: usize) -> impl Iterator<Item = (usize, &Crossing)> {
        self.traces[l]
            .crossings
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.gate == k)
    }
}

/// A diagram with explicitly chosen gate orders and surface crossings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitDiagram {
    pub lanes: LaneDiagram,
    pub gate_orders: Vec<Vec<PointRef>>,
    pub surface: Vec<SurfaceCrossing>,
}

impl ExplicitDiagram {
    /// Declared crossings are taken as given; their planar realizability is
    /// not checked. Each unordered pair of arcs may be declared at most once.
    pub fn new(
        qs: &QuasiSurface,
        lanes: LaneDiagram,
        gate_orders: Vec<Vec<PointRef>>,
        surface: Vec<SurfaceCrossing>,
    ) -> Result<Self> {
        lanes.validate(qs)?;
        let traces = lanes.traces(qs);
        check_orders(qs, &traces, &gate_orders)?;
        let mut seen = std::collections::HashSet::new();
        for r in &surface {
            if r.sign != 1 && r.sign != -1 {
                return Err(Error::Diagram("crossing sign must be +1 or -1".into()));
            }
            for a in [r.first, r.second] {
                let ok = traces
                    .get(a.loop_index)
                    .map(|t| t.arc_at(a.segment).is_some())
                    .unwrap_or(false);
                if !ok {
                    return Err(Error::Diagram(format!(
                        "crossing refers to segment {} of loop {}, which is not an arc",
                        a.segment, a.loop_index
                    )));
                }
            }
            let key = if r.first <= r.second { (r.first, r.second) } else { (r.second, r.first) };
            if !seen.insert(key) {
                return Err(Error::Diagram("a pair of arcs is declared to cross twice".into()));
            }
        }
        Ok(ExplicitDiagram {
            lanes,
            gate_orders,
            surface,
        })
    }

    /// Surface crossings computed from the gate orders: every arc is a chord
    /// of its disk between its entry and exit points, chords cross iff their
    /// endpoints interleave, and `ε_r(a,b) = +1` iff `b` leaves to the left
    /// of `a`.
    pub fn realize(qs: &QuasiSurface, lanes: LaneDiagram, gate_orders: Vec<Vec<PointRef>>) -> Result<Self> {
        lanes.validate(qs)?;
        let traces = lanes.traces(qs);
        check_orders(qs, &traces, &gate_orders)?;
        let mut surface = Vec::new();
        for d in 0..qs.disk_count() {
            let mut circle: HashMap<PointRef, usize> = HashMap::new();
            for &k in qs.disk_gates(d) {
                for p in &gate_orders[k] {
                    let next = circle.len();
                    circle.insert(*p, next);
                }
            }
            let total = circle.len();
            let mut chords = Vec::new();
            for (i, t) in traces.iter().enumerate() {
                for a in t.arcs.iter().filter(|a| a.disk == d) {
                    let at = |c| circle[&PointRef { loop_index: i, crossing: c }];
                    chords.push((ArcRef { loop_index: i, segment: a.segment }, at(a.entry), at(a.exit)));
                }
            }
            let inside = |x: usize, from: usize, to: usize| {
                let span = (to + total - from) % total;
                let off = (x + total - from) % total;
                off > 0 && off < span
            };
            for (i, &(ra, a1, a2)) in chords.iter().enumerate() {
                for &(rb, b1, b2) in &chords[i + 1..] {
                    if ra.loop_index == rb.loop_index {
                        continue;
                    }
                    if inside(b1, a1, a2) != inside(b2, a1, a2) {
                        let sign = if inside(b2, a2, a1) { 1 } else { -1 };
                        surface.push(SurfaceCrossing {
                            first: ra,
                            second: rb,
                            sign,
                        });
                    }
                }
            }
        }
        Ok(ExplicitDiagram {
            lanes,
            gate_orders,
            surface,
        })
    }

    pub fn generic(&self, qs: &QuasiSurface) -> GenericFamily {
        GenericFamily::new(self.lanes.traces(qs), self.gate_orders.clone(), self.surface.clone())
    }
}

fn check_orders(qs: &QuasiSurface, traces: &[LoopTrace], orders: &[Vec<PointRef>]) -> Result<()> {
    if orders.len() != qs.gate_count() {
        return Err(Error::Diagram(format!(
            "expected crossing orders for {} gates, got {}",
            qs.gate_count(),
            orders.len()
        )));
    }
    for (k, order) in orders.iter().enumerate() {
        let mut expected: Vec<PointRef> = traces
            .iter()
            .enumerate()
            .flat_map(|(i, t)| {
                t.crossings
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.gate == k)
                    .map(move |(c, _)| PointRef { loop_index: i, crossing: c })
            })
            .collect();
        let mut given = order.clone();
        expected.sort_unstable();
        given.sort_unstable();
        if expected != given {
            return Err(Error::Diagram(format!(
                "order at gate `{}` is not a permutation of its crossing points",
                qs.gate(k).name
            )));
        }
    }
    Ok(())
}

/// Lane normal form of the loop represented by a word, read as a cyclic word
/// from where it starts: the edge path is freely and cyclically reduced, each
/// disk passage is split into hops between adjacent gates along the shorter
/// side (counterclockwise on ties), and depths are assigned per lane in
/// construction order.
pub fn loop_from_word(qs: &QuasiSurface, w: &GroupWord) -> Result<LoopDiagram> {
    let mut steps = qs.word_steps(w)?;
    let (mut lo, mut hi) = (0, steps.len());
    while hi - lo >= 2 && steps[lo] == steps[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    steps = steps[lo..hi].to_vec();
    if steps.is_empty() {
        return Ok(LoopDiagram::constant());
    }
    let is_entry = |s: &Step| qs.edge_gate(s.edge).is_some() && !s.forward;
    let Some(first) = steps.iter().position(is_entry) else {
        let start = qs.tail(steps[0]);
        return Ok(LoopDiagram {
            segments: vec![path_segment(start, &steps)],
        });
    };
    steps.rotate_left(first);
    Ok(LoopDiagram {
        segments: passages(qs, &steps, &mut HashMap::new()),
    })
}

/// Lane diagram of a word read as a loop based at the basepoint: the first
/// segment is a path starting there.
pub fn based_loop_from_word(qs: &QuasiSurface, w: &GroupWord) -> Result<LoopDiagram> {
    let steps = qs.word_steps(w)?;
    let is_entry = |s: &Step| qs.edge_gate(s.edge).is_some() && !s.forward;
    let first = steps.iter().position(is_entry).unwrap_or(steps.len());
    let mut segments = vec![path_segment(qs.basepoint(), &steps[..first])];
    segments.extend(passages(qs, &steps[first..], &mut HashMap::new()));
    Ok(LoopDiagram { segments })
}

fn path_segment(start: usize, steps: &[Step]) -> Segment {
    Segment::Path(SingularPath {
        start,
        edges: steps.iter().map(|s| (s.edge, !s.forward)).collect(),
    })
}

/// Segments for a reduced step sequence starting with an entry step.
fn passages(qs: &QuasiSurface, steps: &[Step], depths: &mut HashMap<LaneKey, u32>) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < steps.len() {
        let from = qs.edge_gate(steps[i].edge).expect("entry step");
        let to = qs
            .edge_gate(steps[i + 1].edge)
            .expect("a reduced path leaves a cone right after entering it");
        let disk = qs.gate(from).disk;
        let n = qs.disk_gates(disk).len();
        let (pa, pb) = (qs.gate(from).position, qs.gate(to).position);
        let ccw = (pb + n - pa) % n;
        let hops: Vec<(usize, bool)> = if ccw <= n - ccw {
            (0..ccw).map(|t| ((pa + t) % n, true)).collect()
        } else {
            (0..n - ccw).map(|t| ((pa + 2 * n - t - 1) % n, false)).collect()
        };
        for (h, &(lane, forward)) in hops.iter().enumerate() {
            let d = depths.entry((disk, lane)).or_insert(0);
            *d += 1;
            let arc = DiskArc {
                disk,
                lane,
                depth: *d,
                forward,
            };
            out.push(Segment::Arc(arc));
            if h + 1 < hops.len() {
                out.push(Segment::Path(SingularPath {
                    start: qs.gate(arc.exit_gate(qs)).vertex,
                    edges: Vec::new(),
                }));
            }
        }
        i += 2;
        let next = steps[i..]
            .iter()
            .position(|s| qs.edge_gate(s.edge).is_some())
            .map_or(steps.len(), |p| p + i);
        out.push(path_segment(qs.gate(to).vertex, &steps[i..next]));
        i = next;
    }
    out
}

/// Lane normal form of a conjugacy class.
pub fn word_to_diagram(qs: &QuasiSurface, c: &ConjClass) -> Result<LaneDiagram> {
    Ok(LaneDiagram::single(loop_from_word(qs, &c.word())?))
}

/// The class of the loop (or of each loop of a family).
pub fn diagram_to_word(qs: &QuasiSurface, d: &LaneDiagram) -> Result<Vec<ConjClass>> {
    d.validate(qs)?;
    Ok(d.classes(qs))
}

/// Signed count of crossings of loop `l` with gate `k`.
pub fn dual_v(qs: &QuasiSurface, k: usize, d: &LaneDiagram, l: usize) -> i64 {
    d.loops[l]
        .trace(qs)
        .crossings
        .iter()
        .filter(|c| c.gate == k)
        .map(|c| c.sign)
        .sum()
}

/// Concatenate families, re-assigning depths lane by lane so that the arcs of
/// the diagram listed first in `block_order` get the smallest depths. Within a
/// diagram the depth order is kept.
pub fn combine_in_order(ds: &[LaneDiagram], block_order: &[usize]) -> LaneDiagram {
    let mut loops: Vec<LoopDiagram> = Vec::new();
    let mut first_loop = Vec::new();
    for d in ds {
        first_loop.push(loops.len());
        loops.extend(d.loops.iter().cloned());
    }
    let mut out = LaneDiagram::new(loops);
    let mut offset: HashMap<LaneKey, u32> = HashMap::new();
    for &b in block_order {
        for (key, arcs) in ds[b].lane_arcs() {
            let base = offset.entry(key).or_insert(0);
            for (rank, (l, s)) in arcs.iter().enumerate() {
                out.set_depth(first_loop[b] + l, *s, *base + rank as u32 + 1);
            }
            *base += arcs.len() as u32;
        }
    }
    out
}

/// Combine with the earlier argument getting smaller depths.
pub fn combine_generic(ds: &[LaneDiagram]) -> LaneDiagram {
    let order: Vec<usize> = (0..ds.len()).collect();
    combine_in_order(ds, &order)
}

/// Combined lane diagram of loops given by classes.
pub fn family_of(qs: &QuasiSurface, xs: &[&ConjClass]) -> Result<LaneDiagram> {
    let ds = xs
        .iter()
        .map(|c| word_to_diagram(qs, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(combine_generic(&ds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::abelianize;
    use crate::fixtures;
    use proptest::prelude::*;

    fn c(s: &str) -> ConjClass {
        s.parse().unwrap()
    }

    fn arc(disk: usize, lane: usize, depth: u32, forward: bool) -> Segment {
        Segment::Arc(DiskArc { disk, lane, depth, forward })
    }

    fn stay(v: usize) -> Segment {
        Segment::Path(SingularPath { start: v, edges: vec![] })
    }

    #[test]
    fn qt2_single_arc_is_z() {
        let qs = fixtures::qt2();
        let d = LaneDiagram::single(LoopDiagram { segments: vec![arc(0, 0, 1, true), stay(0)] });
        assert_eq!(diagram_to_word(&qs, &d).unwrap(), vec![c("g1")]);
        assert_eq!(word_to_diagram(&qs, &c("g1")).unwrap(), d);
    }

    #[test]
    fn qt2_there_and_back_is_trivial() {
        let qs = fixtures::qt2();
        let d = LaneDiagram::single(LoopDiagram {
            segments: vec![arc(0, 0, 1, true), stay(0), arc(0, 1, 1, true), stay(0)],
        });
        assert_eq!(diagram_to_word(&qs, &d).unwrap(), vec![ConjClass::trivial()]);
    }

    #[test]
    fn y_loop_has_no_crossings() {
        let qs = fixtures::qy2();
        let p = Segment::Path(SingularPath { start: 0, edges: vec![(0, false), (1, false)] });
        let d = LaneDiagram::single(LoopDiagram { segments: vec![p] });
        let class = diagram_to_word(&qs, &d).unwrap().remove(0);
        assert!(!class.is_trivial());
        assert_eq!(word_to_diagram(&qs, &class).unwrap().loops[0].arcs().count(), 0);
        for k in 0..qs.gate_count() {
            assert_eq!(dual_v(&qs, k, &d, 0), 0);
        }
    }

    #[test]
    fn qt2_z_squared() {
        let qs = fixtures::qt2();
        let d = word_to_diagram(&qs, &c("g1 g1")).unwrap();
        let t = d.loops[0].trace(&qs);
        assert_eq!(t.arcs.len(), 2);
        assert_eq!(t.crossings.iter().filter(|x| x.gate == 0).count(), 2);
        assert_eq!(t.crossings.iter().filter(|x| x.gate == 1).count(), 2);
        assert_eq!(dual_v(&qs, 0, &d, 0), 2);
        let z = word_to_diagram(&qs, &c("g1")).unwrap();
        assert_eq!((dual_v(&qs, 0, &z, 0), dual_v(&qs, 1, &z, 0)), (1, -1));
    }

    #[test]
    fn trivial_class_gives_empty_diagram() {
        let qs = fixtures::qt2();
        let d = word_to_diagram(&qs, &ConjClass::trivial()).unwrap();
        assert!(d.loops[0].segments.is_empty());
        assert_eq!(d.classes(&qs), vec![ConjClass::trivial()]);
    }

    #[test]
    fn qt2_combined_gate_orders() {
        let qs = fixtures::qt2();
        let z = word_to_diagram(&qs, &c("g1")).unwrap();
        let g = combine_generic(&[z.clone(), z]).generic(&qs);
        let loops = |k: usize| g.gate_orders[k].iter().map(|p| p.loop_index).collect::<Vec<_>>();
        assert_eq!(loops(0), vec![1, 0]);
        assert_eq!(loops(1), vec![0, 1]);
    }

    #[test]
    fn combine_single_is_identity() {
        let qs = fixtures::qg1();
        let d = word_to_diagram(&qs, &c("g1 g2 g1^-1 g2^-1")).unwrap();
        assert_eq!(combine_generic(std::slice::from_ref(&d)), d);
    }

    #[test]
    fn validation_catches_errors() {
        let qs = fixtures::qt2();
        let bad_lane = LaneDiagram::single(LoopDiagram { segments: vec![arc(0, 2, 1, true), stay(0)] });
        assert!(bad_lane.validate(&qs).is_err());
        let zero_depth = LaneDiagram::single(LoopDiagram { segments: vec![arc(0, 0, 0, true), stay(0)] });
        assert!(zero_depth.validate(&qs).is_err());
        let z = word_to_diagram(&qs, &c("g1")).unwrap();
        let clash = LaneDiagram::new(vec![z.loops[0].clone(), z.loops[0].clone()]);
        assert!(clash.validate(&qs).is_err());
        let qy = fixtures::qy2();
        let gap = LaneDiagram::single(LoopDiagram { segments: vec![arc(0, 0, 1, true), stay(0)] });
        assert!(gap.validate(&qy).is_err());
    }

    #[test]
    fn lane_orders_realize_without_crossings() {
        for qs in fixtures::all().into_iter().filter(|q| q.rank() >= 2) {
            let words = ["g1 g2", "g2^-1 g1 g1", "g1 g2 g1^-1 g2^-1", "g2 g2 g1"];
            let ds: Vec<LaneDiagram> = words
                .iter()
                .map(|w| word_to_diagram(&qs, &c(w)).unwrap())
                .collect();
            let family = combine_generic(&ds);
            let orders = family.generic(&qs).gate_orders;
            let e = ExplicitDiagram::realize(&qs, family, orders).unwrap();
            assert!(e.surface.is_empty(), "lane arcs must not cross");
        }
    }

    #[test]
    fn explicit_construction_checks() {
        let qs = fixtures::qt2();
        let z = word_to_diagram(&qs, &c("g1")).unwrap();
        let fam = combine_generic(&[z.clone(), z]);
        let orders = fam.generic(&qs).gate_orders;
        let r = SurfaceCrossing {
            first: ArcRef { loop_index: 0, segment: 0 },
            second: ArcRef { loop_index: 1, segment: 0 },
            sign: 1,
        };
        assert!(ExplicitDiagram::new(&qs, fam.clone(), orders.clone(), vec![r]).is_ok());
        let twice = SurfaceCrossing { first: r.second, second: r.first, sign: -1 };
        assert!(ExplicitDiagram::new(&qs, fam.clone(), orders.clone(), vec![r, twice]).is_err());
        let not_arc = SurfaceCrossing { second: ArcRef { loop_index: 1, segment: 1 }, ..r };
        assert!(ExplicitDiagram::new(&qs, fam.clone(), orders.clone(), vec![not_arc]).is_err());
        assert_eq!(r.oriented(1, 0), Some((-1, r.second, r.first)));
        let mut short = orders;
        short[0].pop();
        assert!(ExplicitDiagram::realize(&qs, fam, short).is_err());
    }

    #[test]
    fn diagrams_serialize() {
        let qs = fixtures::qd2();
        let d = word_to_diagram(&qs, &c("g1 g2^-1")).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        let back: LaneDiagram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    fn fit(qs: &QuasiSurface, v: Vec<(usize, bool)>) -> GroupWord {
        GroupWord::new(v.into_iter().map(|(g, s)| Letter::new(g % qs.rank(), s)).collect())
    }

    proptest! {
        #[test]
        fn round_trip(f in 0usize..5, v in prop::collection::vec((0usize..2, any::<bool>()), 0..8)) {
            let qs = &fixtures::all()[f];
            let class = crate::algebra::canonical_conjugacy(&fit(qs, v));
            let d = word_to_diagram(qs, &class).unwrap();
            d.validate(qs).unwrap();
            prop_assert_eq!(diagram_to_word(qs, &d).unwrap(), vec![class]);
        }

        #[test]
        fn representative_start_is_kept(f in 0usize..5, v in prop::collection::vec((0usize..2, any::<bool>()), 0..8), u in prop::collection::vec((0usize..2, any::<bool>()), 0..4)) {
            let qs = &fixtures::all()[f];
            let x = fit(qs, v);
            let u = fit(qs, u);
            let conj = u.mul(&x).mul(&u.inverse());
            let l = loop_from_word(qs, &conj).unwrap();
            prop_assert_eq!(l.class(qs), crate::algebra::canonical_conjugacy(&x));
        }

        #[test]
        fn based_loops_spell_the_word(f in 0usize..5, v in prop::collection::vec((0usize..2, any::<bool>()), 0..8)) {
            let qs = &fixtures::all()[f];
            let w = crate::algebra::reduce_word(&fit(qs, v));
            let l = based_loop_from_word(qs, &w).unwrap();
            LaneDiagram::single(l.clone()).validate(qs).unwrap();
            prop_assert_eq!(l.based_word(qs), w.clone());
            prop_assert_eq!(crate::algebra::reduce_word(&GroupWord::new(l.trace(qs).gens)), w);
        }

        #[test]
        fn detours_keep_the_class(f in 0usize..5, v in prop::collection::vec((0usize..2, any::<bool>()), 1..8), pick in 0usize..16, ccw in any::<bool>(), turn in any::<bool>()) {
            let qs = &fixtures::all()[f];
            let class = crate::algebra::canonical_conjugacy(&fit(qs, v));
            let mut d = word_to_diagram(qs, &class).unwrap();
            let arcs: Vec<usize> = d.loops[0].arcs().map(|(i, _)| i).collect();
            prop_assume!(!arcs.is_empty());
            let s = arcs[pick % arcs.len()];
            if turn { d.insert_turn(qs, 0, s, ccw) } else { d.reroute(qs, 0, s) }
            d.validate(qs).unwrap();
            prop_assert_eq!(d.classes(qs), vec![class]);
        }

        #[test]
        fn dual_v_matches_abelianization(f in 0usize..5, v in prop::collection::vec((0usize..2, any::<bool>()), 0..8)) {
            let qs = &fixtures::all()[f];
            let class = crate::algebra::canonical_conjugacy(&fit(qs, v));
            let d = word_to_diagram(qs, &class).unwrap();
            let ab = abelianize(&class.word(), qs.rank());
            for k in 0..qs.gate_count() {
                let e = qs.gate_edge(k);
                // exponent sum of the gate edge, read through the generator paths
                let expected: i64 = (0..qs.rank())
                    .map(|g| {
                        let through: i64 = qs.generator_path(g).iter()
                            .filter(|s| s.edge == e)
                            .map(|s| if s.forward { -1 } else { 1 })
                            .sum();
                        through * ab[g]
                    })
                    .sum();
                prop_assert_eq!(dual_v(qs, k, &d, 0), expected);
            }
        }
    }
}
