//! Labeled chord diagrams on oriented skeletons.
//!
//! A diagram lives on a skeleton made of oriented interval components, whose
//! endpoints fill the ordered lower boundary word `sour` and upper boundary
//! word `tar`, plus oriented circle components. Along each component sits an
//! ordered list of events: chord endpoints (each chord id occurs exactly
//! twice) and group labels in the gaps between them.
//!
//! Boundary sign convention, used consistently everywhere: a `+` at a
//! boundary position means the strand flows downward through it. At the
//! bottom a `+` strand exits, at the top a `+` strand enters.
//!
//! Values are kept in a canonical form so that structural equality decides
//! equality of diagrams up to orientation-preserving homeomorphism of the
//! skeleton: labels are merged and identity labels dropped, an all-label
//! circle keeps the conjugacy normal form of its holonomy, interval
//! components are ordered by their starting boundary point, chord ids are
//! renumbered by first appearance, and circles are rotated and ordered by a
//! minimal-encoding search that branches on ties.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::groups::{self, GroupElement, GroupSpec};
use crate::linalg::Q;
use num_traits::One;

/// Event on a skeleton component, ordered along the flow of the strand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    /// Endpoint of the chord with the given diagram-local id.
    End(u32),
    /// Label on the arc between neighboring events.
    Label(GroupElement),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Sour,
    Tar,
}

/// A boundary point: which boundary word and which 0-based position in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPt {
    pub side: Side,
    pub pos: usize,
}

pub fn bp(side: Side, pos: usize) -> BoundaryPt {
    BoundaryPt { side, pos }
}

/// Oriented interval component running from `from` to `to`, events in flow order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalComp {
    pub from: BoundaryPt,
    pub to: BoundaryPt,
    pub events: Vec<Event>,
}

/// A labeled chord diagram in canonical form (constructors canonicalize).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    pub spec: GroupSpec,
    pub nsour: usize,
    pub ntar: usize,
    pub intervals: Vec<IntervalComp>,
    pub circles: Vec<Vec<Event>>,
    pub nchords: u32,
}

/// Linear combination of canonical diagrams with exact rational coefficients.
pub type DiagramVector = BTreeMap<ChordDiagram, Q>;

pub fn dv_single(d: ChordDiagram) -> DiagramVector {
    let mut v = DiagramVector::new();
    v.insert(d, Q::one());
    v
}

pub fn dv_add(target: &mut DiagramVector, d: ChordDiagram, c: Q) {
    use num_traits::Zero;
    if c.is_zero() {
        return;
    }
    if let Some(e) = target.get_mut(&d) {
        *e += c;
        if e.is_zero() {
            target.remove(&d);
        }
    } else {
        target.insert(d, c);
    }
}

/// Addressing of a component for event surgery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Comp {
    Interval(usize),
    Circle(usize),
}

impl ChordDiagram {
    /// Diagram with no components at all.
    pub fn empty(spec: &GroupSpec) -> Self {
        ChordDiagram {
            spec: spec.clone(),
            nsour: 0,
            ntar: 0,
            intervals: Vec::new(),
            circles: Vec::new(),
            nchords: 0,
        }
        .canonical()
    }

    /// Identity diagram on the boundary word `word` (letters +-1): vertical
    /// strands, strand i connecting sour i and tar i.
    pub fn identity(spec: &GroupSpec, word: &[i8]) -> Self {
        let intervals = word
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                assert!(s == 1 || s == -1, "boundary letters are +-1");
                if s == 1 {
                    IntervalComp { from: bp(Side::Tar, i), to: bp(Side::Sour, i), events: Vec::new() }
                } else {
                    IntervalComp { from: bp(Side::Sour, i), to: bp(Side::Tar, i), events: Vec::new() }
                }
            })
            .collect();
        ChordDiagram {
            spec: spec.clone(),
            nsour: word.len(),
            ntar: word.len(),
            intervals,
            circles: Vec::new(),
            nchords: 0,
        }
        .canonical()
    }

    /// Raw constructor; canonicalizes and checks well-formedness.
    pub fn new(
        spec: &GroupSpec,
        nsour: usize,
        ntar: usize,
        intervals: Vec<IntervalComp>,
        circles: Vec<Vec<Event>>,
    ) -> Self {
        let mut ends: BTreeMap<u32, u32> = BTreeMap::new();
        for ev in intervals.iter().flat_map(|c| c.events.iter()).chain(circles.iter().flatten()) {
            if let Event::End(id) = ev {
                *ends.entry(*id).or_insert(0) += 1;
            }
        }
        assert!(ends.values().all(|&c| c == 2), "every chord id must occur exactly twice");
        let d = ChordDiagram {
            spec: spec.clone(),
            nsour,
            ntar,
            intervals,
            circles,
            nchords: ends.len() as u32,
        };
        d.check_boundary();
        d.canonical()
    }

    fn check_boundary(&self) {
        let mut sour = vec![0u8; self.nsour];
        let mut tar = vec![0u8; self.ntar];
        for c in &self.intervals {
            for p in [c.from, c.to] {
                match p.side {
                    Side::Sour => {
                        assert!(p.pos < self.nsour, "sour position out of range");
                        sour[p.pos] += 1;
                    }
                    Side::Tar => {
                        assert!(p.pos < self.ntar, "tar position out of range");
                        tar[p.pos] += 1;
                    }
                }
            }
        }
        assert!(
            sour.iter().chain(tar.iter()).all(|&c| c == 1),
            "every boundary position is met by exactly one strand end"
        );
    }

    pub fn degree(&self) -> u32 {
        self.nchords
    }

    /// The lower boundary word: +1 where a strand exits downward (its head),
    /// -1 where a strand enters upward (its tail).
    pub fn sour_word(&self) -> Vec<i8> {
        let mut w = vec![0i8; self.nsour];
        for c in &self.intervals {
            if c.to.side == Side::Sour {
                w[c.to.pos] = 1;
            }
            if c.from.side == Side::Sour {
                w[c.from.pos] = -1;
            }
        }
        w
    }

    /// The upper boundary word: +1 where a strand enters from above (its
    /// tail), -1 where a strand exits upward (its head).
    pub fn tar_word(&self) -> Vec<i8> {
        let mut w = vec![0i8; self.ntar];
        for c in &self.intervals {
            if c.from.side == Side::Tar {
                w[c.from.pos] = 1;
            }
            if c.to.side == Side::Tar {
                w[c.to.pos] = -1;
            }
        }
        w
    }

    pub fn events(&self, comp: Comp) -> &Vec<Event> {
        match comp {
            Comp::Interval(i) => &self.intervals[i].events,
            Comp::Circle(i) => &self.circles[i],
        }
    }

    pub fn events_mut(&mut self, comp: Comp) -> &mut Vec<Event> {
        match comp {
            Comp::Interval(i) => &mut self.intervals[i].events,
            Comp::Circle(i) => &mut self.circles[i],
        }
    }

    /// Merges adjacent labels, drops identity labels, and collapses an
    /// all-label circle to the conjugacy normal form of its holonomy.
    pub fn rep_normalize(&mut self) {
        let spec = self.spec.clone();
        for c in &mut self.intervals {
            c.events = merge_run(&spec, core::mem::take(&mut c.events));
        }
        for circ in &mut self.circles {
            let evs = core::mem::take(circ);
            *circ = normalize_circle(&spec, evs);
        }
    }

    /// Canonical representative; the only entry point that reorders data.
    pub fn canonical(mut self) -> Self {
        self.rep_normalize();
        self.intervals.sort_by_key(|c| c.from);
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        let mut next: u32 = 0;
        for c in &mut self.intervals {
            for ev in &mut c.events {
                if let Event::End(id) = ev {
                    let new = *map.entry(*id).or_insert_with(|| {
                        let v = next;
                        next += 1;
                        v
                    });
                    *ev = Event::End(new);
                }
            }
        }
        if self.circles.is_empty() {
            assert_eq!(next, self.nchords, "chord ids must be exactly 0..nchords");
            return self;
        }
        let circles = core::mem::take(&mut self.circles);
        self.circles = best_circle_order(&circles, &map, next);
        let total_ends = self
            .intervals
            .iter()
            .map(|c| c.events.iter().filter(|e| matches!(e, Event::End(_))).count())
            .sum::<usize>()
            + self
                .circles
                .iter()
                .flatten()
                .filter(|e| matches!(e, Event::End(_)))
                .count();
        assert_eq!(total_ends, 2 * self.nchords as usize, "chord endpoint count");
        self
    }

    /// Degree parity sign used by the star involution on series.
    pub fn star_coeff(&self) -> i8 {
        if self.nchords % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

fn merge_run(spec: &GroupSpec, events: Vec<Event>) -> Vec<Event> {
    let mut out: Vec<Event> = Vec::with_capacity(events.len());
    for ev in events {
        match ev {
            Event::Label(g) => {
                if let Some(Event::Label(prev)) = out.last_mut() {
                    *prev = groups::mul(spec, prev, &g);
                    if let Some(Event::Label(p)) = out.last() {
                        if p.is_identity() {
                            out.pop();
                        }
                    }
                } else if !g.is_identity() {
                    out.push(Event::Label(g));
                }
            }
            e => out.push(e),
        }
    }
    out
}

fn normalize_circle(spec: &GroupSpec, events: Vec<Event>) -> Vec<Event> {
    let first_end = events.iter().position(|e| matches!(e, Event::End(_)));
    match first_end {
        None => {
            // Pure holonomy: the label is defined up to conjugacy.
            let mut g = spec.identity();
            for ev in events {
                if let Event::Label(l) = ev {
                    g = groups::mul(spec, &g, &l);
                }
            }
            let (rep, _) = groups::conj_normal(spec, &g);
            if rep.is_identity() {
                Vec::new()
            } else {
                vec![Event::Label(rep)]
            }
        }
        Some(i) => {
            let mut rotated = events;
            rotated.rotate_left(i);
            merge_run(spec, rotated)
        }
    }
}

/// Chooses rotations and an order for the circles minimizing the renumbered
/// encoding; branches on ties so the result does not depend on input order.
fn best_circle_order(circles: &[Vec<Event>], map: &BTreeMap<u32, u32>, next: u32) -> Vec<Vec<Event>> {
    fn rewrite(evs: &[Event], map: &mut BTreeMap<u32, u32>, next: &mut u32) -> Vec<Event> {
        evs.iter()
            .map(|ev| match ev {
                Event::End(id) => {
                    let new = *map.entry(*id).or_insert_with(|| {
                        let v = *next;
                        *next += 1;
                        v
                    });
                    Event::End(new)
                }
                e => e.clone(),
            })
            .collect()
    }

    fn recurse(
        remaining: &[(usize, &Vec<Event>)],
        map: &BTreeMap<u32, u32>,
        next: u32,
    ) -> Vec<Vec<Event>> {
        if remaining.is_empty() {
            return Vec::new();
        }
        let mut cands: Vec<(Vec<Event>, usize, BTreeMap<u32, u32>, u32)> = Vec::new();
        for &(idx, evs) in remaining {
            for r in 0..evs.len().max(1) {
                let mut rot = evs.clone();
                if !rot.is_empty() {
                    rot.rotate_left(r);
                }
                let mut m2 = map.clone();
                let mut n2 = next;
                let rw = rewrite(&rot, &mut m2, &mut n2);
                cands.push((rw, idx, m2, n2));
            }
        }
        let min_rw = cands.iter().map(|c| c.0.clone()).min().expect("nonempty");
        let mut seen: BTreeSet<(Vec<Event>, Vec<(u32, u32)>)> = BTreeSet::new();
        let mut best: Option<Vec<Vec<Event>>> = None;
        for (rw, idx, m2, n2) in cands {
            if rw != min_rw {
                continue;
            }
            let key = (rw.clone(), m2.iter().map(|(&a, &b)| (a, b)).collect());
            if !seen.insert(key) {
                continue;
            }
            let rest: Vec<(usize, &Vec<Event>)> =
                remaining.iter().copied().filter(|&(i, _)| i != idx).collect();
            let mut tail = recurse(&rest, &m2, n2);
            let mut full = vec![rw.clone()];
            full.append(&mut tail);
            if best.as_ref().map_or(true, |b| full < *b) {
                best = Some(full);
            }
        }
        best.expect("at least one candidate")
    }

    let tagged: Vec<(usize, &Vec<Event>)> = circles.iter().enumerate().collect();
    recurse(&tagged, map, next)
}

/// Places `d1` on top of `d2`; requires sour(d1) = tar(d2).
pub fn compose(d1: &ChordDiagram, d2: &ChordDiagram) -> ChordDiagram {
    assert_eq!(d1.spec, d2.spec, "matching group specs required");
    assert_eq!(d1.sour_word(), d2.tar_word(), "boundary words must match");
    let shift = d1.nchords;
    let reid = |evs: &[Event]| -> Vec<Event> {
        evs.iter()
            .map(|e| match e {
                Event::End(id) => Event::End(id + shift),
                e => e.clone(),
            })
            .collect()
    };

    // Pieces: (events, start port, end port). Ports: Bot(i) final sour,
    // Top(i) final tar, Mid(i) interface.
    #[derive(Clone, Copy, PartialEq, Eq, Debug)]
    enum Port {
        Bot(usize),
        Top(usize),
        Mid(usize),
    }
    let mut pieces: Vec<(Vec<Event>, Port, Port)> = Vec::new();
    for c in &d1.intervals {
        let conv = |p: BoundaryPt| match p.side {
            Side::Sour => Port::Mid(p.pos),
            Side::Tar => Port::Top(p.pos),
        };
        pieces.push((c.events.clone(), conv(c.from), conv(c.to)));
    }
    for c in &d2.intervals {
        let conv = |p: BoundaryPt| match p.side {
            Side::Sour => Port::Bot(p.pos),
            Side::Tar => Port::Mid(p.pos),
        };
        pieces.push((reid(&c.events), conv(c.from), conv(c.to)));
    }

    let mut used = vec![false; pieces.len()];
    let find_tail_at = |port: Port, used: &[bool]| -> Option<usize> {
        pieces.iter().enumerate().position(|(i, p)| !used[i] && p.1 == port)
    };

    let mut intervals: Vec<IntervalComp> = Vec::new();
    // Walk maximal chains starting from every final-boundary tail.
    let starts: Vec<usize> = pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p.1, Port::Bot(_) | Port::Top(_)))
        .map(|(i, _)| i)
        .collect();
    for s in starts {
        if used[s] {
            continue;
        }
        let from = pieces[s].1;
        let mut events = Vec::new();
        let mut cur = s;
        let to = loop {
            used[cur] = true;
            events.extend(pieces[cur].0.iter().cloned());
            match pieces[cur].2 {
                Port::Mid(k) => {
                    cur = find_tail_at(Port::Mid(k), &used).expect("interface continuation");
                }
                p => break p,
            }
        };
        let conv_back = |p: Port| match p {
            Port::Bot(i) => bp(Side::Sour, i),
            Port::Top(i) => bp(Side::Tar, i),
            Port::Mid(_) => unreachable!("chain ends on a final boundary"),
        };
        intervals.push(IntervalComp { from: conv_back(from), to: conv_back(to), events });
    }
    // Remaining pieces close up into circles.
    let mut circles: Vec<Vec<Event>> = Vec::new();
    for s in 0..pieces.len() {
        if used[s] {
            continue;
        }
        let mut events = Vec::new();
        let mut cur = s;
        loop {
            used[cur] = true;
            events.extend(pieces[cur].0.iter().cloned());
            let Port::Mid(k) = pieces[cur].2 else {
                unreachable!("cycle pieces connect through the interface")
            };
            let nxt = find_tail_at(Port::Mid(k), &used);
            match nxt {
                Some(n) => cur = n,
                None => break,
            }
        }
        circles.push(events);
    }
    for c in &d1.circles {
        circles.push(c.clone());
    }
    for c in &d2.circles {
        circles.push(reid(c));
    }

    ChordDiagram {
        spec: d1.spec.clone(),
        nsour: d2.nsour,
        ntar: d1.ntar,
        intervals,
        circles,
        nchords: d1.nchords + d2.nchords,
    }
    .canonical()
}

/// Side-by-side juxtaposition, `d1` to the left of `d2`.
pub fn tensor(d1: &ChordDiagram, d2: &ChordDiagram) -> ChordDiagram {
    assert_eq!(d1.spec, d2.spec, "matching group specs required");
    let shift = d1.nchords;
    let mut intervals = d1.intervals.clone();
    for c in &d2.intervals {
        let mv = |p: BoundaryPt| match p.side {
            Side::Sour => bp(Side::Sour, p.pos + d1.nsour),
            Side::Tar => bp(Side::Tar, p.pos + d1.ntar),
        };
        let events = c
            .events
            .iter()
            .map(|e| match e {
                Event::End(id) => Event::End(id + shift),
                e => e.clone(),
            })
            .collect();
        intervals.push(IntervalComp { from: mv(c.from), to: mv(c.to), events });
    }
    let mut circles = d1.circles.clone();
    for c in &d2.circles {
        circles.push(
            c.iter()
                .map(|e| match e {
                    Event::End(id) => Event::End(id + shift),
                    e => e.clone(),
                })
                .collect(),
        );
    }
    ChordDiagram {
        spec: d1.spec.clone(),
        nsour: d1.nsour + d2.nsour,
        ntar: d1.ntar + d2.ntar,
        intervals,
        circles,
        nchords: d1.nchords + d2.nchords,
    }
    .canonical()
}

/// Restriction of `d` to the chords in `keep` (events of other chords removed).
fn restrict(d: &ChordDiagram, keep: &BTreeSet<u32>) -> ChordDiagram {
    let filter = |evs: &[Event]| -> Vec<Event> {
        evs.iter()
            .filter(|e| match e {
                Event::End(id) => keep.contains(id),
                Event::Label(_) => true,
            })
            .cloned()
            .collect()
    };
    ChordDiagram {
        spec: d.spec.clone(),
        nsour: d.nsour,
        ntar: d.ntar,
        intervals: d
            .intervals
            .iter()
            .map(|c| IntervalComp { from: c.from, to: c.to, events: filter(&c.events) })
            .collect(),
        circles: d.circles.iter().map(|c| filter(c)).collect(),
        nchords: keep.len() as u32,
    }
    .canonical()
}

/// Comultiplication: the sum over the 2^n ways to split the chord set, each
/// term keeping the full labeled skeleton on both sides.
pub fn delta(d: &ChordDiagram) -> BTreeMap<(ChordDiagram, ChordDiagram), Q> {
    let n = d.nchords;
    let mut out: BTreeMap<(ChordDiagram, ChordDiagram), Q> = BTreeMap::new();
    for mask in 0u64..(1u64 << n) {
        let left: BTreeSet<u32> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let right: BTreeSet<u32> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
        let key = (restrict(d, &left), restrict(d, &right));
        use num_traits::Zero;
        *out.entry(key).or_insert_with(Q::zero) += Q::one();
    }
    out
}

/// Replaces interval component `strand` by |s| parallel planar copies
/// described by the signed word `s` (+1 keeps direction, -1 reverses it,
/// inverting labels). Copy i sits at sub-position i of the expanded block at
/// the strand's starting end; when both ends lie on the same boundary side
/// the copies nest, so the far end carries the reversed sub-order. Each chord
/// endpoint on the strand expands into a signed sum over the copies; an
/// endpoint landing on a reversed copy contributes a factor -1. The empty
/// word deletes a chord-free strand.
pub fn cable_strand(d: &ChordDiagram, strand: usize, s: &[i8]) -> DiagramVector {
    assert!(s.iter().all(|&x| x == 1 || x == -1), "cable letters are +-1");
    let comp = d.intervals[strand].clone();
    let k = s.len();
    let n_endpoints = comp.events.iter().filter(|e| matches!(e, Event::End(_))).count();
    assert!(
        !(k == 0 && n_endpoints > 0),
        "cannot cable a strand carrying chords by the empty word"
    );

    // How far a boundary position moves once the block at `at` grows from one
    // slot to k slots.
    let shift_of = |p: BoundaryPt, at: BoundaryPt| -> i64 {
        if p.side == at.side && p.pos > at.pos {
            k as i64 - 1
        } else {
            0
        }
    };
    // Final position of sub-index j in the expanded block anchored at `end`.
    let block_pos = |end: BoundaryPt, j: usize| -> BoundaryPt {
        let base = end.pos as i64 + shift_of(end, if end == comp.from { comp.to } else { comp.from });
        bp(end.side, (base + j as i64) as usize)
    };
    // Sub-index at the far end: nested when both ends share a side.
    let far_index = |ci: usize| -> usize {
        if comp.from.side == comp.to.side {
            k - 1 - ci
        } else {
            ci
        }
    };

    let mut out = DiagramVector::new();
    let assignments = {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..n_endpoints {
            let mut next = Vec::new();
            for a in acc {
                for c in 0..k {
                    let mut b = a.clone();
                    b.push(c);
                    next.push(b);
                }
            }
            acc = next;
        }
        acc
    };

    for assign in assignments {
        let mut sign = 1i64;
        // Events per copy, in the original flow order for now.
        let mut per_copy: Vec<Vec<Event>> = vec![Vec::new(); k];
        let mut epi = 0usize;
        for ev in &comp.events {
            match ev {
                Event::End(id) => {
                    let c = assign[epi];
                    epi += 1;
                    per_copy[c].push(Event::End(*id));
                    if s[c] == -1 {
                        sign = -sign;
                    }
                }
                Event::Label(g) => {
                    for (c, evs) in per_copy.iter_mut().enumerate() {
                        let l = if s[c] == 1 { g.clone() } else { groups::inv(&d.spec, g) };
                        evs.push(Event::Label(l));
                    }
                }
            }
        }

        let mut intervals: Vec<IntervalComp> = Vec::new();
        for (j, c) in d.intervals.iter().enumerate() {
            if j == strand {
                for (ci, evs) in per_copy.iter().enumerate() {
                    let near = block_pos(comp.from, ci);
                    let far = block_pos(comp.to, far_index(ci));
                    let (from, to, events) = if s[ci] == 1 {
                        (near, far, evs.clone())
                    } else {
                        (far, near, evs.iter().rev().cloned().collect())
                    };
                    intervals.push(IntervalComp { from, to, events });
                }
            } else {
                let mv = |p: BoundaryPt| -> BoundaryPt {
                    let np = p.pos as i64 + shift_of(p, comp.from) + shift_of(p, comp.to);
                    bp(p.side, np as usize)
                };
                intervals.push(IntervalComp { from: mv(c.from), to: mv(c.to), events: c.events.clone() });
            }
        }
        let delta_side = |side: Side| -> i64 {
            let mut d = 0i64;
            if comp.from.side == side {
                d += k as i64 - 1;
            }
            if comp.to.side == side {
                d += k as i64 - 1;
            }
            d
        };
        let term = ChordDiagram {
            spec: d.spec.clone(),
            nsour: (d.nsour as i64 + delta_side(Side::Sour)) as usize,
            ntar: (d.ntar as i64 + delta_side(Side::Tar)) as usize,
            intervals,
            circles: d.circles.clone(),
            nchords: d.nchords,
        }
        .canonical();
        dv_add(&mut out, term, crate::linalg::q_int(sign));
    }
    out
}

/// Single-strand cabling as an operation on a one-interval diagram.
pub fn cable(s: &[i8], d: &ChordDiagram) -> DiagramVector {
    assert_eq!(d.intervals.len(), 1, "cable expects a single interval component");
    cable_strand(d, 0, s)
}

/// A homomorphism between label groups with matching orientation characters,
/// given by the images of the source generators.
#[derive(Clone, Debug)]
pub struct Relabel {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub gen_images: Vec<GroupElement>,
}

impl Relabel {
    pub fn new(source: GroupSpec, target: GroupSpec, gen_images: Vec<GroupElement>) -> Self {
        assert_eq!(gen_images.len(), source.rank(), "one image per generator");
        for (i, img) in gen_images.iter().enumerate() {
            let sg = match &source {
                GroupSpec::Free { signs } => signs[i],
                GroupSpec::Z2 => -1,
                GroupSpec::Int => 1,
            };
            assert_eq!(
                groups::sigma(&target, img),
                sg,
                "orientation characters must be compatible"
            );
        }
        if let GroupSpec::Z2 = source {
            let sq = groups::mul(&target, &gen_images[0], &gen_images[0]);
            assert!(sq.is_identity(), "image of an order-two generator must square to e");
        }
        Relabel { source, target, gen_images }
    }

    pub fn apply_element(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Word(w) => {
                let mut out = self.target.identity();
                for &l in w {
                    let img = &self.gen_images[(l.unsigned_abs() as usize) - 1];
                    let f = if l > 0 { img.clone() } else { groups::inv(&self.target, img) };
                    out = groups::mul(&self.target, &out, &f);
                }
                out
            }
            GroupElement::Res(r) => {
                if *r == 0 {
                    self.target.identity()
                } else {
                    self.gen_images[0].clone()
                }
            }
            GroupElement::Int(n) => groups::pow(&self.target, &self.gen_images[0], *n),
        }
    }
}

/// Applies a label homomorphism to every label.
pub fn relabel(phi: &Relabel, d: &ChordDiagram) -> ChordDiagram {
    assert_eq!(d.spec, phi.source, "diagram spec must match the map source");
    let mapev = |evs: &[Event]| -> Vec<Event> {
        evs.iter()
            .map(|e| match e {
                Event::Label(g) => Event::Label(phi.apply_element(g)),
                e => e.clone(),
            })
            .collect()
    };
    ChordDiagram {
        spec: phi.target.clone(),
        nsour: d.nsour,
        ntar: d.ntar,
        intervals: d
            .intervals
            .iter()
            .map(|c| IntervalComp { from: c.from, to: c.to, events: mapev(&c.events) })
            .collect(),
        circles: d.circles.iter().map(|c| mapev(c)).collect(),
        nchords: d.nchords,
    }
    .canonical()
}

/// Binary-tree bracketing of a signed word; leaves read left to right.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NonAssocWord {
    Leaf(i8),
    Pair(Box<NonAssocWord>, Box<NonAssocWord>),
}

impl NonAssocWord {
    pub fn leaf(s: i8) -> Self {
        assert!(s == 1 || s == -1, "leaves are +-1");
        NonAssocWord::Leaf(s)
    }

    pub fn pair(a: NonAssocWord, b: NonAssocWord) -> Self {
        NonAssocWord::Pair(Box::new(a), Box::new(b))
    }

    /// Right-nested comb bracketing of a word: (w0 (w1 (... wn))).
    pub fn comb(word: &[i8]) -> Self {
        assert!(!word.is_empty(), "empty word has no bracketing");
        if word.len() == 1 {
            NonAssocWord::leaf(word[0])
        } else {
            NonAssocWord::pair(NonAssocWord::leaf(word[0]), NonAssocWord::comb(&word[1..]))
        }
    }

    /// The underlying signed word, brackets forgotten.
    pub fn leaves(&self) -> Vec<i8> {
        match self {
            NonAssocWord::Leaf(s) => vec![*s],
            NonAssocWord::Pair(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            NonAssocWord::Leaf(_) => 1,
            NonAssocWord::Pair(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flips every sign, keeping the tree shape.
    pub fn negate(&self) -> Self {
        match self {
            NonAssocWord::Leaf(s) => NonAssocWord::Leaf(-s),
            NonAssocWord::Pair(a, b) => NonAssocWord::pair(a.negate(), b.negate()),
        }
    }

    /// Mirror image: reverses the word and the tree shape.
    pub fn mirror(&self) -> Self {
        match self {
            NonAssocWord::Leaf(s) => NonAssocWord::Leaf(*s),
            NonAssocWord::Pair(a, b) => NonAssocWord::pair(b.mirror(), a.mirror()),
        }
    }
}
