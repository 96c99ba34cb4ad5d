//! Quotient spaces of labeled chord diagrams and truncated series.
//!
//! Equality of diagram combinations is always decided relative to a finitely
//! generated relation set: instances of the four-term relation, framing
//! independence, the character-naturality relation for labels, and (for the
//! infinite cyclic label group) the sphere-slide relation. For the cyclic
//! group of order two and for the trivial group the per-degree instance sets
//! are complete, so dimensions and memberships are exact there; for infinite
//! label groups results are relative to an alphabet bound and flagged as such.
//!
//! The truncated series type carries one diagram vector per degree up to a
//! cap and supports the ring operations plus exp, log, inverse and square
//! root with respect to composition.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::diagrams::{
    self, cable_strand, compose as dcompose, dv_add, dv_single, relabel, tensor as dtensor,
    ChordDiagram, Comp, DiagramVector, Event, Relabel,
};
use crate::groups::{self, GroupElement, GroupSpec};
use crate::linalg::{q_int, Q, RowSpan, SparseVec};
use num_traits::{One, Zero};

// ---------------------------------------------------------------------------
// Vector arithmetic.

pub fn dv_scale(v: &DiagramVector, c: &Q) -> DiagramVector {
    if c.is_zero() {
        return DiagramVector::new();
    }
    v.iter().map(|(d, a)| (d.clone(), a * c)).collect()
}

pub fn dv_sum(a: &DiagramVector, b: &DiagramVector) -> DiagramVector {
    let mut out = a.clone();
    for (d, c) in b {
        dv_add(&mut out, d.clone(), c.clone());
    }
    out
}

pub fn dv_diff(a: &DiagramVector, b: &DiagramVector) -> DiagramVector {
    let mut out = a.clone();
    for (d, c) in b {
        dv_add(&mut out, d.clone(), -c.clone());
    }
    out
}

/// Bilinear extension of diagram composition (first argument on top).
pub fn dv_compose(a: &DiagramVector, b: &DiagramVector) -> DiagramVector {
    let mut out = DiagramVector::new();
    for (d1, c1) in a {
        for (d2, c2) in b {
            dv_add(&mut out, dcompose(d1, d2), c1 * c2);
        }
    }
    out
}

/// Bilinear extension of the side-by-side tensor product.
pub fn dv_tensor(a: &DiagramVector, b: &DiagramVector) -> DiagramVector {
    let mut out = DiagramVector::new();
    for (d1, c1) in a {
        for (d2, c2) in b {
            dv_add(&mut out, dtensor(d1, d2), c1 * c2);
        }
    }
    out
}

pub fn dv_relabel(phi: &Relabel, v: &DiagramVector) -> DiagramVector {
    let mut out = DiagramVector::new();
    for (d, c) in v {
        dv_add(&mut out, relabel(phi, d), c.clone());
    }
    out
}

pub fn dv_cable_strand(v: &DiagramVector, strand: usize, s: &[i8]) -> DiagramVector {
    let mut out = DiagramVector::new();
    for (d, c) in v {
        for (t, ct) in cable_strand(d, strand, s) {
            dv_add(&mut out, t, ct * c);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Event surgery helpers shared by the relation generators.

/// All components of a diagram, intervals first.
pub fn components(d: &ChordDiagram) -> Vec<Comp> {
    (0..d.intervals.len())
        .map(Comp::Interval)
        .chain((0..d.circles.len()).map(Comp::Circle))
        .collect()
}

/// Positions of both endpoints of a chord, in scan order.
pub fn chord_positions(d: &ChordDiagram, id: u32) -> Vec<(Comp, usize)> {
    let mut out = Vec::new();
    for comp in components(d) {
        for (i, ev) in d.events(comp).iter().enumerate() {
            if *ev == Event::End(id) {
                out.push((comp, i));
            }
        }
    }
    out
}

pub fn insert_event(d: &mut ChordDiagram, comp: Comp, idx: usize, ev: Event) {
    d.events_mut(comp).insert(idx, ev);
}

pub fn remove_event(d: &mut ChordDiagram, comp: Comp, idx: usize) -> Event {
    d.events_mut(comp).remove(idx)
}

/// True when the chord's endpoints are consecutive events on one component
/// (including cyclically on a circle), with nothing at all between them.
pub fn chord_is_isolated(d: &ChordDiagram, id: u32) -> bool {
    let pos = chord_positions(d, id);
    let [(c1, i1), (c2, i2)] = [pos[0], pos[1]];
    if c1 != c2 {
        return false;
    }
    let len = d.events(c1).len();
    let adjacent = i2 == i1 + 1 || i1 == i2 + 1;
    let wrap = matches!(c1, Comp::Circle(_)) && ((i1 == 0 && i2 == len - 1) || (i2 == 0 && i1 == len - 1));
    adjacent || wrap
}

// ---------------------------------------------------------------------------
// Relation instances.

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelTag {
    FourT,
    Fi,
    /// Label splitting and merging; structural in this encoding, so instances
    /// of this tag are never emitted, but the tag exists for interchange.
    RepSplit,
    SigmaNat,
    S2Slide,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub vector: DiagramVector,
    pub tag: RelTag,
}

/// Four-term relation: remove the chosen endpoint of chord `v` and re-attach
/// it in the four gaps flanking the endpoints of chord `u`; signs before
/// minus after at each endpoint. Returns None for degenerate choices.
pub fn gen_four_t(d: &ChordDiagram, v: u32, occ: usize, u: u32) -> Option<Relation> {
    if v == u || v >= d.nchords || u >= d.nchords {
        return None;
    }
    let mut base = d.clone();
    let vpos = chord_positions(&base, v);
    let (rc, ri) = vpos[occ];
    remove_event(&mut base, rc, ri);

    let upos = chord_positions(&base, u);
    let mut vector = DiagramVector::new();
    for &(uc, ui) in &upos {
        for (offset, sign) in [(0usize, 1i64), (1usize, -1i64)] {
            let mut term = base.clone();
            insert_event(&mut term, uc, ui + offset, Event::End(v));
            dv_add(&mut vector, term.canonical(), q_int(sign));
        }
    }
    if vector.is_empty() {
        None
    } else {
        Some(Relation { vector, tag: RelTag::FourT })
    }
}

/// Framing independence: a diagram with an isolated chord is zero.
pub fn gen_fi(d: &ChordDiagram, chord: u32) -> Option<Relation> {
    if chord < d.nchords && chord_is_isolated(d, chord) {
        Some(Relation { vector: dv_single(d.clone()), tag: RelTag::Fi })
    } else {
        None
    }
}

/// Character naturality: the label s placed directly after both endpoints of
/// a chord equals sigma(s) times the label placed directly before both.
pub fn gen_sigma_nat(d: &ChordDiagram, chord: u32, s: &GroupElement) -> Option<Relation> {
    if s.is_identity() || chord >= d.nchords {
        return None;
    }
    let build = |offset: usize| -> ChordDiagram {
        let mut t = d.clone();
        let mut pos = chord_positions(&t, chord);
        // Apply the later insertion first so indices stay valid.
        pos.sort();
        pos.reverse();
        for (c, i) in pos {
            insert_event(&mut t, c, i + offset, Event::Label(s.clone()));
        }
        t.canonical()
    };
    let after = build(1);
    let before = build(0);
    let sign = groups::sigma(&d.spec, s);
    let mut vector = dv_single(after);
    dv_add(&mut vector, before, q_int(-(sign as i64)));
    if vector.is_empty() {
        None
    } else {
        Some(Relation { vector, tag: RelTag::SigmaNat })
    }
}

/// Sphere-slide relation over the infinite cyclic label group: for a chosen
/// attachment gap, the signed sum over all unit label passages of the context
/// diagram with an extra chord from the gap to just after that passage.
/// Valid in the quotient for the product of the circle and the sphere.
pub fn gen_s2_slide(context: &ChordDiagram, comp0: Comp, gap0: usize) -> Option<Relation> {
    assert_eq!(context.spec, GroupSpec::Int, "sphere slide needs integer labels");
    assert!(context.nsour == 0 && context.ntar == 0, "sphere slide applies to closed diagrams");
    let new_id = context.nchords;
    let mut vector = DiagramVector::new();
    for comp in components(context) {
        for (i, ev) in context.events(comp).iter().enumerate() {
            let Event::Label(GroupElement::Int(n)) = ev else { continue };
            let n = *n;
            let sgn = n.signum();
            for j in 1..=n.unsigned_abs() {
                let mut t = context.clone();
                // Split the label after the j-th unit passage.
                let pre = sgn * j as i64;
                let post = n - pre;
                let mut replacement: Vec<Event> = Vec::new();
                if pre != 0 {
                    replacement.push(Event::Label(GroupElement::Int(pre)));
                }
                replacement.push(Event::End(new_id));
                if post != 0 {
                    replacement.push(Event::Label(GroupElement::Int(post)));
                }
                let evs = t.events_mut(comp);
                evs.splice(i..=i, replacement.iter().cloned());
                let shift = replacement.len() - 1;
                let mut g0 = gap0;
                if comp == comp0 && gap0 > i {
                    g0 += shift;
                }
                insert_event(&mut t, comp0, g0, Event::End(new_id));
                t.nchords += 1;
                dv_add(&mut vector, t.canonical(), q_int(sgn));
            }
        }
    }
    if vector.is_empty() {
        None
    } else {
        Some(Relation { vector, tag: RelTag::S2Slide })
    }
}

// ---------------------------------------------------------------------------
// Bounded closure and quotient computations.

#[derive(Clone, Copy, Debug)]
pub struct RelFamilies {
    pub four_t: bool,
    pub fi: bool,
    pub sigma_nat: bool,
    pub s2_slide: bool,
}

impl RelFamilies {
    /// The families defining the diagram space of a thickened surface.
    pub fn surface() -> Self {
        RelFamilies { four_t: true, fi: true, sigma_nat: true, s2_slide: false }
    }

    /// Adds the sphere-slide family for the circle-times-sphere quotient.
    pub fn sphere() -> Self {
        RelFamilies { four_t: true, fi: true, sigma_nat: true, s2_slide: true }
    }
}

fn allowed_label_sets(
    spec: &GroupSpec,
    b: &[GroupElement],
) -> (BTreeSet<GroupElement>, BTreeSet<GroupElement>) {
    let mut products: Vec<GroupElement> = vec![spec.identity()];
    products.extend(b.iter().cloned());
    let mut plain = BTreeSet::new();
    let mut classes = BTreeSet::new();
    for x in &products {
        for y in &products {
            let g = groups::mul(spec, x, y);
            if !g.is_identity() {
                let (rep, _) = groups::conj_normal(spec, &g);
                classes.insert(rep);
                plain.insert(g);
            }
        }
    }
    (plain, classes)
}

fn diagram_labels_allowed(
    d: &ChordDiagram,
    plain: &BTreeSet<GroupElement>,
    classes: &BTreeSet<GroupElement>,
) -> bool {
    for comp in components(d) {
        let evs = d.events(comp);
        let pure_holonomy =
            matches!(comp, Comp::Circle(_)) && !evs.iter().any(|e| matches!(e, Event::End(_)));
        for ev in evs {
            if let Event::Label(g) = ev {
                let ok = if pure_holonomy { classes.contains(g) } else { plain.contains(g) };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// All relation instances touching `d` within the given families and label
/// alphabet.
fn instances_at(d: &ChordDiagram, b: &[GroupElement], fams: RelFamilies) -> Vec<Relation> {
    let mut out = Vec::new();
    if fams.four_t {
        for v in 0..d.nchords {
            for occ in 0..2 {
                for u in 0..d.nchords {
                    if let Some(r) = gen_four_t(d, v, occ, u) {
                        out.push(r);
                    }
                }
            }
        }
    }
    if fams.fi {
        for c in 0..d.nchords {
            if let Some(r) = gen_fi(d, c) {
                out.push(r);
            }
        }
    }
    if fams.sigma_nat {
        for c in 0..d.nchords {
            for s in b {
                if let Some(r) = gen_sigma_nat(d, c, s) {
                    out.push(r);
                }
            }
        }
    }
    if fams.s2_slide && d.nsour == 0 && d.ntar == 0 && d.spec == GroupSpec::Int {
        for c in 0..d.nchords {
            let mut ctx = d.clone();
            let pos = chord_positions(&ctx, c);
            // Remove the chord entirely; later index first.
            let (mut p1, mut p2) = (pos[0], pos[1]);
            if p1.0 == p2.0 && p1.1 < p2.1 {
                core::mem::swap(&mut p1, &mut p2);
            }
            remove_event(&mut ctx, p1.0, p1.1);
            remove_event(&mut ctx, p2.0, p2.1);
            // Renumber the removed chord out of the way.
            let last = ctx.nchords - 1;
            for comp in components(&ctx) {
                for ev in ctx.events_mut(comp).iter_mut() {
                    if let Event::End(id) = ev {
                        if *id == last {
                            *ev = Event::End(c);
                        }
                    }
                }
            }
            ctx.nchords = last;
            for comp in components(&ctx) {
                for gap in 0..=ctx.events(comp).len() {
                    if let Some(r) = gen_s2_slide(&ctx, comp, gap) {
                        out.push(r);
                    }
                }
            }
        }
    }
    out
}

/// Saturates the seed set under relation instances whose diagrams keep all
/// labels within products of at most two alphabet elements. Returns the
/// reachable diagrams and the collected relation instances.
pub fn closure(
    seeds: &[ChordDiagram],
    b: &[GroupElement],
    fams: RelFamilies,
    max_diagrams: usize,
) -> Result<(Vec<ChordDiagram>, Vec<Relation>), &'static str> {
    let Some(first) = seeds.first() else {
        return Ok((Vec::new(), Vec::new()));
    };
    let spec = first.spec.clone();
    let (plain, classes) = allowed_label_sets(&spec, b);
    let mut set: BTreeSet<ChordDiagram> = BTreeSet::new();
    let mut queue: Vec<ChordDiagram> = Vec::new();
    for s in seeds {
        let d = s.clone().canonical();
        assert!(diagram_labels_allowed(&d, &plain, &classes), "seed labels exceed the alphabet");
        if set.insert(d.clone()) {
            queue.push(d);
        }
    }
    let mut rels: Vec<Relation> = Vec::new();
    let mut seen: BTreeSet<DiagramVector> = BTreeSet::new();
    while let Some(d) = queue.pop() {
        for rel in instances_at(&d, b, fams) {
            if !rel.vector.keys().all(|t| diagram_labels_allowed(t, &plain, &classes)) {
                continue;
            }
            if !seen.insert(rel.vector.clone()) {
                continue;
            }
            for t in rel.vector.keys() {
                if !set.contains(t) {
                    if set.len() >= max_diagrams {
                        return Err("closure exceeded the diagram budget");
                    }
                    set.insert(t.clone());
                    queue.push(t.clone());
                }
            }
            rels.push(rel);
        }
    }
    Ok((set.into_iter().collect(), rels))
}

/// Exact membership of `v` in the span of the relation vectors.
pub fn quotient_contains(v: &DiagramVector, rels: &[Relation]) -> bool {
    let mut index: BTreeMap<ChordDiagram, usize> = BTreeMap::new();
    let add = |d: &ChordDiagram, index: &mut BTreeMap<ChordDiagram, usize>| {
        let n = index.len();
        index.entry(d.clone()).or_insert(n);
    };
    for r in rels {
        for d in r.vector.keys() {
            add(d, &mut index);
        }
    }
    for d in v.keys() {
        add(d, &mut index);
    }
    let to_sparse = |dv: &DiagramVector, index: &BTreeMap<ChordDiagram, usize>| -> SparseVec {
        dv.iter().map(|(d, c)| (index[d], c.clone())).collect()
    };
    let mut span = RowSpan::new();
    for r in rels {
        span.insert(to_sparse(&r.vector, &index));
    }
    span.contains(&to_sparse(v, &index))
}

/// Convenience wrapper: is `v` zero in the quotient generated by the closure
/// of its own support?
pub fn is_zero_mod(
    v: &DiagramVector,
    b: &[GroupElement],
    fams: RelFamilies,
    max_diagrams: usize,
) -> Result<bool, &'static str> {
    if v.is_empty() {
        return Ok(true);
    }
    let seeds: Vec<ChordDiagram> = v.keys().cloned().collect();
    let (_, rels) = closure(&seeds, b, fams, max_diagrams)?;
    Ok(quotient_contains(v, &rels))
}

/// Every Rep-normal diagram with the given number of circles, chords, and
/// labels drawn from the alphabet.
pub fn enumerate_closed_diagrams(
    spec: &GroupSpec,
    n_circles: usize,
    degree: u32,
    alphabet: &[GroupElement],
) -> Vec<ChordDiagram> {
    let slots = 2 * degree as usize;
    let mut diagrams: BTreeSet<ChordDiagram> = BTreeSet::new();

    // Distribute endpoint slots over circles.
    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 0..=total {
            for mut rest in compositions(total - first, parts - 1) {
                let mut v = vec![first];
                v.append(&mut rest);
                out.push(v);
            }
        }
        out
    }

    // Perfect matchings of 0..slots.
    fn matchings(avail: &mut Vec<usize>) -> Vec<Vec<(usize, usize)>> {
        if avail.is_empty() {
            return vec![vec![]];
        }
        let first = avail[0];
        let mut out = Vec::new();
        for k in 1..avail.len() {
            let second = avail[k];
            let mut rest: Vec<usize> = avail[1..].to_vec();
            rest.remove(k - 1);
            for mut m in matchings(&mut rest) {
                let mut v = vec![(first, second)];
                v.append(&mut m);
                out.push(v);
            }
        }
        out
    }

    let mut labels: Vec<Option<GroupElement>> = vec![None];
    labels.extend(alphabet.iter().cloned().map(Some));

    for comp_sizes in compositions(slots, n_circles) {
        let mut all: Vec<usize> = (0..slots).collect();
        for matching in matchings(&mut all) {
            let mut chord_of = vec![0u32; slots];
            for (cid, &(a, b)) in matching.iter().enumerate() {
                chord_of[a] = cid as u32;
                chord_of[b] = cid as u32;
            }
            // Gap counts: one per slot on a circle; one for an empty circle.
            let gap_counts: Vec<usize> = comp_sizes.iter().map(|&c| c.max(1)).collect();
            let total_gaps: usize = gap_counts.iter().sum();
            // Odometer over label choices.
            let mut choice = vec![0usize; total_gaps];
            loop {
                // Build: slots assigned to circles consecutively.
                let mut circles: Vec<Vec<Event>> = Vec::new();
                let mut slot = 0usize;
                let mut gap = 0usize;
                for &c in &comp_sizes {
                    let mut evs: Vec<Event> = Vec::new();
                    if c == 0 {
                        if let Some(g) = &labels[choice[gap]] {
                            evs.push(Event::Label(g.clone()));
                        }
                        gap += 1;
                    } else {
                        for _ in 0..c {
                            if let Some(g) = &labels[choice[gap]] {
                                evs.push(Event::Label(g.clone()));
                            }
                            gap += 1;
                            evs.push(Event::End(chord_of[slot]));
                            slot += 1;
                        }
                    }
                    circles.push(evs);
                }
                let d = ChordDiagram {
                    spec: spec.clone(),
                    nsour: 0,
                    ntar: 0,
                    intervals: Vec::new(),
                    circles,
                    nchords: degree,
                }
                .canonical();
                diagrams.insert(d);

                // Advance the odometer.
                let mut k = 0;
                loop {
                    if k == total_gaps {
                        break;
                    }
                    choice[k] += 1;
                    if choice[k] < labels.len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == total_gaps {
                    break;
                }
            }
        }
    }
    diagrams.into_iter().collect()
}

/// Dimension of the degree part of the diagram quotient on a closed skeleton.
/// The second component is true when the computation is exact (cyclic group
/// of order two with its full alphabet, or the trivial group).
pub fn quotient_dim(
    spec: &GroupSpec,
    n_circles: usize,
    degree: u32,
    alphabet: &[GroupElement],
) -> (usize, bool) {
    let diagrams = enumerate_closed_diagrams(spec, n_circles, degree, alphabet);
    let index: BTreeMap<ChordDiagram, usize> =
        diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
    let mut span = RowSpan::new();
    for d in &diagrams {
        for rel in instances_at(d, alphabet, RelFamilies::surface()) {
            let row: SparseVec = rel
                .vector
                .iter()
                .map(|(t, c)| (*index.get(t).expect("relation stays in the enumerated set"), c.clone()))
                .collect();
            span.insert(row);
        }
    }
    let exact = match spec {
        GroupSpec::Free { signs } => signs.is_empty(),
        GroupSpec::Z2 => alphabet.contains(&GroupElement::Res(1)),
        GroupSpec::Int => false,
    };
    (diagrams.len() - span.rank(), exact)
}

// ---------------------------------------------------------------------------
// Truncated series.

/// Degree-truncated formal series of diagram vectors on a fixed boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub cap: usize,
    /// comps[k] holds only degree-k diagrams.
    pub comps: Vec<DiagramVector>,
}

impl Series {
    pub fn zero(cap: usize) -> Self {
        Series { cap, comps: vec![DiagramVector::new(); cap + 1] }
    }

    pub fn from_diagram(cap: usize, d: ChordDiagram) -> Self {
        let mut s = Series::zero(cap);
        let deg = d.degree() as usize;
        if deg <= cap {
            s.comps[deg] = dv_single(d);
        }
        s
    }

    /// Identity series: the chordless identity diagram in degree zero.
    pub fn one(spec: &GroupSpec, word: &[i8], cap: usize) -> Self {
        Series::from_diagram(cap, ChordDiagram::identity(spec, word))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_empty())
    }

    pub fn add(&self, other: &Series) -> Series {
        assert_eq!(self.cap, other.cap);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| dv_sum(a, b))
            .collect();
        Series { cap: self.cap, comps }
    }

    pub fn sub(&self, other: &Series) -> Series {
        assert_eq!(self.cap, other.cap);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| dv_diff(a, b))
            .collect();
        Series { cap: self.cap, comps }
    }

    pub fn scale(&self, c: &Q) -> Series {
        Series { cap: self.cap, comps: self.comps.iter().map(|v| dv_scale(v, c)).collect() }
    }

    /// Degree-graded star involution: degree k scaled by (-1)^k.
    pub fn star(&self) -> Series {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { v.clone() } else { dv_scale(v, &q_int(-1)) })
            .collect();
        Series { cap: self.cap, comps }
    }

    pub fn relabel(&self, phi: &Relabel) -> Series {
        Series { cap: self.cap, comps: self.comps.iter().map(|v| dv_relabel(phi, v)).collect() }
    }

    pub fn cable_strand(&self, strand: usize, s: &[i8]) -> Series {
        Series {
            cap: self.cap,
            comps: self.comps.iter().map(|v| dv_cable_strand(v, strand, s)).collect(),
        }
    }
}

/// Graded composition of series, first argument on top.
pub fn s_compose(a: &Series, b: &Series) -> Series {
    assert_eq!(a.cap, b.cap);
    let mut out = Series::zero(a.cap);
    for i in 0..=a.cap {
        if a.comps[i].is_empty() {
            continue;
        }
        for j in 0..=(a.cap - i) {
            if b.comps[j].is_empty() {
                continue;
            }
            let prod = dv_compose(&a.comps[i], &b.comps[j]);
            out.comps[i + j] = dv_sum(&out.comps[i + j], &prod);
        }
    }
    out
}

/// Graded tensor product of series, first argument on the left.
pub fn s_tensor(a: &Series, b: &Series) -> Series {
    assert_eq!(a.cap, b.cap);
    let mut out = Series::zero(a.cap);
    for i in 0..=a.cap {
        if a.comps[i].is_empty() {
            continue;
        }
        for j in 0..=(a.cap - i) {
            if b.comps[j].is_empty() {
                continue;
            }
            let prod = dv_tensor(&a.comps[i], &b.comps[j]);
            out.comps[i + j] = dv_sum(&out.comps[i + j], &prod);
        }
    }
    out
}

fn degree_zero_identity(a: &Series) -> ChordDiagram {
    assert_eq!(a.comps[0].len(), 1, "degree-0 part must be a single identity diagram");
    let (d, c) = a.comps[0].iter().next().expect("nonempty");
    assert!(c.is_one(), "degree-0 coefficient must be 1");
    assert!(d.degree() == 0 && d.circles.is_empty(), "degree-0 part must be an identity diagram");
    for comp in &d.intervals {
        assert!(comp.events.is_empty(), "degree-0 part must be an identity diagram");
    }
    d.clone()
}

/// exp of a series with zero degree-0 part, with respect to composition.
pub fn s_exp(x: &Series, id: &ChordDiagram) -> Series {
    assert!(x.comps[0].is_empty(), "exp needs a vanishing degree-0 part");
    let mut acc = Series::from_diagram(x.cap, id.clone());
    let mut term = Series::from_diagram(x.cap, id.clone());
    for k in 1..=x.cap {
        term = s_compose(&term, x);
        term = term.scale(&Q::new(1.into(), (k as i64).into()));
        acc = acc.add(&term);
    }
    acc
}

/// log of a series whose degree-0 part is an identity diagram.
pub fn s_log(a: &Series) -> Series {
    let id = degree_zero_identity(a);
    let x = a.sub(&Series::from_diagram(a.cap, id));
    let mut acc = Series::zero(a.cap);
    let mut power = x.clone();
    for k in 1..=a.cap {
        let coeff = Q::new(
            if k % 2 == 1 { 1.into() } else { (-1i64).into() },
            (k as i64).into(),
        );
        acc = acc.add(&power.scale(&coeff));
        if k < a.cap {
            power = s_compose(&power, &x);
        }
    }
    acc
}

/// Compositional inverse of a series whose degree-0 part is an identity.
pub fn s_inverse(a: &Series) -> Series {
    let id = degree_zero_identity(a);
    let one = Series::from_diagram(a.cap, id);
    let x = a.sub(&one);
    let mut acc = one.clone();
    let mut power = one;
    for _ in 1..=a.cap {
        power = s_compose(&power, &x).scale(&q_int(-1));
        acc = acc.add(&power);
    }
    acc
}

/// Square root (with respect to composition) of a series whose degree-0 part
/// is an identity: the binomial series for exponent 1/2.
pub fn s_sqrt(a: &Series) -> Series {
    s_binomial(a, Q::new(1.into(), 2.into()))
}

/// Inverse square root: binomial series for exponent -1/2.
pub fn s_inv_sqrt(a: &Series) -> Series {
    s_binomial(a, Q::new((-1i64).into(), 2.into()))
}

fn s_binomial(a: &Series, exponent: Q) -> Series {
    let id = degree_zero_identity(a);
    let one = Series::from_diagram(a.cap, id);
    let x = a.sub(&one);
    let mut acc = one.clone();
    let mut power = one.clone();
    let mut coeff = Q::one();
    for k in 1..=a.cap {
        power = s_compose(&power, &x);
        let kq = q_int(k as i64);
        coeff = coeff * (exponent.clone() - kq.clone() + Q::one()) / kq;
        acc = acc.add(&power.scale(&coeff));
    }
    acc
}

// ---------------------------------------------------------------------------
// Comultiplication and the group-like property.

pub type PairVector = BTreeMap<(ChordDiagram, ChordDiagram), Q>;

fn pv_add(target: &mut PairVector, key: (ChordDiagram, ChordDiagram), c: Q) {
    if c.is_zero() {
        return;
    }
    if let Some(e) = target.get_mut(&key) {
        *e += c;
        if e.is_zero() {
            target.remove(&key);
        }
    } else {
        target.insert(key, c);
    }
}

/// Per total degree, the defect delta_hat(v) - v tensor v. An exactly
/// group-like series yields empty defects.
pub fn grouplike_defect(v: &Series) -> Vec<PairVector> {
    let mut out: Vec<PairVector> = vec![PairVector::new(); v.cap + 1];
    for n in 0..=v.cap {
        for (d, c) in &v.comps[n] {
            for ((l, r), m) in diagrams::delta(d) {
                pv_add(&mut out[n], (l, r), c * &m);
            }
        }
        for i in 0..=n {
            for (dl, cl) in &v.comps[i] {
                for (dr, cr) in &v.comps[n - i] {
                    pv_add(&mut out[n], (dl.clone(), dr.clone()), -(cl * cr));
                }
            }
        }
    }
    out
}

/// Group-likeness modulo relations: each degree's defect must lie in the span
/// of (relation tensor diagram) and (diagram tensor relation) vectors built
/// from bounded closures of the participating factors.
pub fn is_grouplike_mod(
    v: &Series,
    b: &[GroupElement],
    fams: RelFamilies,
    max_diagrams: usize,
) -> Result<bool, &'static str> {
    let defects = grouplike_defect(v);
    for defect in &defects {
        if defect.is_empty() {
            continue;
        }
        // Split by left degree; relations act blockwise.
        let mut by_block: BTreeMap<(u32, u32), PairVector> = BTreeMap::new();
        for ((l, r), c) in defect {
            by_block
                .entry((l.degree(), r.degree()))
                .or_default()
                .insert((l.clone(), r.clone()), c.clone());
        }
        for block in by_block.values() {
            let lefts: Vec<ChordDiagram> = block.keys().map(|(l, _)| l.clone()).collect();
            let rights: Vec<ChordDiagram> = block.keys().map(|(_, r)| r.clone()).collect();
            let (ldiags, lrels) = closure(&lefts, b, fams, max_diagrams)?;
            let (rdiags, rrels) = closure(&rights, b, fams, max_diagrams)?;
            let mut index: BTreeMap<(ChordDiagram, ChordDiagram), usize> = BTreeMap::new();
            let idx = |k: (ChordDiagram, ChordDiagram),
                       index: &mut BTreeMap<(ChordDiagram, ChordDiagram), usize>|
             -> usize {
                let n = index.len();
                *index.entry(k).or_insert(n)
            };
            let mut span = RowSpan::new();
            let mut rows: Vec<SparseVec> = Vec::new();
            for rel in &lrels {
                for d in &rdiags {
                    let mut row = SparseVec::new();
                    for (t, c) in &rel.vector {
                        let col = idx((t.clone(), d.clone()), &mut index);
                        row.insert(col, c.clone());
                    }
                    rows.push(row);
                }
            }
            for rel in &rrels {
                for d in &ldiags {
                    let mut row = SparseVec::new();
                    for (t, c) in &rel.vector {
                        let col = idx((d.clone(), t.clone()), &mut index);
                        row.insert(col, c.clone());
                    }
                    rows.push(row);
                }
            }
            let target: SparseVec = block
                .iter()
                .map(|(k, c)| (idx(k.clone(), &mut index), c.clone()))
                .collect();
            for row in rows {
                span.insert(row);
            }
            if !span.contains(&target) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::bp;
    use crate::diagrams::IntervalComp;
    use crate::diagrams::Side;

    fn trivial() -> GroupSpec {
        GroupSpec::trivial()
    }

    fn circle_diagram(spec: &GroupSpec, events: Vec<Event>, nchords: u32) -> ChordDiagram {
        ChordDiagram {
            spec: spec.clone(),
            nsour: 0,
            ntar: 0,
            intervals: vec![],
            circles: vec![events],
            nchords,
        }
        .canonical()
    }

    #[test]
    fn classical_one_circle_dimensions() {
        let spec = trivial();
        let expected = [1usize, 0, 1, 1, 3];
        for (deg, &want) in expected.iter().enumerate() {
            let (dim, exact) = quotient_dim(&spec, 1, deg as u32, &[]);
            assert!(exact);
            assert_eq!(dim, want, "degree {deg}");
        }
    }

    #[test]
    fn z2_one_circle_dimensions_vanish_in_odd_degree() {
        let spec = GroupSpec::Z2;
        let u = GroupElement::Res(1);
        let (d0, exact) = quotient_dim(&spec, 1, 0, &[u.clone()]);
        assert!(exact);
        assert_eq!(d0, 2);
        let (d1, _) = quotient_dim(&spec, 1, 1, &[u.clone()]);
        assert_eq!(d1, 0);
        let (d3, _) = quotient_dim(&spec, 1, 3, &[u]);
        assert_eq!(d3, 0);
    }

    #[test]
    fn fi_pattern_is_literal_adjacency() {
        let spec = trivial();
        let isolated = circle_diagram(&spec, vec![Event::End(0), Event::End(0)], 1);
        assert!(gen_fi(&isolated, 0).is_some());

        // On a circle one free side suffices, even with a label on the other.
        let spec2 = GroupSpec::Z2;
        let one_side_free = circle_diagram(
            &spec2,
            vec![Event::End(0), Event::Label(GroupElement::Res(1)), Event::End(0)],
            1,
        );
        assert!(gen_fi(&one_side_free, 0).is_some());

        // Labels in both gaps block the pattern.
        let blocked = circle_diagram(
            &spec2,
            vec![
                Event::End(0),
                Event::Label(GroupElement::Res(1)),
                Event::End(0),
                Event::Label(GroupElement::Res(1)),
            ],
            1,
        );
        assert!(gen_fi(&blocked, 0).is_none());

        // On an interval there is no wraparound side.
        let interval = ChordDiagram::new(
            &spec2,
            1,
            1,
            vec![IntervalComp {
                from: bp(Side::Tar, 0),
                to: bp(Side::Sour, 0),
                events: vec![
                    Event::End(0),
                    Event::Label(GroupElement::Res(1)),
                    Event::End(0),
                ],
            }],
            vec![],
        );
        assert!(gen_fi(&interval, 0).is_none());
    }

    #[test]
    fn four_t_instance_is_in_own_span() {
        let spec = trivial();
        // Degree-3 one-circle diagram to get a nondegenerate instance.
        let d = circle_diagram(
            &spec,
            vec![
                Event::End(0),
                Event::End(1),
                Event::End(0),
                Event::End(2),
                Event::End(1),
                Event::End(2),
            ],
            3,
        );
        let mut found = false;
        for v in 0..3 {
            for occ in 0..2 {
                for u in 0..3 {
                    if let Some(r) = gen_four_t(&d, v, occ, u) {
                        found = true;
                        assert!(quotient_contains(&r.vector, &[r.clone()]));
                    }
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn sigma_nat_sign_follows_character() {
        // The alternating 2-chord circle is symmetric: moving the label pair
        // across one chord gives the same canonical diagram, so the instance
        // degenerates for sigma = +1 and doubles for sigma = -1.
        let s = GroupElement::Word(vec![1]);
        let events = vec![Event::End(0), Event::End(1), Event::End(0), Event::End(1)];

        let plus = GroupSpec::free(&[1]);
        let d = circle_diagram(&plus, events.clone(), 2);
        assert!(gen_sigma_nat(&d, 0, &s).is_none());

        let minus = GroupSpec::free(&[-1]);
        let d2 = circle_diagram(&minus, events, 2);
        let r2 = gen_sigma_nat(&d2, 0, &s).unwrap();
        let sum: Q = r2.vector.values().cloned().sum();
        assert_eq!(sum, q_int(2), "sigma = -1 makes both terms positive");

        // An asymmetric degree-3 diagram keeps the two sides distinct, so
        // sigma = +1 yields a genuine two-term instance with opposite signs.
        let d3 = circle_diagram(
            &plus,
            vec![
                Event::End(0),
                Event::End(1),
                Event::End(0),
                Event::End(2),
                Event::End(1),
                Event::End(2),
            ],
            3,
        );
        let r3 = gen_sigma_nat(&d3, 0, &s).unwrap();
        assert_eq!(r3.vector.len(), 2);
        let sum3: Q = r3.vector.values().cloned().sum();
        assert_eq!(sum3, Q::zero());
    }

    #[test]
    fn sphere_slide_single_strand() {
        let spec = GroupSpec::Int;
        // Two circles: one labeled with a single passage, one bare.
        let ctx = ChordDiagram {
            spec: spec.clone(),
            nsour: 0,
            ntar: 0,
            intervals: vec![],
            circles: vec![vec![Event::Label(GroupElement::Int(1))], vec![]],
            nchords: 0,
        }
        .canonical();
        let r = gen_s2_slide(&ctx, Comp::Circle(0), 0).unwrap();
        assert_eq!(r.vector.len(), 1);
        let (d, c) = r.vector.iter().next().unwrap();
        assert_eq!(*c, Q::one());
        assert_eq!(d.degree(), 1);
        // That diagram is therefore zero in the sphere quotient.
        let v = dv_single(d.clone());
        assert!(is_zero_mod(&v, &[GroupElement::Int(1), GroupElement::Int(-1)], RelFamilies::sphere(), 4000).unwrap());
        // Without the slide family it is not reachable as zero.
        assert!(!is_zero_mod(&v, &[GroupElement::Int(1), GroupElement::Int(-1)], RelFamilies::surface(), 4000).unwrap());
    }

    #[test]
    fn series_ring_and_functions() {
        let spec = trivial();
        let word = [1i8, 1];
        let cap = 4;
        let one = Series::one(&spec, &word, cap);
        assert_eq!(s_compose(&one, &one), one);

        // A single chord between the two strands, as a degree-1 series term.
        let chord = ChordDiagram::new(
            &spec,
            2,
            2,
            vec![
                IntervalComp {
                    from: bp(Side::Tar, 0),
                    to: bp(Side::Sour, 0),
                    events: vec![Event::End(0)],
                },
                IntervalComp {
                    from: bp(Side::Tar, 1),
                    to: bp(Side::Sour, 1),
                    events: vec![Event::End(0)],
                },
            ],
            vec![],
        );
        let x = Series::from_diagram(cap, chord);
        let e = s_exp(&x, &ChordDiagram::identity(&spec, &word));
        assert_eq!(s_log(&e), x);
        let r = s_sqrt(&e);
        assert_eq!(s_compose(&r, &r), e);
        let inv = s_inverse(&e);
        assert_eq!(s_compose(&e, &inv), one);

        // exp of a primitive-looking element is group-like modulo relations.
        assert!(is_grouplike_mod(&e, &[], RelFamilies::surface(), 4000).unwrap());
    }

    #[test]
    fn sqrt_of_squared_exponential() {
        let spec = trivial();
        let word = [1i8, 1];
        let cap = 4;
        let chord = ChordDiagram::new(
            &spec,
            2,
            2,
            vec![
                IntervalComp {
                    from: bp(Side::Tar, 0),
                    to: bp(Side::Sour, 0),
                    events: vec![Event::End(0)],
                },
                IntervalComp {
                    from: bp(Side::Tar, 1),
                    to: bp(Side::Sour, 1),
                    events: vec![Event::End(0)],
                },
            ],
            vec![],
        );
        let id = ChordDiagram::identity(&spec, &word);
        let x = Series::from_diagram(cap, chord);
        let e1 = s_exp(&x, &id);
        let e2 = s_exp(&x.scale(&q_int(2)), &id);
        assert_eq!(s_sqrt(&e2), e1);
        assert_eq!(s_compose(&s_inv_sqrt(&e2), &e1), Series::one(&spec, &word, cap));
    }

    #[test]
    fn closure_guard_trips() {
        let spec = GroupSpec::free(&[1]);
        let d = circle_diagram(
            &spec,
            vec![
                Event::End(0),
                Event::End(1),
                Event::End(0),
                Event::End(2),
                Event::End(1),
                Event::End(2),
            ],
            3,
        );
        let b = vec![GroupElement::Word(vec![1]), GroupElement::Word(vec![-1])];
        let r = closure(&[d], &b, RelFamilies::surface(), 5);
        assert!(r.is_err());
    }

    #[test]
    fn empty_seed_closure_is_empty() {
        let (ds, rels) = closure(&[], &[], RelFamilies::surface(), 10).unwrap();
        assert!(ds.is_empty() && rels.is_empty());
    }
}
