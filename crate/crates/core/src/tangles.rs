//! Tangle diagrams over a decomposed surface.
//!
//! A link is presented as a representing pair: a standard tangle holding all
//! band passages, composed over a slice tangle in the disk holding all
//! crossings and extrema. Slice tangles are words in elementary slices over
//! a running boundary word, with the convention that a `+` position means the
//! strand flows downward through that level.
//!
//! Tracing a pair yields a purely combinatorial link: per component a cyclic
//! item list of crossing visits and band passages, plus a sign per crossing.
//! All downstream equality is by invariants or by explicit move scripts;
//! there is no ambient-isotopy decision procedure here.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diagrams::{bp, ChordDiagram, Event, IntervalComp, NonAssocWord, Side};
use crate::groups::{self, GroupElement, GroupSpec};
use crate::linalg::{q_int, Q};
use crate::surfaces::DecomposedSurface;

// ---------------------------------------------------------------------------
// Slice tangles.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slice {
    /// Crossing at positions (i, i+1); sign +1 means the strand running from
    /// lower-left to upper-right is over.
    X(usize, i8),
    /// Minimum inserting the sign pair (eps, -eps) at position i.
    Cup(usize, i8),
    /// Maximum joining positions (i, i+1); requires opposite signs there.
    Cap(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceTangle {
    pub source: Vec<i8>,
    pub slices: Vec<Slice>,
}

impl SliceTangle {
    pub fn new(source: &[i8], slices: Vec<Slice>) -> Self {
        let t = SliceTangle { source: source.to_vec(), slices };
        t.target().expect("valid slice tangle");
        t
    }

    pub fn empty() -> Self {
        SliceTangle { source: Vec::new(), slices: Vec::new() }
    }

    /// Runs the word bookkeeping; the target word on success.
    pub fn target(&self) -> Result<Vec<i8>, String> {
        let mut w = self.source.clone();
        for (k, s) in self.slices.iter().enumerate() {
            match *s {
                Slice::X(i, sign) => {
                    if sign != 1 && sign != -1 {
                        return Err(format!("slice {k}: crossing sign must be +1 or -1"));
                    }
                    if i + 1 >= w.len() {
                        return Err(format!("slice {k}: crossing position {i} out of range"));
                    }
                    w.swap(i, i + 1);
                }
                Slice::Cup(i, eps) => {
                    if eps != 1 && eps != -1 {
                        return Err(format!("slice {k}: cup orientation must be +1 or -1"));
                    }
                    if i > w.len() {
                        return Err(format!("slice {k}: cup position {i} out of range"));
                    }
                    w.insert(i, -eps);
                    w.insert(i, eps);
                }
                Slice::Cap(i) => {
                    if i + 1 >= w.len() {
                        return Err(format!("slice {k}: cap position {i} out of range"));
                    }
                    if w[i] != -w[i + 1] {
                        return Err(format!("slice {k}: cap needs opposite strand directions"));
                    }
                    w.remove(i + 1);
                    w.remove(i);
                }
            }
        }
        Ok(w)
    }

    /// Stacks `top` over `self`; boundary words must match.
    pub fn compose_over(&self, top: &SliceTangle) -> SliceTangle {
        let mid = self.target().expect("valid lower tangle");
        assert_eq!(mid, top.source, "stacking needs matching boundary words");
        let mut slices = self.slices.clone();
        slices.extend_from_slice(&top.slices);
        SliceTangle { source: self.source.clone(), slices }
    }

    /// Side-by-side tensor, `self` on the left.
    pub fn tensor(&self, right: &SliceTangle) -> SliceTangle {
        let shift = self.target().expect("valid left tangle").len();
        let mut source = self.source.clone();
        source.extend_from_slice(&right.source);
        let mut slices = self.slices.clone();
        for s in &right.slices {
            slices.push(match *s {
                Slice::X(i, sign) => Slice::X(i + shift, sign),
                Slice::Cup(i, eps) => Slice::Cup(i + shift, eps),
                Slice::Cap(i) => Slice::Cap(i + shift),
            });
        }
        // Right slices act above the left ones; positions shifted by the
        // final left width, valid because the left part no longer changes.
        SliceTangle { source, slices }
    }
}

// ---------------------------------------------------------------------------
// Standard tangles.

/// Tangle holding only band passages: strand `id` crosses its band once, in
/// the direction of the sign. Every strand starts and ends on the interface
/// word shared with the slice part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardTangle {
    pub ds: DecomposedSurface,
    /// passages[i] lists (strand id, direction) left to right at the first
    /// foot of band i+1.
    pub passages: Vec<Vec<(u32, i8)>>,
}

impl StandardTangle {
    pub fn new(ds: &DecomposedSurface, passages: Vec<Vec<(u32, i8)>>) -> Self {
        assert_eq!(passages.len(), ds.bands(), "one passage list per band");
        let mut seen = BTreeMap::new();
        for (b, list) in passages.iter().enumerate() {
            for &(id, d) in list {
                assert!(d == 1 || d == -1, "passage direction is a sign");
                assert!(seen.insert(id, b).is_none(), "each strand passes one band once");
            }
        }
        StandardTangle { ds: ds.clone(), passages: passages.clone() }
    }

    pub fn spec(&self) -> GroupSpec {
        crate::surfaces::pi1(&self.ds)
    }

    /// Interface ports in global order: feet laid out as band 1 foot A,
    /// band 1 foot B, band 2 foot A, ... For an orientable band the passage
    /// order reverses between the feet; a twisted band keeps the order.
    /// Each port is (strand id, direction, sign, band, is_first_foot).
    pub fn ports(&self) -> Vec<Port> {
        let mut out = Vec::new();
        for (bi, list) in self.passages.iter().enumerate() {
            let m = list.len();
            for &(id, d) in list {
                out.push(Port { id, dir: d, sign: -d, band: bi + 1, first_foot: true });
            }
            let orientable = self.ds.signs[bi] == 1;
            for j in 0..m {
                let (id, d) = if orientable { list[m - 1 - j] } else { list[j] };
                out.push(Port { id, dir: d, sign: d, band: bi + 1, first_foot: false });
            }
        }
        out
    }

    /// The interface boundary word read off the ports.
    pub fn sour_word(&self) -> Vec<i8> {
        self.ports().iter().map(|p| p.sign).collect()
    }

    /// Degree-0 labeled diagram of the standard tangle: one interval per
    /// strand from its entry port to its exit port, labeled by the band
    /// generator to the passage direction's power.
    pub fn z_st(&self) -> ChordDiagram {
        let spec = self.spec();
        let ports = self.ports();
        let mut entry: BTreeMap<u32, usize> = BTreeMap::new();
        let mut exit: BTreeMap<u32, usize> = BTreeMap::new();
        for (pos, p) in ports.iter().enumerate() {
            if p.sign == -1 {
                entry.insert(p.id, pos);
            } else {
                exit.insert(p.id, pos);
            }
        }
        let mut intervals = Vec::new();
        let mut ids: Vec<u32> = entry.keys().copied().collect();
        ids.sort_unstable();
        for id in ids {
            let a = entry[&id];
            let b = exit[&id];
            let p = &ports[if ports[a].first_foot { a } else { b }];
            let letter = p.band as i32 * p.dir as i32;
            intervals.push(IntervalComp {
                from: bp(Side::Sour, a),
                to: bp(Side::Sour, b),
                events: vec![Event::Label(GroupElement::Word(vec![letter]))],
            });
        }
        ChordDiagram::new(&spec, ports.len(), 0, intervals, vec![])
    }

    /// Bracketing of the interface word: a right-nested chain over the feet,
    /// where each first foot carries a right-nested comb and the far foot
    /// carries its negated mirror (orientable) or plain negation (twisted).
    pub fn na_bracketing(&self) -> Option<NonAssocWord> {
        let mut feet: Vec<NonAssocWord> = Vec::new();
        for (bi, list) in self.passages.iter().enumerate() {
            if list.is_empty() {
                continue;
            }
            let signs: Vec<i8> = list.iter().map(|&(_, d)| -d).collect();
            let first = NonAssocWord::comb(&signs);
            let far = if self.ds.signs[bi] == 1 {
                first.mirror().negate()
            } else {
                first.negate()
            };
            feet.push(first);
            feet.push(far);
        }
        let mut it = feet.into_iter().rev();
        let last = it.next()?;
        Some(it.fold(last, |acc, f| NonAssocWord::pair(f, acc)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Port {
    pub id: u32,
    pub dir: i8,
    /// Boundary sign at this port: -1 where the strand enters the band
    /// (flowing up), +1 where it returns (flowing down).
    pub sign: i8,
    pub band: usize,
    pub first_foot: bool,
}

// ---------------------------------------------------------------------------
// Representing pairs and traced links.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentingPair {
    pub t1: StandardTangle,
    pub t2: SliceTangle,
}

impl RepresentingPair {
    pub fn new(t1: StandardTangle, t2: SliceTangle) -> Self {
        let tar = t2.target().expect("valid slice tangle");
        assert_eq!(tar, t1.sour_word(), "interface words must match");
        assert!(t2.source.is_empty(), "closed links have empty outer boundary");
        RepresentingPair { t1, t2 }
    }
}

/// One step along a traced component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Item {
    Cross { id: u32, over: bool },
    /// Band passage as a free-group letter (±band index).
    Pass(i32),
}

/// Combinatorial closed link: per component a cyclic item list (index 0 is
/// the basepoint gap), plus the skein sign of each crossing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasedLink {
    pub spec: GroupSpec,
    pub comps: Vec<Vec<Item>>,
    pub signs: Vec<i8>,
}

impl BasedLink {
    /// Homotopy class of a component: the product of its passage letters.
    pub fn component_word(&self, c: usize) -> GroupElement {
        let letters: Vec<i32> = self.comps[c]
            .iter()
            .filter_map(|it| if let Item::Pass(l) = it { Some(*l) } else { None })
            .collect();
        groups::reduce(&self.spec, &letters)
    }

    /// Conjugacy classes of all components, in order.
    pub fn component_classes(&self) -> Vec<GroupElement> {
        (0..self.comps.len())
            .map(|c| groups::conj_normal(&self.spec, &self.component_word(c)).0)
            .collect()
    }

    pub fn crossing_count(&self) -> usize {
        self.signs.len()
    }
}

/// Traces the pair into its combinatorial link. Components are listed in
/// closure order; each starts at its as-built gap.
pub fn trace(pair: &RepresentingPair) -> BasedLink {
    #[derive(Clone)]
    struct Arc {
        items: Vec<Item>,
    }
    // A live end is (arc index, at_front): at_front ends prepend items.
    #[derive(Clone, Copy)]
    struct End {
        arc: usize,
        at_front: bool,
    }

    let mut arcs: Vec<Option<Arc>> = Vec::new();
    let mut cur: Vec<End> = Vec::new();
    let mut w: Vec<i8> = Vec::new();
    let mut comps: Vec<Vec<Item>> = Vec::new();
    let mut signs: Vec<i8> = Vec::new();

    let push_item = |arcs: &mut Vec<Option<Arc>>, e: End, it: Item| {
        let a = arcs[e.arc].as_mut().expect("live arc");
        if e.at_front {
            a.items.insert(0, it);
        } else {
            a.items.push(it);
        }
    };

    // Joins the ends at positions i and i+1, optionally inserting an item at
    // the seam. Returns a finished component when the arc closes.
    fn join(
        arcs: &mut Vec<Option<Arc>>,
        cur: &mut Vec<End>,
        w: &mut Vec<i8>,
        i: usize,
        seam: Option<Item>,
    ) -> Option<Vec<Item>> {
        let (e1, e2) = (cur[i], cur[i + 1]);
        // Order the two ends as (head side, tail side): the head end is the
        // one the strand flows up to (sign -1).
        let (head, tail) = if w[i] == -1 { (e1, e2) } else { (e2, e1) };
        cur.remove(i + 1);
        cur.remove(i);
        w.remove(i + 1);
        w.remove(i);
        if head.arc == tail.arc {
            let mut a = arcs[head.arc].take().expect("live arc").items;
            if let Some(it) = seam {
                a.push(it);
            }
            return Some(a);
        }
        let mut first = arcs[head.arc].take().expect("live arc").items;
        if let Some(it) = seam {
            first.push(it);
        }
        let second = arcs[tail.arc].take().expect("live arc");
        let merged = {
            let mut v = first;
            v.extend(second.items);
            v
        };
        arcs[tail.arc] = Some(Arc { items: merged });
        // Both remaining ends of the merged arc keep their tokens except the
        // head arc's other end now lives on the tail arc's storage.
        for e in cur.iter_mut() {
            if e.arc == head.arc {
                e.arc = tail.arc;
                // Items of the head arc sit at the front of the merged arc.
            }
        }
        None
    }

    for s in &pair.t2.slices {
        match *s {
            Slice::Cup(i, eps) => {
                let idx = arcs.len();
                arcs.push(Some(Arc { items: Vec::new() }));
                // The + leg is the arc's start (flows down), so items at that
                // side prepend; the - leg appends.
                let plus_front = true;
                let (left, right) = if eps == 1 {
                    (End { arc: idx, at_front: plus_front }, End { arc: idx, at_front: false })
                } else {
                    (End { arc: idx, at_front: false }, End { arc: idx, at_front: plus_front })
                };
                cur.insert(i, right);
                cur.insert(i, left);
                w.insert(i, -eps);
                w.insert(i, eps);
            }
            Slice::X(i, geo) => {
                let id = signs.len() as u32;
                signs.push(geo * w[i] * w[i + 1]);
                let over_left = geo == 1;
                push_item(&mut arcs, cur[i], Item::Cross { id, over: over_left });
                push_item(&mut arcs, cur[i + 1], Item::Cross { id, over: !over_left });
                cur.swap(i, i + 1);
                w.swap(i, i + 1);
            }
            Slice::Cap(i) => {
                if let Some(c) = join(&mut arcs, &mut cur, &mut w, i, None) {
                    comps.push(c);
                }
            }
        }
    }

    // The standard part: each passage joins its two ports with a letter.
    let ports = pair.t1.ports();
    assert_eq!(w, pair.t1.sour_word());
    // Process passages by locating each strand's two ports; join right pair
    // first so positions stay valid. Repeatedly join some strand whose two
    // ports are current.
    let mut remaining: Vec<(usize, usize, i32)> = Vec::new();
    {
        let mut entry: BTreeMap<u32, usize> = BTreeMap::new();
        for (pos, p) in ports.iter().enumerate() {
            if p.sign == -1 {
                entry.insert(p.id, pos);
            }
        }
        for (pos, p) in ports.iter().enumerate() {
            if p.sign == 1 {
                let ein = entry[&p.id];
                let letter = p.band as i32 * p.dir as i32;
                remaining.push((ein, pos, letter));
            }
        }
    }
    // Track current positions of the original ports as joins shrink the word.
    let mut live: Vec<usize> = (0..w.len()).collect();
    for &(ein, eout, letter) in &remaining {
        let i = live.iter().position(|&p| p == ein).expect("port still live");
        let j = live.iter().position(|&p| p == eout).expect("port still live");
        // Bring the pair together by joining at the leftmost of the two with
        // the passage letter at the seam: the seam runs head -> letter ->
        // tail regardless of adjacency, so adjacency is not required; we
        // emulate a distant join by swapping tokens without crossings (the
        // standard part is crossing-free by definition).
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if b != a + 1 {
            // Rotate the token at b next to a; pure bookkeeping.
            let e = cur.remove(b);
            let sw = w.remove(b);
            let lv = live.remove(b);
            cur.insert(a + 1, e);
            w.insert(a + 1, sw);
            live.insert(a + 1, lv);
        }
        if let Some(c) = join(&mut arcs, &mut cur, &mut w, a, Some(Item::Pass(letter))) {
            comps.push(c);
        }
        live.remove(a + 1);
        live.remove(a);
    }
    assert!(cur.is_empty(), "all strands closed");
    BasedLink { spec: pair.t1.spec(), comps, signs }
}

// ---------------------------------------------------------------------------
// Ordering and basing.

/// A representing pair with a chosen component order and per-component
/// basepoint, given as (component, segment) in traced coordinates: segment 0
/// is the as-traced start, segment k the gap right after the k-th crossing
/// visit.
#[derive(Clone, Debug)]
pub struct OrderedBasedLink {
    pub pair: RepresentingPair,
    /// order[k] = traced component index placed k-th.
    pub order: Vec<usize>,
    /// basepoints[c] = segment index for traced component c.
    pub basepoints: Vec<usize>,
}

impl OrderedBasedLink {
    pub fn plain(pair: RepresentingPair) -> Self {
        let n = trace(&pair).comps.len();
        OrderedBasedLink { pair, order: (0..n).collect(), basepoints: vec![0; n] }
    }

    /// The traced link with basepoints applied and components permuted.
    pub fn based(&self) -> BasedLink {
        let raw = trace(&self.pair);
        assert_eq!(self.order.len(), raw.comps.len(), "order covers all components");
        assert_eq!(self.basepoints.len(), raw.comps.len());
        let mut sorted: Vec<usize> = self.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..raw.comps.len()).collect::<Vec<_>>(), "order is a permutation");
        let mut comps = Vec::new();
        for &c in &self.order {
            comps.push(rotate_to_segment(&raw.comps[c], self.basepoints[c]));
        }
        BasedLink { spec: raw.spec, comps, signs: raw.signs }
    }
}

/// Rotates a cyclic item list so the gap right after the k-th crossing visit
/// becomes the start (k = 0 keeps the list).
pub fn rotate_to_segment(items: &[Item], k: usize) -> Vec<Item> {
    if k == 0 {
        return items.to_vec();
    }
    let mut seen = 0usize;
    for (i, it) in items.iter().enumerate() {
        if matches!(it, Item::Cross { .. }) {
            seen += 1;
            if seen == k {
                let mut v = items[i + 1..].to_vec();
                v.extend_from_slice(&items[..=i]);
                return v;
            }
        }
    }
    panic!("segment index exceeds crossing count");
}

// ---------------------------------------------------------------------------
// Wiring helper: builds a slice tangle delivering arcs to interface ports.

/// Bottom-up slice builder.
pub struct Yard {
    slices: Vec<Slice>,
    /// Per current position: (destination port, sign).
    tips: Vec<(usize, i8)>,
}

impl Yard {
    pub fn new() -> Self {
        Yard { slices: Vec::new(), tips: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.tips.len()
    }

    /// Creates an arc whose two tips are destined for the given ports, with
    /// the given signs, inserting at position `at` as (left, right).
    pub fn cup(&mut self, at: usize, left: (usize, i8), right: (usize, i8)) {
        assert_eq!(left.1, -right.1, "cup legs carry opposite signs");
        self.slices.push(Slice::Cup(at, left.1));
        self.tips.insert(at, right);
        self.tips.insert(at, left);
    }

    pub fn cross(&mut self, at: usize, geo: i8) {
        self.slices.push(Slice::X(at, geo));
        self.tips.swap(at, at + 1);
    }

    pub fn cap(&mut self, at: usize) {
        self.slices.push(Slice::Cap(at));
        assert_eq!(self.tips[at].1, -self.tips[at + 1].1, "cap joins opposite signs");
        self.tips.remove(at + 1);
        self.tips.remove(at);
    }

    /// Sorts tips into destination order with adjacent transpositions, every
    /// moving strand crossing geometrically over. Minimal crossing count for
    /// the permutation.
    pub fn deliver(mut self, word: &[i8]) -> Vec<Slice> {
        let n = self.tips.len();
        for target in 0..n {
            let from = (target..n)
                .find(|&i| self.tips[i].0 == target)
                .expect("every port has a tip");
            for i in (target..from).rev() {
                self.cross(i, 1);
            }
        }
        for (i, t) in self.tips.iter().enumerate() {
            assert_eq!(t.0, i);
            assert_eq!(t.1, word[i], "delivered sign matches the port");
        }
        self.slices
    }

    pub fn into_slices(self) -> Vec<Slice> {
        self.slices
    }
}

// ---------------------------------------------------------------------------
// Realization of closed diagrams as signed link combinations.

/// Realizes a closed labeled diagram as a singular link with one marked
/// crossing per chord, then expands every marked crossing as (positive) -
/// (negative): 2^n signed representing pairs whose traced component classes
/// are the diagram's component label classes.
pub fn realize_diagram(
    d: &ChordDiagram,
    ds: &DecomposedSurface,
) -> Vec<(Q, RepresentingPair)> {
    assert!(d.nsour == 0 && d.ntar == 0, "realization needs a closed diagram");
    let spec = crate::surfaces::pi1(ds);
    assert_eq!(d.spec, spec, "labels must live in the surface group");

    // Stations along each component: passages (letters) and chord arms.
    #[derive(Clone, Copy)]
    enum Station {
        Pass(i32),
        Arm { chord: u32, second: bool },
    }
    let mut comps: Vec<Vec<Station>> = Vec::new();
    let mut seen_once: BTreeMap<u32, ()> = BTreeMap::new();
    for circle in &d.circles {
        let mut st = Vec::new();
        for ev in circle {
            match ev {
                Event::Label(g) => {
                    let GroupElement::Word(letters) = g else {
                        panic!("free-group labels required");
                    };
                    for &l in letters {
                        st.push(Station::Pass(l));
                    }
                }
                Event::End(c) => {
                    let second = seen_once.contains_key(c);
                    if !second {
                        seen_once.insert(*c, ());
                    }
                    st.push(Station::Arm { chord: *c, second });
                }
            }
        }
        comps.push(st);
    }

    // Band rosters in component-then-traversal order; ports in foot layout.
    let nbands = ds.bands();
    let mut rosters: Vec<Vec<(u32, i8)>> = vec![Vec::new(); nbands];
    // passage_of[(comp, station)] = id
    let mut id_of: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut next_id = 1u32;
    for (ci, st) in comps.iter().enumerate() {
        for (si, s) in st.iter().enumerate() {
            if let Station::Pass(l) = s {
                let band = l.unsigned_abs() as usize;
                assert!(band >= 1 && band <= nbands, "label letter addresses a band");
                rosters[band - 1].push((next_id, l.signum() as i8));
                id_of.insert((ci, si), next_id);
                next_id += 1;
            }
        }
    }
    let t1 = StandardTangle::new(ds, rosters);
    let ports = t1.ports();
    let word = t1.sour_word();
    let mut entry_port: BTreeMap<u32, usize> = BTreeMap::new();
    let mut exit_port: BTreeMap<u32, usize> = BTreeMap::new();
    for (pos, p) in ports.iter().enumerate() {
        if p.sign == -1 {
            entry_port.insert(p.id, pos);
        } else {
            exit_port.insert(p.id, pos);
        }
    }

    let n = d.nchords as usize;
    let mut out = Vec::new();
    for mask in 0..(1u64 << n) {
        let skein: Vec<i8> = (0..n).map(|k| if mask >> k & 1 == 0 { 1 } else { -1 }).collect();
        let mut coeff = q_int(1);
        for &s in &skein {
            if s == -1 {
                coeff = -coeff;
            }
        }

        let mut yard = Yard::new();
        // Chord gadgets: two little strands crossing once. Arm tips:
        // (in_tip sign +, out_tip sign -) for each arm.
        // Gadget layout after the crossing: positions [A_in, B_in, A_out, B_out].
        let mut arm_tips: BTreeMap<(u32, bool), (usize, usize)> = BTreeMap::new();
        // Tips are tracked by temporary destinations resolved later; use a
        // two-phase build: first create gadgets recording tip positions via
        // sentinel ports, then wire with caps, finally deliver real ports.
        // Simpler: build with explicit position tracking.
        let mut tip_pos: Vec<usize> = Vec::new(); // tip index -> current position
        let mut pos_tip: Vec<usize> = Vec::new(); // position -> tip index
        let mut tip_sign: Vec<i8> = Vec::new();
        let mut slices: Vec<Slice> = Vec::new();
        let new_tip = |tip_pos: &mut Vec<usize>, tip_sign: &mut Vec<i8>, sign: i8| -> usize {
            tip_pos.push(usize::MAX);
            tip_sign.push(sign);
            tip_pos.len() - 1
        };
        let insert_at =
            |pos_tip: &mut Vec<usize>, tip_pos: &mut Vec<usize>, at: usize, tip: usize| {
                pos_tip.insert(at, tip);
                for (p, &t) in pos_tip.iter().enumerate().skip(at) {
                    tip_pos[t] = p;
                }
            };
        for (k, &s) in skein.iter().enumerate() {
            let geo = -s; // word below the crossing is (-, +) on the crossed pair
            let base = pos_tip.len();
            // Cup A at base with (in +, out -) then cup B inside, then cross.
            let a_in = new_tip(&mut tip_pos, &mut tip_sign, 1);
            let a_out = new_tip(&mut tip_pos, &mut tip_sign, -1);
            let b_in = new_tip(&mut tip_pos, &mut tip_sign, 1);
            let b_out = new_tip(&mut tip_pos, &mut tip_sign, -1);
            slices.push(Slice::Cup(base, 1)); // A: (+, -) at (base, base+1)
            insert_at(&mut pos_tip, &mut tip_pos, base, a_out);
            insert_at(&mut pos_tip, &mut tip_pos, base, a_in);
            slices.push(Slice::Cup(base + 2, 1)); // B: (+, -) at (base+2, base+3)
            insert_at(&mut pos_tip, &mut tip_pos, base + 2, b_out);
            insert_at(&mut pos_tip, &mut tip_pos, base + 2, b_in);
            // Cross the inner pair (A_out, B_in): word (-, +), skein = -geo picks s.
            slices.push(Slice::X(base + 1, geo));
            pos_tip.swap(base + 1, base + 2);
            tip_pos[pos_tip[base + 1]] = base + 1;
            tip_pos[pos_tip[base + 2]] = base + 2;
            arm_tips.insert((k as u32, false), (a_in, a_out));
            arm_tips.insert((k as u32, true), (b_in, b_out));
        }

        // Wire the stations: walk every component; remember the dangling
        // out-tip and close runs at ports or by capping into arms.
        let mut port_tip: BTreeMap<usize, usize> = BTreeMap::new(); // port pos -> tip
        let cap_at = |slices: &mut Vec<Slice>,
                          pos_tip: &mut Vec<usize>,
                          tip_pos: &mut Vec<usize>,
                          out_tip: usize,
                          in_tip: usize| {
            // Move the out tip next to the in tip (mover over) and cap.
            let mut i = tip_pos[out_tip];
            let j = tip_pos[in_tip];
            assert_ne!(i, j);
            if i < j {
                while i + 1 < j {
                    slices.push(Slice::X(i, 1));
                    pos_tip.swap(i, i + 1);
                    tip_pos[pos_tip[i]] = i;
                    tip_pos[pos_tip[i + 1]] = i + 1;
                    i += 1;
                }
            } else {
                while i > j + 1 {
                    slices.push(Slice::X(i - 1, 1));
                    pos_tip.swap(i - 1, i);
                    tip_pos[pos_tip[i - 1]] = i - 1;
                    tip_pos[pos_tip[i]] = i;
                    i -= 1;
                }
            }
            let left = i.min(tip_pos[in_tip]);
            slices.push(Slice::Cap(left));
            pos_tip.remove(left + 1);
            pos_tip.remove(left);
            for (p, &t) in pos_tip.iter().enumerate().skip(left) {
                tip_pos[t] = p;
            }
        };

        for (ci, st) in comps.iter().enumerate() {
            if st.is_empty() {
                // Bare circle: a cup immediately capped, away at the left.
                slices.push(Slice::Cup(0, 1));
                slices.push(Slice::Cap(0));
                continue;
            }
            // Dangling output of the previous station, as a tip id.
            let mut dangling: Option<usize> = None;
            let mut first_in: Option<(usize, bool)> = None; // (tip or port, is_port)
            for (si, s) in st.iter().enumerate() {
                match *s {
                    Station::Pass(_) => {
                        let id = id_of[&(ci, si)];
                        let ein = entry_port[&id];
                        let eout = exit_port[&id];
                        if let Some(out_tip) = dangling.take() {
                            port_tip.insert(ein, out_tip);
                        } else {
                            first_in = Some((ein, true));
                        }
                        // The exit port emits a fresh strand flowing down: a
                        // new arc start; its tip appears when we cup it below.
                        // Create a single-tip arc via a cup whose other leg is
                        // the next in-connection; realized lazily: create a
                        // cup now with one leg reserved for the port.
                        let down = new_tip(&mut tip_pos, &mut tip_sign, 1);
                        let cont = new_tip(&mut tip_pos, &mut tip_sign, -1);
                        let at = pos_tip.len();
                        slices.push(Slice::Cup(at, 1));
                        insert_at(&mut pos_tip, &mut tip_pos, at, cont);
                        insert_at(&mut pos_tip, &mut tip_pos, at, down);
                        port_tip.insert(eout, down);
                        dangling = Some(cont);
                    }
                    Station::Arm { chord, second } => {
                        let (a_in, a_out) = arm_tips[&(chord, second)];
                        if let Some(out_tip) = dangling.take() {
                            cap_at(&mut slices, &mut pos_tip, &mut tip_pos, out_tip, a_in);
                        } else {
                            first_in = Some((a_in, false));
                        }
                        dangling = Some(a_out);
                    }
                }
            }
            // Close the cycle.
            let out_tip = dangling.expect("nonempty component has an output");
            match first_in.expect("nonempty component has an input") {
                (p, true) => {
                    port_tip.insert(p, out_tip);
                }
                (t, false) => {
                    cap_at(&mut slices, &mut pos_tip, &mut tip_pos, out_tip, t);
                }
            }
        }

        // Deliver remaining tips to their ports in order.
        let mut yard_tips: Vec<(usize, i8)> = Vec::new();
        for (p, &t) in pos_tip.iter().enumerate() {
            let dest = port_tip
                .iter()
                .find(|&(_, &tt)| tt == t)
                .map(|(&d, _)| d)
                .unwrap_or_else(|| panic!("tip at position {p} has no destination"));
            yard_tips.push((dest, tip_sign[t]));
        }
        yard.slices = slices;
        yard.tips = yard_tips;
        let all = yard.deliver(&word);
        let t2 = SliceTangle::new(&[], all);
        out.push((coeff.clone(), RepresentingPair::new(t1.clone(), t2)));
    }
    out
}

// ---------------------------------------------------------------------------
// Reidemeister rewrites on the slice part.

pub fn r1_insert(pair: &RepresentingPair, at_slice: usize, pos: usize, geo: i8) -> RepresentingPair {
    let mut t2 = pair.t2.clone();
    let w = word_at(&t2, at_slice);
    let eps = w[pos];
    t2.slices.splice(
        at_slice..at_slice,
        [Slice::Cup(pos + 1, eps), Slice::X(pos, geo), Slice::Cap(pos + 1)],
    );
    RepresentingPair::new(pair.t1.clone(), t2)
}

pub fn r2_insert(pair: &RepresentingPair, at_slice: usize, pos: usize, geo: i8) -> RepresentingPair {
    let mut t2 = pair.t2.clone();
    t2.slices
        .splice(at_slice..at_slice, [Slice::X(pos, geo), Slice::X(pos, -geo)]);
    RepresentingPair::new(pair.t1.clone(), t2)
}

/// Removes the exact two-slice pattern r2_insert places.
pub fn r2_remove(pair: &RepresentingPair, at_slice: usize) -> RepresentingPair {
    let mut t2 = pair.t2.clone();
    assert!(at_slice + 1 < t2.slices.len(), "pattern location in range");
    let (a, b) = (t2.slices[at_slice], t2.slices[at_slice + 1]);
    match (a, b) {
        (Slice::X(i, s), Slice::X(j, t)) if i == j && s == -t => {}
        _ => panic!("no opposite crossing pair at the location"),
    }
    t2.slices.drain(at_slice..at_slice + 2);
    RepresentingPair::new(pair.t1.clone(), t2)
}

/// Braid relation: X(p) X(p+1) X(p) -> X(p+1) X(p) X(p+1), all with the same
/// geometric sign.
pub fn r3_slide(pair: &RepresentingPair, at_slice: usize) -> RepresentingPair {
    let mut t2 = pair.t2.clone();
    assert!(at_slice + 2 < t2.slices.len(), "pattern location in range");
    let window = [t2.slices[at_slice], t2.slices[at_slice + 1], t2.slices[at_slice + 2]];
    match window {
        [Slice::X(p1, s1), Slice::X(p2, s2), Slice::X(p3, s3)]
            if p1 == p3 && p2 == p1 + 1 && s1 == s2 && s2 == s3 =>
        {
            t2.slices[at_slice] = Slice::X(p2, s1);
            t2.slices[at_slice + 1] = Slice::X(p1, s1);
            t2.slices[at_slice + 2] = Slice::X(p2, s1);
        }
        [Slice::X(p1, s1), Slice::X(p2, s2), Slice::X(p3, s3)]
            if p1 == p3 && p1 == p2 + 1 && s1 == s2 && s2 == s3 =>
        {
            t2.slices[at_slice] = Slice::X(p2, s1);
            t2.slices[at_slice + 1] = Slice::X(p1, s1);
            t2.slices[at_slice + 2] = Slice::X(p2, s1);
        }
        _ => panic!("no braid pattern at the location"),
    }
    RepresentingPair::new(pair.t1.clone(), t2)
}

fn word_at(t2: &SliceTangle, at_slice: usize) -> Vec<i8> {
    let head = SliceTangle { source: t2.source.clone(), slices: t2.slices[..at_slice].to_vec() };
    head.target().expect("valid prefix")
}

// ---------------------------------------------------------------------------
// Band move fixtures: each returns two pairs representing the same link,
// differing by exactly one move. All other bands of the surface stay unused,
// so the chosen band's feet sit at positions 0..4m.

fn passages_for(ds: &DecomposedSurface, band: usize, list: Vec<(u32, i8)>) -> Vec<Vec<(u32, i8)>> {
    let mut v = vec![Vec::new(); ds.bands()];
    v[band - 1] = list;
    v
}

/// A minimum slides through the band: a null-homotopic circle running up one
/// passage and back the other versus a plain circle in the disk.
pub fn move1_pair(ds: &DecomposedSurface, band: usize) -> (RepresentingPair, RepresentingPair) {
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1), (2, -1)]));
    let far_eps = if ds.signs[band - 1] == 1 { -1 } else { 1 };
    let t2 = SliceTangle::new(&[], vec![Slice::Cup(0, -1), Slice::Cup(2, far_eps)]);
    let before = RepresentingPair::new(t1, t2);
    let t1a = StandardTangle::new(ds, passages_for(ds, band, vec![]));
    let t2a = SliceTangle::new(&[], vec![Slice::Cup(0, 1), Slice::Cap(0)]);
    (before, RepresentingPair::new(t1a, t2a))
}

/// A finger of the core strand pokes through the band and back versus the
/// plain core circle.
pub fn move2_pair(ds: &DecomposedSurface, band: usize) -> (RepresentingPair, RepresentingPair) {
    let orientable = ds.signs[band - 1] == 1;
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1), (2, 1), (3, -1)]));
    let mut yard = Yard::new();
    if orientable {
        // Exits: foot B order reversed [p3, p2, p1] at 3..6 with signs (-,+,+).
        // Arcs: return leg (2 -> 0), main detour (5 -> 1), far U-turn (3 -> 4).
        yard.cup(0, (0, -1), (2, 1));
        yard.cup(2, (1, -1), (5, 1));
        yard.cup(3, (3, -1), (4, 1));
    } else {
        // Foot B keeps order [p1, p2, p3] at 3..6 with signs (+,+,-).
        // Arcs: return leg (2 -> 0), main detour (3 -> 1), far U-turn (4 -> 5).
        yard.cup(0, (0, -1), (2, 1));
        yard.cup(2, (1, -1), (3, 1));
        yard.cup(4, (4, 1), (5, -1));
    }
    let t2 = SliceTangle::new(&[], yard.deliver(&t1.sour_word()));
    let before = RepresentingPair::new(t1, t2);

    let t1a = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1)]));
    let t2a = SliceTangle::new(&[], vec![Slice::Cup(0, -1)]);
    (before, RepresentingPair::new(t1a, t2a))
}

/// A crossing between two parallel passages slides through the band from the
/// near-foot side to the far-foot side; its geometric sign flips exactly when
/// the band is twisted.
pub fn move3_pair(
    ds: &DecomposedSurface,
    band: usize,
    geo: i8,
) -> (RepresentingPair, RepresentingPair) {
    let orientable = ds.signs[band - 1] == 1;
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1), (2, 1)]));
    let base = {
        let mut yard = Yard::new();
        if orientable {
            yard.cup(0, (0, -1), (3, 1));
            yard.cup(1, (1, -1), (2, 1));
        } else {
            yard.cup(0, (0, -1), (2, 1));
            yard.cup(1, (1, -1), (3, 1));
        }
        yard.deliver(&t1.sour_word())
    };
    let mut near = base.clone();
    near.push(Slice::X(0, geo));
    let mut far = base;
    far.push(Slice::X(2, if orientable { geo } else { -geo }));
    let before = RepresentingPair::new(t1.clone(), SliceTangle::new(&[], near));
    let after = RepresentingPair::new(t1, SliceTangle::new(&[], far));
    (before, after)
}

/// A curl slides through the band from the entering leg to the returning leg;
/// its geometric sign flips exactly when the band is twisted.
pub fn move4_pair(
    ds: &DecomposedSurface,
    band: usize,
    geo: i8,
) -> (RepresentingPair, RepresentingPair) {
    let orientable = ds.signs[band - 1] == 1;
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1)]));
    let t2 = SliceTangle::new(&[], vec![Slice::Cup(0, -1)]);
    let base = RepresentingPair::new(t1, t2);
    let before = r1_insert(&base, 1, 0, geo);
    let after = r1_insert(&base, 1, 1, if orientable { geo } else { -geo });
    (before, after)
}

/// Crosscap slide on a twisted band: the outermost passage reverses direction
/// and moves to the other end of the passage order. Returns the one-passage
/// instance: the core circle against its reverse.
pub fn rp2_pair(ds: &DecomposedSurface, band: usize) -> (RepresentingPair, RepresentingPair) {
    assert_eq!(ds.signs[band - 1], -1, "crosscap slides need a twisted band");
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1)]));
    let t2 = SliceTangle::new(&[], vec![Slice::Cup(0, -1)]);
    let before = RepresentingPair::new(t1, t2);
    let t1a = StandardTangle::new(ds, passages_for(ds, band, vec![(1, -1)]));
    let t2a = SliceTangle::new(&[], vec![Slice::Cup(0, 1)]);
    (before, RepresentingPair::new(t1a, t2a))
}

/// Two-passage crosscap slide: passage 1 reverses, moves behind passage 2,
/// and its legs reroute.
pub fn rp2_pair_two_strand(
    ds: &DecomposedSurface,
    band: usize,
) -> (RepresentingPair, RepresentingPair) {
    assert_eq!(ds.signs[band - 1], -1, "crosscap slides need a twisted band");
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1), (2, 1)]));
    // One circle winding twice: exit of each passage feeds the other's entry.
    let mut yard = Yard::new();
    yard.cup(0, (0, -1), (3, 1));
    yard.cup(1, (1, -1), (2, 1));
    let before = RepresentingPair::new(t1, SliceTangle::new(&[], yard.deliver(&[-1, -1, 1, 1])));

    let t1a = StandardTangle::new(ds, passages_for(ds, band, vec![(2, 1), (1, -1)]));
    let t2a = SliceTangle::new(
        &[],
        vec![Slice::Cup(0, -1), Slice::Cup(2, 1)],
    );
    (before, RepresentingPair::new(t1a, t2a))
}

/// Sphere slide: an arc connecting two band passages sweeps across the far
/// side, trading an all-over pass of the bunch for an all-under pass.
pub fn kirby_pair(ds: &DecomposedSurface, band: usize) -> (RepresentingPair, RepresentingPair) {
    assert_eq!(ds.signs[band - 1], 1, "the sphere slide fixture uses a flat band");
    let t1 = StandardTangle::new(ds, passages_for(ds, band, vec![(1, 1), (2, 1)]));
    let build = |g1: i8, g2: i8| {
        let slices = vec![
            Slice::Cup(0, -1),
            Slice::Cup(1, -1),
            Slice::X(0, g1),
            Slice::X(2, g2),
        ];
        RepresentingPair::new(t1.clone(), SliceTangle::new(&[], slices))
    };
    (build(1, -1), build(-1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus() -> DecomposedSurface {
        DecomposedSurface::new(&[1])
    }

    fn moebius() -> DecomposedSurface {
        DecomposedSurface::new(&[-1])
    }

    /// Core circle of the annulus: one positive passage, wired directly.
    fn core_pair() -> RepresentingPair {
        let t1 = StandardTangle::new(&annulus(), vec![vec![(1, 1)]]);
        let t2 = SliceTangle::new(&[], vec![Slice::Cup(0, -1)]);
        RepresentingPair::new(t1, t2)
    }

    #[test]
    fn slice_word_bookkeeping() {
        let t = SliceTangle::new(
            &[],
            vec![Slice::Cup(0, 1), Slice::X(0, 1), Slice::Cap(0)],
        );
        assert_eq!(t.target().unwrap(), Vec::<i8>::new());
        let bad = SliceTangle {
            source: vec![1, 1],
            slices: vec![Slice::Cap(0)],
        };
        assert!(bad.target().is_err(), "cap needs opposite directions");
    }

    #[test]
    fn compose_and_tensor_words() {
        let lower = SliceTangle::new(&[], vec![Slice::Cup(0, 1)]);
        let upper = SliceTangle::new(&[1, -1], vec![Slice::X(0, 1)]);
        let st = lower.compose_over(&upper);
        assert_eq!(st.target().unwrap(), vec![-1, 1]);
        let t = lower.tensor(&lower);
        assert_eq!(t.target().unwrap(), vec![1, -1, 1, -1]);
    }

    #[test]
    fn standard_tangle_words_and_feet() {
        // Orientable band: far foot reverses the passage order.
        let st = StandardTangle::new(&annulus(), vec![vec![(1, 1), (2, 1)]]);
        assert_eq!(st.sour_word(), vec![-1, -1, 1, 1]);
        let ports = st.ports();
        assert_eq!(ports[2].id, 2, "far foot order reversed");
        assert_eq!(ports[3].id, 1);

        // Twisted band keeps the order.
        let sm = StandardTangle::new(&moebius(), vec![vec![(1, 1), (2, 1)]]);
        let pm = sm.ports();
        assert_eq!(pm[2].id, 1);
        assert_eq!(pm[3].id, 2);
    }

    #[test]
    fn z_st_labels_match_passages() {
        let st = StandardTangle::new(&annulus(), vec![vec![(1, 1)]]);
        let d = st.z_st();
        assert_eq!(d.nsour, 2);
        assert_eq!(d.degree(), 0);
        let iv = &d.intervals[0];
        assert_eq!(iv.events, vec![Event::Label(GroupElement::Word(vec![1]))]);
        // Entry at the first foot, exit at the far foot.
        assert_eq!(iv.from, bp(Side::Sour, 0));
        assert_eq!(iv.to, bp(Side::Sour, 1));
    }

    #[test]
    fn bracketing_follows_band_rules() {
        // Orientable band with two passages: far foot is the negated mirror.
        let st = StandardTangle::new(&annulus(), vec![vec![(1, 1), (2, -1)]]);
        let w = st.na_bracketing().unwrap();
        assert_eq!(w.leaves(), st.sour_word());
        let NonAssocWord::Pair(first, far) = w else { panic!("chain") };
        assert_eq!(*far, first.mirror().negate());

        let sm = StandardTangle::new(&moebius(), vec![vec![(1, 1), (2, -1)]]);
        let wm = sm.na_bracketing().unwrap();
        assert_eq!(wm.leaves(), sm.sour_word());
        let NonAssocWord::Pair(firstm, farm) = wm else { panic!("chain") };
        assert_eq!(*farm, firstm.negate());
    }

    #[test]
    fn trace_core_circle() {
        let link = trace(&core_pair());
        assert_eq!(link.comps.len(), 1);
        assert_eq!(link.component_word(0), GroupElement::Word(vec![1]));
        assert!(link.signs.is_empty());
    }

    #[test]
    fn trace_reversed_passage() {
        let t1 = StandardTangle::new(&annulus(), vec![vec![(1, -1)]]);
        // Ports: foot A sign +, foot B sign -: a cup with (+,-) wires it.
        let t2 = SliceTangle::new(&[], vec![Slice::Cup(0, 1)]);
        let link = trace(&RepresentingPair::new(t1, t2));
        assert_eq!(link.component_word(0), GroupElement::Word(vec![-1]));
    }

    #[test]
    fn trace_crossing_signs() {
        // Kink on the core circle: one self-crossing of chosen sign.
        let pair = core_pair();
        for geo in [1i8, -1] {
            let kinked = r1_insert(&pair, 1, 0, geo);
            let link = trace(&kinked);
            assert_eq!(link.comps.len(), 1);
            assert_eq!(link.signs.len(), 1);
            // The curl crosses two upward legs, so the skein sign equals geo.
            assert_eq!(link.signs[0], geo);
            let crossings: Vec<&Item> = link.comps[0]
                .iter()
                .filter(|i| matches!(i, Item::Cross { .. }))
                .collect();
            assert_eq!(crossings.len(), 2, "both visits on one component");
        }
    }

    #[test]
    fn trace_disk_hopf_link() {
        // Two circles crossing twice with alternating over strand: Hopf link.
        let hopf = |geo2: i8| {
            let slices = vec![
                Slice::Cup(0, -1),
                Slice::Cup(1, -1),
                Slice::X(0, 1),
                Slice::X(2, geo2),
                Slice::Cap(1),
                Slice::Cap(0),
            ];
            let t2 = SliceTangle::new(&[], slices);
            let t1 = StandardTangle::new(&DecomposedSurface::disk(), vec![]);
            trace(&RepresentingPair::new(t1, t2))
        };
        let link = hopf(1);
        assert_eq!(link.comps.len(), 2);
        assert_eq!(link.signs, vec![1, 1], "positive Hopf link");
        for c in 0..2 {
            assert!(link.component_word(c).is_identity());
        }
        // Same shape with one strand lifted over both crossings: unlink,
        // visible as cancelling signs.
        let unlink = hopf(-1);
        assert_eq!(unlink.signs[0] + unlink.signs[1], 0);
    }

    #[test]
    fn based_rotation_and_order() {
        let pair = core_pair();
        let kinked = r1_insert(&pair, 1, 0, 1);
        let obl =
            OrderedBasedLink { pair: kinked.clone(), order: vec![0], basepoints: vec![1] };
        let based = obl.based();
        let raw = trace(&kinked);
        assert_eq!(based.comps[0], rotate_to_segment(&raw.comps[0], 1));
        assert_ne!(based.comps[0], raw.comps[0], "rotation moved the basepoint");
    }

    #[test]
    fn realize_degree_zero_label() {
        let ds = annulus();
        let spec = crate::surfaces::pi1(&ds);
        let d = ChordDiagram::new(
            &spec,
            0,
            0,
            vec![],
            vec![vec![Event::Label(GroupElement::Word(vec![1]))]],
        );
        let terms = realize_diagram(&d, &ds);
        assert_eq!(terms.len(), 1);
        let (c, pair) = &terms[0];
        assert_eq!(*c, q_int(1));
        let link = trace(pair);
        assert_eq!(link.comps.len(), 1);
        assert_eq!(link.component_classes(), vec![GroupElement::Word(vec![1])]);
    }

    #[test]
    fn realize_one_chord_circle() {
        let spec = GroupSpec::trivial();
        let d = ChordDiagram::new(
            &spec,
            0,
            0,
            vec![],
            vec![vec![Event::End(0), Event::End(0)]],
        );
        let ds = DecomposedSurface::disk();
        let terms = realize_diagram(&d, &ds);
        assert_eq!(terms.len(), 2);
        let coeffs: Vec<Q> = terms.iter().map(|(c, _)| c.clone()).collect();
        assert_eq!(coeffs, vec![q_int(1), q_int(-1)]);
        for (c, pair) in &terms {
            let link = trace(pair);
            assert_eq!(link.comps.len(), 1, "kink diagrams are unknots");
            assert_eq!(link.signs.len(), 1);
            // The marked crossing's skein sign matches the term sign.
            assert_eq!(q_int(link.signs[0] as i64), *c);
        }
    }

    #[test]
    fn realize_labeled_chord_diagram_classes() {
        let ds = annulus();
        let spec = crate::surfaces::pi1(&ds);
        // One circle labeled x twice with a chord between the two arcs.
        let d = ChordDiagram::new(
            &spec,
            0,
            0,
            vec![],
            vec![vec![
                Event::End(0),
                Event::Label(GroupElement::Word(vec![1])),
                Event::End(0),
                Event::Label(GroupElement::Word(vec![1])),
            ]],
        );
        let terms = realize_diagram(&d, &ds);
        assert_eq!(terms.len(), 2);
        for (_, pair) in &terms {
            let link = trace(pair);
            assert_eq!(link.comps.len(), 1);
            assert_eq!(
                link.component_classes(),
                vec![GroupElement::Word(vec![1, 1])],
                "class of the realized component matches the diagram"
            );
        }
    }

    #[test]
    fn reidemeister_rewrites_roundtrip() {
        let pair = core_pair();
        let r2 = r2_insert(&pair, 1, 0, 1);
        assert_eq!(trace(&r2).comps.len(), 1);
        assert_eq!(trace(&r2).signs.len(), 2);
        let back = r2_remove(&r2, 1);
        assert_eq!(back.t2, pair.t2);

        // R3 on three upward strands inside a 3-passage wiring.
        let t1 = StandardTangle::new(&annulus(), vec![vec![(1, 1), (2, 1), (3, 1)]]);
        // Ports: A feet (-,-,-) at 0..3, far feet reversed (+,+,+) at 3..6.
        // Wire passage heads to the next passage tails: one 3-winding circle.
        let mut yard = Yard::new();
        // Exits sit reversed: p1 at 5, p2 at 4, p3 at 3. Chain the passages
        // into one circle: 5 -> 1, 4 -> 2, 3 -> 0.
        yard.cup(0, (0, -1), (3, 1));
        yard.cup(1, (1, -1), (5, 1));
        yard.cup(2, (2, -1), (4, 1));
        let slices = yard.deliver(&t1.sour_word());
        let base = RepresentingPair::new(t1.clone(), SliceTangle::new(&[], slices));
        assert_eq!(trace(&base).comps.len(), 1);
        assert_eq!(
            trace(&base).component_word(0),
            GroupElement::Word(vec![1, 1, 1])
        );
        let braided = {
            let mut t2 = base.t2.clone();
            let end = t2.slices.len();
            t2.slices.splice(end..end, [Slice::X(0, 1), Slice::X(1, 1), Slice::X(0, 1)]);
            RepresentingPair::new(t1.clone(), t2)
        };
        let at = braided.t2.slices.len() - 3;
        let slid = r3_slide(&braided, at);
        assert_eq!(
            trace(&braided).component_classes(),
            trace(&slid).component_classes()
        );
        assert_eq!(trace(&braided).signs.len(), trace(&slid).signs.len());
    }

    fn z2_parity(g: &GroupElement) -> i32 {
        let GroupElement::Word(w) = g else { panic!("word") };
        w.len() as i32 % 2
    }

    #[test]
    fn band_move_pairs_are_consistent() {
        for ds in [annulus(), moebius(), DecomposedSurface::new(&[-1, 1])] {
            for band in 1..=ds.bands() {
                let (b1, a1) = move1_pair(&ds, band);
                assert!(trace(&b1).component_classes().iter().all(|g| g.is_identity()));
                assert!(trace(&a1).component_classes().iter().all(|g| g.is_identity()));

                let (b2, a2) = move2_pair(&ds, band);
                assert_eq!(
                    trace(&b2).component_classes(),
                    trace(&a2).component_classes(),
                    "finger keeps the class"
                );
                assert_eq!(trace(&b2).comps.len(), 1);

                for geo in [1i8, -1] {
                    let (b3, a3) = move3_pair(&ds, band, geo);
                    assert_eq!(
                        trace(&b3).component_classes(),
                        trace(&a3).component_classes()
                    );
                    assert_eq!(trace(&b3).signs.len(), trace(&a3).signs.len());

                    let (b4, a4) = move4_pair(&ds, band, geo);
                    assert_eq!(
                        trace(&b4).component_classes(),
                        trace(&a4).component_classes()
                    );
                    assert_eq!(trace(&b4).signs.len(), 1);
                    assert_eq!(trace(&a4).signs.len(), 1);
                }
            }
        }
    }

    #[test]
    fn crosscap_slide_pairs() {
        let ds = moebius();
        let (before, after) = rp2_pair(&ds, 1);
        let wb = trace(&before).component_word(0);
        let wa = trace(&after).component_word(0);
        assert_ne!(wb, wa, "direction reverses");
        assert_eq!(z2_parity(&wb), z2_parity(&wa), "same class downstairs");

        let (b2, a2) = rp2_pair_two_strand(&ds, 1);
        let wb2 = trace(&b2).component_word(0);
        let wa2 = trace(&a2).component_word(0);
        assert_eq!(trace(&b2).comps.len(), 1);
        assert_eq!(trace(&a2).comps.len(), 1);
        assert_eq!(wb2, GroupElement::Word(vec![1, 1]));
        assert!(wa2.is_identity());
        assert_eq!(z2_parity(&wb2), z2_parity(&wa2));
        let count = |p: &RepresentingPair| -> usize {
            p.t1.passages.iter().map(|l| l.len()).sum()
        };
        assert_eq!(count(&b2), count(&a2), "both sides keep two passages");
    }

    #[test]
    fn sphere_slide_pair() {
        let ds = annulus();
        let (before, after) = kirby_pair(&ds, 1);
        let lb = trace(&before);
        let la = trace(&after);
        assert_eq!(lb.comps.len(), 2);
        assert_eq!(la.comps.len(), 2);
        assert_eq!(lb.component_classes(), la.component_classes());
        // The sliding arc trades over for under at both crossings.
        assert_eq!(lb.signs.len(), 2);
        assert_eq!(lb.signs[0], -la.signs[0]);
        assert_eq!(lb.signs[1], -la.signs[1]);
    }

    #[test]
    fn yard_delivery_is_minimal() {
        // Planar nesting needs no crossings.
        let mut nested = Yard::new();
        nested.cup(0, (0, -1), (3, 1));
        nested.cup(1, (1, -1), (2, 1));
        let slices = nested.deliver(&[-1, -1, 1, 1]);
        assert!(!slices.iter().any(|s| matches!(s, Slice::X(..))));

        // Interleaved destinations cost exactly their inversion count.
        let mut crossed = Yard::new();
        crossed.cup(0, (1, -1), (2, 1));
        crossed.cup(0, (0, -1), (3, 1));
        let slices = crossed.deliver(&[-1, -1, 1, 1]);
        let crossings = slices.iter().filter(|s| matches!(s, Slice::X(..))).count();
        assert_eq!(crossings, 2);
    }
}
