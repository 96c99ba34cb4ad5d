//! Combinatorial surfaces presented as a disk with attached bands, and
//! ribbon graphs with spanning-tree data.
//!
//! A decomposed surface is stored as the list of band orientability signs;
//! band feet sit side by side along a fixed arc of the disk boundary, so no
//! embedding data is kept. Ribbon graphs carry coupons with slotted bases and
//! bands whose ends record (coupon, slot, direction); a chosen spanning tree
//! plus per-band core elements of the surface group describe the fundamental
//! group combinatorially. Covering spaces act on ribbon graphs by copying
//! coupons and bands over coset sheets.

use alloc::vec;
use alloc::vec::Vec;

use crate::groups::{self, CosetData, GroupElement, GroupSpec};

/// Disk with `signs.len()` bands; sign +1 marks an orientable band pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposedSurface {
    pub signs: Vec<i8>,
}

impl DecomposedSurface {
    pub fn new(signs: &[i8]) -> Self {
        assert!(signs.iter().all(|s| *s == 1 || *s == -1), "band signs are +1 or -1");
        DecomposedSurface { signs: signs.to_vec() }
    }

    /// The square, with no bands at all.
    pub fn disk() -> Self {
        DecomposedSurface { signs: Vec::new() }
    }

    pub fn bands(&self) -> usize {
        self.signs.len()
    }
}

/// Fundamental group of the surface: free on one generator per band, with
/// the orientation character given by the band signs.
pub fn pi1(ds: &DecomposedSurface) -> GroupSpec {
    GroupSpec::free(&ds.signs)
}

/// Boundary-connected sum along the distinguished disks; band lists simply
/// concatenate, so the operation is an associative monoid with the disk as
/// unit.
pub fn surface_sum(a: &DecomposedSurface, b: &DecomposedSurface) -> DecomposedSurface {
    let mut signs = a.signs.clone();
    signs.extend_from_slice(&b.signs);
    DecomposedSurface { signs }
}

// ---------------------------------------------------------------------------
// Ribbon graphs.

/// One coupon: a disk with `slots` marked attachment points along its
/// oriented base.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coupon {
    pub slots: usize,
}

/// One end of a band: where it attaches and with which local orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandEnd {
    pub coupon: usize,
    pub slot: usize,
    pub dir: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonBand {
    pub from: BandEnd,
    pub to: BandEnd,
    pub tree: bool,
    /// Element of the base surface group carried by the band; identity for
    /// spanning-tree bands.
    pub core: GroupElement,
}

impl RibbonBand {
    /// -1 when traversing the band reverses local orientation.
    pub fn twist(&self) -> i8 {
        self.from.dir * self.to.dir
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonGraph {
    /// Group in which core elements live.
    pub spec: GroupSpec,
    pub coupons: Vec<Coupon>,
    pub bands: Vec<RibbonBand>,
    /// Distinguished coupon, the basepoint for core computations.
    pub root: usize,
}

impl RibbonGraph {
    /// Panics when the structure is inconsistent: bad slot references, slot
    /// collisions, tree bands that fail to form a spanning tree, or tree
    /// bands carrying a nontrivial core.
    pub fn validate(&self) {
        assert!(self.root < self.coupons.len(), "root coupon exists");
        let mut used: Vec<Vec<bool>> =
            self.coupons.iter().map(|c| vec![false; c.slots]).collect();
        for b in &self.bands {
            for end in [&b.from, &b.to] {
                assert!(end.coupon < self.coupons.len(), "band end coupon exists");
                assert!(end.slot < self.coupons[end.coupon].slots, "band end slot exists");
                assert!(end.dir == 1 || end.dir == -1, "band end direction is a sign");
                assert!(!used[end.coupon][end.slot], "one band per slot");
                used[end.coupon][end.slot] = true;
            }
            if b.tree {
                assert!(b.core.is_identity(), "tree bands carry the identity");
            }
        }
        // Tree bands form a spanning tree over the coupons.
        let n = self.coupons.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut c = x;
            while uf[c] != r {
                let next = uf[c];
                uf[c] = r;
                c = next;
            }
            r
        }
        let mut tree_count = 0usize;
        for b in &self.bands {
            if !b.tree {
                continue;
            }
            let (a, c) = (find(&mut uf, b.from.coupon), find(&mut uf, b.to.coupon));
            assert!(a != c, "tree bands are acyclic");
            uf[a] = c;
            tree_count += 1;
        }
        assert_eq!(tree_count, n - 1, "tree spans all coupons");
    }

    /// Euler characteristic of the underlying graph.
    pub fn euler(&self) -> i64 {
        self.coupons.len() as i64 - self.bands.len() as i64
    }
}

/// The one-coupon ribbon graph of a decomposed surface: band i occupies
/// slots 2i, 2i+1 and carries the i-th free generator; a negative band sign
/// becomes a direction flip at the far end.
pub fn ribbon_of_surface(ds: &DecomposedSurface) -> RibbonGraph {
    let k = ds.bands();
    let spec = pi1(ds);
    let bands = ds
        .signs
        .iter()
        .enumerate()
        .map(|(i, &sign)| RibbonBand {
            from: BandEnd { coupon: 0, slot: 2 * i, dir: 1 },
            to: BandEnd { coupon: 0, slot: 2 * i + 1, dir: sign },
            tree: false,
            core: spec.generator(i + 1),
        })
        .collect();
    RibbonGraph { spec, coupons: vec![Coupon { slots: 2 * k }], bands, root: 0 }
}

/// Tree-path data from the root: for each coupon, the accumulated core
/// holonomy and orientation twist along the spanning tree.
fn tree_potentials(rg: &RibbonGraph) -> (Vec<GroupElement>, Vec<i8>) {
    let n = rg.coupons.len();
    let mut hol: Vec<Option<GroupElement>> = vec![None; n];
    let mut tw: Vec<i8> = vec![0; n];
    hol[rg.root] = Some(rg.spec.identity());
    tw[rg.root] = 1;
    let mut frontier = vec![rg.root];
    while let Some(c) = frontier.pop() {
        for b in &rg.bands {
            if !b.tree {
                continue;
            }
            let (near, far, g) = if b.from.coupon == c && hol[b.to.coupon].is_none() {
                (c, b.to.coupon, b.core.clone())
            } else if b.to.coupon == c && hol[b.from.coupon].is_none() {
                (c, b.from.coupon, groups::inv(&rg.spec, &b.core))
            } else {
                continue;
            };
            let h = groups::mul(&rg.spec, hol[near].as_ref().expect("visited"), &g);
            hol[far] = Some(h);
            tw[far] = tw[near] * b.twist();
            frontier.push(far);
        }
    }
    let hol = hol
        .into_iter()
        .map(|h| h.expect("tree reaches every coupon"))
        .collect();
    (hol, tw)
}

/// Contracts the spanning tree: the result records, per non-tree band in
/// index order, the orientability sign of its loop and its core element
/// based at the root.
pub fn flatten(rg: &RibbonGraph) -> (DecomposedSurface, Vec<GroupElement>) {
    rg.validate();
    let (hol, tw) = tree_potentials(rg);
    let mut signs = Vec::new();
    let mut cores = Vec::new();
    for b in &rg.bands {
        if b.tree {
            continue;
        }
        signs.push(tw[b.from.coupon] * b.twist() * tw[b.to.coupon]);
        let mut g = groups::mul(&rg.spec, &hol[b.from.coupon], &b.core);
        g = groups::mul(&rg.spec, &g, &groups::inv(&rg.spec, &hol[b.to.coupon]));
        cores.push(g);
    }
    (DecomposedSurface { signs }, cores)
}

// ---------------------------------------------------------------------------
// Coverings of ribbon graphs.

/// Index of the copy of `coupon` on `sheet` in the covering graph.
pub fn sheet_coupon(rg: &RibbonGraph, sheet: usize, coupon: usize) -> usize {
    sheet * rg.coupons.len() + coupon
}

/// Covering ribbon graph: one copy of each coupon and band per coset sheet,
/// with the band copy on a sheet leading to the sheet moved by its core.
/// The new spanning tree is grown greedily, preferring lifts of old tree
/// bands, then bands in the given preference order (by base band index);
/// new cores are tree-path conjugates, so they lie in the covering subgroup.
pub fn cover_ribbon_ordered(rg: &RibbonGraph, cd: &CosetData, order: &[usize]) -> RibbonGraph {
    rg.validate();
    cd.validate(&rg.spec).expect("consistent coset data");
    let d = cd.index;
    let n = rg.coupons.len();
    let mut coupons = Vec::with_capacity(d * n);
    for _ in 0..d {
        coupons.extend(rg.coupons.iter().copied());
    }

    // Lifted bands with their base cores; identity of a lift is (band, sheet).
    struct Lift {
        band: usize,
        from: BandEnd,
        to: BandEnd,
        base_core: GroupElement,
    }
    let mut lifts: Vec<Lift> = Vec::new();
    for (j, b) in rg.bands.iter().enumerate() {
        for sheet in 0..d {
            let to_sheet = groups::coset_act(&rg.spec, cd, sheet, &b.core);
            lifts.push(Lift {
                band: j,
                from: BandEnd {
                    coupon: sheet_coupon(rg, sheet, b.from.coupon),
                    slot: b.from.slot,
                    dir: b.from.dir,
                },
                to: BandEnd {
                    coupon: sheet_coupon(rg, to_sheet, b.to.coupon),
                    slot: b.to.slot,
                    dir: b.to.dir,
                },
                base_core: b.core.clone(),
            });
        }
    }

    // Greedy spanning tree over the lifted graph.
    let mut uf: Vec<usize> = (0..d * n).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut c = x;
        while uf[c] != r {
            let next = uf[c];
            uf[c] = r;
            c = next;
        }
        r
    }
    let mut pick = vec![false; lifts.len()];
    let mut ranked: Vec<usize> = (0..lifts.len()).collect();
    let rank_of = |lift_idx: usize| -> (usize, usize, usize) {
        let l = &lifts[lift_idx];
        let tree_first = if rg.bands[l.band].tree { 0 } else { 1 };
        let pos = order.iter().position(|&b| b == l.band).unwrap_or(l.band);
        (tree_first, pos, lift_idx)
    };
    ranked.sort_by_key(|&i| rank_of(i));
    for i in ranked {
        let (a, b) = (
            find(&mut uf, lifts[i].from.coupon),
            find(&mut uf, lifts[i].to.coupon),
        );
        if a != b {
            uf[a] = b;
            pick[i] = true;
        }
    }

    // Provisional graph with base cores everywhere, to compute tree paths.
    let provisional = RibbonGraph {
        spec: rg.spec.clone(),
        coupons: coupons.clone(),
        bands: lifts
            .iter()
            .zip(&pick)
            .map(|(l, &t)| RibbonBand { from: l.from, to: l.to, tree: t, core: l.base_core.clone() })
            .collect(),
        root: sheet_coupon(rg, 0, rg.root),
    };
    let (hol, _) = tree_potentials(&provisional);

    let bands = lifts
        .iter()
        .zip(&pick)
        .map(|(l, &t)| {
            let core = if t {
                rg.spec.identity()
            } else {
                let g = groups::mul(&rg.spec, &hol[l.from.coupon], &l.base_core);
                groups::mul(&rg.spec, &g, &groups::inv(&rg.spec, &hol[l.to.coupon]))
            };
            RibbonBand { from: l.from, to: l.to, tree: t, core }
        })
        .collect();
    let out = RibbonGraph {
        spec: rg.spec.clone(),
        coupons,
        bands,
        root: sheet_coupon(rg, 0, rg.root),
    };
    out.validate();
    out
}

pub fn cover_ribbon(rg: &RibbonGraph, cd: &CosetData) -> RibbonGraph {
    let order: Vec<usize> = (0..rg.bands.len()).collect();
    cover_ribbon_ordered(rg, cd, &order)
}
