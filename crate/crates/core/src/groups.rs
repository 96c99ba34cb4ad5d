//! Label groups with an orientation character.
//!
//! Three families cover every surface in scope: free groups (thickened
//! surfaces deformation-retracting onto a wedge of bands), the cyclic group of
//! order two (projective plane), and the integers (annulus core of S^1 x S^2).
//! The orientation character sigma records which loops reverse orientation;
//! for a free group it is determined by a sign per generator.
//!
//! Conjugacy classes of free groups get normal forms: cyclically reduce, then
//! take the length-lex minimal rotation. Rotating a word w = gh to hg is
//! weighted by (-1)^(sigma_bar(g) sigma_bar(h)); `conj_normal` accumulates
//! that weight along the rotations it applies, which is what the signed skein
//! ring needs.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// A label group together with its orientation character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupSpec {
    /// Free group; `signs[i]` is sigma of generator i+1. Rank is `signs.len()`.
    Free { signs: Vec<i8> },
    /// Cyclic group of order two; sigma of the nontrivial element is -1.
    Z2,
    /// Infinite cyclic group; sigma is identically +1.
    Int,
}

impl GroupSpec {
    pub fn free(signs: &[i8]) -> Self {
        assert!(signs.iter().all(|&s| s == 1 || s == -1), "signs must be +-1");
        GroupSpec::Free { signs: signs.to_vec() }
    }

    /// The trivial group, modeled as the free group of rank zero.
    pub fn trivial() -> Self {
        GroupSpec::Free { signs: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::Free { signs } => signs.len(),
            GroupSpec::Z2 | GroupSpec::Int => 1,
        }
    }

    /// True when sigma(g) = +1 for every g.
    pub fn orientable(&self) -> bool {
        match self {
            GroupSpec::Free { signs } => signs.iter().all(|&s| s == 1),
            GroupSpec::Z2 => false,
            GroupSpec::Int => true,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Free { .. } => GroupElement::Word(Vec::new()),
            GroupSpec::Z2 => GroupElement::Res(0),
            GroupSpec::Int => GroupElement::Int(0),
        }
    }

    /// Generator i (1-based) as an element.
    pub fn generator(&self, i: usize) -> GroupElement {
        assert!(i >= 1 && i <= self.rank(), "generator index out of range");
        match self {
            GroupSpec::Free { .. } => GroupElement::Word(vec![i as i32]),
            GroupSpec::Z2 => GroupElement::Res(1),
            GroupSpec::Int => GroupElement::Int(1),
        }
    }
}

/// An element of a label group. The variant must match the spec it is used with.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElement {
    /// Freely reduced word; letter +i is generator i, -i its inverse (1-based).
    Word(Vec<i32>),
    /// Residue mod 2.
    Res(u8),
    /// Integer exponent of the generator.
    Int(i64),
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Res(r) => *r == 0,
            GroupElement::Int(n) => *n == 0,
        }
    }
}

/// Freely reduce a raw letter sequence. Letters are nonzero; +-i within rank.
pub fn reduce(spec: &GroupSpec, letters: &[i32]) -> GroupElement {
    match spec {
        GroupSpec::Free { signs } => {
            let rank = signs.len() as i32;
            let mut out: Vec<i32> = Vec::with_capacity(letters.len());
            for &l in letters {
                assert!(l != 0 && l.abs() <= rank, "generator index out of range");
                if out.last() == Some(&-l) {
                    out.pop();
                } else {
                    out.push(l);
                }
            }
            GroupElement::Word(out)
        }
        GroupSpec::Z2 => GroupElement::Res((letters.len() % 2) as u8),
        GroupSpec::Int => GroupElement::Int(letters.iter().map(|&l| l.signum() as i64).sum()),
    }
}

pub fn mul(spec: &GroupSpec, a: &GroupElement, b: &GroupElement) -> GroupElement {
    match (spec, a, b) {
        (GroupSpec::Free { .. }, GroupElement::Word(u), GroupElement::Word(v)) => {
            let mut w = u.clone();
            for &l in v {
                if w.last() == Some(&-l) {
                    w.pop();
                } else {
                    w.push(l);
                }
            }
            GroupElement::Word(w)
        }
        (GroupSpec::Z2, GroupElement::Res(x), GroupElement::Res(y)) => GroupElement::Res((x + y) % 2),
        (GroupSpec::Int, GroupElement::Int(x), GroupElement::Int(y)) => GroupElement::Int(x + y),
        _ => panic!("element variant does not match group spec"),
    }
}

pub fn inv(spec: &GroupSpec, a: &GroupElement) -> GroupElement {
    match (spec, a) {
        (GroupSpec::Free { .. }, GroupElement::Word(u)) => {
            GroupElement::Word(u.iter().rev().map(|&l| -l).collect())
        }
        (GroupSpec::Z2, GroupElement::Res(x)) => GroupElement::Res(*x),
        (GroupSpec::Int, GroupElement::Int(x)) => GroupElement::Int(-x),
        _ => panic!("element variant does not match group spec"),
    }
}

pub fn pow(spec: &GroupSpec, a: &GroupElement, k: i64) -> GroupElement {
    let (base, k) = if k < 0 { (inv(spec, a), -k) } else { (a.clone(), k) };
    let mut out = spec.identity();
    for _ in 0..k {
        out = mul(spec, &out, &base);
    }
    out
}

/// Orientation character value, +1 or -1.
pub fn sigma(spec: &GroupSpec, g: &GroupElement) -> i8 {
    if sigma_bar(spec, g) == 0 {
        1
    } else {
        -1
    }
}

/// Parity form of the character: sigma(g) = (-1)^sigma_bar(g).
pub fn sigma_bar(spec: &GroupSpec, g: &GroupElement) -> u8 {
    match (spec, g) {
        (GroupSpec::Free { signs }, GroupElement::Word(w)) => {
            let odd = w
                .iter()
                .filter(|&&l| signs[(l.unsigned_abs() as usize) - 1] == -1)
                .count();
            (odd % 2) as u8
        }
        (GroupSpec::Z2, GroupElement::Res(x)) => *x,
        (GroupSpec::Int, GroupElement::Int(_)) => 0,
        _ => panic!("element variant does not match group spec"),
    }
}

/// Total order key for a letter: x1 < x1^-1 < x2 < x2^-1 < ...
fn letter_key(l: i32) -> u64 {
    ((l.unsigned_abs() as u64) << 1) | u64::from(l < 0)
}

/// Key sequence used for length-lex comparison of conjugacy representatives.
fn class_key(g: &GroupElement) -> Vec<u64> {
    match g {
        GroupElement::Word(w) => w.iter().map(|&l| letter_key(l)).collect(),
        GroupElement::Res(r) => vec![2; *r as usize],
        GroupElement::Int(n) => {
            let k = if *n > 0 { 2 } else { 3 };
            vec![k; n.unsigned_abs() as usize]
        }
    }
}

/// Conjugacy normal form: the length-lex minimal representative, together with
/// the accumulated rotation weight (-1)^(sigma_bar(g) sigma_bar(h)) over the
/// gh -> hg rotations applied on the way there.
pub fn conj_normal(spec: &GroupSpec, g: &GroupElement) -> (GroupElement, i8) {
    let GroupElement::Word(w) = g else {
        return (g.clone(), 1);
    };
    let mut w = w.clone();
    let mut sign = 1i8;
    let total = sigma_bar(spec, g);

    // Cyclic reduction: stripping a ... a^-1 is the rotation with prefix a.
    while w.len() >= 2 && w[0] == -w[w.len() - 1] {
        let a = GroupElement::Word(vec![w[0]]);
        let sa = sigma_bar(spec, &a);
        if sa & (total ^ sa) == 1 {
            sign = -sign;
        }
        w.pop();
        w.remove(0);
    }

    // Among rotations of the cyclic word pick the length-lex minimal one,
    // then reach it by single-letter rotations, each weighted.
    if !w.is_empty() {
        let m = w.len();
        let keys: Vec<u64> = w.iter().map(|&l| letter_key(l)).collect();
        let mut best = 0usize;
        for i in 1..m {
            for j in 0..m {
                let a = keys[(best + j) % m];
                let b = keys[(i + j) % m];
                match a.cmp(&b) {
                    Ordering::Less => break,
                    Ordering::Greater => {
                        best = i;
                        break;
                    }
                    Ordering::Equal => {}
                }
            }
        }
        for _ in 0..best {
            let head = GroupElement::Word(vec![w[0]]);
            let sh = sigma_bar(spec, &head);
            if sh & (total ^ sh) == 1 {
                sign = -sign;
            }
            w.rotate_left(1);
        }
    }
    (GroupElement::Word(w), sign)
}

/// Length-lex order on conjugacy representatives: shorter first, then
/// letterwise with x1 < x1^-1 < x2 < x2^-1 < ...
pub fn compare_conj(a: &GroupElement, b: &GroupElement) -> Ordering {
    let ka = class_key(a);
    let kb = class_key(b);
    ka.len().cmp(&kb.len()).then_with(|| ka.cmp(&kb))
}

/// Primitive root of a conjugacy representative: the shortest r with rep = r^k.
/// Returns (root, k); the identity has root e with k = 1.
pub fn class_root(_spec: &GroupSpec, rep: &GroupElement) -> (GroupElement, u32) {
    match rep {
        GroupElement::Word(w) => {
            let m = w.len();
            if m == 0 {
                return (rep.clone(), 1);
            }
            for p in 1..=m {
                if m % p == 0 && (p..m).all(|i| w[i] == w[i - p]) {
                    return (GroupElement::Word(w[..p].to_vec()), (m / p) as u32);
                }
            }
            unreachable!("period m always divides");
        }
        GroupElement::Res(r) => (GroupElement::Res(*r), 1),
        GroupElement::Int(n) => {
            if *n == 0 {
                (GroupElement::Int(0), 1)
            } else {
                (GroupElement::Int(n.signum()), n.unsigned_abs() as u32)
            }
        }
    }
}

/// True when the centralizer of the class contains an orientation-reversing
/// element. For the identity that means sigma is nontrivial; for a word it is
/// decided by its primitive root.
pub fn centralizer_reverses(spec: &GroupSpec, rep: &GroupElement) -> bool {
    match rep {
        GroupElement::Word(w) => {
            if w.is_empty() {
                !spec.orientable()
            } else {
                let (root, _) = class_root(spec, rep);
                sigma_bar(spec, &root) == 1
            }
        }
        // Z/2 is abelian and sigma is nontrivial, so every centralizer reverses.
        GroupElement::Res(_) => true,
        GroupElement::Int(_) => false,
    }
}

/// Coset table of a finite-index subgroup H: the action of each generator on
/// cosets (0 is H itself) and one representative per coset.
#[derive(Clone, Debug)]
pub struct CosetData {
    pub index: usize,
    /// One permutation per generator; `perms[g][a]` is the coset a . x_{g+1}.
    pub perms: Vec<Vec<usize>>,
    /// `reps[a]` lies in coset a; `reps[0]` lies in H.
    pub reps: Vec<GroupElement>,
}

impl CosetData {
    /// Checks permutations, transitivity, and that each representative lies in
    /// its own coset.
    pub fn validate(&self, spec: &GroupSpec) -> Result<(), &'static str> {
        let d = self.index;
        let ngens = match spec {
            GroupSpec::Free { signs } => signs.len(),
            GroupSpec::Z2 | GroupSpec::Int => 1,
        };
        if self.perms.len() != ngens {
            return Err("one permutation per generator required");
        }
        for p in &self.perms {
            if p.len() != d {
                return Err("permutation length must equal the index");
            }
            let mut seen = vec![false; d];
            for &x in p {
                if x >= d || seen[x] {
                    return Err("not a permutation of the cosets");
                }
                seen[x] = true;
            }
        }
        if let GroupSpec::Z2 = spec {
            for a in 0..d {
                if self.perms[0][self.perms[0][a]] != a {
                    return Err("order-two generator must act as an involution");
                }
            }
        }
        // Transitivity: the orbit of coset 0 is everything.
        let mut reach = vec![false; d];
        let mut stack = vec![0usize];
        reach[0] = true;
        while let Some(a) = stack.pop() {
            for p in &self.perms {
                for b in [p[a], p.iter().position(|&x| x == a).unwrap()] {
                    if !reach[b] {
                        reach[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        if !reach.iter().all(|&r| r) {
            return Err("coset action is not transitive");
        }
        if self.reps.len() != d {
            return Err("one representative per coset required");
        }
        for (a, r) in self.reps.iter().enumerate() {
            if coset_act(spec, self, 0, r) != a {
                return Err("representative does not lie in its coset");
            }
        }
        Ok(())
    }
}

/// Image of coset `a` under right action by g.
pub fn coset_act(spec: &GroupSpec, cd: &CosetData, a: usize, g: &GroupElement) -> usize {
    let step = |a: usize, gen: usize, invert: bool| -> usize {
        let p = &cd.perms[gen];
        if invert {
            p.iter().position(|&x| x == a).expect("validated permutation")
        } else {
            p[a]
        }
    };
    match (spec, g) {
        (GroupSpec::Free { .. }, GroupElement::Word(w)) => {
            let mut c = a;
            for &l in w {
                c = step(c, (l.unsigned_abs() as usize) - 1, l < 0);
            }
            c
        }
        (GroupSpec::Z2, GroupElement::Res(r)) => {
            if *r == 1 {
                step(a, 0, false)
            } else {
                a
            }
        }
        (GroupSpec::Int, GroupElement::Int(n)) => {
            let mut c = a;
            for _ in 0..n.unsigned_abs() {
                c = step(c, 0, *n < 0);
            }
            c
        }
        _ => panic!("element variant does not match group spec"),
    }
}

/// The subgroup element g_a . g . g_{a.g}^{-1} carried by a lifted arc.
pub fn coset_cocycle(spec: &GroupSpec, cd: &CosetData, a: usize, g: &GroupElement) -> GroupElement {
    let target = coset_act(spec, cd, a, g);
    let m = mul(spec, &cd.reps[a], g);
    mul(spec, &m, &inv(spec, &cd.reps[target]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[i32]) -> GroupElement {
        GroupElement::Word(letters.to_vec())
    }

    #[test]
    fn reduce_cancels_and_is_idempotent() {
        let f2 = GroupSpec::free(&[1, 1]);
        assert_eq!(reduce(&f2, &[1, -1, 2]), w(&[2]));
        assert_eq!(reduce(&f2, &[]), w(&[]));
        assert_eq!(reduce(&f2, &[1, 2, -2, 1]), w(&[1, 1]));
    }

    #[test]
    fn sigma_multiplies() {
        let moebius = GroupSpec::free(&[-1]);
        assert_eq!(sigma(&moebius, &w(&[1])), -1);
        assert_eq!(sigma(&moebius, &w(&[])), 1);
        let f2 = GroupSpec::free(&[-1, -1]);
        assert_eq!(sigma(&f2, &w(&[1, 2])), 1);
        assert_eq!(sigma(&GroupSpec::Z2, &GroupElement::Res(1)), -1);
        assert_eq!(sigma(&GroupSpec::Int, &GroupElement::Int(-7)), 1);
    }

    #[test]
    fn conj_normal_spec_cases() {
        let f2 = GroupSpec::free(&[-1, -1]);
        assert_eq!(conj_normal(&f2, &w(&[2, 1])), (w(&[1, 2]), -1));
        assert_eq!(conj_normal(&f2, &w(&[1])), (w(&[1]), 1));
        assert_eq!(conj_normal(&f2, &w(&[1, 2, -1])), (w(&[2]), 1));
    }

    #[test]
    fn conj_normal_rep_is_conjugation_invariant() {
        let f2 = GroupSpec::free(&[1, -1]);
        let g = w(&[1, 2, -1, 2]);
        let (rep, _) = conj_normal(&f2, &g);
        for h in [w(&[1]), w(&[-2, 1]), w(&[2, 2, 1])] {
            let conj = mul(&f2, &mul(&f2, &h, &g), &inv(&f2, &h));
            let (rep2, _) = conj_normal(&f2, &conj);
            assert_eq!(rep, rep2);
        }
    }

    #[test]
    fn compare_conj_is_length_lex() {
        assert_eq!(compare_conj(&w(&[]), &w(&[1])), Ordering::Less);
        assert_eq!(compare_conj(&w(&[2]), &w(&[1, 1])), Ordering::Less);
        assert_eq!(compare_conj(&w(&[1, 2]), &w(&[2, 1])), Ordering::Less);
        assert_eq!(compare_conj(&w(&[1]), &w(&[-1])), Ordering::Less);
    }

    #[test]
    fn class_root_finds_periods() {
        let f1 = GroupSpec::free(&[-1]);
        assert_eq!(class_root(&f1, &w(&[1, 1])), (w(&[1]), 2));
        assert_eq!(class_root(&f1, &w(&[1])), (w(&[1]), 1));
        let f2 = GroupSpec::free(&[1, 1]);
        assert_eq!(class_root(&f2, &w(&[1, 2, 1, 2])), (w(&[1, 2]), 2));
        assert_eq!(class_root(&GroupSpec::Int, &GroupElement::Int(-6)), (GroupElement::Int(-1), 6));
    }

    #[test]
    fn centralizer_parity() {
        let moebius = GroupSpec::free(&[-1]);
        assert!(centralizer_reverses(&moebius, &w(&[1, 1]))); // root x is reversing
        assert!(centralizer_reverses(&moebius, &w(&[]))); // sigma nontrivial
        assert!(!centralizer_reverses(&GroupSpec::free(&[1]), &w(&[1, 1])));
        assert!(!centralizer_reverses(&GroupSpec::trivial(), &w(&[])));
        assert!(centralizer_reverses(&GroupSpec::Z2, &GroupElement::Res(0)));
    }

    fn annulus_double_cover() -> (GroupSpec, CosetData) {
        let spec = GroupSpec::free(&[1]);
        let cd = CosetData {
            index: 2,
            perms: vec![vec![1, 0]],
            reps: vec![w(&[]), w(&[1])],
        };
        (spec, cd)
    }

    #[test]
    fn cocycles_match_hand_evaluation() {
        let (spec, cd) = annulus_double_cover();
        cd.validate(&spec).unwrap();
        assert_eq!(coset_cocycle(&spec, &cd, 0, &w(&[1])), w(&[]));
        assert_eq!(coset_cocycle(&spec, &cd, 1, &w(&[1])), w(&[1, 1]));
        assert_eq!(coset_cocycle(&spec, &cd, 0, &w(&[])), w(&[]));
        assert_eq!(coset_cocycle(&spec, &cd, 1, &w(&[-1])), w(&[]));
        assert_eq!(coset_cocycle(&spec, &cd, 0, &w(&[-1])), w(&[-1, -1]));
    }

    #[test]
    fn cocycles_stabilize_the_subgroup_coset() {
        let (spec, cd) = annulus_double_cover();
        for a in 0..2 {
            for g in [w(&[1]), w(&[-1]), w(&[1, 1, 1])] {
                let c = coset_cocycle(&spec, &cd, a, &g);
                assert_eq!(coset_act(&spec, &cd, 0, &c), 0);
            }
        }
    }

    #[test]
    fn validator_rejects_bad_tables() {
        let spec = GroupSpec::free(&[1]);
        let bad = CosetData {
            index: 2,
            perms: vec![vec![0, 0]],
            reps: vec![w(&[]), w(&[1])],
        };
        assert!(bad.validate(&spec).is_err());
        let wrong_rep = CosetData {
            index: 2,
            perms: vec![vec![1, 0]],
            reps: vec![w(&[]), w(&[1, 1])],
        };
        assert!(wrong_rep.validate(&spec).is_err());
    }
}
