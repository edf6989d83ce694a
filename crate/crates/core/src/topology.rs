//! The Alexandrov topology of a finite preorder.
//!
//! Open sets are the up-closed subsets. The open star `U_x = {y : x <= y}` is
//! the smallest open set containing `x`, and the stars form a basis.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::order::{MonotoneMap, PreOrder};

/// Default cap on the number of elements for exhaustive enumeration of opens.
pub const DEFAULT_MAX_ELEMENTS: usize = 20;

/// An up-closed set of element indices, kept sorted.
///
/// Opens are ordered canonically: first by size, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenSet {
    members: Vec<usize>,
}

impl OpenSet {
    fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        OpenSet { members }
    }

    pub fn empty() -> Self {
        OpenSet {
            members: Vec::new(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &OpenSet) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// Position of `x` within the sorted member list.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.members.binary_search(&x).ok()
    }

    /// Union of opens; up-closure is preserved.
    pub fn union(&self, other: &OpenSet) -> OpenSet {
        let set: BTreeSet<usize> = self.members.iter().chain(&other.members).copied().collect();
        OpenSet::from_sorted(set.into_iter().collect())
    }

    /// Intersection of opens; up-closure is preserved.
    pub fn intersection(&self, other: &OpenSet) -> OpenSet {
        OpenSet::from_sorted(
            self.members
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        )
    }

    pub fn union_all<'a>(opens: impl IntoIterator<Item = &'a OpenSet>) -> OpenSet {
        let set: BTreeSet<usize> = opens
            .into_iter()
            .flat_map(|u| u.members.iter().copied())
            .collect();
        OpenSet::from_sorted(set.into_iter().collect())
    }

    /// Member names, for display.
    pub fn describe(&self, space: &PreOrder) -> String {
        let names: Vec<&str> = self.members.iter().map(|&x| space.name(x)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

impl PartialOrd for OpenSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .len()
            .cmp(&other.members.len())
            .then_with(|| self.members.cmp(&other.members))
    }
}

/// The basic opens inside an open set, with each star `U_x` identified with `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisIndex {
    pub open: OpenSet,
    /// Elements `x` with `U_x ⊆ open`, sorted.
    pub stars: Vec<usize>,
}

impl PreOrder {
    /// `U_x = {y : x <= y}`.
    pub fn open_star(&self, x: usize) -> OpenSet {
        OpenSet::from_sorted((0..self.len()).filter(|&y| self.leq(x, y)).collect())
    }

    pub fn open_star_named(&self, name: &str) -> Result<OpenSet> {
        Ok(self.open_star(self.index_of(name)?))
    }

    /// `{y : y <= x}`, the closure of the point `x`.
    pub fn closure_of_point(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(y, x)).collect()
    }

    /// A member `x` of `set` and some `y >= x` outside it, if any.
    pub fn up_closure_violation(&self, set: &[usize]) -> Option<(usize, usize)> {
        let mut inside = vec![false; self.len()];
        for &x in set {
            inside[x] = true;
        }
        set.iter().find_map(|&x| {
            (0..self.len())
                .find(|&y| !inside[y] && self.leq(x, y))
                .map(|y| (x, y))
        })
    }

    pub fn is_open(&self, set: &[usize]) -> bool {
        self.up_closure_violation(set).is_none()
    }

    /// Validates `members` as an open set.
    pub fn open_set(&self, members: impl IntoIterator<Item = usize>) -> Result<OpenSet> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= self.len()) {
            return Err(Error::UnknownElement(format!("#{bad}")));
        }
        let members: Vec<usize> = set.into_iter().collect();
        if let Some((x, y)) = self.up_closure_violation(&members) {
            return Err(Error::NotOpen {
                member: self.name(x).to_string(),
                missing: self.name(y).to_string(),
            });
        }
        Ok(OpenSet::from_sorted(members))
    }

    pub fn whole_space(&self) -> OpenSet {
        OpenSet::from_sorted((0..self.len()).collect())
    }

    /// The stars contained in `open`. In an Alexandrov space `x ∈ U` exactly
    /// when `U_x ⊆ U`, so these are the members of `open`.
    pub fn basis_index(&self, open: &OpenSet) -> BasisIndex {
        BasisIndex {
            open: open.clone(),
            stars: open.members.clone(),
        }
    }

    /// [`PreOrder::basis_index`] computed by testing every star for containment.
    pub fn basis_index_by_scan(&self, open: &OpenSet) -> BasisIndex {
        BasisIndex {
            open: open.clone(),
            stars: (0..self.len())
                .filter(|&x| self.open_star(x).is_subset(open))
                .collect(),
        }
    }

    /// For opens `U1`, `U2`, the truth of
    /// (i) `U1 ⊆ U2 ⇔ I(U1) ⊆ I(U2)`,
    /// (ii) `U1 = U2 ⇔ I(U1) = I(U2)` and
    /// (iii) `I(U1 ∩ U2) = I(U1) ∩ I(U2)`.
    pub fn index_lemma(&self, u1: &OpenSet, u2: &OpenSet) -> [bool; 3] {
        let i1: BTreeSet<usize> = self.basis_index_by_scan(u1).stars.into_iter().collect();
        let i2: BTreeSet<usize> = self.basis_index_by_scan(u2).stars.into_iter().collect();
        let i12: BTreeSet<usize> = self
            .basis_index_by_scan(&u1.intersection(u2))
            .stars
            .into_iter()
            .collect();
        [
            u1.is_subset(u2) == i1.is_subset(&i2),
            (u1 == u2) == (i1 == i2),
            i12 == i1.intersection(&i2).copied().collect(),
        ]
    }

    /// Every open set, in canonical order. Fails above `bound` elements.
    pub fn enumerate_opens(&self, bound: usize) -> Result<Vec<OpenSet>> {
        if self.len() > bound {
            return Err(Error::EnumerationBound {
                size: self.len(),
                bound,
            });
        }
        let q = self.quotient();
        // top-down: every strict successor class is decided before its predecessors
        let mut order = q.quotient.linear_extension();
        order.reverse();
        let mut included = vec![false; q.classes.len()];
        let mut out = Vec::new();
        enumerate_up_sets(&q.quotient, &order, 0, &mut included, &mut |inc| {
            let members: BTreeSet<usize> = inc
                .iter()
                .enumerate()
                .filter(|(_, &on)| on)
                .flat_map(|(c, _)| q.classes[c].iter().copied())
                .collect();
            out.push(OpenSet::from_sorted(members.into_iter().collect()));
        });
        out.sort();
        Ok(out)
    }

    /// Opens contained in `open`, in canonical order.
    pub fn opens_within(&self, open: &OpenSet, bound: usize) -> Result<Vec<OpenSet>> {
        Ok(self
            .enumerate_opens(bound)?
            .into_iter()
            .filter(|u| u.is_subset(open))
            .collect())
    }

    /// Preimage of a set of target elements under `f`.
    fn preimage(f: &MonotoneMap, set: &OpenSet) -> Vec<usize> {
        (0..f.source().len())
            .filter(|&x| set.contains(f.apply(x)))
            .collect()
    }
}

fn enumerate_up_sets(
    space: &PreOrder,
    order: &[usize],
    depth: usize,
    included: &mut Vec<bool>,
    emit: &mut impl FnMut(&[bool]),
) {
    let Some(&c) = order.get(depth) else {
        emit(included);
        return;
    };
    included[c] = false;
    enumerate_up_sets(space, order, depth + 1, included, emit);
    let successors_in = (0..space.len()).all(|d| !space.lt(c, d) || included[d]);
    if successors_in {
        included[c] = true;
        enumerate_up_sets(space, order, depth + 1, included, emit);
        included[c] = false;
    }
}

/// Whether the preimage of every open of the target is open in the source.
///
/// Works for arbitrary maps; order-preserving maps are always continuous.
pub fn is_continuous(f: &MonotoneMap, bound: usize) -> Result<bool> {
    Ok(discontinuity_witness(f, bound)?.is_none())
}

/// An open of the target whose preimage is not open, if any.
pub fn discontinuity_witness(f: &MonotoneMap, bound: usize) -> Result<Option<OpenSet>> {
    Ok(f.target()
        .enumerate_opens(bound)?
        .into_iter()
        .find(|u| !f.source().is_open(&PreOrder::preimage(f, u))))
}
