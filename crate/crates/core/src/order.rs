//! Finite preorders, posets and order-preserving maps.
//!
//! Relations are stored as dense boolean tables over element indices; element
//! identifiers are opaque strings whose input order fixes every tie-break and
//! every output ordering.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
struct Relation {
    names: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
}

/// A reflexive, transitive relation on a finite set of named elements.
///
/// Cheap to clone; the relation table is shared.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreOrder(Arc<Relation>);

impl PreOrder {
    /// The smallest preorder on `elements` containing every `(x, y)` in `pairs`
    /// as `x <= y`.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(elements: &[S], pairs: &[(T, T)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            idx_pairs.push((lookup(x.as_ref())?, lookup(y.as_ref())?));
        }
        Ok(Self::from_index_pairs(names, index, &idx_pairs))
    }

    /// Same as [`PreOrder::new`] but with pairs given by element index.
    pub fn from_indices(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        if let Some(&(x, y)) = pairs
            .iter()
            .find(|(x, y)| *x >= names.len() || *y >= names.len())
        {
            return Err(Error::UnknownElement(format!("#{}", x.max(y))));
        }
        Ok(Self::from_index_pairs(names, index, pairs))
    }

    fn from_index_pairs(
        names: Vec<String>,
        index: HashMap<String, usize>,
        pairs: &[(usize, usize)],
    ) -> Self {
        let n = names.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(x, y) in pairs {
            leq[x * n + y] = true;
        }
        // Floyd–Warshall closure
        for k in 0..n {
            for i in 0..n {
                if !leq[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if leq[k * n + j] {
                        leq[i * n + j] = true;
                    }
                }
            }
        }
        PreOrder(Arc::new(Relation { names, index, leq }))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.0.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// `x <= y`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.0.leq[x * self.len() + y]
    }

    /// `x <= y` and not `y <= x`.
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && !self.leq(y, x)
    }

    /// `x <= y` and `y <= x`.
    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && self.leq(y, x)
    }

    /// All related pairs `(x, y)` with `x <= y`, in index order.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| self.leq(x, y))
            .collect()
    }

    /// A pair of distinct equivalent elements, if any.
    pub fn antisymmetry_witness(&self) -> Option<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .find(|&(x, y)| self.equivalent(x, y))
    }

    pub fn is_poset(&self) -> bool {
        self.antisymmetry_witness().is_none()
    }

    /// Collapses `x ~ y` (`x <= y <= x`) to a poset of equivalence classes.
    ///
    /// Classes are the strongly connected components of the relation digraph,
    /// represented by their first element in input order and listed in that
    /// order.
    pub fn quotient(&self) -> QuotientResult {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if class_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (x..n).filter(|&y| self.equivalent(x, y)).collect();
            for &m in &members {
                class_of[m] = classes.len();
            }
            classes.push(members);
        }
        let names = classes
            .iter()
            .map(|c| self.name(c[0]).to_string())
            .collect();
        let mut pairs = Vec::new();
        for (a, ca) in classes.iter().enumerate() {
            for (b, cb) in classes.iter().enumerate() {
                if a != b && self.leq(ca[0], cb[0]) {
                    pairs.push((a, b));
                }
            }
        }
        let quotient =
            PreOrder::from_indices(names, &pairs).expect("class representatives are distinct");
        let quotient = Poset::try_from(quotient).expect("quotient of a preorder is antisymmetric");
        let projection = MonotoneMap {
            source: self.clone(),
            target: quotient.as_preorder().clone(),
            assignment: class_of,
        };
        QuotientResult {
            quotient,
            projection,
            classes,
        }
    }

    /// Elements ordered so that `x < y` implies `x` comes first; ties by index.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        // number of strictly smaller elements is monotone along `<`
        let below: Vec<usize> = (0..n)
            .map(|y| (0..n).filter(|&x| self.lt(x, y)).count())
            .collect();
        order.sort_by_key(|&x| (below[x], x));
        order
    }
}

impl fmt::Display for PreOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .relation_pairs()
            .into_iter()
            .filter(|(x, y)| x != y)
            .map(|(x, y)| format!("{}<={}", self.name(x), self.name(y)))
            .collect();
        write!(
            f,
            "{{{}}} with {}",
            self.names().join(", "),
            pairs.join(" ")
        )
    }
}

/// A preorder that is also antisymmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset(PreOrder);

impl Poset {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(elements: &[S], pairs: &[(T, T)]) -> Result<Self> {
        Poset::try_from(PreOrder::new(elements, pairs)?)
    }

    pub fn as_preorder(&self) -> &PreOrder {
        &self.0
    }

    /// Covering pairs `x < y` with nothing strictly between them, sorted by
    /// index. Their reflexive-transitive closure is the order itself.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.lt(x, y) && !(0..n).any(|z| self.lt(x, z) && self.lt(z, y)) {
                    edges.push((x, y));
                }
            }
        }
        edges
    }

    pub fn is_hasse_edge(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) && !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y))
    }

    /// Elements covering `x`.
    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| self.is_hasse_edge(x, y))
            .collect()
    }

    /// Elements covered by `y`.
    pub fn lower_covers(&self, y: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.is_hasse_edge(x, y))
            .collect()
    }
}

impl TryFrom<PreOrder> for Poset {
    type Error = Error;

    fn try_from(p: PreOrder) -> Result<Self> {
        match p.antisymmetry_witness() {
            Some((x, y)) => Err(Error::NotAntisymmetric(
                p.name(x).to_string(),
                p.name(y).to_string(),
            )),
            None => Ok(Poset(p)),
        }
    }
}

impl Deref for Poset {
    type Target = PreOrder;

    fn deref(&self) -> &PreOrder {
        &self.0
    }
}

/// A function between preorders, given by element index.
///
/// [`MonotoneMap::new`] enforces `x <= y ⇒ f(x) <= f(y)`;
/// [`MonotoneMap::new_unchecked`] builds arbitrary maps, for probing
/// continuity of maps that are not order preserving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneMap {
    source: PreOrder,
    target: PreOrder,
    assignment: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: PreOrder, target: PreOrder, assignment: Vec<usize>) -> Result<Self> {
        let map = Self::new_unchecked(source, target, assignment)?;
        if let Some((x, y)) = map.monotonicity_violation() {
            return Err(map.violation_error(x, y));
        }
        Ok(map)
    }

    /// Checks only that the assignment is a total function between the spaces.
    pub fn new_unchecked(
        source: PreOrder,
        target: PreOrder,
        assignment: Vec<usize>,
    ) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::SpaceMismatch(format!(
                "assignment has {} entries for {} source elements",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(Error::SpaceMismatch(format!(
                "target index {bad} out of range"
            )));
        }
        Ok(MonotoneMap {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(space: &PreOrder) -> Self {
        MonotoneMap {
            source: space.clone(),
            target: space.clone(),
            assignment: (0..space.len()).collect(),
        }
    }

    pub fn source(&self) -> &PreOrder {
        &self.source
    }

    pub fn target(&self) -> &PreOrder {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// A pair `x <= y` with `f(x) </= f(y)`, if any.
    pub fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        self.source
            .relation_pairs()
            .into_iter()
            .find(|&(x, y)| !self.target.leq(self.apply(x), self.apply(y)))
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    fn violation_error(&self, x: usize, y: usize) -> Error {
        Error::NotMonotone {
            x: self.source.name(x).to_string(),
            y: self.source.name(y).to_string(),
            fx: self.target.name(self.apply(x)).to_string(),
            fy: self.target.name(self.apply(y)).to_string(),
        }
    }
}

/// The poset of equivalence classes of a preorder and the projection onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientResult {
    pub quotient: Poset,
    pub projection: MonotoneMap,
    /// Members of each class, by source index.
    pub classes: Vec<Vec<usize>>,
}

impl QuotientResult {
    /// The unique monotone map `f̄` on the quotient with `f̄ ∘ π = f`.
    ///
    /// `f` must start at the preorder this quotient was built from and land in
    /// a poset.
    pub fn factor(&self, f: &MonotoneMap) -> Result<MonotoneMap> {
        if f.source != self.projection.source {
            return Err(Error::SpaceMismatch(
                "map does not start at the quotiented preorder".into(),
            ));
        }
        if let Some((a, b)) = f.target.antisymmetry_witness() {
            return Err(Error::NotAntisymmetric(
                f.target.name(a).to_string(),
                f.target.name(b).to_string(),
            ));
        }
        if let Some((x, y)) = f.monotonicity_violation() {
            return Err(f.violation_error(x, y));
        }
        // f is constant on classes: x ~ y gives f(x) <= f(y) <= f(x), and the
        // target is antisymmetric.
        let assignment = self.classes.iter().map(|c| f.apply(c[0])).collect();
        MonotoneMap::new(
            self.quotient.as_preorder().clone(),
            f.target.clone(),
            assignment,
        )
    }
}
