//! Cellular sheaves and their extension to every Alexandrov open set.
//!
//! A [`CellularSheaf`] assigns a vector space `G(p)` of dimension
//! `stalk_dim(p)` to each element and a restriction matrix `ρ_pq` to each
//! relation `p <= q`. Only the maps on Hasse edges are supplied; the rest are
//! composed along paths, and construction fails unless every path gives the
//! same product.
//!
//! Sections over an open `U` are tuples `(s_p)_{p ∈ U}` with
//! `ρ_pq(s_p) = s_q`, i.e. the inverse limit of the stars inside `U`.

mod limit;
mod section;
mod verify;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, PathProduct, Result};
use crate::linalg::{Field, Matrix};
use crate::order::Poset;
use crate::topology::OpenSet;

pub use limit::{dense_stalk_oracle, DirectLimit, StalkReport};
pub use section::{Section, SectionSpace};
pub use verify::{AxiomCheck, AxiomKind, AxiomReport, VerifyOptions};

/// A functor from a finite poset to finite-dimensional vector spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularSheaf {
    base: Poset,
    field: Field,
    dims: Vec<usize>,
    edge_maps: BTreeMap<(usize, usize), Matrix>,
    full_maps: HashMap<(usize, usize), Matrix>,
}

impl CellularSheaf {
    /// Builds a sheaf from stalk dimensions and one matrix per Hasse edge
    /// `(p, q)`, of shape `dims[q] × dims[p]`.
    pub fn new(
        base: Poset,
        field: Field,
        dims: Vec<usize>,
        edge_maps: BTreeMap<(usize, usize), Matrix>,
    ) -> Result<Self> {
        if dims.len() != base.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} stalk dimensions for {} elements",
                dims.len(),
                base.len()
            )));
        }
        let name = |x: usize| base.name(x).to_string();
        for (&(p, q), m) in &edge_maps {
            if p >= base.len() || q >= base.len() || !base.is_hasse_edge(p, q) {
                return Err(Error::NotHasseEdge(
                    base.names().get(p).cloned().unwrap_or_default(),
                    base.names().get(q).cloned().unwrap_or_default(),
                ));
            }
            if m.rows() != dims[q] || m.cols() != dims[p] {
                return Err(Error::DimensionMismatch(format!(
                    "map {} -> {} must be {}x{}, got {}x{}",
                    name(p),
                    name(q),
                    dims[q],
                    dims[p],
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != field {
                return Err(Error::DimensionMismatch(format!(
                    "map {} -> {} is over {} but the sheaf is over {field}",
                    name(p),
                    name(q),
                    m.field()
                )));
            }
        }
        if let Some((p, q)) = base
            .hasse_edges()
            .into_iter()
            .find(|e| !edge_maps.contains_key(e))
        {
            return Err(Error::MissingEdgeMap(name(p), name(q)));
        }

        let mut full_maps = HashMap::new();
        let order = base.linear_extension();
        for (i, &q) in order.iter().enumerate() {
            full_maps.insert((q, q), Matrix::identity(field, dims[q]));
            let covers = base.lower_covers(q);
            for &p in &order[..i] {
                if !base.lt(p, q) {
                    continue;
                }
                // every path from p to q ends with some Hasse edge c -> q
                let mut found: Option<(usize, Matrix)> = None;
                for &c in covers.iter().filter(|&&c| base.leq(p, c)) {
                    let product = edge_maps[&(c, q)].mul(&full_maps[&(p, c)])?;
                    match &found {
                        None => found = Some((c, product)),
                        Some((via, earlier)) if *earlier != product => {
                            return Err(Error::PathDependent {
                                from: name(p),
                                to: name(q),
                                paths: Box::new([
                                    PathProduct {
                                        via: name(*via),
                                        product: earlier.to_string(),
                                    },
                                    PathProduct {
                                        via: name(c),
                                        product: product.to_string(),
                                    },
                                ]),
                            });
                        }
                        Some(_) => {}
                    }
                }
                let (_, product) = found.expect("p < q has a lower cover of q above p");
                full_maps.insert((p, q), product);
            }
        }
        Ok(CellularSheaf {
            base,
            field,
            dims,
            edge_maps,
            full_maps,
        })
    }

    /// Same as [`CellularSheaf::new`] with elements given by name.
    pub fn from_named(
        base: Poset,
        field: Field,
        dims: &[(&str, usize)],
        maps: Vec<(&str, &str, Matrix)>,
    ) -> Result<Self> {
        let mut dim_vec = vec![None; base.len()];
        for &(name, d) in dims {
            dim_vec[base.index_of(name)?] = Some(d);
        }
        let dim_vec = dim_vec
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    Error::DimensionMismatch(format!("no dimension for `{}`", base.name(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut edge_maps = BTreeMap::new();
        for (p, q, m) in maps {
            edge_maps.insert((base.index_of(p)?, base.index_of(q)?), m);
        }
        CellularSheaf::new(base, field, dim_vec, edge_maps)
    }

    /// Every stalk `field^dim`, every restriction the identity.
    pub fn constant(base: Poset, field: Field, dim: usize) -> Self {
        let edge_maps = base
            .hasse_edges()
            .into_iter()
            .map(|e| (e, Matrix::identity(field, dim)))
            .collect();
        let n = base.len();
        CellularSheaf::new(base, field, vec![dim; n], edge_maps).expect("identity maps commute")
    }

    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn stalk_dim(&self, p: usize) -> usize {
        self.dims[p]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// The supplied map on a Hasse edge.
    pub fn edge_map(&self, p: usize, q: usize) -> Option<&Matrix> {
        self.edge_maps.get(&(p, q))
    }

    pub fn edge_maps(&self) -> &BTreeMap<(usize, usize), Matrix> {
        &self.edge_maps
    }

    /// `ρ_pq` for `p <= q`, `None` when the elements are unrelated.
    pub fn restriction(&self, p: usize, q: usize) -> Option<&Matrix> {
        self.full_maps.get(&(p, q))
    }

    /// Dimension of `∏_{p ∈ U} G(p)`.
    pub fn product_dim(&self, open: &OpenSet) -> usize {
        open.members().iter().map(|&p| self.dims[p]).sum()
    }

    /// Start of each member's block in `∏_{p ∈ U} G(p)`.
    pub(crate) fn offsets(&self, open: &OpenSet) -> Vec<usize> {
        open.members()
            .iter()
            .scan(0, |acc, &p| {
                let start = *acc;
                *acc += self.dims[p];
                Some(start)
            })
            .collect()
    }
}
