//! Stalks as direct limits.
//!
//! The stalk at `p` is `(⊕_{U ∋ p} F⁺(U)) / D_p` where `D_p` is spanned by
//! `s − ρ⁺_{UV}(s)` for `V ⊆ U`. [`DirectLimit`] builds that quotient over
//! every open containing `p` without using the fact that `U_p` is the
//! smallest one; [`CellularSheaf::stalk_at`] compares it with `G(p)`.

use crate::error::Result;
use crate::linalg::{Matrix, Scalar, SubspaceBasis};
use crate::topology::OpenSet;

use super::{CellularSheaf, SectionSpace};

/// Outcome of comparing `G(p)` with the direct-limit stalk at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StalkReport {
    pub point: usize,
    /// `dim G(p)`.
    pub theorem_dim: usize,
    /// Dimension of the direct limit.
    pub oracle_dim: usize,
    /// Germ map `F⁺(U_p) → stalk`, `s ↦ s_p`, in the canonical basis of
    /// `F⁺(U_p)` and the quotient basis of the stalk.
    pub iso_witness: Matrix,
}

impl StalkReport {
    pub fn holds(&self) -> bool {
        self.theorem_dim == self.oracle_dim && self.iso_witness.is_invertible()
    }
}

/// The quotient `(⊕_{U ∋ p} F⁺(U)) / D_p`, computed exactly.
///
/// Elimination is organised around the covering pairs `V ⋖ U` of the family
/// of opens containing `p`: each open with a smaller neighbour in the family
/// is first identified with one such neighbour, which leaves the summands of
/// the minimal opens; every covering difference is then reduced into that
/// space. Differences along longer inclusions telescope into covering ones,
/// so the span is all of `D_p`.
#[derive(Clone, Debug)]
pub struct DirectLimit {
    point: usize,
    opens: Vec<OpenSet>,
    spaces: Vec<SectionSpace>,
    /// Maps `F⁺(U)` into the direct sum of the minimal summands.
    to_sinks: Vec<Matrix>,
    sinks: Vec<usize>,
    sink_offsets: Vec<usize>,
    sink_dim: usize,
    relations: SubspaceBasis,
}

impl DirectLimit {
    pub fn new(sheaf: &CellularSheaf, point: usize, bound: usize) -> Result<Self> {
        let field = sheaf.field();
        let opens: Vec<OpenSet> = sheaf
            .base()
            .enumerate_opens(bound)?
            .into_iter()
            .filter(|u| u.contains(point))
            .collect();
        let spaces = opens
            .iter()
            .map(|u| sheaf.sections_over(u))
            .collect::<Result<Vec<_>>>()?;

        let n = opens.len();
        let strictly_inside =
            |v: usize, u: usize| opens[v].len() < opens[u].len() && opens[v].is_subset(&opens[u]);
        let mut covering = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if strictly_inside(v, u)
                    && !(0..n).any(|w| strictly_inside(v, w) && strictly_inside(w, u))
                {
                    covering.push((u, v));
                }
            }
        }

        let step: Vec<Option<usize>> = (0..n)
            .map(|u| covering.iter().find(|&&(a, _)| a == u).map(|&(_, v)| v))
            .collect();
        let sinks: Vec<usize> = (0..n).filter(|&u| step[u].is_none()).collect();
        let mut sink_offsets = vec![0; n];
        let mut sink_dim = 0;
        for &s in &sinks {
            sink_offsets[s] = sink_dim;
            sink_dim += spaces[s].dim();
        }

        let mut restrictions = std::collections::HashMap::new();
        let mut restriction = |u: usize, v: usize| -> Result<Matrix> {
            if let Some(m) = restrictions.get(&(u, v)) {
                return Ok(Matrix::clone(m));
            }
            let m = sheaf.restriction_matrix(&spaces[u], &spaces[v])?;
            restrictions.insert((u, v), m.clone());
            Ok(m)
        };

        // opens are in canonical order, so smaller opens come first
        let mut to_sinks: Vec<Matrix> = Vec::with_capacity(n);
        for u in 0..n {
            let t = match step[u] {
                None => {
                    let mut t = Matrix::zeros(field, sink_dim, spaces[u].dim());
                    t.place(
                        sink_offsets[u],
                        0,
                        &Matrix::identity(field, spaces[u].dim()),
                    );
                    t
                }
                Some(v) => to_sinks[v].mul(&restriction(u, v)?)?,
            };
            to_sinks.push(t);
        }

        let mut generators: Vec<Vec<Scalar>> = Vec::new();
        for &(u, v) in &covering {
            let difference = to_sinks[u].sub(&to_sinks[v].mul(&restriction(u, v)?)?)?;
            for j in 0..difference.cols() {
                let col = difference.column(j);
                if col.iter().any(|x| !x.is_zero()) {
                    generators.push(col);
                }
            }
        }
        let relations = SubspaceBasis::span(field, sink_dim, generators);

        Ok(DirectLimit {
            point,
            opens,
            spaces,
            to_sinks,
            sinks,
            sink_offsets,
            sink_dim,
            relations,
        })
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn dim(&self) -> usize {
        self.relations.codim()
    }

    /// Opens containing the point, in canonical order.
    pub fn opens(&self) -> &[OpenSet] {
        &self.opens
    }

    pub fn spaces(&self) -> &[SectionSpace] {
        &self.spaces
    }

    /// Opens with no smaller open containing the point.
    pub fn minimal_opens(&self) -> Vec<&OpenSet> {
        self.sinks.iter().map(|&s| &self.opens[s]).collect()
    }

    pub fn position(&self, open: &OpenSet) -> Option<usize> {
        self.opens.iter().position(|u| u == open)
    }

    /// The germ of the section with coordinates `coords` over `opens()[idx]`.
    pub fn germ(&self, idx: usize, coords: &[Scalar]) -> Vec<Scalar> {
        let v = self.to_sinks[idx].apply(coords).expect("coordinate count");
        self.relations.quotient_coordinates(&v)
    }

    /// Germ map `F⁺(U) → stalk` for `U = opens()[idx]`.
    pub fn germ_map(&self, idx: usize) -> Matrix {
        let field = self.relations.field();
        let dim = self.spaces[idx].dim();
        let columns: Vec<Vec<Scalar>> = (0..dim)
            .map(|j| {
                let mut e = vec![field.zero(); dim];
                e[j] = field.one();
                self.germ(idx, &e)
            })
            .collect();
        Matrix::from_columns(field, self.dim(), &columns)
    }

    /// Splits a stalk element into representatives over the minimal opens:
    /// pairs `(open index, coordinates)` whose germs sum to the element.
    pub fn representatives(&self, stalk_coords: &[Scalar]) -> Vec<(usize, Vec<Scalar>)> {
        let field = self.relations.field();
        let mut is_pivot = vec![false; self.sink_dim];
        for &p in self.relations.pivots() {
            is_pivot[p] = true;
        }
        let mut lifted = vec![field.zero(); self.sink_dim];
        let free = (0..self.sink_dim).filter(|&i| !is_pivot[i]);
        for (slot, value) in free.zip(stalk_coords) {
            lifted[slot] = value.clone();
        }
        self.sinks
            .iter()
            .map(|&s| {
                let start = self.sink_offsets[s];
                (s, lifted[start..start + self.spaces[s].dim()].to_vec())
            })
            .collect()
    }
}

/// Dimension of the stalk and the germ map from `F⁺(U_p)`, computed over the
/// full direct sum with a generator for every inclusion. Cubic in the number
/// of opens; meant for cross-checking [`DirectLimit`] on small inputs.
pub fn dense_stalk_oracle(
    sheaf: &CellularSheaf,
    point: usize,
    bound: usize,
) -> Result<(usize, Matrix)> {
    let field = sheaf.field();
    let opens: Vec<OpenSet> = sheaf
        .base()
        .enumerate_opens(bound)?
        .into_iter()
        .filter(|u| u.contains(point))
        .collect();
    let spaces = opens
        .iter()
        .map(|u| sheaf.sections_over(u))
        .collect::<Result<Vec<_>>>()?;
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut total = 0;
    for s in &spaces {
        offsets.push(total);
        total += s.dim();
    }
    let mut generators = Vec::new();
    for (u, big) in opens.iter().enumerate() {
        for (v, small) in opens.iter().enumerate() {
            if u == v || !small.is_subset(big) {
                continue;
            }
            let r = sheaf.restriction_matrix(&spaces[u], &spaces[v])?;
            for j in 0..spaces[u].dim() {
                let mut g = vec![field.zero(); total];
                g[offsets[u] + j] = field.one();
                for (i, x) in r.column(j).into_iter().enumerate() {
                    g[offsets[v] + i] = -&x;
                }
                generators.push(g);
            }
        }
    }
    let relations = SubspaceBasis::span(field, total, generators);
    let star = sheaf.base().open_star(point);
    let idx = opens
        .iter()
        .position(|u| *u == star)
        .expect("the star is open and contains the point");
    let columns: Vec<Vec<Scalar>> = (0..spaces[idx].dim())
        .map(|j| {
            let mut e = vec![field.zero(); total];
            e[offsets[idx] + j] = field.one();
            relations.quotient_coordinates(&e)
        })
        .collect();
    Ok((
        relations.codim(),
        Matrix::from_columns(field, relations.codim(), &columns),
    ))
}

impl CellularSheaf {
    /// The direct-limit stalk at `p`; see [`DirectLimit`].
    pub fn stalk_oracle(&self, p: usize, bound: usize) -> Result<DirectLimit> {
        DirectLimit::new(self, p, bound)
    }

    /// Compares `G(p)` with the direct-limit stalk at `p`.
    pub fn stalk_at(&self, p: usize, bound: usize) -> Result<StalkReport> {
        let limit = self.stalk_oracle(p, bound)?;
        let star = self.base.open_star(p);
        let idx = limit
            .position(&star)
            .expect("the star is open and contains the point");
        Ok(StalkReport {
            point: p,
            theorem_dim: self.stalk_dim(p),
            oracle_dim: limit.dim(),
            iso_witness: limit.germ_map(idx),
        })
    }

    /// The canonical map `F⁺(U_p) → G(p)` taking a section to its value at
    /// `p`, in the canonical basis of `F⁺(U_p)`.
    pub fn star_identification(&self, p: usize) -> Result<Matrix> {
        let star = self.base.open_star(p);
        let space = self.sections_over(&star)?;
        let i = star.position(p).expect("p ∈ U_p");
        let columns: Vec<Vec<Scalar>> = self
            .basis_sections(&space)
            .iter()
            .map(|s| s.components()[i].clone())
            .collect();
        Ok(Matrix::from_columns(
            self.field,
            self.stalk_dim(p),
            &columns,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::order::Poset;
    use crate::topology::DEFAULT_MAX_ELEMENTS;

    const Q: Field = Field::Rationals;

    fn two_chain(map: i64) -> CellularSheaf {
        let base = Poset::new(&["a", "b"], &[("a", "b")]).unwrap();
        CellularSheaf::from_named(
            base,
            Q,
            &[("a", 1), ("b", 1)],
            vec![("a", "b", Matrix::from_i64(Q, &[&[map]]))],
        )
        .unwrap()
    }

    #[test]
    fn zero_map_chain_has_one_dimensional_stalks() {
        let s = two_chain(0);
        let report = s.stalk_at(0, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(report.oracle_dim, 1);
        assert!(report.holds());
        assert_eq!(dense_stalk_oracle(&s, 0, 20).unwrap().0, 1);
    }

    #[test]
    fn identity_chain_stalks() {
        let s = two_chain(1);
        for p in 0..2 {
            let report = s.stalk_at(p, DEFAULT_MAX_ELEMENTS).unwrap();
            assert_eq!((report.theorem_dim, report.oracle_dim), (1, 1));
            assert!(report.holds());
        }
    }

    #[test]
    fn maximal_point_and_zero_sheaf() {
        let base = Poset::new(
            &["p", "q1", "q2", "r"],
            &[("p", "q1"), ("p", "q2"), ("q1", "r"), ("q2", "r")],
        )
        .unwrap();
        let zero = CellularSheaf::constant(base.clone(), Q, 0);
        for p in 0..4 {
            let r = zero.stalk_at(p, 20).unwrap();
            assert_eq!(r.oracle_dim, 0);
            assert!(r.holds());
        }
        let constant = CellularSheaf::constant(base, Q, 2);
        let limit = constant.stalk_oracle(3, 20).unwrap();
        assert_eq!(limit.opens().len(), 5);
        assert_eq!(limit.minimal_opens(), vec![&constant.base().open_star(3)]);
        assert!(constant.stalk_at(3, 20).unwrap().holds());
    }

    #[test]
    fn star_identification_is_invertible() {
        let s = two_chain(3);
        for p in 0..2 {
            assert!(s.star_identification(p).unwrap().is_invertible());
        }
    }
}
