use crate::error::{Error, Result};
use crate::linalg::{format_vector, BlockLayout, Matrix, Scalar, SubspaceBasis};
use crate::topology::OpenSet;

use super::CellularSheaf;

/// A compatible family `(s_p)_{p ∈ U}`: `ρ_pq(s_p) = s_q` for all `p <= q` in `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    open: OpenSet,
    /// One vector per member of `open`, in member order.
    components: Vec<Vec<Scalar>>,
}

impl Section {
    pub fn open(&self) -> &OpenSet {
        &self.open
    }

    pub fn components(&self) -> &[Vec<Scalar>] {
        &self.components
    }

    /// The component at element `p`, if `p` is in the open.
    pub fn at(&self, p: usize) -> Option<&[Scalar]> {
        self.open.position(p).map(|i| self.components[i].as_slice())
    }

    /// Components concatenated into a vector of `∏_{p ∈ U} G(p)`.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.components.iter().flatten().cloned().collect()
    }
}

/// The space `F⁺(U)` of sections over an open, as a canonical basis inside
/// `∏_{p ∈ U} G(p)` (coordinates ordered by element index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    open: OpenSet,
    offsets: Vec<usize>,
    basis: SubspaceBasis,
}

impl SectionSpace {
    pub fn open(&self) -> &OpenSet {
        &self.open
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Coordinates of a section (or of any flattened vector) in this basis.
    pub fn coordinates(&self, flat: &[Scalar]) -> Option<Vec<Scalar>> {
        self.basis.coordinates(flat)
    }

    /// Block of `flat` belonging to the member at position `i`.
    fn block<'a>(&self, flat: &'a [Scalar], i: usize, dim: usize) -> &'a [Scalar] {
        &flat[self.offsets[i]..self.offsets[i] + dim]
    }
}

impl CellularSheaf {
    /// Checks compatibility and wraps the components as a section.
    pub fn section(&self, open: &OpenSet, components: Vec<Vec<Scalar>>) -> Result<Section> {
        if components.len() != open.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for an open with {} members",
                components.len(),
                open.len()
            )));
        }
        for (&p, v) in open.members().iter().zip(&components) {
            if v.len() != self.stalk_dim(p) || v.iter().any(|x| x.field() != self.field) {
                return Err(Error::DimensionMismatch(format!(
                    "component at `{}` must be a vector of length {} over {}",
                    self.base.name(p),
                    self.stalk_dim(p),
                    self.field
                )));
            }
        }
        for (i, &p) in open.members().iter().enumerate() {
            for (j, &q) in open.members().iter().enumerate() {
                if p == q || !self.base.leq(p, q) {
                    continue;
                }
                let expected = self.full_maps[&(p, q)].apply(&components[i])?;
                if expected != components[j] {
                    return Err(Error::IncompatibleSection {
                        from: self.base.name(p).to_string(),
                        to: self.base.name(q).to_string(),
                        expected: format_vector(&expected),
                        actual: format_vector(&components[j]),
                    });
                }
            }
        }
        Ok(Section {
            open: open.clone(),
            components,
        })
    }

    fn split(&self, open: &OpenSet, flat: &[Scalar]) -> Vec<Vec<Scalar>> {
        let offsets = self.offsets(open);
        open.members()
            .iter()
            .zip(&offsets)
            .map(|(&p, &o)| flat[o..o + self.stalk_dim(p)].to_vec())
            .collect()
    }

    /// Reads a flattened vector of `∏_{p ∈ U} G(p)` as a section.
    pub fn section_from_flat(&self, open: &OpenSet, flat: &[Scalar]) -> Result<Section> {
        if flat.len() != self.product_dim(open) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a product of dimension {}",
                flat.len(),
                self.product_dim(open)
            )));
        }
        self.section(open, self.split(open, flat))
    }

    /// Kernel of `(s_p) ↦ (ρ_pq(s_p) − s_q)` over the given pairs `p < q`.
    fn constraint_kernel(&self, open: &OpenSet, pairs: &[(usize, usize)]) -> SubspaceBasis {
        let members = open.members();
        let col_dims: Vec<usize> = members.iter().map(|&p| self.stalk_dim(p)).collect();
        let row_dims: Vec<usize> = pairs.iter().map(|&(_, q)| self.stalk_dim(q)).collect();
        let mut layout = BlockLayout::new(self.field, row_dims, col_dims);
        for (row, &(p, q)) in pairs.iter().enumerate() {
            let ip = open.position(p).expect("pair inside the open");
            let iq = open.position(q).expect("pair inside the open");
            layout
                .set(row, ip, self.full_maps[&(p, q)].clone())
                .expect("restriction shape");
            layout
                .set(
                    row,
                    iq,
                    Matrix::identity(self.field, self.stalk_dim(q)).neg(),
                )
                .expect("identity shape");
        }
        layout.assemble().kernel()
    }

    fn space(&self, open: &OpenSet, basis: SubspaceBasis) -> SectionSpace {
        SectionSpace {
            open: open.clone(),
            offsets: self.offsets(open),
            basis,
        }
    }

    /// `F⁺(U)`, the sections over an open set.
    ///
    /// Constraints are imposed on Hasse edges inside `U` only; the others
    /// follow by composition.
    pub fn sections_over(&self, open: &OpenSet) -> Result<SectionSpace> {
        self.check_open(open)?;
        let pairs: Vec<(usize, usize)> = self
            .edge_maps
            .keys()
            .copied()
            .filter(|&(p, q)| open.contains(p) && open.contains(q))
            .collect();
        Ok(self.space(open, self.constraint_kernel(open, &pairs)))
    }

    /// [`CellularSheaf::sections_over`] with a constraint for every related
    /// pair, kept as a cross-check.
    pub fn sections_over_all_pairs(&self, open: &OpenSet) -> Result<SectionSpace> {
        self.check_open(open)?;
        let m = open.members();
        let pairs: Vec<(usize, usize)> = m
            .iter()
            .flat_map(|&p| m.iter().map(move |&q| (p, q)))
            .filter(|&(p, q)| p != q && self.base.leq(p, q))
            .collect();
        Ok(self.space(open, self.constraint_kernel(open, &pairs)))
    }

    /// `F⁺(U)` as the literal limit over `I(U)`: tuples indexed by the stars
    /// inside `U`, one constraint per star inclusion `U_w ⊆ U_v`.
    pub fn sections_over_as_limit(&self, open: &OpenSet) -> Result<SectionSpace> {
        self.check_open(open)?;
        let index = self.base.basis_index_by_scan(open);
        let stars: Vec<OpenSet> = index
            .stars
            .iter()
            .map(|&x| self.base.open_star(x))
            .collect();
        let mut pairs = Vec::new();
        for (i, &v) in index.stars.iter().enumerate() {
            for (j, &w) in index.stars.iter().enumerate() {
                if i != j && stars[j].is_subset(&stars[i]) {
                    pairs.push((v, w));
                }
            }
        }
        let star_set = self.base.open_set(index.stars.iter().copied())?;
        Ok(self.space(open, self.constraint_kernel(&star_set, &pairs)))
    }

    fn check_open(&self, open: &OpenSet) -> Result<()> {
        match self.base.up_closure_violation(open.members()) {
            Some((x, y)) => Err(Error::NotOpen {
                member: self.base.name(x).to_string(),
                missing: self.base.name(y).to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Basis sections of `F⁺(U)`.
    pub fn basis_sections(&self, space: &SectionSpace) -> Vec<Section> {
        space
            .basis
            .vectors()
            .iter()
            .map(|v| Section {
                open: space.open.clone(),
                components: self.split(&space.open, v),
            })
            .collect()
    }

    /// Restricts a section to a smaller open set.
    pub fn restrict(&self, section: &Section, smaller: &OpenSet) -> Result<Section> {
        self.check_open(smaller)?;
        if let Some(&x) = smaller
            .members()
            .iter()
            .find(|&&x| !section.open.contains(x))
        {
            return Err(Error::NotContained(self.base.name(x).to_string()));
        }
        Ok(Section {
            open: smaller.clone(),
            components: smaller
                .members()
                .iter()
                .map(|&p| section.at(p).expect("member of the larger open").to_vec())
                .collect(),
        })
    }

    /// The restriction `ρ⁺_{UV} : F⁺(U) → F⁺(V)` in the two canonical bases.
    pub fn restriction_matrix(&self, from: &SectionSpace, to: &SectionSpace) -> Result<Matrix> {
        if !to.open.is_subset(&from.open) {
            let x = to
                .open
                .members()
                .iter()
                .find(|&&x| !from.open.contains(x))
                .expect("not a subset");
            return Err(Error::NotContained(self.base.name(*x).to_string()));
        }
        let columns: Vec<Vec<Scalar>> = from
            .basis
            .vectors()
            .iter()
            .map(|v| {
                let restricted: Vec<Scalar> = to
                    .open
                    .members()
                    .iter()
                    .flat_map(|&p| {
                        let i = from.open.position(p).expect("subset");
                        from.block(v, i, self.stalk_dim(p)).to_vec()
                    })
                    .collect();
                to.coordinates(&restricted)
                    .expect("restriction of a section is a section")
            })
            .collect();
        Ok(Matrix::from_columns(self.field, to.dim(), &columns))
    }

    /// The unique section over `⋃ cover` restricting to each local section.
    pub fn glue(&self, cover: &[OpenSet], locals: &[Section]) -> Result<Section> {
        if cover.len() != locals.len() {
            return Err(Error::BadCover(format!(
                "{} opens but {} sections",
                cover.len(),
                locals.len()
            )));
        }
        for (i, (u, s)) in cover.iter().zip(locals).enumerate() {
            if &s.open != u {
                return Err(Error::BadCover(format!(
                    "section {i} lives on {} instead of {}",
                    s.open.describe(&self.base),
                    u.describe(&self.base)
                )));
            }
        }
        for (i, a) in locals.iter().enumerate() {
            for b in &locals[i + 1..] {
                for &x in a.open.members() {
                    if let (Some(va), Some(vb)) = (a.at(x), b.at(x)) {
                        if va != vb {
                            return Err(Error::GlueConflict {
                                element: self.base.name(x).to_string(),
                                left: format_vector(va),
                                right: format_vector(vb),
                            });
                        }
                    }
                }
            }
        }
        let union = OpenSet::union_all(cover);
        let components = union
            .members()
            .iter()
            .map(|&x| {
                locals
                    .iter()
                    .find_map(|s| s.at(x))
                    .expect("union member lies in some cover set")
                    .to_vec()
            })
            .collect();
        self.section(&union, components)
    }
}
