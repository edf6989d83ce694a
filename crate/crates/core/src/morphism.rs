//! Morphisms of cellular sheaves over a common base poset.
//!
//! A morphism is stored by its components `φ(p) : F(p) → G(p)` on the stars;
//! its values on every other open are derived through the limit description
//! of sections.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};
use crate::sheaf::{CellularSheaf, DirectLimit};
use crate::topology::OpenSet;

/// A natural family of linear maps between two sheaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafMorphism {
    source: CellularSheaf,
    target: CellularSheaf,
    components: Vec<Matrix>,
}

/// Stalkwise properties of a morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Classification {
    pub injective: bool,
    pub surjective: bool,
    pub isomorphism: bool,
}

/// Properties of the induced maps on sections over every enumerated open.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectionLevel {
    pub all_injective: bool,
    pub all_surjective: bool,
    pub all_invertible: bool,
    pub opens_checked: usize,
}

impl SheafMorphism {
    /// Validates shapes and naturality on Hasse edges (which implies it on
    /// every relation by composition).
    pub fn new(
        source: CellularSheaf,
        target: CellularSheaf,
        components: Vec<Matrix>,
    ) -> Result<Self> {
        let m = Self::unchecked(source, target, components)?;
        let edges: Vec<(usize, usize)> = m.source.edge_maps().keys().copied().collect();
        m.check_naturality(&edges)?;
        Ok(m)
    }

    /// Builds the morphism from components given on the stars, checking
    /// compatibility with every basic inclusion `U_q ⊆ U_p`.
    pub fn extend_from_basis(
        source: CellularSheaf,
        target: CellularSheaf,
        components: Vec<Matrix>,
    ) -> Result<Self> {
        let m = Self::unchecked(source, target, components)?;
        let pairs: Vec<(usize, usize)> = m
            .source
            .base()
            .relation_pairs()
            .into_iter()
            .filter(|(p, q)| p != q)
            .collect();
        m.check_naturality(&pairs)?;
        Ok(m)
    }

    /// Same as [`SheafMorphism::new`] with components keyed by element name.
    pub fn from_named(
        source: CellularSheaf,
        target: CellularSheaf,
        components: Vec<(&str, Matrix)>,
    ) -> Result<Self> {
        let base = source.base().clone();
        let mut slots: Vec<Option<Matrix>> = vec![None; base.len()];
        for (name, m) in components {
            slots[base.index_of(name)?] = Some(m);
        }
        let components = slots
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                m.ok_or_else(|| {
                    Error::DimensionMismatch(format!("no component at `{}`", base.name(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SheafMorphism::new(source, target, components)
    }

    fn unchecked(
        source: CellularSheaf,
        target: CellularSheaf,
        components: Vec<Matrix>,
    ) -> Result<Self> {
        if source.base() != target.base() {
            return Err(Error::BaseMismatch);
        }
        if source.field() != target.field() {
            return Err(Error::DimensionMismatch(format!(
                "source over {} but target over {}",
                source.field(),
                target.field()
            )));
        }
        if components.len() != source.base().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} elements",
                components.len(),
                source.base().len()
            )));
        }
        for (p, m) in components.iter().enumerate() {
            let (r, c) = (target.stalk_dim(p), source.stalk_dim(p));
            if m.rows() != r || m.cols() != c || m.field() != source.field() {
                return Err(Error::DimensionMismatch(format!(
                    "component at `{}` must be {r}x{c} over {}, got {}x{}",
                    source.base().name(p),
                    source.field(),
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(SheafMorphism {
            source,
            target,
            components,
        })
    }

    /// First pair `p <= q` where `σ_pq · φ(p) ≠ φ(q) · ρ_pq`.
    fn naturality_violation(
        &self,
        pairs: &[(usize, usize)],
    ) -> Result<Option<(usize, usize, Matrix, Matrix)>> {
        for &(p, q) in pairs {
            let rho = self.source.restriction(p, q).expect("related pair");
            let sigma = self.target.restriction(p, q).expect("related pair");
            let lhs = sigma.mul(&self.components[p])?;
            let rhs = self.components[q].mul(rho)?;
            if lhs != rhs {
                return Ok(Some((p, q, lhs, rhs)));
            }
        }
        Ok(None)
    }

    fn check_naturality(&self, pairs: &[(usize, usize)]) -> Result<()> {
        match self.naturality_violation(pairs)? {
            Some((p, q, lhs, rhs)) => Err(Error::NotNatural {
                from: self.source.base().name(p).to_string(),
                to: self.source.base().name(q).to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }),
            None => Ok(()),
        }
    }

    /// Naturality re-checked on every related pair, not just Hasse edges.
    pub fn is_natural_on_all_pairs(&self) -> bool {
        let pairs = self.source.base().relation_pairs();
        matches!(self.naturality_violation(&pairs), Ok(None))
    }

    pub fn identity(sheaf: &CellularSheaf) -> Self {
        let components = sheaf
            .dims()
            .iter()
            .map(|&d| Matrix::identity(sheaf.field(), d))
            .collect();
        SheafMorphism::new(sheaf.clone(), sheaf.clone(), components).expect("identity is natural")
    }

    pub fn zero(source: &CellularSheaf, target: &CellularSheaf) -> Result<Self> {
        if source.base() != target.base() {
            return Err(Error::BaseMismatch);
        }
        let components = (0..source.base().len())
            .map(|p| Matrix::zeros(source.field(), target.stalk_dim(p), source.stalk_dim(p)))
            .collect();
        SheafMorphism::new(source.clone(), target.clone(), components)
    }

    pub fn source(&self) -> &CellularSheaf {
        &self.source
    }

    pub fn target(&self) -> &CellularSheaf {
        &self.target
    }

    pub fn component(&self, p: usize) -> &Matrix {
        &self.components[p]
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    /// The induced map `F⁺(U) → G⁺(U)` in the canonical section bases.
    pub fn section_map(&self, open: &OpenSet) -> Result<Matrix> {
        let src = self.source.sections_over(open)?;
        let tgt = self.target.sections_over(open)?;
        let columns: Vec<Vec<Scalar>> = self
            .source
            .basis_sections(&src)
            .iter()
            .map(|s| {
                let image: Vec<Scalar> = open
                    .members()
                    .iter()
                    .zip(s.components())
                    .map(|(&p, v)| self.components[p].apply(v))
                    .collect::<Result<Vec<_>>>()
                    .map(|blocks| blocks.into_iter().flatten().collect())?;
                Ok(tgt
                    .coordinates(&image)
                    .expect("natural maps send sections to sections"))
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(
            self.source.field(),
            tgt.dim(),
            &columns,
        ))
    }

    /// The map on sections over `U` obtained from the universal property of
    /// the limit: the unique `X` with `π_x · X = φ(x) · π_x` for every star
    /// `U_x ⊆ U`, where `π_x` reads off the value at `x`. Returns `None` if the
    /// system has no solution or more than one.
    pub fn extension_by_universal_property(&self, open: &OpenSet) -> Result<Option<Matrix>> {
        let f = self.source.field();
        let src = self.source.sections_over(open)?;
        let tgt = self.target.sections_over(open)?;
        let (rows, cols) = (tgt.dim(), src.dim());
        let src_sections = self.source.basis_sections(&src);
        let tgt_sections = self.target.basis_sections(&tgt);
        // unknown X[a][b] sits at index a * cols + b
        let mut equations: Vec<Vec<Scalar>> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        for (i, &x) in open.members().iter().enumerate() {
            for b in 0..cols {
                let wanted = self.components[x].apply(&src_sections[b].components()[i])?;
                for (k, w) in wanted.into_iter().enumerate() {
                    let mut eq = vec![f.zero(); rows * cols];
                    for (a, t) in tgt_sections.iter().enumerate() {
                        eq[a * cols + b] = t.components()[i][k].clone();
                    }
                    equations.push(eq);
                    rhs.push(w);
                }
            }
        }
        let unknowns = rows * cols;
        let system = Matrix::from_rows(f, equations.len(), unknowns, equations)?;
        if system.rank() != unknowns {
            return Ok(None);
        }
        let augmented = system.hstack(&Matrix::from_columns(f, rhs.len(), &[rhs]))?;
        let (reduced, pivots) = augmented.rref_with_pivots();
        if pivots.contains(&unknowns) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(f, rows, cols);
        for (r, &p) in pivots.iter().enumerate() {
            x.set(
                p / cols.max(1),
                p % cols.max(1),
                reduced.get(r, unknowns).clone(),
            );
        }
        Ok(Some(x))
    }

    /// The stalk map at `p`, which under `F_p ≅ F(p)` is the component `φ(p)`.
    pub fn stalk_map(&self, p: usize) -> &Matrix {
        &self.components[p]
    }

    /// The map induced on direct-limit stalks, transported to the coordinates
    /// of `F(p)` and `G(p)` through the germ maps of the stars.
    pub fn stalk_map_oracle(&self, p: usize, bound: usize) -> Result<Matrix> {
        let f = self.source.field();
        let src = DirectLimit::new(&self.source, p, bound)?;
        let tgt = DirectLimit::new(&self.target, p, bound)?;
        let columns: Vec<Vec<Scalar>> = (0..src.dim())
            .map(|k| {
                let mut e = vec![f.zero(); src.dim()];
                e[k] = f.one();
                let mut image = vec![f.zero(); tgt.dim()];
                for (idx, coords) in src.representatives(&e) {
                    let open = &src.opens()[idx];
                    let mapped = self.section_map(open)?.apply(&coords)?;
                    let t_idx = tgt.position(open).expect("same base, same opens");
                    for (acc, g) in image.iter_mut().zip(tgt.germ(t_idx, &mapped)) {
                        *acc = &*acc + &g;
                    }
                }
                Ok(image)
            })
            .collect::<Result<_>>()?;
        let on_limits = Matrix::from_columns(f, tgt.dim(), &columns);

        let star = self.source.base().open_star(p);
        let src_germ = src.germ_map(src.position(&star).expect("star contains p"));
        let tgt_germ = tgt.germ_map(tgt.position(&star).expect("star contains p"));
        let src_value = self.source.star_identification(p)?;
        let tgt_value = self.target.star_identification(p)?;
        let not_invertible = |what: &str| {
            Error::DimensionMismatch(format!(
                "{what} at `{}` is not invertible",
                self.source.base().name(p)
            ))
        };
        let from_src_value = src_value
            .inverse()
            .ok_or_else(|| not_invertible("source star identification"))?;
        let to_tgt_star = tgt_germ
            .inverse()
            .ok_or_else(|| not_invertible("target germ map"))?;
        // F(p) → F⁺(U_p) → F_p → G_p → G⁺(U_p) → G(p)
        tgt_value
            .mul(&to_tgt_star)?
            .mul(&on_limits)?
            .mul(&src_germ)?
            .mul(&from_src_value)
    }

    /// Stalkwise injectivity and surjectivity.
    pub fn classify(&self) -> Classification {
        let injective = self.components.iter().all(Matrix::is_injective);
        let surjective = self.components.iter().all(Matrix::is_surjective);
        Classification {
            injective,
            surjective,
            isomorphism: injective && surjective,
        }
    }

    /// Injectivity, surjectivity and invertibility of `section_map(U)` over
    /// every open.
    pub fn section_level(&self, bound: usize) -> Result<SectionLevel> {
        let opens = self.source.base().enumerate_opens(bound)?;
        let mut level = SectionLevel {
            all_injective: true,
            all_surjective: true,
            all_invertible: true,
            opens_checked: opens.len(),
        };
        for u in &opens {
            let m = self.section_map(u)?;
            level.all_injective &= m.is_injective();
            level.all_surjective &= m.is_surjective();
            level.all_invertible &= m.is_invertible();
        }
        Ok(level)
    }
}
