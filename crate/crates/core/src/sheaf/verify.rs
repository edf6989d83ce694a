//! Sheaf-axiom verification by exactness of the gluing sequences.
//!
//! For a cover `{U_i}` of `U` the sequence
//! `0 → F(U) → ∏ F(U_i) → ∏_{(i,j)} F(U_i ∩ U_j)` must be exact, with
//! `φ(s) = (s|U_i)` and `ψ(s_i) = (s_j|U_ij − s_i|U_ij)`. On basic opens the
//! last term is `∏_{(i,j)} ∏_{U_v ⊆ U_i ∩ U_j} G(v)`.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{BlockLayout, Matrix};
use crate::topology::{OpenSet, DEFAULT_MAX_ELEMENTS};

use super::{CellularSheaf, SectionSpace};

/// Budgets and seed for the verification suites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Enumeration bound on the number of base elements.
    pub max_elements: usize,
    pub seed: u64,
    /// Random covers drawn per open, besides the canonical one.
    pub random_covers: usize,
    /// Above this many opens, a seeded sample of opens is checked.
    pub max_opens: usize,
    /// Above this many candidate subsets of a star, basic covers are sampled
    /// instead of enumerated.
    pub max_basic_covers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_elements: DEFAULT_MAX_ELEMENTS,
            seed: 0,
            random_covers: 50,
            max_opens: 256,
            max_basic_covers: 1 << 12,
        }
    }
}

/// Which sequence a check assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// Basic open covered by basic opens.
    Basic,
    /// Arbitrary open covered by opens.
    Extended,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub kind: AxiomKind,
    pub open: OpenSet,
    pub cover: Vec<OpenSet>,
    /// `φ` is injective (locality).
    pub injective: bool,
    /// `image φ = kernel ψ` (gluing).
    pub exact: bool,
}

impl AxiomCheck {
    pub fn passed(&self) -> bool {
        self.injective && self.exact
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// `A → B → C` exact at `B` with `A → B` injective.
fn check_sequence(phi: &Matrix, psi: &Matrix) -> Result<(bool, bool)> {
    let rank_phi = phi.rank();
    let composite_zero = psi.mul(phi)?.is_zero();
    let exact = composite_zero && rank_phi + psi.rank() == phi.rows();
    Ok((rank_phi == phi.cols(), exact))
}

impl CellularSheaf {
    /// `φ` and `ψ` for a cover of the star `U_p` by stars `U_x`, `x ∈ cover`,
    /// with the last term a product over basic opens inside each overlap.
    pub fn basic_cover_sequence(&self, p: usize, cover: &[usize]) -> Result<(Matrix, Matrix)> {
        let f = self.field;
        let col_dims: Vec<usize> = cover.iter().map(|&x| self.stalk_dim(x)).collect();
        let mut phi = BlockLayout::new(f, col_dims.clone(), vec![self.stalk_dim(p)]);
        for (i, &x) in cover.iter().enumerate() {
            phi.set(i, 0, self.full_maps[&(p, x)].clone())?;
        }
        let mut rows = Vec::new();
        for (i, &a) in cover.iter().enumerate() {
            for (j, &b) in cover.iter().enumerate() {
                for v in 0..self.base.len() {
                    if self.base.leq(a, v) && self.base.leq(b, v) {
                        rows.push((i, j, v));
                    }
                }
            }
        }
        let mut psi = BlockLayout::new(
            f,
            rows.iter().map(|&(_, _, v)| self.stalk_dim(v)).collect(),
            col_dims,
        );
        for (r, &(i, j, v)) in rows.iter().enumerate() {
            if i == j {
                continue;
            }
            psi.set(r, j, self.full_maps[&(cover[j], v)].clone())?;
            psi.set(r, i, self.full_maps[&(cover[i], v)].neg())?;
        }
        Ok((phi.assemble(), psi.assemble()))
    }

    /// `ψ` for the same cover, landing in `∏_{(i,j)} F⁺(U_i ∩ U_j)` instead.
    pub fn basic_cover_psi_via_intersections(&self, cover: &[usize]) -> Result<Matrix> {
        let f = self.field;
        let stars: Vec<OpenSet> = cover.iter().map(|&x| self.base.open_star(x)).collect();
        let star_spaces: Vec<SectionSpace> = stars
            .iter()
            .map(|u| self.sections_over(u))
            .collect::<Result<_>>()?;
        // G(x) ≅ F⁺(U_x): coordinates of the section generated by each basis vector
        let to_star: Vec<Matrix> = cover
            .iter()
            .map(|&x| {
                self.star_identification(x)
                    .map(|m| m.inverse().expect("star identification is invertible"))
            })
            .collect::<Result<_>>()?;
        let mut row_dims = Vec::new();
        let mut blocks = Vec::new();
        for i in 0..cover.len() {
            for j in 0..cover.len() {
                let overlap = self.sections_over(&stars[i].intersection(&stars[j]))?;
                let ri = self
                    .restriction_matrix(&star_spaces[i], &overlap)?
                    .mul(&to_star[i])?;
                let rj = self
                    .restriction_matrix(&star_spaces[j], &overlap)?
                    .mul(&to_star[j])?;
                row_dims.push(overlap.dim());
                blocks.push((i, j, ri, rj));
            }
        }
        let col_dims = cover.iter().map(|&x| self.stalk_dim(x)).collect();
        let mut psi = BlockLayout::new(f, row_dims, col_dims);
        for (r, (i, j, ri, rj)) in blocks.into_iter().enumerate() {
            if i != j {
                psi.set(r, j, rj)?;
                psi.set(r, i, ri.neg())?;
            }
        }
        Ok(psi.assemble())
    }

    /// Subsets of `U_p` whose stars cover `U_p`: all of them when there are
    /// few enough candidates, otherwise a seeded sample.
    pub fn basic_covers(
        &self,
        p: usize,
        opts: &VerifyOptions,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Vec<usize>> {
        let star = self.base.open_star(p);
        let members = star.members();
        let covers_star = |subset: &[usize]| {
            let stars: Vec<OpenSet> = subset.iter().map(|&x| self.base.open_star(x)).collect();
            OpenSet::union_all(&stars) == star
        };
        let k = members.len();
        if k < usize::BITS as usize && (1usize << k) <= opts.max_basic_covers {
            return (1usize..1 << k)
                .map(|mask| {
                    (0..k)
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| members[b])
                        .collect::<Vec<_>>()
                })
                .filter(|s| covers_star(s))
                .collect();
        }
        let mut covers = vec![members.to_vec()];
        for _ in 0..opts.max_basic_covers.min(opts.random_covers.max(1)) {
            let mut subset: Vec<usize> = members
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.3))
                .collect();
            for &x in members {
                let covered = subset.iter().any(|&y| self.base.leq(y, x));
                if !covered {
                    subset.push(x);
                }
            }
            subset.sort_unstable();
            if covers_star(&subset) {
                covers.push(subset);
            }
        }
        covers
    }

    /// Exactness of the basic gluing sequence for every star and every cover
    /// of it by stars.
    pub fn verify_base_sheaf_axioms(&self, opts: &VerifyOptions) -> Result<AxiomReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut report = AxiomReport::default();
        for p in 0..self.base.len() {
            for cover in self.basic_covers(p, opts, &mut rng) {
                let (phi, psi) = self.basic_cover_sequence(p, &cover)?;
                let (injective, exact) = check_sequence(&phi, &psi)?;
                report.checks.push(AxiomCheck {
                    kind: AxiomKind::Basic,
                    open: self.base.open_star(p),
                    cover: cover.iter().map(|&x| self.base.open_star(x)).collect(),
                    injective,
                    exact,
                });
            }
        }
        Ok(report)
    }

    /// Exactness of the gluing sequence on every open (or a seeded sample of
    /// them), for the canonical cover by stars and for seeded random covers.
    pub fn verify_sheaf_axioms_extended(&self, opts: &VerifyOptions) -> Result<AxiomReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let all_opens = self.base.enumerate_opens(opts.max_elements)?;
        let opens = if all_opens.len() > opts.max_opens {
            let whole = self.base.whole_space();
            let mut sample: Vec<OpenSet> = all_opens
                .choose_multiple(&mut rng, opts.max_opens.saturating_sub(1))
                .cloned()
                .collect();
            if !sample.contains(&whole) {
                sample.push(whole);
            }
            sample.sort();
            sample
        } else {
            all_opens.clone()
        };

        let mut cache = SequenceCache::new(self);
        let mut report = AxiomReport::default();
        for open in &opens {
            let inside: Vec<&OpenSet> = all_opens
                .iter()
                .filter(|u| !u.is_empty() && u.is_subset(open))
                .collect();
            let canonical: Vec<OpenSet> = open
                .members()
                .iter()
                .map(|&x| self.base.open_star(x))
                .collect();
            let mut covers = vec![canonical];
            for _ in 0..opts.random_covers {
                covers.push(random_cover(open, &inside, &mut rng));
            }
            for cover in covers {
                let (phi, psi) = cache.sequence(open, &cover)?;
                let (injective, exact) = check_sequence(&phi, &psi)?;
                report.checks.push(AxiomCheck {
                    kind: AxiomKind::Extended,
                    open: open.clone(),
                    cover,
                    injective,
                    exact,
                });
            }
        }
        Ok(report)
    }

    /// `φ` and `ψ` of the gluing sequence for an arbitrary open cover, in the
    /// canonical section bases.
    pub fn cover_sequence(&self, open: &OpenSet, cover: &[OpenSet]) -> Result<(Matrix, Matrix)> {
        SequenceCache::new(self).sequence(open, cover)
    }
}

fn random_cover(open: &OpenSet, inside: &[&OpenSet], rng: &mut ChaCha8Rng) -> Vec<OpenSet> {
    let mut cover: Vec<OpenSet> = inside
        .iter()
        .filter(|_| rng.random_bool(0.3))
        .map(|u| (*u).clone())
        .collect();
    for &x in open.members() {
        if cover.iter().any(|u| u.contains(x)) {
            continue;
        }
        let candidates: Vec<&&OpenSet> = inside.iter().filter(|u| u.contains(x)).collect();
        let pick = candidates[rng.random_range(0..candidates.len())];
        cover.push((*pick).clone());
    }
    cover
}

struct SequenceCache<'a> {
    sheaf: &'a CellularSheaf,
    spaces: HashMap<OpenSet, SectionSpace>,
    restrictions: HashMap<(OpenSet, OpenSet), Matrix>,
}

impl<'a> SequenceCache<'a> {
    fn new(sheaf: &'a CellularSheaf) -> Self {
        SequenceCache {
            sheaf,
            spaces: HashMap::new(),
            restrictions: HashMap::new(),
        }
    }

    fn space(&mut self, open: &OpenSet) -> Result<SectionSpace> {
        if let Some(s) = self.spaces.get(open) {
            return Ok(s.clone());
        }
        let s = self.sheaf.sections_over(open)?;
        self.spaces.insert(open.clone(), s.clone());
        Ok(s)
    }

    fn restriction(&mut self, from: &OpenSet, to: &OpenSet) -> Result<Matrix> {
        let key = (from.clone(), to.clone());
        if let Some(m) = self.restrictions.get(&key) {
            return Ok(m.clone());
        }
        let (a, b) = (self.space(from)?, self.space(to)?);
        let m = self.sheaf.restriction_matrix(&a, &b)?;
        self.restrictions.insert(key, m.clone());
        Ok(m)
    }

    fn sequence(&mut self, open: &OpenSet, cover: &[OpenSet]) -> Result<(Matrix, Matrix)> {
        let f = self.sheaf.field();
        let top = self.space(open)?.dim();
        let mut col_dims = Vec::with_capacity(cover.len());
        for u in cover {
            col_dims.push(self.space(u)?.dim());
        }
        let mut phi = BlockLayout::new(f, col_dims.clone(), vec![top]);
        for (i, u) in cover.iter().enumerate() {
            phi.set(i, 0, self.restriction(open, u)?)?;
        }
        let mut row_dims = Vec::new();
        let mut blocks = Vec::new();
        for (i, a) in cover.iter().enumerate() {
            for (j, b) in cover.iter().enumerate() {
                let overlap = a.intersection(b);
                row_dims.push(self.space(&overlap)?.dim());
                if i != j {
                    blocks.push((
                        row_dims.len() - 1,
                        i,
                        j,
                        self.restriction(a, &overlap)?,
                        self.restriction(b, &overlap)?,
                    ));
                }
            }
        }
        let mut psi = BlockLayout::new(f, row_dims, col_dims);
        for (r, i, j, ri, rj) in blocks {
            psi.set(r, j, rj)?;
            psi.set(r, i, ri.neg())?;
        }
        Ok((phi.assemble(), psi.assemble()))
    }
}
