//! Seeded random posets, preorders, sheaves and morphisms.
//!
//! Sheaves are drawn so that they are functorial by construction: the maps
//! into each element are a random point of the solution space of the
//! commutativity constraints. Morphisms are drawn the same way from the space
//! of natural families.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::linalg::{Field, Matrix, Scalar};
use crate::morphism::SheafMorphism;
use crate::order::{MonotoneMap, Poset, PreOrder};
use crate::sheaf::CellularSheaf;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// A poset on `n` elements: a random DAG over a shuffled order, closed.
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> Poset {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(edge_prob) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    Poset::try_from(PreOrder::from_indices(names(n), &pairs).expect("indices in range"))
        .expect("acyclic")
}

/// A preorder on `n` elements from random pairs; cycles are allowed.
pub fn random_preorder<R: Rng>(rng: &mut R, n: usize, pair_prob: f64) -> PreOrder {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(pair_prob) {
                pairs.push((i, j));
            }
        }
    }
    PreOrder::from_indices(names(n), &pairs).expect("indices in range")
}

/// A small nonzero-biased scalar: `a/b` with `|a| <= 3`, `1 <= b <= 3`.
pub fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    let num = BigInt::from(rng.random_range(-3i64..=3));
    let den = BigInt::from(rng.random_range(1i64..=3));
    field
        .from_ratio(&num, &den)
        .unwrap_or_else(|_| field.from_i64(rng.random_range(-3i64..=3)))
}

pub fn random_matrix<R: Rng>(rng: &mut R, field: Field, rows: usize, cols: usize) -> Matrix {
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| random_scalar(rng, field)).collect())
        .collect();
    Matrix::from_rows(field, rows, cols, entries).expect("consistent shape")
}

/// A random vector of the solution space with the given basis; sometimes a
/// single basis vector, so that degenerate maps show up.
fn random_point<R: Rng>(
    rng: &mut R,
    field: Field,
    len: usize,
    basis: &[Vec<Scalar>],
) -> Vec<Scalar> {
    let mut out = vec![field.zero(); len];
    if basis.is_empty() {
        return out;
    }
    let sparse = rng.random_bool(0.2);
    let pick = rng.random_range(0..basis.len());
    for (i, b) in basis.iter().enumerate() {
        let c = if sparse {
            if i == pick {
                field.one()
            } else {
                continue;
            }
        } else if rng.random_bool(0.25) {
            continue;
        } else {
            random_scalar(rng, field)
        };
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o + &(&c * x);
        }
    }
    out
}

fn block(field: Field, flat: &[Scalar], offset: usize, rows: usize, cols: usize) -> Matrix {
    let entries = (0..rows)
        .map(|i| flat[offset + i * cols..offset + (i + 1) * cols].to_vec())
        .collect();
    Matrix::from_rows(field, rows, cols, entries).expect("block shape")
}

/// A functorial sheaf on `base` with stalk dimensions in `0..=max_dim`.
pub fn random_sheaf<R: Rng>(
    rng: &mut R,
    base: &Poset,
    field: Field,
    max_dim: usize,
) -> CellularSheaf {
    let n = base.len();
    let dims: Vec<usize> = (0..n).map(|_| rng.random_range(0..=max_dim)).collect();
    let mut edge_maps = BTreeMap::new();
    let mut full: HashMap<(usize, usize), Matrix> = HashMap::new();
    for q in base.linear_extension() {
        full.insert((q, q), Matrix::identity(field, dims[q]));
        let covers = base.lower_covers(q);
        if covers.is_empty() {
            continue;
        }
        let dq = dims[q];
        let mut offsets = Vec::with_capacity(covers.len());
        let mut unknowns = 0;
        for &c in &covers {
            offsets.push(unknowns);
            unknowns += dq * dims[c];
        }
        // E_a · ρ_{p a} = E_b · ρ_{p b} for every p below two covers a, b
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for p in 0..n {
            for (ia, &a) in covers.iter().enumerate() {
                for (ib, &b) in covers.iter().enumerate().skip(ia + 1) {
                    if !(base.leq(p, a) && base.leq(p, b)) {
                        continue;
                    }
                    let (fa, fb) = (&full[&(p, a)], &full[&(p, b)]);
                    for i in 0..dq {
                        for j in 0..dims[p] {
                            let mut row = vec![field.zero(); unknowns];
                            for k in 0..dims[a] {
                                row[offsets[ia] + i * dims[a] + k] = fa.get(k, j).clone();
                            }
                            for k in 0..dims[b] {
                                let idx = offsets[ib] + i * dims[b] + k;
                                row[idx] = &row[idx] - fb.get(k, j);
                            }
                            rows.push(row);
                        }
                    }
                }
            }
        }
        let constraints = Matrix::from_rows(field, rows.len(), unknowns, rows).expect("row length");
        let solutions = constraints.kernel();
        let point = random_point(rng, field, unknowns, solutions.vectors());
        for (ic, &c) in covers.iter().enumerate() {
            edge_maps.insert((c, q), block(field, &point, offsets[ic], dq, dims[c]));
        }
        for p in 0..n {
            if base.lt(p, q) {
                let c = *covers
                    .iter()
                    .find(|&&c| base.leq(p, c))
                    .expect("some cover above p");
                let m = edge_maps[&(c, q)].mul(&full[&(p, c)]).expect("shapes");
                full.insert((p, q), m);
            }
        }
    }
    CellularSheaf::new(base.clone(), field, dims, edge_maps).expect("constructed to commute")
}

/// A random natural morphism between two sheaves on the same base.
pub fn random_morphism<R: Rng>(
    rng: &mut R,
    source: &CellularSheaf,
    target: &CellularSheaf,
) -> SheafMorphism {
    let field = source.field();
    let n = source.base().len();
    let mut offsets = Vec::with_capacity(n);
    let mut unknowns = 0;
    for p in 0..n {
        offsets.push(unknowns);
        unknowns += target.stalk_dim(p) * source.stalk_dim(p);
    }
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for &(p, q) in source.edge_maps().keys() {
        let rho = source.restriction(p, q).expect("edge");
        let sigma = target.restriction(p, q).expect("edge");
        let (sp, sq, tp, tq) = (
            source.stalk_dim(p),
            source.stalk_dim(q),
            target.stalk_dim(p),
            target.stalk_dim(q),
        );
        // (σ φ_p − φ_q ρ)[i][j] = 0
        for i in 0..tq {
            for j in 0..sp {
                let mut row = vec![field.zero(); unknowns];
                for k in 0..tp {
                    row[offsets[p] + k * sp + j] = sigma.get(i, k).clone();
                }
                for k in 0..sq {
                    let idx = offsets[q] + i * sq + k;
                    row[idx] = &row[idx] - rho.get(k, j);
                }
                rows.push(row);
            }
        }
    }
    let constraints = Matrix::from_rows(field, rows.len(), unknowns, rows).expect("row length");
    let point = random_point(rng, field, unknowns, constraints.kernel().vectors());
    let components = (0..n)
        .map(|p| {
            block(
                field,
                &point,
                offsets[p],
                target.stalk_dim(p),
                source.stalk_dim(p),
            )
        })
        .collect();
    SheafMorphism::new(source.clone(), target.clone(), components)
        .expect("constructed to be natural")
}

/// A random order-preserving map; falls back to a constant map when the
/// greedy choice gets stuck.
pub fn random_monotone_map<R: Rng>(
    rng: &mut R,
    source: &PreOrder,
    target: &PreOrder,
) -> MonotoneMap {
    assert!(
        !target.is_empty() || source.is_empty(),
        "no maps into an empty target"
    );
    let q = source.quotient();
    'attempt: for _ in 0..16 {
        let mut class_image: Vec<Option<usize>> = vec![None; q.classes.len()];
        for c in q.quotient.linear_extension() {
            let candidates: Vec<usize> = (0..target.len())
                .filter(|&t| {
                    (0..q.classes.len()).all(|d| match class_image[d] {
                        Some(fd) if q.quotient.leq(d, c) => target.leq(fd, t),
                        _ => true,
                    })
                })
                .collect();
            if candidates.is_empty() {
                continue 'attempt;
            }
            class_image[c] = Some(candidates[rng.random_range(0..candidates.len())]);
        }
        let assignment = (0..source.len())
            .map(|x| class_image[q.projection.apply(x)].expect("assigned"))
            .collect();
        if let Ok(m) = MonotoneMap::new(source.clone(), target.clone(), assignment) {
            return m;
        }
    }
    let t = rng.random_range(0..target.len());
    MonotoneMap::new(source.clone(), target.clone(), vec![t; source.len()])
        .expect("constant maps are monotone")
}
