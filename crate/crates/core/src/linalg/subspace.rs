use super::matrix::Matrix;
use super::scalar::{Field, Scalar};

/// A subspace of `field^ambient_dim`, stored as the nonzero rows of a reduced
/// row echelon form. The representation is canonical, so `==` is subspace
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    field: Field,
    ambient_dim: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(field: Field, ambient_dim: usize, vectors: Vec<Vec<Scalar>>) -> Self {
        let n = vectors.len();
        let m = Matrix::from_rows(field, n, ambient_dim, vectors)
            .expect("vector length must equal ambient dimension");
        let (r, pivots) = m.rref_with_pivots();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        SubspaceBasis {
            field,
            ambient_dim,
            basis,
            pivots,
        }
    }

    pub fn zero(field: Field, ambient_dim: usize) -> Self {
        SubspaceBasis::span(field, ambient_dim, Vec::new())
    }

    pub fn full(field: Field, ambient_dim: usize) -> Self {
        Matrix::identity(field, ambient_dim).image()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn vectors(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the rows of a matrix.
    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_rows(self.field, self.dim(), self.ambient_dim, self.basis.clone())
            .expect("consistent basis")
    }

    /// Coordinates of `v` in this basis, or `None` when `v` lies outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(v.len(), self.ambient_dim, "vector length");
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(b) {
                if !x.is_zero() {
                    *r = &*r - &(c * x);
                }
            }
        }
        residual.iter().all(Scalar::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b))
    }

    /// The vector with the given coordinates.
    pub fn combine(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.dim(), "coordinate count");
        let mut out = vec![self.field.zero(); self.ambient_dim];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if !x.is_zero() {
                    *o = &*o + &(c * x);
                }
            }
        }
        out
    }

    /// Reduces `v` modulo this subspace and returns the entries at the
    /// non-pivot positions: coordinates in the quotient `ambient / self`.
    pub fn quotient_coordinates(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut r = v.to_vec();
        for (&p, b) in self.pivots.iter().zip(&self.basis) {
            let c = r[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in r.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = &*x - &(&c * y);
                }
            }
        }
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        r.into_iter()
            .zip(is_pivot)
            .filter_map(|(x, piv)| (!piv).then_some(x))
            .collect()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.dim()
    }
}
