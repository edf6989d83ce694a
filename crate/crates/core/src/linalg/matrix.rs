use std::fmt;

use super::scalar::{Field, Scalar};
use super::subspace::SubspaceBasis;
use crate::error::{Error, Result};

/// Dense matrix over a [`Field`]. Zero-row and zero-column shapes are legal and
/// stand for maps into or out of the zero space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a `rows × cols` matrix from row vectors.
    pub fn from_rows(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{cols} entries, got {} rows of lengths {:?}",
                entries.len(),
                entries.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        let data: Vec<Scalar> = entries.into_iter().flatten().collect();
        if let Some(s) = data.iter().find(|s| s.field() != field) {
            return Err(Error::DimensionMismatch(format!(
                "entry over {} in a matrix over {field}",
                s.field()
            )));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Matrix::from_rows(field, rows.len(), cols, entries).expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn scalar(field: Field, n: usize, c: &Scalar) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// `self · rhs`, i.e. the composite "first `rhs`, then `self`".
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect())
    }

    fn zip_with(&self, rhs: &Matrix, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| op(a, b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            // smallest nonzero entry keeps rational growth down
            let Some(pivot_row) = (next_row..m.rows)
                .filter(|&r| !m.get(r, col).is_zero())
                .min_by_key(|&r| m.get(r, col).size_hint())
            else {
                continue;
            };
            m.swap_rows(next_row, pivot_row);
            let inv = m.get(next_row, col).inverse().expect("nonzero pivot");
            m.scale_row(next_row, &inv, col);
            for r in 0..m.rows {
                if r != next_row && !m.get(r, col).is_zero() {
                    let factor = m.get(r, col).clone();
                    m.eliminate(r, next_row, &factor, col);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, c: &Scalar, from_col: usize) {
        for j in from_col..self.cols {
            let idx = r * self.cols + j;
            if !self.data[idx].is_zero() {
                self.data[idx] = &self.data[idx] * c;
            }
        }
    }

    /// row[target] -= factor * row[source], for columns from `from_col` on.
    fn eliminate(&mut self, target: usize, source: usize, factor: &Scalar, from_col: usize) {
        for j in from_col..self.cols {
            let s = &self.data[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            let idx = target * self.cols + j;
            self.data[idx] = &self.data[idx] - &delta;
        }
    }

    /// Basis of `{v : self · v = 0}`.
    pub fn kernel(&self) -> SubspaceBasis {
        let (r, pivots) = self.rref_with_pivots();
        let mut vectors = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(row, free);
            }
            vectors.push(v);
        }
        SubspaceBasis::span(self.field, self.cols, vectors)
    }

    /// Basis of the column space.
    pub fn image(&self) -> SubspaceBasis {
        SubspaceBasis::span(self.field, self.rows, self.transpose().row_vectors())
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.is_injective()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let augmented = self.hstack(&Matrix::identity(self.field, n)).ok()?;
        let (r, pivots) = augmented.rref_with_pivots();
        if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &p)| i != p) {
            return None;
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn hstack(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot place {} rows beside {} rows",
                self.rows, rhs.rows
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns over {} columns",
                self.cols, rhs.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Ok(Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        })
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn place(&mut self, row: usize, col: usize, block: &Matrix) {
        assert!(
            row + block.rows <= self.rows && col + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j).clone());
            }
        }
    }
}

/// `g ∘ f` as matrices: `g · f`.
pub fn compose(g: &Matrix, f: &Matrix) -> Result<Matrix> {
    g.mul(f)
}

/// Whether `A --f--> B --g--> C` is exact at `B`: `image(f) = kernel(g)`.
pub fn is_exact_at(f: &Matrix, g: &Matrix) -> Result<bool> {
    if g.cols != f.rows {
        return Err(Error::DimensionMismatch(format!(
            "f maps into dimension {} but g starts from dimension {}",
            f.rows, g.cols
        )));
    }
    Ok(f.image() == g.kernel())
}

/// A matrix assembled from labelled blocks on a grid of row and column bands.
#[derive(Clone, Debug)]
pub struct BlockLayout {
    field: Field,
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    blocks: Vec<(usize, usize, Matrix)>,
}

impl BlockLayout {
    pub fn new(field: Field, row_dims: Vec<usize>, col_dims: Vec<usize>) -> Self {
        BlockLayout {
            field,
            row_dims,
            col_dims,
            blocks: Vec::new(),
        }
    }

    /// Sets block `(band_row, band_col)`; later calls overwrite earlier ones.
    pub fn set(&mut self, band_row: usize, band_col: usize, block: Matrix) -> Result<()> {
        let (r, c) = (self.row_dims[band_row], self.col_dims[band_col]);
        if block.rows != r || block.cols != c {
            return Err(Error::DimensionMismatch(format!(
                "block ({band_row},{band_col}) must be {r}x{c}, got {}x{}",
                block.rows, block.cols
            )));
        }
        self.blocks.push((band_row, band_col, block));
        Ok(())
    }

    pub fn assemble(&self) -> Matrix {
        let offsets = |dims: &[usize]| {
            dims.iter()
                .scan(0, |acc, d| {
                    let start = *acc;
                    *acc += d;
                    Some(start)
                })
                .collect::<Vec<_>>()
        };
        let row_off = offsets(&self.row_dims);
        let col_off = offsets(&self.col_dims);
        let mut m = Matrix::zeros(
            self.field,
            self.row_dims.iter().sum(),
            self.col_dims.iter().sum(),
        );
        for (br, bc, block) in &self.blocks {
            m.place(row_off[*br], col_off[*bc], block);
        }
        m
    }
}

/// Formats a vector as `[a b c]`.
pub fn format_vector(v: &[Scalar]) -> String {
    let items: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(" "))
}

impl fmt::Display for Matrix {
    /// `[a b; c d]`, rows separated by semicolons.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let items: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", items.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rationals;

    #[test]
    fn rref_of_rank_one() {
        let m = Matrix::from_i64(Q, &[&[2, 4], &[1, 2]]);
        assert_eq!(m.rref(), Matrix::from_i64(Q, &[&[1, 2], &[0, 0]]));
        assert_eq!(Matrix::identity(Q, 3).rref(), Matrix::identity(Q, 3));
        assert_eq!(Matrix::zeros(Q, 2, 3).rref(), Matrix::zeros(Q, 2, 3));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(Q, 3).kernel().dim(), 0);
        assert_eq!(Matrix::zeros(Q, 2, 3).kernel(), SubspaceBasis::full(Q, 3));
        let k = Matrix::from_i64(Q, &[&[1, -1]]).kernel();
        assert_eq!(k, SubspaceBasis::span(Q, 2, vec![vec![Q.one(), Q.one()]]));
    }

    #[test]
    fn exactness_examples() {
        let inj = Matrix::identity(Q, 2);
        assert!(is_exact_at(&Matrix::zeros(Q, 2, 1), &inj).unwrap());
        assert!(is_exact_at(&inj, &Matrix::zeros(Q, 1, 2)).unwrap());
        let f = Matrix::from_i64(Q, &[&[1], &[0]]);
        let g = Matrix::from_i64(Q, &[&[0, 1]]);
        assert!(is_exact_at(&f, &g).unwrap());
        assert!(!is_exact_at(&g.transpose(), &g).unwrap());
        assert!(is_exact_at(&f, &Matrix::identity(Q, 3)).is_err());
    }

    #[test]
    fn compose_and_blocks() {
        let m = Matrix::from_i64(Q, &[&[1, 2], &[3, 4]]);
        assert_eq!(compose(&Matrix::identity(Q, 2), &m).unwrap(), m);
        let mut layout = BlockLayout::new(Q, vec![1, 1], vec![1, 1]);
        layout.set(0, 0, Matrix::identity(Q, 1)).unwrap();
        layout.set(1, 1, Matrix::identity(Q, 1)).unwrap();
        assert_eq!(layout.assemble(), Matrix::identity(Q, 2));
        assert!(layout.set(0, 1, Matrix::identity(Q, 2)).is_err());
    }

    #[test]
    fn empty_shapes() {
        let to_zero = Matrix::zeros(Q, 0, 3);
        assert_eq!(to_zero.kernel().dim(), 3);
        assert!(to_zero.is_surjective());
        let from_zero = Matrix::zeros(Q, 2, 0);
        assert!(from_zero.is_injective());
        assert_eq!(from_zero.image().dim(), 0);
        assert_eq!(
            Matrix::identity(Q, 0).inverse(),
            Some(Matrix::identity(Q, 0))
        );
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_i64(Q, &[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(Q, 2));
        assert!(Matrix::from_i64(Q, &[&[1, 2], &[2, 4]]).inverse().is_none());
        let f3 = Field::prime(3).unwrap();
        let m3 = Matrix::from_i64(f3, &[&[1, 1], &[1, 2]]);
        assert_eq!(
            m3.mul(&m3.inverse().unwrap()).unwrap(),
            Matrix::identity(f3, 2)
        );
    }

    #[test]
    fn display_format() {
        let m = Matrix::from_rows(Q, 1, 2, vec![vec![Q.parse("1/2").unwrap(), Q.from_i64(-3)]])
            .unwrap();
        assert_eq!(m.to_string(), "[1/2 -3]");
        assert_eq!(Matrix::zeros(Q, 0, 2).to_string(), "[]");
    }
}
