#![allow(clippy::needless_range_loop)]

use alexsheaf::linalg::{is_exact_at, Field, Matrix, Scalar, SubspaceBasis};
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![
        Just(Field::Rationals),
        Just(Field::prime(5).unwrap()),
        Just(Field::prime(7).unwrap())
    ]
}

fn matrix_strategy(max: usize) -> impl Strategy<Value = Matrix> {
    (field_strategy(), 0..=max, 0..=max).prop_flat_map(|(field, r, c)| shaped(field, r, c))
}

/// Two matrices over one field with the same number of rows.
fn column_space_pair(max: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (field_strategy(), 0..=max, 0..=max, 0..=max)
        .prop_flat_map(|(field, r, c1, c2)| (shaped(field, r, c1), shaped(field, r, c2)))
}

fn shaped(field: Field, r: usize, c: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |entries| {
        let rows = (0..r)
            .map(|i| {
                (0..c)
                    .map(|j| {
                        let (a, b) = entries[i * c + j];
                        field
                            .parse(&format!("{a}/{b}"))
                            .unwrap_or_else(|_| field.from_i64(a))
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(field, r, c, rows).unwrap()
    })
}

/// Rank by counting nonzero rows after plain forward elimination, written
/// independently of the library's reduction.
fn oracle_rank(m: &Matrix) -> usize {
    let mut rows = m.row_vectors();
    let mut rank = 0;
    for col in 0..m.cols() {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inverse().unwrap();
        for i in rank + 1..rows.len() {
            let factor = &rows[i][col] * &inv;
            for j in 0..m.cols() {
                let sub = &factor * &rows[rank][j];
                rows[i][j] = &rows[i][j] - &sub;
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn rank_nullity(m in matrix_strategy(5)) {
        let k = m.kernel();
        prop_assert_eq!(m.rank(), oracle_rank(&m));
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for v in k.vectors() {
            prop_assert!(m.apply(v).unwrap().iter().all(Scalar::is_zero));
        }
        prop_assert_eq!(m.image().dim(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn rref_is_idempotent_and_row_equivalent(m in matrix_strategy(5)) {
        let r = m.rref();
        prop_assert_eq!(r.rref(), r.clone());
        prop_assert_eq!(m.transpose().image(), r.transpose().image());
    }

    #[test]
    fn subspace_equality_is_double_inclusion((a, b) in column_space_pair(4)) {
        let (u, v) = (a.image(), b.image());
        prop_assert_eq!(u == v, u.is_subspace_of(&v) && v.is_subspace_of(&u));
        let sum = a.hstack(&b).unwrap().image();
        prop_assert!(u.is_subspace_of(&sum) && v.is_subspace_of(&sum));
        // respanning with a scaled, duplicated generating set changes nothing
        let mut gens: Vec<Vec<Scalar>> = u.vectors().to_vec();
        gens.extend(u.vectors().iter().map(|x| x.iter().map(|c| c + c).collect::<Vec<_>>()));
        prop_assert_eq!(SubspaceBasis::span(u.field(), u.ambient_dim(), gens), u);
    }

    #[test]
    fn coordinates_reconstruct_members(m in matrix_strategy(5)) {
        let image = m.image();
        for j in 0..m.cols() {
            let col = m.column(j);
            let coords = image.coordinates(&col).unwrap();
            prop_assert_eq!(image.combine(&coords), col);
            prop_assert!(image.quotient_coordinates(&m.column(j)).iter().all(Scalar::is_zero));
        }
        prop_assert_eq!(image.quotient_coordinates(&vec![image.field().zero(); m.rows()]).len(), image.codim());
    }

    #[test]
    fn inverse_round_trip(m in matrix_strategy(4)) {
        prop_assume!(m.rows() == m.cols());
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(m.field(), m.rows()));
                prop_assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(m.field(), m.rows()));
            }
            None => prop_assert!(m.rank() < m.rows()),
        }
    }

    #[test]
    fn kernel_inclusion_is_exact(m in matrix_strategy(5)) {
        let k = m.kernel().as_matrix().transpose();
        prop_assert!(is_exact_at(&k, &m).unwrap());
    }
}

#[test]
fn prime_field_wraps() {
    let f = Field::prime(5).unwrap();
    let m = Matrix::from_i64(f, &[&[2, 3], &[1, 4]]);
    // det = 8 - 3 = 5 = 0 mod 5
    assert_eq!(m.rank(), 1);
    assert_eq!(
        Matrix::from_i64(Field::Rationals, &[&[2, 3], &[1, 4]]).rank(),
        2
    );
}
