use alexsheaf::linalg::{Field, Matrix, Scalar};
use alexsheaf::random::{random_poset, random_sheaf};
use alexsheaf::sheaf::{dense_stalk_oracle, VerifyOptions};
use alexsheaf::topology::OpenSet;
use alexsheaf::CellularSheaf;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BOUND: usize = 20;

fn sheaf(seed: u64, n: usize, field: Field) -> CellularSheaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_poset(&mut rng, n, 0.45);
    random_sheaf(&mut rng, &base, field, 3)
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![3 => Just(Field::Rationals), 1 => Just(Field::prime(5).unwrap())]
}

/// Dimension of `{(s_p) : ρ_pq s_p = s_q for all p <= q in U}`, assembled
/// here from the composite maps independently of the library's section code.
fn compatible_tuple_dim(s: &CellularSheaf, u: &OpenSet) -> usize {
    let f = s.field();
    let members = u.members();
    let mut offsets = vec![0];
    for &p in members {
        offsets.push(offsets.last().unwrap() + s.stalk_dim(p));
    }
    let total = *offsets.last().unwrap();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (i, &p) in members.iter().enumerate() {
        for (j, &q) in members.iter().enumerate() {
            let Some(rho) = s.restriction(p, q) else {
                continue;
            };
            if p == q {
                continue;
            }
            for r in 0..s.stalk_dim(q) {
                let mut row = vec![f.zero(); total];
                for c in 0..s.stalk_dim(p) {
                    row[offsets[i] + c] = rho.get(r, c).clone();
                }
                row[offsets[j] + r] = &row[offsets[j] + r] - &f.one();
                rows.push(row);
            }
        }
    }
    let m = Matrix::from_rows(f, rows.len(), total, rows).unwrap();
    total - m.rank()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_descriptions_of_sections_agree(seed in any::<u64>(), n in 1usize..=6, field in field_strategy()) {
        let s = sheaf(seed, n, field);
        for u in s.base().enumerate_opens(BOUND).unwrap() {
            let hasse = s.sections_over(&u).unwrap();
            prop_assert_eq!(hasse.dim(), compatible_tuple_dim(&s, &u));
            prop_assert_eq!(hasse.basis().clone(), s.sections_over_all_pairs(&u).unwrap().basis().clone());
            prop_assert_eq!(hasse.basis().clone(), s.sections_over_as_limit(&u).unwrap().basis().clone());
        }
    }

    #[test]
    fn restriction_is_functorial(seed in any::<u64>(), n in 1usize..=5) {
        let s = sheaf(seed, n, Field::Rationals);
        let opens = s.base().enumerate_opens(BOUND).unwrap();
        for u in &opens {
            let su = s.sections_over(u).unwrap();
            prop_assert_eq!(s.restriction_matrix(&su, &su).unwrap(), Matrix::identity(s.field(), su.dim()));
            for v in opens.iter().filter(|v| v.is_subset(u)) {
                let sv = s.sections_over(v).unwrap();
                let uv = s.restriction_matrix(&su, &sv).unwrap();
                for w in opens.iter().filter(|w| w.is_subset(v)) {
                    let sw = s.sections_over(w).unwrap();
                    let direct = s.restriction_matrix(&su, &sw).unwrap();
                    let composed = s.restriction_matrix(&sv, &sw).unwrap().mul(&uv).unwrap();
                    prop_assert_eq!(direct, composed);
                }
            }
        }
    }

    #[test]
    fn restrict_then_glue_round_trips(seed in any::<u64>(), n in 1usize..=6) {
        let s = sheaf(seed, n, Field::Rationals);
        let p = s.base();
        for u in p.enumerate_opens(BOUND).unwrap().iter().filter(|u| !u.is_empty()) {
            let cover: Vec<OpenSet> = u.members().iter().map(|&x| p.open_star(x)).collect();
            for section in s.basis_sections(&s.sections_over(u).unwrap()) {
                let locals: Vec<_> = cover.iter().map(|c| s.restrict(&section, c).unwrap()).collect();
                prop_assert_eq!(s.glue(&cover, &locals).unwrap(), section);
            }
        }
    }

    #[test]
    fn stalk_is_the_value_at_the_point(seed in any::<u64>(), n in 1usize..=6) {
        let s = sheaf(seed, n, Field::Rationals);
        for x in 0..n {
            let report = s.stalk_at(x, BOUND).unwrap();
            prop_assert!(report.holds(), "{:?}", report);
            let (dense_dim, dense_witness) = dense_stalk_oracle(&s, x, BOUND).unwrap();
            prop_assert_eq!(dense_dim, s.stalk_dim(x));
            prop_assert!(dense_witness.is_invertible());
        }
    }

    #[test]
    fn germs_of_representatives_round_trip(seed in any::<u64>(), n in 1usize..=5) {
        let s = sheaf(seed, n, Field::Rationals);
        for x in 0..n {
            let limit = s.stalk_oracle(x, BOUND).unwrap();
            for j in 0..limit.dim() {
                let mut e = vec![s.field().zero(); limit.dim()];
                e[j] = s.field().one();
                for (idx, coords) in limit.representatives(&e) {
                    prop_assert_eq!(limit.germ(idx, &coords), e.clone());
                }
            }
        }
    }

    #[test]
    fn overlap_term_by_basic_opens_or_intersections(seed in any::<u64>(), n in 1usize..=5) {
        let s = sheaf(seed, n, Field::Rationals);
        let p = s.base();
        for x in 0..n {
            let star = p.open_star(x);
            let members = star.members().to_vec();
            // every subset of the star that contains x covers it; also try
            // the cover by the strict upper part plus x
            for mask in 1u32..(1 << members.len()) {
                let cover: Vec<usize> = members.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &m)| m).collect();
                if !cover.contains(&x) {
                    continue;
                }
                let (_, psi) = s.basic_cover_sequence(x, &cover).unwrap();
                let psi_int = s.basic_cover_psi_via_intersections(&cover).unwrap();
                prop_assert_eq!(psi.kernel(), psi_int.kernel());
            }
        }
    }

    #[test]
    fn axiom_suites_pass(seed in any::<u64>(), n in 1usize..=5, field in field_strategy()) {
        let s = sheaf(seed, n, field);
        let opts = VerifyOptions { seed, random_covers: 8, ..VerifyOptions::default() };
        let base = s.verify_base_sheaf_axioms(&opts).unwrap();
        prop_assert!(base.all_passed(), "{:?}", base.failures().next());
        let ext = s.verify_sheaf_axioms_extended(&opts).unwrap();
        prop_assert!(ext.all_passed(), "{:?}", ext.failures().next());
    }
}

#[test]
fn square_with_identities_has_equalizer_sections() {
    let base = alexsheaf::Poset::new(
        &["p", "q1", "q2", "r"],
        &[("p", "q1"), ("p", "q2"), ("q1", "r"), ("q2", "r")],
    )
    .unwrap();
    let s = CellularSheaf::constant(base.clone(), Field::Rationals, 1);
    let u = base.open_star(1).union(&base.open_star(2));
    assert_eq!(s.sections_over(&u).unwrap().dim(), 1);
    assert_eq!(s.sections_over(&base.open_star(0)).unwrap().dim(), 1);
}
