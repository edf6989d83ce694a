use alexsheaf::linalg::Field;
use alexsheaf::random::{random_morphism, random_poset, random_sheaf};
use alexsheaf::{CellularSheaf, SheafMorphism};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BOUND: usize = 20;

fn morphism(seed: u64, n: usize) -> SheafMorphism {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_poset(&mut rng, n, 0.45);
    let src = random_sheaf(&mut rng, &base, Field::Rationals, 3);
    // sometimes map a sheaf to itself so that isomorphisms actually occur
    let tgt = if seed % 3 == 0 {
        src.clone()
    } else {
        random_sheaf(&mut rng, &base, Field::Rationals, 3)
    };
    random_morphism(&mut rng, &src, &tgt)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn section_maps_commute_with_restriction(seed in any::<u64>(), n in 1usize..=5) {
        let m = morphism(seed, n);
        let (f, g) = (m.source(), m.target());
        let opens = f.base().enumerate_opens(BOUND).unwrap();
        for u in &opens {
            let mu = m.section_map(u).unwrap();
            let (fu, gu) = (f.sections_over(u).unwrap(), g.sections_over(u).unwrap());
            for v in opens.iter().filter(|v| v.is_subset(u)) {
                let mv = m.section_map(v).unwrap();
                let (fv, gv) = (f.sections_over(v).unwrap(), g.sections_over(v).unwrap());
                let lhs = g.restriction_matrix(&gu, &gv).unwrap().mul(&mu).unwrap();
                let rhs = mv.mul(&f.restriction_matrix(&fu, &fv).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn extension_is_the_unique_compatible_map(seed in any::<u64>(), n in 1usize..=5) {
        let m = morphism(seed, n);
        for u in m.source().base().enumerate_opens(BOUND).unwrap() {
            prop_assert_eq!(m.extension_by_universal_property(&u).unwrap(), Some(m.section_map(&u).unwrap()));
        }
    }

    #[test]
    fn stalk_maps_are_the_components(seed in any::<u64>(), n in 1usize..=5) {
        let m = morphism(seed, n);
        for p in 0..n {
            prop_assert_eq!(&m.stalk_map_oracle(p, BOUND).unwrap(), m.component(p));
            let star = m.source().base().open_star(p);
            // on a star, sections are determined by the value at the point
            prop_assert_eq!(m.section_map(&star).unwrap().rank(), m.component(p).rank());
        }
    }

    #[test]
    fn stalkwise_and_sectionwise_properties_agree(seed in any::<u64>(), n in 1usize..=5) {
        let m = morphism(seed, n);
        let c = m.classify();
        let level = m.section_level(BOUND).unwrap();
        prop_assert_eq!(c.isomorphism, level.all_invertible);
        prop_assert_eq!(c.injective, level.all_injective);
        prop_assert_eq!(c.isomorphism, c.injective && c.surjective);
    }

    #[test]
    fn extension_from_stars_matches_hasse_naturality(seed in any::<u64>(), n in 1usize..=5) {
        let m = morphism(seed, n);
        let rebuilt = SheafMorphism::extend_from_basis(m.source().clone(), m.target().clone(), m.components().to_vec()).unwrap();
        prop_assert_eq!(rebuilt, m);
    }
}

#[test]
fn identity_and_zero() {
    let base = alexsheaf::Poset::new(&["a", "b", "c"], &[("a", "b"), ("a", "c")]).unwrap();
    let s = CellularSheaf::constant(base, Field::Rationals, 2);
    assert!(SheafMorphism::identity(&s).classify().isomorphism);
    let z = SheafMorphism::zero(&s, &s).unwrap().classify();
    assert!(!z.injective && !z.surjective);
}
