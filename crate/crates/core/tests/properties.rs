use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sector_lab::complex::{build_cycle, build_grid_with_holes, build_presentation_complex};
use sector_lab::group::word::{parse_word, Letter};
use sector_lab::holonomy::{cocycle_from_rep, FlatConnection, GaugeField, UnitaryRep};
use sector_lab::pi1::{PathWord, Pi1Presentation};
use sector_lab::sectors::{spectrum, twisted_laplacian};

fn sorted_gap(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn loop_of(complex: &sector_lab::complex::ConfigComplex, pres: &Pi1Presentation, word: &[Letter]) -> PathWord {
    let mut walk = PathWord::empty(pres.base());
    for l in word {
        let g = pres.generator_loop(complex, l.generator).unwrap();
        let g = if l.inverse { g.reversed() } else { g };
        walk = walk.then(&g).unwrap();
    }
    walk
}

fn word_strategy(generators: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..generators, any::<bool>()), 0..12)
        .prop_map(|v| v.into_iter().map(|(g, inv)| if inv { Letter::inv(g) } else { Letter::gen(g) }).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cycle_spectra_follow_the_closed_form(n in 3usize..14, theta in 0.0f64..1.0) {
        let c = build_cycle(n).unwrap();
        let pres = Pi1Presentation::compute(&c, 0).unwrap();
        let rep = UnitaryRep::character(pres.generator_names(), &[theta]).unwrap();
        let conn = cocycle_from_rep(&c, &pres, &rep).unwrap();
        let values = spectrum(&twisted_laplacian(&c, &conn).unwrap(), None).unwrap().values;
        let expected: Vec<f64> = (0..n)
            .map(|k| 2.0 - 2.0 * (std::f64::consts::TAU * (k as f64 + theta) / n as f64).cos())
            .collect();
        prop_assert!(sorted_gap(&values, &expected) < 1e-10);
    }

    #[test]
    fn gauge_transforms_preserve_spectra(w in 2usize..5, h in 2usize..5, d in 1usize..3, seed in any::<u64>()) {
        let c = build_grid_with_holes(w, h, &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plain = spectrum(&twisted_laplacian(&c, &FlatConnection::trivial(&c, d)).unwrap(), None).unwrap().values;
        let gauge = GaugeField::random(c.num_vertices(), d, &mut rng);
        let conn = FlatConnection::trivial(&c, d).gauge_transform(&c, &gauge).unwrap();
        let moved = spectrum(&twisted_laplacian(&c, &conn).unwrap(), None).unwrap().values;
        prop_assert!(sorted_gap(&plain, &moved) < 1e-10);
    }

    /// Transport along a loop spelled by a word equals the representation
    /// evaluated on that word, read in composition order.
    #[test]
    fn loop_holonomy_is_the_represented_word(word in word_strategy(2), seed in any::<u64>()) {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let f2 = build_presentation_complex(&names, &[]).unwrap();
        let pres = Pi1Presentation::compute(&f2, 0).unwrap();
        let rep = UnitaryRep::random(pres.generator_names(), 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let conn = cocycle_from_rep(&f2, &pres, &rep).unwrap();
        let walk = loop_of(&f2, &pres, &word);
        let reversed: Vec<Letter> = word.iter().rev().copied().collect();
        prop_assert!((conn.transport(&walk).unwrap() - rep.evaluate(&reversed)).norm() < 1e-12);
    }

    /// Words equal in S3 have equal holonomy in every irreducible sector.
    #[test]
    fn s3_holonomy_depends_only_on_the_group_element(u in word_strategy(2), v in word_strategy(2)) {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let rels: Vec<_> = ["a2", "b2", "(ab)3"].iter().map(|r| parse_word(r, &names).unwrap()).collect();
        let s3 = build_presentation_complex(&names, &rels).unwrap();
        let pres = Pi1Presentation::compute(&s3, 0).unwrap();
        let (pu, pv) = (loop_of(&s3, &pres, &u), loop_of(&s3, &pres, &v));
        let same = pres.beta(&pu).unwrap() == pres.beta(&pv).unwrap();
        for rep in UnitaryRep::irreducibles(&pres).unwrap().1 {
            let conn = cocycle_from_rep(&s3, &pres, &rep).unwrap();
            let gap = (conn.transport(&pu).unwrap() - conn.transport(&pv).unwrap()).norm();
            if same {
                prop_assert!(gap < 1e-10);
            }
        }
    }
}
