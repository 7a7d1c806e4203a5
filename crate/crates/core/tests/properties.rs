mod common;

use common::{oracle, OracleVerdict};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unets::calculus::{apply_commutation, check_proof, commutation_sites, parse_proof, skeleton, translate, verify_unification_proof};
use unets::cutelim::{find_redexes, normalize, normalize_with, reduce, NormalizeOptions, Strategy};
use unets::nets::{
    check_correct, check_girard, check_mll, frame, girard_of, girard_of_proof, sequentialize, sequentialize_cuts,
    unet_of_girard, Linking,
};
use unets::sample::{random_net, random_proof, relink, SampleConfig};
use unets::syntax::{cleanse, Formula};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn correct(l: &Linking) -> bool {
    check_correct(l).unwrap().verdict.is_correct()
}

fn tensors(f: &Formula) -> usize {
    let own = usize::from(matches!(f, Formula::Tensor(..)));
    own + f.children().into_iter().map(tensors).sum::<usize>()
}

/// Links minus tensors minus cuts; cut reduction preserves it.
fn balance(l: &Linking) -> i64 {
    let t: usize = l.host.members().map(tensors).sum();
    l.links.len() as i64 - t as i64 - l.host.cuts.len() as i64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn reduction_preserves_correctness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut l = random_net(&mut r, &SampleConfig::with_cuts(3));
        prop_assert!(correct(&l));
        let b = balance(&l);
        loop {
            let rs = find_redexes(&l);
            if rs.is_empty() { break; }
            prop_assert_eq!(rs.len(), l.host.cuts.len());
            let red = rs[r.gen_range(0..rs.len())];
            let next = reduce(&l, &red).unwrap();
            prop_assert!(correct(&next), "{}\n-- {} -->\n{}", l, red, next);
            prop_assert!(next.size() < l.size());
            prop_assert_eq!(balance(&next), b);
            l = next;
        }
    }

    #[test]
    fn normalization_is_confluent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_net(&mut r, &SampleConfig::with_cuts(3));
        let (nf, steps) = normalize(&l);
        prop_assert!(nf.host.cuts.is_empty());
        prop_assert!(steps <= l.host.size());
        for s in [seed, seed ^ 0x9e37_79b9] {
            let n = normalize_with(&l, &NormalizeOptions { strategy: Strategy::Random(s), ..Default::default() }).unwrap();
            prop_assert_eq!(&n.net, &nf);
            prop_assert_eq!(n.steps, steps);
        }
    }

    #[test]
    fn sequentialize_inverts_translate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_net(&mut r, &SampleConfig::default());
        let p = sequentialize(&l).unwrap();
        prop_assert_eq!(translate(&p).unwrap(), l);
    }

    #[test]
    fn sequentialize_with_cuts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_net(&mut r, &SampleConfig::with_cuts(2));
        let p = sequentialize_cuts(&l).unwrap();
        let clean = Linking::new_unchecked(cleanse(&l.host).0, l.links.clone());
        prop_assert_eq!(translate(&p).unwrap(), clean);
    }

    #[test]
    fn girard_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_proof(&mut r, &SampleConfig::default());
        let l = translate(&p).unwrap();
        let g = girard_of(&l, 100_000).unwrap();
        prop_assert!(check_girard(&g), "{}", g);
        prop_assert_eq!(unet_of_girard(&g), l.clone());
        let gp = girard_of_proof(&p).unwrap();
        prop_assert!(check_girard(&gp), "{}", gp);
        prop_assert_eq!(unet_of_girard(&gp), l);
    }

    #[test]
    fn commutations_preserve_the_net(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut p = random_proof(&mut r, &SampleConfig::default());
        let l = translate(&p).unwrap();
        for _ in 0..8 {
            let sites = commutation_sites(&p);
            if sites.is_empty() { break; }
            let (at, slot) = sites[r.gen_range(0..sites.len())].clone();
            if let Ok(q) = apply_commutation(&p, &at, slot) {
                prop_assert_eq!(translate(&q).unwrap(), l.clone());
                p = q;
            }
        }
    }

    #[test]
    fn check_agrees_with_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = if seed % 3 == 0 { SampleConfig::with_cuts(1) } else { SampleConfig::default() };
        let l = random_net(&mut r, &cfg);
        for cand in [l.clone(), relink(&mut r, &l)] {
            let expect = oracle(&cand, 10_000, 10_000);
            if expect == OracleVerdict::TooBig { continue; }
            let got = check_correct(&cand).unwrap().verdict;
            prop_assert_eq!(got.is_correct(), expect == OracleVerdict::Correct, "{}\n{:?} vs {}", cand, expect, got);
        }
    }

    #[test]
    fn frame_agrees_with_correctness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let l = random_net(&mut r, &SampleConfig::default());
        for cand in [l.clone(), relink(&mut r, &l)] {
            if let Ok(fr) = frame(&cand) {
                prop_assert_eq!(check_mll(&fr), correct(&cand), "{}", cand);
            }
        }
    }

    #[test]
    fn skeletons_are_unification_proofs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_proof(&mut r, &SampleConfig::default());
        prop_assert!(verify_unification_proof(&skeleton(&p)).is_valid());
    }

    #[test]
    fn text_formats_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_proof(&mut r, &SampleConfig::with_cuts(1));
        let q = parse_proof(&p.to_string()).unwrap();
        prop_assert_eq!(check_proof(&q).unwrap(), check_proof(&p).unwrap());
        prop_assert_eq!(&q, &p);
        let l = translate(&p).unwrap();
        prop_assert_eq!(Linking::parse(&l.to_string()).unwrap(), l);
    }
}
