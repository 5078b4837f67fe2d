use proptest::prelude::*;

use tangle_core::counting::CountTable;
use tangle_core::duality::{layout_to_pair, pair_to_layout};
use tangle_core::polygon::{flip_pair, moves, neighbors, DisjointPair, Symmetry};
use tangle_core::sampling::{ChaChaStream, DecisionSource, PairIndex, Sampler, SamplerConfig};
use tangle_core::tanglegram::{irr, Tanglegram};

fn pair_at(n: usize, seed: u64) -> DisjointPair {
    let index = PairIndex::for_polygon(n).unwrap();
    index.get(seed % index.len()).unwrap()
}

fn tables() -> &'static CountTable {
    static TABLES: std::sync::OnceLock<CountTable> = std::sync::OnceLock::new();
    TABLES.get_or_init(|| CountTable::compute(9).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flip_then_inverse_is_identity(n in 5usize..=10, seed in any::<u64>(), pick in any::<usize>()) {
        let p = pair_at(n, seed);
        let ms = moves(&p);
        prop_assert_eq!(ms.len(), 2 * (n - 3));
        let out = flip_pair(&p, ms[pick % ms.len()]).unwrap();
        prop_assert!(out.pair.first().is_disjoint(out.pair.second()));
        prop_assert_ne!(out.pair, p);
        prop_assert_eq!(flip_pair(&out.pair, out.inverse).unwrap().pair, p);
    }

    #[test]
    fn symmetries_are_automorphisms(n in 5usize..=9, seed in any::<u64>(), which in any::<usize>()) {
        let p = pair_at(n, seed);
        let all = Symmetry::all(n);
        let s = all[which % all.len()];
        let image = s.apply(&p);
        let mut mapped: Vec<DisjointPair> = neighbors(&p).into_iter().map(|(_, q)| s.apply(&q)).collect();
        let mut direct: Vec<DisjointPair> = neighbors(&image).into_iter().map(|(_, q)| q).collect();
        mapped.sort();
        direct.sort();
        prop_assert_eq!(mapped, direct);
    }

    #[test]
    fn dual_round_trip(n in 4usize..=11, seed in any::<u64>()) {
        let p = pair_at(n, seed);
        let layout = pair_to_layout(&p);
        prop_assert_eq!(layout.size(), n - 1);
        prop_assert!(layout.tanglegram().is_irreducible());
        prop_assert_eq!(layout_to_pair(&layout).unwrap(), p);
        prop_assert_eq!(p.to_string().parse::<DisjointPair>().unwrap(), p);
    }

    #[test]
    fn canonical_code_ignores_child_order(n in 1usize..=9, seed in any::<u64>(), flips in any::<u64>()) {
        let sampler = Sampler::new(tables(), SamplerConfig { seed, ..Default::default() }).unwrap();
        let t = sampler.sample(n, &mut sampler.stream(0)).unwrap().tanglegram;
        let p = t.presentation();
        let bits = |len: usize, shift: u32| (0..len).map(|i| (flips.rotate_left(shift) >> (i % 64)) & 1 == 1).collect::<Vec<_>>();
        let shuffled = p.with_flips(&bits(p.left.size(), 0), &bits(p.right.size(), 17));
        prop_assert_eq!(Tanglegram::from_presentation(&shuffled), t.clone());
        prop_assert_eq!(t.code().parse::<Tanglegram>().unwrap(), t);
    }

    #[test]
    fn samples_are_planar_and_traced(n in 1usize..=9, seed in any::<u64>()) {
        let sampler = Sampler::new(tables(), SamplerConfig { seed, ..Default::default() }).unwrap();
        let out = sampler.sample(n, &mut sampler.stream(3)).unwrap();
        prop_assert!(out.tanglegram.is_planar());
        prop_assert_eq!(out.tanglegram.size(), n);
        prop_assert_eq!(out.trace.composition.iter().sum::<usize>(), n);
        if n >= 2 {
            prop_assert_eq!(irr(&out.tanglegram).0.size(), out.trace.chosen_k);
        }
        let again = sampler.sample(n, &mut sampler.stream(3)).unwrap();
        prop_assert_eq!(again.trace, out.trace);
    }

    #[test]
    fn draws_stay_below_bound(seed in any::<u64>(), bound in 1usize..1_000_000) {
        let mut s = ChaChaStream::new(seed);
        for _ in 0..20 {
            prop_assert!(s.below_usize(bound) < bound);
        }
    }
}
