mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use imec::admg_factor::{
    ancestrally_closed_sets, barren, canonical_dag, head_partition, latent_projection,
};
use imec::distribution::{factorization_check, is_markov, sample_dag_table, DEFAULT_TOL};
use imec::equivalence::{
    colliders_with_order, colliders_with_order_permuted, markov_equivalent, Method,
};
use imec::graph_core::{
    all_ags, all_simple_graphs, is_ag, is_rg, random_admg, random_ag, random_dag, random_graph,
    EdgeProbs,
};
use imec::intervention::{doubly_intervened_selection_adjacent, interventional_graph};
use imec::maximality::{
    anterior_graph, is_maximal, is_maximal_by_inducing_paths, maximal_completion,
};
use imec::separation::{d_separated, m_separated, m_separated_by_paths, model_bits, DEFAULT_BOUND};
use imec::{MixedGraph, TargetMultiset, VSet};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn same_model(a: &MixedGraph, b: &MixedGraph) -> bool {
    model_bits(a, None, DEFAULT_BOUND).unwrap() == model_bits(b, None, DEFAULT_BOUND).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vset_subsets_enumerate_power_set(bits in 0u64..1 << 8) {
        let s = VSet(bits);
        let subs: Vec<VSet> = s.subsets().collect();
        prop_assert_eq!(subs.len(), 1 << s.len());
        prop_assert!(subs.iter().all(|x| x.is_subset(s)));
        prop_assert_eq!(s.iter().collect::<VSet>(), s);
    }

    #[test]
    fn text_round_trip(seed in any::<u64>(), n in 1usize..7) {
        let g = random_graph(n, EdgeProbs::default(), &mut rng(seed));
        prop_assert_eq!(MixedGraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn separation_is_symmetric_and_matches_paths(seed in any::<u64>(), n in 2usize..6, c in 0u64..32) {
        let g = random_graph(n, EdgeProbs::default(), &mut rng(seed));
        let c = VSet(c) & g.all();
        for i in (g.all() - c).iter() {
            for j in (g.all() - c).iter().filter(|&j| j > i) {
                let (a, b) = (VSet::single(i), VSet::single(j));
                let ab = m_separated(&g, a, b, c).unwrap();
                prop_assert_eq!(ab, m_separated(&g, b, a, c).unwrap());
                prop_assert_eq!(ab, m_separated_by_paths(&g, a, b, c).unwrap());
            }
        }
    }

    #[test]
    fn d_and_m_separation_agree_on_dags(seed in any::<u64>(), n in 2usize..7, c in 0u64..64) {
        let g = random_dag(n, 0.4, &mut rng(seed));
        let c = VSet(c) & g.all();
        for i in (g.all() - c).iter() {
            for j in (g.all() - c).iter().filter(|&j| j > i) {
                let (a, b) = (VSet::single(i), VSet::single(j));
                prop_assert_eq!(d_separated(&g, a, b, c).unwrap(), m_separated(&g, a, b, c).unwrap());
            }
        }
    }

    #[test]
    fn completion_is_maximal_idempotent_and_keeps_model(seed in any::<u64>(), n in 2usize..6) {
        let g = random_ag(n, 0.5, &mut rng(seed));
        let bar = maximal_completion(&g).unwrap();
        prop_assert!(is_ag(&bar));
        prop_assert!(is_maximal(&bar).unwrap());
        prop_assert_eq!(&maximal_completion(&bar).unwrap(), &bar);
        prop_assert!(same_model(&g, &bar));
    }

    #[test]
    fn anterior_graph_is_idempotent_and_keeps_model(seed in any::<u64>(), n in 2usize..6) {
        let g = random_graph(n, EdgeProbs::default(), &mut rng(seed));
        prop_assume!(is_rg(&g));
        let star = anterior_graph(&g);
        prop_assert_eq!(&anterior_graph(&star), &star);
        prop_assert!(same_model(&g, &star));
    }

    #[test]
    fn ribbonless_iff_no_doubly_intervened_selection_node(seed in any::<u64>(), t in proptest::collection::vec(0u64..32, 1..4)) {
        let g = random_ag(5, 0.5, &mut rng(seed));
        let t = TargetMultiset::new(t.into_iter().map(VSet).collect());
        let gi = interventional_graph(&g, &t).unwrap();
        prop_assert_eq!(imec::graph_core::find_ribbons(&gi).is_empty(), doubly_intervened_selection_adjacent(&g, &t).is_empty());
    }

    #[test]
    fn collider_orders_do_not_depend_on_visit_order(seed in any::<u64>(), n in 3usize..6) {
        let g = random_ag(n, 0.6, &mut rng(seed));
        let m = imec::equivalence::collider_triples(&g).len();
        let perm: Vec<usize> = (0..m).rev().collect();
        let key = |cs: Vec<imec::equivalence::OrderedCollider>| {
            let mut v: Vec<_> = cs.into_iter().map(|c| (c.triple, c.order)).collect();
            v.sort();
            v
        };
        prop_assert_eq!(key(colliders_with_order(&g)), key(colliders_with_order_permuted(&g, &perm)));
    }

    #[test]
    fn mag_criterion_matches_brute_force(s1 in any::<u64>(), s2 in any::<u64>(), n in 2usize..6) {
        let g = maximal_completion(&random_ag(n, 0.5, &mut rng(s1))).unwrap();
        let h = maximal_completion(&random_ag(n, 0.5, &mut rng(s2))).unwrap();
        let brute = markov_equivalent(&g, &h, Method::Brute).unwrap().equivalent;
        prop_assert_eq!(brute, markov_equivalent(&g, &h, Method::Graphical).unwrap().equivalent);
    }

    #[test]
    fn heads_partition_each_closed_set(seed in any::<u64>(), n in 1usize..7) {
        let g = random_admg(n, 0.4, 0.3, &mut rng(seed));
        for a in ancestrally_closed_sets(&g).unwrap() {
            let hp = head_partition(&g, a).unwrap();
            let mut seen = VSet::EMPTY;
            for &(h, t) in &hp.heads {
                prop_assert!(!h.is_empty() && !h.intersects(seen) && !h.intersects(t));
                prop_assert_eq!(barren(&g, h), h);
                seen = seen | h;
            }
            prop_assert_eq!(seen, a);
        }
    }

    #[test]
    fn canonical_dag_projects_back(seed in any::<u64>(), n in 1usize..7) {
        let g = random_admg(n, 0.4, 0.3, &mut rng(seed));
        let (dag, latents) = canonical_dag(&g).unwrap();
        prop_assert_eq!(latents.len(), g.edges().iter().filter(|e| e.kind() == imec::EdgeKind::Bidirected).count());
        prop_assert_eq!(latent_projection(&dag, g.all()).unwrap(), g);
    }

    #[test]
    fn dag_tables_factorize(seed in any::<u64>(), n in 1usize..6) {
        let dag = random_dag(n, 0.5, &mut rng(seed));
        let t = sample_dag_table(&dag, seed).unwrap();
        prop_assert!((t.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(is_markov(&t, &dag, DEFAULT_TOL).unwrap());
        prop_assert!(factorization_check(&t, &dag, DEFAULT_TOL).unwrap().passed);
    }
}

#[test]
fn maximality_tests_agree_on_all_small_ags() {
    for n in 1..=5 {
        for g in all_ags(n) {
            assert_eq!(
                is_maximal(&g).unwrap(),
                is_maximal_by_inducing_paths(&g),
                "{}",
                g.to_text()
            );
        }
    }
}

#[test]
fn completion_keeps_model_on_all_small_ags() {
    for n in 1..=5 {
        for g in all_ags(n) {
            let bar = maximal_completion(&g).unwrap();
            assert!(same_model(&g, &bar), "{}", g.to_text());
        }
    }
}

#[test]
fn anterior_graph_keeps_model_on_all_small_rgs() {
    for n in 1..=5 {
        for g in all_simple_graphs(n).filter(is_rg) {
            assert!(same_model(&g, &anterior_graph(&g)), "{}", g.to_text());
        }
    }
}

#[test]
fn target_orbits_cover_every_multiset() {
    let n = 3;
    let reps = common::target_orbits(n, 2);
    let perms = common::permutations(n);
    for t in common::target_multisets(n, 2) {
        let hit = perms.iter().any(|p| {
            let mut img: Vec<u64> = t.iter().map(|&s| common::permute_set(s, p).0).collect();
            img.sort();
            reps.iter()
                .any(|r| r.targets().iter().map(|s| s.0).collect::<Vec<_>>() == img)
        });
        assert!(hit, "{t:?}");
    }
}
