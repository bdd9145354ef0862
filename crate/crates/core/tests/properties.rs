use std::collections::BTreeSet;

use proptest::prelude::*;
use screening_core::equilibrium::{
    canonical_strategy, closure_trace, lambda_partition, receiver_objective, solve_exact,
    solve_heuristic, HeuristicOptions, SeqSet, SolveOptions,
};
use screening_core::gameplay::{dstar, robust_recovery_set, sender_strategy, TiePolicy};
use screening_core::graph::{
    build_sender_graph, max_independent_set, type_graphs_and_union, union_graph, MisMode,
    SenderGraph,
};
use screening_core::rate::{alpha_sequence, union_alpha};
use screening_core::{Budgets, Horizon, Model, Rational, SenderTypeId, SeqId, Sequence};

/// Integer utilities in [-3, 3] and a prior from positive integer weights.
fn arb_model(max_symbols: usize, max_types: usize) -> impl Strategy<Value = Model> {
    (2..=max_symbols, 1..=max_types)
        .prop_flat_map(|(k, t)| {
            (
                Just(k),
                prop::collection::vec(1i128..=12, t),
                prop::collection::vec(-3i64..=3, t * k * k),
            )
        })
        .prop_map(|(k, weights, utils)| build_model(k, &weights, &utils))
}

fn build_model(k: usize, weights: &[i128], utils: &[i64]) -> Model {
    let t = weights.len();
    let total: i128 = weights.iter().sum();
    let prior = weights
        .iter()
        .map(|&w| Rational::new(w, total).unwrap())
        .collect();
    let tables = (0..t)
        .map(|l| {
            (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| Rational::from(utils[(l * k + i) * k + j]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Model::new(
        (0..k).map(|i| format!("s{i}")).collect(),
        (0..t).map(|i| format!("t{i}")).collect(),
        prior,
        tables,
    )
    .unwrap()
}

fn brute_alpha(g: &SenderGraph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|mask| {
            let m: Vec<SeqId> = (0..n).filter(|v| mask >> v & 1 == 1).map(SeqId).collect();
            g.is_independent(&m)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap()
}

fn all_subsets(count: usize) -> impl Iterator<Item = SeqSet> {
    (1u32..1 << count).map(move |mask| {
        (0..count)
            .filter(|i| mask >> i & 1 == 1)
            .map(SeqId)
            .collect()
    })
}

fn budgets() -> Budgets {
    Budgets::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edges_match_raw_utilities(model in arb_model(3, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        for t in model.types() {
            let g = build_sender_graph(&h, t, 1000).unwrap();
            for x in h.ids() {
                for y in h.ids().filter(|&y| y != x) {
                    let (xs, ys) = (h.sequence(x), h.sequence(y));
                    let u = |a: &Sequence, b: &Sequence| model.sequence_utility(t, a, b).unwrap();
                    let expected = u(&xs, &xs) <= u(&ys, &xs) || u(&ys, &ys) <= u(&xs, &ys);
                    prop_assert_eq!(g.adjacent(x, y), expected);
                    prop_assert_eq!(g.adjacent(x, y), g.adjacent(y, x));
                }
                prop_assert!(!g.adjacent(x, x));
            }
        }
    }

    #[test]
    fn honest_types_have_empty_graphs_and_lift(model in arb_model(3, 2)) {
        for t in model.types().filter(|&t| model.is_honest(t)) {
            for n in 1..=3 {
                let h = Horizon::new(&model, n, 1000).unwrap();
                prop_assert_eq!(build_sender_graph(&h, t, 1000).unwrap().edge_count(), 0);
                for x in h.ids() {
                    let xs = h.sequence(x);
                    let truthful = model.sequence_utility(t, &xs, &xs).unwrap();
                    for y in h.ids().filter(|&y| y != x) {
                        prop_assert!(truthful > model.sequence_utility(t, &h.sequence(y), &xs).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn averaging_is_consistent_under_concatenation(
        model in arb_model(3, 2),
        a in prop::collection::vec(0u16..2, 1..4),
        b in prop::collection::vec(0u16..2, 1..4),
        c in prop::collection::vec(0u16..2, 1..4),
        d in prop::collection::vec(0u16..2, 1..4),
    ) {
        prop_assume!(a.len() == c.len() && b.len() == d.len());
        let (a, b, c, d) = (Sequence::new(a), Sequence::new(b), Sequence::new(c), Sequence::new(d));
        for t in model.types() {
            let whole = model.sequence_utility(t, &a.concat(&b), &c.concat(&d)).unwrap();
            let left = model.sequence_utility(t, &a, &c).unwrap();
            let right = model.sequence_utility(t, &b, &d).unwrap();
            let len = |s: &Sequence| Rational::from(s.len());
            prop_assert_eq!(len(&a) * left + len(&b) * right, (len(&a) + len(&b)) * whole);
        }
    }

    #[test]
    fn exact_mis_matches_brute_force(model in arb_model(4, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        prop_assume!(h.len() <= 16);
        let (graphs, union) = type_graphs_and_union(&h, 1000).unwrap();
        for g in graphs.iter().chain([&union]) {
            let r = max_independent_set(g, MisMode::Exact, 512).unwrap();
            prop_assert!(g.is_independent(&r.members));
            prop_assert_eq!(r.size, brute_alpha(g));
            let greedy = max_independent_set(g, MisMode::Greedy, 512).unwrap();
            prop_assert!(g.is_independent(&greedy.members));
            prop_assert!(greedy.size <= r.size);
        }
    }

    #[test]
    fn union_is_monotone(model in arb_model(3, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let (graphs, _) = type_graphs_and_union(&h, 1000).unwrap();
        for a in &graphs {
            for b in &graphs {
                let u = union_graph(&[a.clone(), b.clone()]).unwrap();
                let alpha = |g: &SenderGraph| max_independent_set(g, MisMode::Exact, 512).unwrap().size;
                prop_assert!(alpha(&u) <= alpha(a).min(alpha(b)));
            }
        }
    }

    #[test]
    fn product_of_union_independent_sets(model in arb_model(3, 3)) {
        let h1 = Horizon::new(&model, 1, 1000).unwrap();
        let (_, union1) = type_graphs_and_union(&h1, 1000).unwrap();
        let base = max_independent_set(&union1, MisMode::Exact, 512).unwrap().members;
        for n in 2..=3 {
            let hn = Horizon::new(&model, n, 1000).unwrap();
            let (_, union_n) = type_graphs_and_union(&hn, 1000).unwrap();
            // Cartesian power of the single-letter witness.
            let power: Vec<SeqId> = hn
                .ids()
                .filter(|&x| hn.letters(x.0).iter().all(|&l| base.contains(&SeqId(l as usize))))
                .collect();
            prop_assert_eq!(power.len(), base.len().pow(n as u32));
            prop_assert!(union_n.is_independent(&power));
            prop_assert!(union_alpha(&model, n, &budgets()).unwrap() >= base.len().pow(n as u32));
        }
    }

    #[test]
    fn alphas_are_supermultiplicative(model in arb_model(2, 2)) {
        for t in model.types() {
            let alphas = alpha_sequence(&model, t, 4, &budgets()).unwrap();
            for m in 1..=4 {
                for n in 1..=4 {
                    if m + n <= 4 {
                        prop_assert!(alphas[m + n - 1] >= alphas[m - 1] * alphas[n - 1]);
                    }
                }
            }
        }
    }

    #[test]
    fn partitions_are_independent(model in arb_model(3, 3), n in 1usize..=2, mask in 1u32..512) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let members: SeqSet = h.ids().filter(|x| x.0 < 9 && mask >> x.0 & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        for t in model.types() {
            let g = build_sender_graph(&h, t, 1000).unwrap();
            let part: Vec<SeqId> = lambda_partition(&h, &members, t).unwrap().into_iter().collect();
            prop_assert!(g.is_independent(&part));
            prop_assert!(part.len() <= max_independent_set(&g, MisMode::Exact, 512).unwrap().size);
        }
    }

    #[test]
    fn union_mis_is_its_own_partition(model in arb_model(3, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let (_, union) = type_graphs_and_union(&h, 1000).unwrap();
        let mis: SeqSet = max_independent_set(&union, MisMode::Exact, 512).unwrap().members.into_iter().collect();
        for t in model.types() {
            prop_assert_eq!(&lambda_partition(&h, &mis, t).unwrap(), &mis);
        }
        prop_assert_eq!(receiver_objective(&h, &mis).unwrap(), Rational::from(mis.len()));
    }

    #[test]
    fn pruned_search_matches_full_enumeration(model in arb_model(3, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        prop_assume!(h.len() <= 9);
        let pruned = solve_exact(&h, &SolveOptions { validate_up_to: 0, ..Default::default() }).unwrap();
        let full = solve_exact(&h, &SolveOptions { prune: false, ..Default::default() }).unwrap();
        prop_assert_eq!(pruned.optimum, full.optimum);
        let brute = all_subsets(h.len())
            .map(|s| receiver_objective(&h, &s).unwrap())
            .max()
            .unwrap();
        prop_assert_eq!(full.optimum, brute);
        for set in pruned.maximizers.iter().chain(&full.maximizers) {
            prop_assert_eq!(receiver_objective(&h, set).unwrap(), full.optimum);
        }
        prop_assert!(pruned.maximizers.iter().all(|s| full.maximizers.contains(s) || full.truncated));
    }

    #[test]
    fn rate_sandwich(model in arb_model(3, 3), n in 1usize..=2) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let (graphs, union) = type_graphs_and_union(&h, 1000).unwrap();
        let optimum = solve_exact(&h, &SolveOptions::default()).unwrap().optimum;
        let lower = Rational::from(max_independent_set(&union, MisMode::Exact, 512).unwrap().size);
        let upper: Rational = model
            .types()
            .zip(&graphs)
            .map(|(t, g)| model.prior(t) * Rational::from(max_independent_set(g, MisMode::Exact, 512).unwrap().size))
            .sum();
        prop_assert!(lower <= optimum && optimum <= upper);
    }

    #[test]
    fn closure_never_lowers_objective(model in arb_model(3, 3), n in 1usize..=2, mask in 1u32..512) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let members: SeqSet = h.ids().filter(|x| x.0 < 9 && mask >> x.0 & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let trace = closure_trace(&h, &members).unwrap();
        for pair in trace.windows(2) {
            prop_assert!(pair[1].is_subset(&pair[0]));
            prop_assert!(receiver_objective(&h, &pair[1]).unwrap() >= receiver_objective(&h, &pair[0]).unwrap());
        }
    }

    #[test]
    fn dstar_equals_partition_objective(model in arb_model(3, 3), n in 1usize..=2, mask in 1u32..512) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let members: SeqSet = h.ids().filter(|x| x.0 < 9 && mask >> x.0 & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let expected = receiver_objective(&h, &members).unwrap();
        // Every fallback gives the same value.
        for &fallback in &members {
            let g = canonical_strategy(&h, members.clone(), fallback).unwrap();
            prop_assert_eq!(dstar(&h, &g).unwrap(), expected);
        }
    }

    #[test]
    fn adversarial_sender_realizes_worst_case(model in arb_model(3, 3), n in 1usize..=2, mask in 1u32..512) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let members: SeqSet = h.ids().filter(|x| x.0 < 9 && mask >> x.0 & 1 == 1).collect();
        prop_assume!(!members.is_empty());
        let g = canonical_strategy(&h, members.clone(), *members.first().unwrap()).unwrap();
        for t in model.types() {
            let robust = robust_recovery_set(&h, &g, t).unwrap();
            let recovered: BTreeSet<SeqId> = sender_strategy(&h, &g, t, TiePolicy::Adversarial)
                .unwrap()
                .into_iter()
                .filter(|s| s.recovered)
                .map(|s| s.truth)
                .collect();
            prop_assert_eq!(&recovered, &robust);
            if model.is_honest(t) {
                prop_assert_eq!(&robust, &members);
            }
            prop_assert_eq!(&robust, &lambda_partition(&h, &members, t).unwrap());
        }
    }

    #[test]
    fn heuristic_is_feasible_and_bounded(model in arb_model(3, 3), n in 1usize..=2, seed in 0u64..1000) {
        let h = Horizon::new(&model, n, 1000).unwrap();
        let heuristic = solve_heuristic(&h, seed, &HeuristicOptions::default()).unwrap();
        let exact = solve_exact(&h, &SolveOptions::default()).unwrap();
        prop_assert!(heuristic.optimum >= Rational::ONE);
        prop_assert!(heuristic.optimum <= exact.optimum);
        prop_assert_eq!(receiver_objective(&h, heuristic.questionnaire()).unwrap(), heuristic.optimum);
        let again = solve_heuristic(&h, seed, &HeuristicOptions::default()).unwrap();
        prop_assert_eq!(again, heuristic);
    }
}

#[test]
fn honest_only_heuristic_takes_everything() {
    let model = build_model(3, &[1], &[2, 0, 0, 0, 2, 0, 1, 1, 3]);
    assert!(model.is_honest(SenderTypeId(0)));
    let h = Horizon::new(&model, 2, 1000).unwrap();
    let r = solve_heuristic(&h, 5, &HeuristicOptions::default()).unwrap();
    assert_eq!(r.optimum, Rational::from(9usize));
}
