use std::collections::BTreeSet;

use proptest::prelude::*;
use semproj_core::evaluation::{score, stratified_shuffling};
use semproj_core::matcher::{
    brute_force_optimum, build_graph, cost_of_links, solve, AlignmentGraph, ConstraintClass, Cost,
};
use semproj_core::model::{BiSentence, Role, RoleAnnotation, Side, Span, WordAlignment};
use semproj_core::projection::{argument_filter, fill_gaps, project_word_based, ArgFilterConfig};
use semproj_core::similarity::{BiView, FilterConfig, SimContext, SimilarityMatrix};
use semproj_core::text::parse_tree;

const TOL: f64 = 1e-9;

fn sim_entry() -> impl Strategy<Value = f64> {
    prop_oneof![3 => Just(0.0), 7 => (1u32..=1000).prop_map(|k| k as f64 / 1000.0)]
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(sim_entry(), c), r))
}

fn graph(rows: &[Vec<f64>], class: ConstraintClass) -> AlignmentGraph {
    build_graph(&SimilarityMatrix::from_rows(rows).unwrap(), 1e6, class).unwrap()
}

fn rows_cost(rows: &[Vec<f64>], pairs: &[(usize, usize)]) -> Cost {
    pairs
        .iter()
        .map(|&(i, j)| {
            let s = rows[i][j];
            Cost::of_weight(if s == 0.0 { 1e6 } else { (-s.ln()).min(1e6) }, 1e6)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solvers_match_oracle(rows in matrix(5)) {
        for class in [ConstraintClass::Perfect, ConstraintClass::EdgeCover, ConstraintClass::Total] {
            let g = graph(&rows, class);
            let a = solve(&g, class).unwrap();
            let o = brute_force_optimum(&g, class).unwrap();
            prop_assert!(a.satisfies_class(), "{class:?} {:?}", a.pairs());
            prop_assert!(a.cost.approx_eq(&o.cost, TOL), "{class:?} solver {:?} oracle {:?}", a.cost, o.cost);
        }
    }

    #[test]
    fn optimal_covers_are_never_many_to_many(rows in matrix(5)) {
        let g = graph(&rows, ConstraintClass::EdgeCover);
        prop_assert!(solve(&g, ConstraintClass::EdgeCover).unwrap().many_to_many_links().is_empty());
        prop_assert!(brute_force_optimum(&g, ConstraintClass::EdgeCover).unwrap().many_to_many_links().is_empty());
    }

    #[test]
    fn edge_cover_no_worse_than_perfect_on_square(n in 1usize..=5, seed in prop::collection::vec(sim_entry(), 25)) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| seed[i * 5..i * 5 + n].to_vec()).collect();
        let p = solve(&graph(&rows, ConstraintClass::Perfect), ConstraintClass::Perfect).unwrap();
        let e = solve(&graph(&rows, ConstraintClass::EdgeCover), ConstraintClass::EdgeCover).unwrap();
        let bound = Cost { saturated: p.cost.saturated, finite: p.cost.finite + TOL };
        prop_assert!(e.cost <= bound);
    }

    #[test]
    fn total_is_row_minimum(rows in matrix(6)) {
        let g = graph(&rows, ConstraintClass::Total);
        let a = solve(&g, ConstraintClass::Total).unwrap();
        let expect: Cost = (0..rows.len())
            .map(|i| (0..rows[0].len()).map(|j| rows_cost(&rows, &[(i, j)])).fold(None, |m: Option<Cost>, c| match m {
                Some(m) if m <= c => Some(m),
                _ => Some(c),
            }).unwrap())
            .sum();
        prop_assert_eq!(a.cost.saturated, expect.saturated);
        prop_assert!((a.cost.finite - expect.finite).abs() <= TOL);
        // ties go to the lowest target index
        for l in &a.links {
            let chosen = rows_cost(&rows, &[(l.src, l.tgt)]);
            prop_assert!((0..l.tgt).all(|j| chosen < rows_cost(&rows, &[(l.src, j)])));
        }
    }

    #[test]
    fn solver_is_deterministic(rows in matrix(5)) {
        for class in [ConstraintClass::Perfect, ConstraintClass::EdgeCover, ConstraintClass::Total] {
            let g = graph(&rows, class);
            prop_assert_eq!(solve(&g, class).unwrap().pairs(), solve(&g, class).unwrap().pairs());
        }
    }

    #[test]
    fn scaling_keeps_perfect_optima(n in 1usize..=4, vals in prop::collection::vec(sim_entry(), 16), alpha in 0.05f64..=1.0) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vals[i * 4..i * 4 + n].to_vec()).collect();
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|s| s * alpha).collect()).collect();
        let opt = brute_force_optimum(&graph(&rows, ConstraintClass::Perfect), ConstraintClass::Perfect).unwrap().cost;
        let a = solve(&graph(&scaled, ConstraintClass::Perfect), ConstraintClass::Perfect).unwrap();
        let o = brute_force_optimum(&graph(&scaled, ConstraintClass::Perfect), ConstraintClass::Perfect).unwrap();
        prop_assert!(rows_cost(&rows, &a.pairs()).approx_eq(&opt, TOL));
        prop_assert!(rows_cost(&rows, &o.pairs()).approx_eq(&opt, TOL));
    }

    #[test]
    fn reported_cost_matches_links(rows in matrix(5)) {
        let g = graph(&rows, ConstraintClass::EdgeCover);
        let a = solve(&g, ConstraintClass::EdgeCover).unwrap();
        prop_assert!(cost_of_links(&a.links, 1e6).approx_eq(&a.cost, TOL));
    }
}

fn random_tree(n: usize, cuts: &[bool]) -> String {
    // right-branching binary tree over n tokens with optional flat groups
    fn build(lo: usize, hi: usize, cuts: &[bool]) -> String {
        if lo == hi {
            return format!("(NN w{lo})");
        }
        if cuts[lo % cuts.len()] {
            let leaves: Vec<String> = (lo..=hi).map(|i| format!("(NN w{i})")).collect();
            return format!("(X {})", leaves.join(" "));
        }
        format!("(X (NN w{lo}) {})", build(lo + 1, hi, cuts))
    }
    build(0, n - 1, cuts)
}

fn bisentence() -> impl Strategy<Value = BiSentence> {
    (
        2usize..=6,
        2usize..=6,
        prop::collection::vec(any::<bool>(), 4),
        prop::collection::vec(any::<bool>(), 4),
    )
        .prop_flat_map(|(n, m, cs, ct)| {
            (
                Just(n),
                Just(m),
                Just(cs),
                Just(ct),
                prop::collection::btree_set((0..n, 0..m), 0..=n * m),
            )
        })
        .prop_map(|(n, m, cs, ct, links)| {
            BiSentence::new(
                Side::from_tree(parse_tree(&random_tree(n, &cs), None).unwrap()),
                Side::from_tree(parse_tree(&random_tree(m, &ct), None).unwrap()),
                WordAlignment::new(n, m, links).unwrap(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn constituent_sim_is_symmetric_under_transpose(b in bisentence()) {
        let (st, tt) = (b.src.tree.as_ref().unwrap(), b.tgt.tree.as_ref().unwrap());
        let fwd_view = BiView::new(&b.alignment);
        let fwd = SimContext::new(st, tt, &fwd_view).unwrap();
        let t = b.alignment.transpose();
        let back_view = BiView::new(&t);
        let back = SimContext::new(tt, st, &back_view).unwrap();
        for i in 0..st.len() {
            for j in 0..tt.len() {
                let x = fwd.constituent_sim(i, j);
                prop_assert!((x - back.constituent_sim(j, i)).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn filters_only_exclude_and_are_idempotent(b in bisentence()) {
        let cfg = FilterConfig { na: true, nc: true, ..FilterConfig::default() };
        let once = BiView::filtered(&b, &cfg).unwrap();
        let twice = once.clone().na_filter().nc_filter(&b.src.sentence, &b.tgt.sentence, &cfg).unwrap();
        let all: BTreeSet<_> = b.alignment.links().iter().copied().collect();
        let act: BTreeSet<_> = once.active_links().collect();
        prop_assert!(act.is_subset(&all));
        prop_assert_eq!(act, twice.active_links().collect::<BTreeSet<_>>());
        prop_assert_eq!(once.excluded_src().collect::<Vec<_>>(), twice.excluded_src().collect::<Vec<_>>());
        prop_assert_eq!(once.excluded_tgt().collect::<Vec<_>>(), twice.excluded_tgt().collect::<Vec<_>>());
    }

    #[test]
    fn word_projection_is_monotone(b in bisentence(), lo in 0usize..6, len in 0usize..3, extra in prop::collection::vec((0usize..6, 0usize..6), 0..5)) {
        let n = b.src.len();
        let lo = lo % n;
        let hi = (lo + len).min(n - 1);
        let src = RoleAnnotation::new("F", None, vec![Role { label: "R".into(), spans: vec![Span { lo, hi }] }]).unwrap();
        let more_links: BTreeSet<_> = b.alignment.links().iter().copied()
            .chain(extra.into_iter().map(|(i, j)| (i % n, j % b.tgt.len())))
            .collect();
        let more = WordAlignment::new(n, b.tgt.len(), more_links).unwrap();
        for fill in [false, true] {
            let before = project_word_based(&b.alignment, &src, fill).unwrap();
            let after = project_word_based(&more, &src, fill).unwrap();
            let toks = |p: &semproj_core::projection::ProjectedAnnotation| p.annotation.role("R").map(|r| r.tokens()).unwrap_or_default();
            prop_assert!(toks(&before).is_subset(&toks(&after)));
        }
    }

    #[test]
    fn argument_filter_is_sound(b in bisentence(), p in 0usize..6) {
        let tree = b.tgt.tree.as_ref().unwrap();
        let p = p % tree.sentence().len();
        let pre = tree.preterminal(p).unwrap();
        let ancestors: BTreeSet<_> = tree.ancestors(pre).collect();
        for c in argument_filter(tree, p, &ArgFilterConfig::default()).unwrap() {
            prop_assert!(!tree.dominates(c, pre));
            prop_assert!(tree.node(c).parent.is_some_and(|par| ancestors.contains(&par)));
        }
    }

    #[test]
    fn fill_gaps_is_an_interval(toks in prop::collection::btree_set(0usize..40, 1..10)) {
        let f = fill_gaps(&toks);
        prop_assert!(toks.is_subset(&f));
        prop_assert_eq!(f.first(), toks.first());
        prop_assert_eq!(f.last(), toks.last());
        prop_assert_eq!(f.len(), toks.last().unwrap() - toks.first().unwrap() + 1);
    }
}

fn annotation() -> impl Strategy<Value = RoleAnnotation> {
    prop::collection::btree_map(0usize..3, (0usize..6, 0usize..3), 0..3).prop_map(|roles| {
        let roles = roles
            .into_iter()
            .map(|(l, (lo, len))| Role {
                label: format!("R{l}"),
                spans: vec![Span { lo, hi: lo + len }],
            })
            .collect();
        RoleAnnotation::new("F", Some(0), roles).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn score_swaps_precision_and_recall(pairs in prop::collection::vec((annotation(), annotation()), 1..6)) {
        let (g, p): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let a = score(&g, &p).unwrap();
        let b = score(&p, &g).unwrap();
        prop_assert_eq!(a.precision, b.recall);
        prop_assert_eq!(a.recall, b.precision);
        let (lo, hi) = (a.precision.min(a.recall), a.precision.max(a.recall));
        prop_assert!(a.f1 >= lo - 1e-15 && a.f1 <= hi + 1e-15);
    }

    #[test]
    fn p_value_range(pairs in prop::collection::vec((annotation(), annotation(), annotation()), 1..6), seed in any::<u64>()) {
        let g: Vec<_> = pairs.iter().map(|t| t.0.clone()).collect();
        let a: Vec<_> = pairs.iter().map(|t| t.1.clone()).collect();
        let b: Vec<_> = pairs.iter().map(|t| t.2.clone()).collect();
        let r = stratified_shuffling(&g, &a, &b, 50, seed).unwrap();
        prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
        prop_assert_eq!(stratified_shuffling(&g, &a, &a, 50, seed).unwrap().p_value, 1.0);
    }
}
