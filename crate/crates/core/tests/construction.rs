mod common;

use proptest::prelude::*;

use basis_paths::hbps::{hbps, hbps_scheduled, Schedule};
use basis_paths::netgraph::DEFAULT_PATH_LIMIT;
use basis_paths::subroutine::{subroutine_basis, subroutine_trace};
use basis_paths::verify::check_coverage;
use basis_paths::TieBreak;
use common::{all_layer_vectors, graph, graph_with, oracle_in_span, oracle_rank, RefNet};

fn tie_breaks() -> impl Strategy<Value = TieBreak> {
    prop_oneof![
        Just(TieBreak::Deterministic),
        any::<u64>().prop_map(TieBreak::Seeded)
    ]
}

#[test]
fn cardinality_is_edges_minus_hidden_for_every_small_shape() {
    for len in 2..=6 {
        for layers in all_layer_vectors(len, 5) {
            let r = RefNet::layered(&layers);
            let b = subroutine_basis(&graph(&layers), &TieBreak::Deterministic).unwrap();
            assert_eq!(b.len(), r.m() - r.hidden(), "{layers:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_is_covering_independent_and_spanning(
        layers in prop::collection::vec(1usize..=4, 2..=5),
        tb in tie_breaks(),
    ) {
        let g = graph(&layers);
        let r = RefNet::layered(&layers);
        let b = subroutine_basis(&g, &tb).unwrap();
        prop_assert_eq!(b.len(), r.m() - r.hidden());
        prop_assert!(check_coverage(&g, b.paths()).ok);
        let rows: Vec<Vec<i64>> = b.paths().map(|p| r.indicator_of(p)).collect();
        prop_assert_eq!(oracle_rank(&rows), b.len());
        let targets: Vec<Vec<i64>> = r.paths().iter().map(|p| r.indicator(p)).collect();
        prop_assert!(oracle_in_span(&rows, &targets).into_iter().all(|x| x));
    }

    #[test]
    fn every_layer_step_adds_edges_minus_hidden(
        layers in prop::collection::vec(1usize..=5, 2..=6),
        tb in tie_breaks(),
    ) {
        let g = graph(&layers);
        for s in subroutine_trace(&g, &tb).unwrap() {
            let upto = &layers[..=s.k + 1];
            let r = RefNet::layered(upto);
            prop_assert_eq!(s.len(), r.m() - r.hidden(), "after layer {}", s.k);
            prop_assert_eq!(s.reach.iter().map(Vec::len).sum::<usize>(), s.len());
        }
    }

    #[test]
    fn identical_inputs_give_identical_output(
        layers in prop::collection::vec(1usize..=4, 2..=5),
        tb in tie_breaks(),
    ) {
        let g = graph(&layers);
        prop_assert_eq!(subroutine_basis(&g, &tb).unwrap(), subroutine_basis(&g, &tb).unwrap());
    }

    #[test]
    fn choices_do_not_change_cardinality(layers in prop::collection::vec(1usize..=4, 2..=5), seed in any::<u64>()) {
        let g = graph(&layers);
        let a = subroutine_basis(&g, &TieBreak::Deterministic).unwrap();
        let b = subroutine_basis(&g, &TieBreak::Seeded(seed)).unwrap();
        prop_assert_eq!(a.len(), b.len());
    }

    #[test]
    fn single_skip_block_is_accepted_and_spans(
        layers in prop::collection::vec(1usize..=3, 3..=5),
        pick in any::<prop::sample::Index>(),
        tb in tie_breaks(),
    ) {
        let n = layers.len();
        let skips: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 2..n).map(move |b| (a, b))).collect();
        let skip = *pick.get(&skips);
        let mut blocks: Vec<_> = (1..n).map(|l| (l - 1, l)).collect();
        blocks.push(skip);
        let g = graph_with(&layers, &blocks);
        let r = RefNet::new(&layers, &blocks);
        let out = hbps(&g, &tb);
        // A skip block that starts at the input and ends at the output is
        // its own substructure; any other skip overlaps the chain and the
        // resulting independent paths share a transition.
        if skip == (0, n - 1) {
            let out = out.unwrap();
            let chain = RefNet::layered(&layers);
            let direct = RefNet::layered(&[layers[0], layers[n - 1]]);
            prop_assert_eq!(out.cardinality, chain.m() - chain.hidden() + direct.m());
            prop_assert_eq!(out.cardinality, out.expected_cardinality());
            let rows: Vec<Vec<i64>> = out.basis.paths().map(|p| r.indicator_of(p)).collect();
            prop_assert_eq!(oracle_rank(&rows), out.cardinality);
            let targets: Vec<Vec<i64>> = r.paths().iter().map(|p| r.indicator(p)).collect();
            prop_assert!(oracle_in_span(&rows, &targets).into_iter().all(|x| x));
            prop_assert_eq!(out.basis.len(), out.cardinality);
            prop_assert_eq!(hbps_scheduled(&g, &tb, Schedule::Parallel(3)).unwrap(), out);
        } else {
            prop_assert!(matches!(out, Err(basis_paths::hbps::HbpsError::RejectedSharedEdges(_))));
        }
        prop_assert!(g.enumerate_paths(DEFAULT_PATH_LIMIT).is_ok());
    }
}
