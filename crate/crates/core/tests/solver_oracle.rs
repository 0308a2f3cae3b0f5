//! Solver results against the cut-enumeration oracle on random instances.

mod common;

use common::{seeded, RawInstance};
use maxflow::bk::bk_solve;
use maxflow::ppr::{ppr_solve, PprSelection};

#[test]
fn bk_matches_brute_force() {
    let mut rng = seeded(11);
    for round in 0..500 {
        let inst = RawInstance::random(&mut rng, 10, 30, 10);
        let g = inst.graph(round % 2 == 0);
        let cut = bk_solve(&g);
        let expect = inst.brute_force_min_cut();
        assert_eq!(cut.flow_value, expect, "instance {round}: {inst:?}");
        assert_eq!(g.cut_capacity(&cut.side), cut.flow_value, "duality {round}");
    }
}

#[test]
fn ppr_matches_brute_force() {
    let mut rng = seeded(12);
    for round in 0..500 {
        let inst = RawInstance::random(&mut rng, 10, 30, 10);
        let expect = inst.brute_force_min_cut();
        for sel in [PprSelection::Fifo, PprSelection::HighestLabel] {
            let g = inst.graph(round % 2 == 1);
            let cut = ppr_solve(&g, sel, 1 + round % 7);
            assert_eq!(cut.flow_value, expect, "instance {round} {sel:?}: {inst:?}");
            assert_eq!(g.cut_capacity(&cut.side), cut.flow_value, "duality {round}");
        }
    }
}

#[test]
fn hpf_matches_brute_force_all_configs() {
    use maxflow::hpf::{hpf_solve, HpfConfig};
    let mut rng = seeded(13);
    for round in 0..500 {
        let inst = RawInstance::random(&mut rng, 10, 30, 10);
        let expect = inst.brute_force_min_cut();
        for cfg in HpfConfig::ALL {
            let g = inst.graph(round % 2 == 0);
            let cut = hpf_solve(&g, cfg);
            assert_eq!(cut.flow_value, expect, "instance {round} {cfg:?}: {inst:?}");
            assert_eq!(g.cut_capacity(&cut.side), cut.flow_value, "duality {round}");
        }
    }
}
