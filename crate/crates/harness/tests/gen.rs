use ifc_core::cg::CgCtx;
use ifc_core::fg::FgCtx;
use ifc_core::Lattice;
use ifc_harness::gen::{CgGen, FgGen};

fn lattices() -> Vec<Lattice> {
    vec![Lattice::two_point(), Lattice::powerset(["a", "b"]).unwrap()]
}

#[test]
fn fg_programs_are_well_typed() {
    for lat in lattices() {
        let mut made = 0;
        let mut total = 0;
        for seed in 0..2000u64 {
            let mut g = FgGen::new(&lat, seed);
            let goal = g.random_type(2, true);
            let pc = g.src.label();
            if let Some(e) = g.program(&FgCtx::new(), pc, &goal, 40) {
                made += 1;
                total += e.size();
            }
        }
        assert!(made > 1500, "only {made} programs generated");
        assert!(total / made > 5, "programs are too small on average");
    }
}

#[test]
fn cg_programs_are_well_typed() {
    for lat in lattices() {
        let mut made = 0;
        let mut total = 0;
        for seed in 0..2000u64 {
            let mut g = CgGen::new(&lat, seed);
            let goal = g.random_type(2, true);
            if let Some(e) = g.program(&CgCtx::new(), &goal, 40) {
                made += 1;
                total += e.size();
            }
        }
        assert!(made > 1500, "only {made} programs generated");
        assert!(total / made > 5, "programs are too small on average");
    }
}

#[test]
fn generation_is_deterministic() {
    let lat = Lattice::two_point();
    for seed in 0..50u64 {
        let run = || {
            let mut g = FgGen::new(&lat, seed);
            let goal = g.random_type(2, true);
            g.program(&FgCtx::new(), lat.bot(), &goal, 30)
        };
        assert_eq!(run(), run());
        let run = || {
            let mut g = CgGen::new(&lat, seed);
            let goal = g.random_type(2, true);
            g.program(&CgCtx::new(), &goal, 30)
        };
        assert_eq!(run(), run());
    }
}
