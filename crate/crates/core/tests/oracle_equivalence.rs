use starcov_core::baseline::{conventional_gains, solve_conventional};
use starcov_core::noma::solve_noma;
use starcov_core::oma::solve_oma;
use starcov_core::oracle::{oracle_noma, oracle_noma_on, oracle_oma, oracle_oma_on};
use starcov_core::{effective_gain, generate_channel, Access, Surface, SystemParams};

#[test]
fn star_solvers_match_oracles() {
    let p = SystemParams::default();
    for seed in 0..6 {
        let g = effective_gain(&generate_channel(&p, seed).unwrap());
        let n = solve_noma(&g, &p).unwrap();
        let on = oracle_noma(&g, &p, 128).unwrap();
        let o = solve_oma(&g, &p).unwrap();
        let oo = oracle_oma(&g, &p, 128).unwrap();
        println!("seed {seed}: noma {} oracle {} slack {} | oma {} oracle {} slack {}", n.d0, on.d0, on.slack, o.d0, oo.d0, oo.slack);
        assert!(n.d0 >= on.d0 - 1e-9);
        assert!(n.d0 - on.d0 <= on.slack);
        assert!(o.d0 >= oo.d0 - 1e-9);
        assert!(o.d0 - oo.d0 <= oo.slack);
    }
}

#[test]
fn conventional_solvers_match_oracles() {
    let p = SystemParams::default();
    for seed in 0..6 {
        let g = conventional_gains(&p, seed).unwrap();
        let n = solve_conventional(Access::Noma, &g, &p).unwrap();
        let on = oracle_noma_on(Surface::Conventional, &g, &p, 256).unwrap();
        let o = solve_conventional(Access::Oma, &g, &p).unwrap();
        let oo = oracle_oma_on(Surface::Conventional, &g, &p, 256).unwrap();
        println!("seed {seed}: noma {} oracle {} slack {} | oma {} oracle {} slack {}", n.d0, on.d0, on.slack, o.d0, oo.d0, oo.slack);
        assert!(n.d0 >= on.d0 - 1e-9);
        assert!(n.d0 - on.d0 <= on.slack);
        assert!(o.d0 >= oo.d0 - 1e-9);
        assert!(o.d0 - oo.d0 <= oo.slack);
    }
}
