use qhlab::*;

fn main() -> qhlab::Result<()> {
    let grid = Grid::new(1024, 40.0)?;
    let cfg = PhysicsConfig::default();
    let psi0 = schrodinger::init_gaussian(&grid, &cfg, 1.0, 0.0, 0.0)?;
    let res = evolve(&psi0, &Potential::Free, &cfg, 1e-3, 2.0, 10)?;
    let (tf, psif) = res.final_state();

    for (label, psi) in [("t0", &psi0), ("t2", psif)] {
        let rho = madelung::density(psi);
        let (mask, _) = madelung::node_mask(&rho, 1e-12);
        let defect = madelung::enthalpy_defect(psi, &cfg);
        println!("{label}: enthalpy = {:.3e}", madelung::masked_linf(&defect, &rho, &mask, 1e-8));

        let fields = madelung::diagnostics(psi, &cfg, 0.0)?;
        let ops = spectral::SpectralOps::new(&grid);
        let lhs = madelung::bohm_force(&rho, &cfg);
        let w2 = madelung::rho_v_squared(&rho, &cfg);
        let dw2 = ops.derivative(&w2, 1);
        let mut worst = 0.0_f64;
        for j in 0..grid.n_points() {
            let r = rho.values()[j];
            if mask[j] && r > 1e-6 {
                let rhs = fields.force_local.values()[j] / cfg.mass - dw2.values()[j] / r;
                worst = worst.max((lhs.values()[j] - rhs).abs());
            }
        }
        println!("{label}: bohm partition = {worst:.3e}");
    }

    let psi_s = schrodinger::init_skewed_gaussian(&grid, &cfg, 1.0, 0.3, 1.0)?;
    let rho_s = madelung::density(&psi_s);
    let (mask_s, _) = madelung::node_mask(&rho_s, 1e-12);
    let d = madelung::enthalpy_defect(&psi_s, &cfg);
    println!("skewed: enthalpy = {:.3e}", madelung::masked_linf(&d, &rho_s, &mask_s, 1e-8));
    Ok(())
}
