//! Guard radius that maximizes spectral efficiency per unit area at a given
//! outage probability.

use coxnet::analytic::{optimize_guard_zone, SystemParams};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 5, alpha: 4.0, noise: 1e-14, link_distance: 5.0 };
    for target in [0.05, 0.1, 0.2] {
        let opt = optimize_guard_zone(&p, 0.05, target, 10.0, 101)?;
        println!("outage {target}: best guard radius {:.3}, {:.5} bit/s/Hz per unit area", opt.radius, opt.eta);
    }
    Ok(())
}
