//! Analytic SINR CDF of an L-antenna MMSE receiver for several interferer
//! intensity models.

use coxnet::analytic::{cdf, cdf_power_law_closed_form, IntensityModel, SystemParams};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 10, alpha: 4.0, noise: 1e-12, link_distance: 10.0 };
    let models = [
        ("homogeneous ρ = 0.023", IntensityModel::power_law(0.023, 0.0)),
        ("power law 0.023·r^-0.5", IntensityModel::power_law(0.023, -0.5)),
        ("strip, half width 10", IntensityModel::Strip { half_width: 10.0, density: 0.023 }),
        ("disk cluster at 30, radius 10", IntensityModel::DiskCluster { center_distance: 30.0, radius: 10.0, density: 0.05 }),
    ];
    print!("{:>10}", "SINR");
    for (name, _) in &models {
        print!("  {name:>30}");
    }
    println!();
    for k in 0..=8 {
        let sinr = 10f64.powf(-1.0 + 0.5 * k as f64);
        print!("{sinr:>10.3}");
        for (_, m) in &models {
            print!("  {:>30.6}", cdf(&p, m, p.to_gamma(sinr))?);
        }
        println!();
    }
    let g = p.to_gamma(1.0);
    println!("closed form at SINR 1: {:.12}", cdf_power_law_closed_form(&p, 0.023, -0.5, g)?);
    Ok(())
}
