//! Cox-network CDFs: a Matérn cluster process seen from a receiver in one of
//! its clusters, and a Gaussian cluster with a random centre.

use coxnet::analytic::{cdf, CenterDistribution, IntensityModel, SystemParams};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 4, alpha: 4.0, noise: 1e-12, link_distance: 10.0 };
    let matern = IntensityModel::MaternClusterConditioned { parent_density: 1e-3, cluster_radius: 20.0, mean_daughters: 10.0 };
    let gaussian = IntensityModel::RandomCenterGaussianCluster { center: CenterDistribution::UniformDisk { radius: 300.0 }, width: 30.0, mean_points: 50.0 };
    println!("{:>10} {:>12} {:>12}", "SINR", "Matérn", "Gaussian");
    for k in 0..=8 {
        let sinr = 10f64.powf(-1.0 + 0.5 * k as f64);
        let g = p.to_gamma(sinr);
        println!("{sinr:>10.3} {:>12.6} {:>12.6}", cdf(&p, &matern, g)?, cdf(&p, &gaussian, g)?);
    }
    Ok(())
}
