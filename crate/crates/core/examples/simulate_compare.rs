//! Monte Carlo MMSE SINR against the analytic CDF.

use coxnet::analytic::{IntensityModel, SystemParams};
use coxnet::cli::simulate_model;
use coxnet::mmse::sup_deviation_from_model;
use coxnet::sim::{Gain, DEFAULT_BIAS_TOL};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 10, alpha: 4.0, noise: 1e-12, link_distance: 10.0 };
    let m = IntensityModel::power_law(0.023, -0.5);
    let (emp, window) = simulate_model(&m, &p, Gain::PowerLaw(p.alpha), 20_000, 1, DEFAULT_BIAS_TOL)?;
    println!("window radius {:.1}, far-field power {:.3e}, discarded {}", window.outer_radius, window.far_field_power, emp.discarded);
    println!("median SINR {:.3}, 10% quantile {:.3}", emp.quantile(0.5), emp.quantile(0.1));
    println!("sup deviation from the analytic CDF: {:.4}", sup_deviation_from_model(&emp, &p, &m)?);
    Ok(())
}
