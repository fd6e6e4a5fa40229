//! Interferer positions of a few strip-network realizations as CSV.

use coxnet::analytic::{IntensityModel, SystemParams};
use coxnet::sim::{sample_realization, saturation_gamma, validate_window, write_realizations_csv, Gain, DEFAULT_BIAS_TOL};

fn main() -> coxnet::Result<()> {
    let p = SystemParams { antennas: 4, alpha: 4.0, noise: 1e-12, link_distance: 10.0 };
    let m = IntensityModel::Strip { half_width: 5.0, density: 0.05 };
    let gain = Gain::PowerLaw(p.alpha);
    let w = validate_window(&m, &p, &gain, saturation_gamma(&m, &p, &gain)?, DEFAULT_BIAS_TOL)?;
    let reals = (0..3).map(|t| sample_realization(&m, &w, p.alpha, 42, t)).collect::<coxnet::Result<Vec<_>>>()?;
    write_realizations_csv(std::io::stdout().lock(), &reals)
}
