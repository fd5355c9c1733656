//! Fixed instances for the solver benchmarks.

use beamgame_core::channel::{build_channels, place_sensors, PhaseModel, Scenario};
use beamgame_core::linalg::HermitianMatrix;
use beamgame_core::{RandomStream, WeightedInstance};
use num_complex::Complex64;

/// Reference scenario with `sensors` sensors, `antennas` antennas and random phases.
pub fn scenario(sensors: usize, antennas: usize) -> Scenario {
    Scenario {
        sensors,
        antennas,
        phase_model: PhaseModel::Uniform,
        ..Scenario::default()
    }
}

/// Max-min instance drawn from `scenario(sensors, antennas)`.
pub fn instance(sensors: usize, antennas: usize, seed: u64) -> WeightedInstance {
    let sc = scenario(sensors, antennas);
    let mut s = RandomStream::new(seed, 0);
    let pos = place_sensors(&sc, &mut s).expect("placement");
    let ch = build_channels(&sc, &pos, &mut s).expect("channels");
    WeightedInstance::from_channels(&ch).expect("instance")
}

/// Dense Hermitian matrix with entries uniform in the unit square.
pub fn hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut s = RandomStream::new(seed, 0);
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = Complex64::new(s.uniform_range(-1.0, 1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(s.uniform_range(-1.0, 1.0), s.uniform_range(-1.0, 1.0));
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    HermitianMatrix::new(n, a).expect("hermitian")
}
