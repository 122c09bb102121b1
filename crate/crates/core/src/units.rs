//! Unit convention: ħ = 1, frequencies and energies in cm⁻¹, time in
//! (cm⁻¹)⁻¹, temperatures in kelvin.

/// Boltzmann constant in cm⁻¹/K.
pub const BOLTZMANN_CM_PER_K: f64 = 0.6950348;

/// Inverse temperature β = 1/(k_B T) in cm. Returns `None` at T = 0.
pub fn beta(temperature_k: f64) -> Option<f64> {
    if temperature_k > 0.0 {
        Some(1.0 / (BOLTZMANN_CM_PER_K * temperature_k))
    } else {
        None
    }
}

/// Bose–Einstein occupation n_β(ω) = 1/(e^{βω} − 1) for ω > 0.
pub fn bose_occupation(beta: f64, omega: f64) -> f64 {
    1.0 / (beta * omega).exp_m1()
}
