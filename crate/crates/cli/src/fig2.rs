//! Built-in reproduction of the decoherence-factor figure.
//!
//! SI parameters: `m_C = 1e-17 kg`, `(pi_B - pi_B') / Delta = 2e-6`. The
//! width `Delta` is not fixed by that ratio; `Delta = hbar / (1 um)` is used
//! and only sets the unit of seconds, since `|Gamma|` depends on `t / tau`
//! alone. Times are written in units of `tau` over `[0, 3 tau]`.

use crate::config::{parse_config, Scenario};

pub const FIG2_CONFIG: &str = "\
[params]
units = si
hbar = 1.054571817e-34
m_A = 1e-17
m_B = 1e-17
m_C = 1e-17

[state.B]
kind = gaussian
center = 0
width = 1.054571817e-28

[state.C]
center = 0
width = 1.054571817e-28

[times]
linspace = 0, 3, 301
unit = tau

[experiment]
kind = gamma_curve
pi_B = 2.109143634e-34
pi_B_prime = 0

[output]
name = fig2
";

pub fn fig2_scenario() -> Scenario {
    parse_config(FIG2_CONFIG).expect("built-in figure scenario parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::HBAR_SI;
    use crate::model::Model;

    #[test]
    fn derived_tau_matches_si_formula() {
        let s = fig2_scenario();
        let m = Model::build(&s).unwrap();
        let delta = s.state_c.width;
        let dpi = s.experiment.pi_b - s.experiment.pi_b_prime;
        assert!((dpi / delta - 2e-6).abs() < 1e-18);
        let tau_si = 2.0 * HBAR_SI * s.params.m_c / (dpi * delta);
        let tau = m.scales.time_from_model(m.tau.unwrap());
        assert!((tau / tau_si - 1.0).abs() < 1e-12, "{tau} vs {tau_si}");
        assert_eq!(m.times.len(), 301);
    }
}
