//! Characteristic scales for SI scenarios.
//!
//! SI inputs are divided by a momentum scale `P` (the width of A's initial
//! state), a mass scale `M = m_C` and the action `hbar`, which fixes the time
//! scale `t0 = M hbar / P^2`. In those units `hbar = m_C = 1` and the
//! numbers stay of order one even for `m_C = 1e-17 kg`. Natural-unit
//! scenarios use unit scales, so the model values are the inputs.

use crate::config::{Scenario, Units};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scales {
    pub momentum: f64,
    pub mass: f64,
    pub action: f64,
}

impl Scales {
    pub fn unit() -> Self {
        Self {
            momentum: 1.0,
            mass: 1.0,
            action: 1.0,
        }
    }

    pub fn for_scenario(s: &Scenario) -> Self {
        match s.params.units {
            Units::Natural => Self::unit(),
            Units::Si => Self {
                momentum: s.state_c.width,
                mass: s.params.m_c,
                action: s.params.hbar,
            },
        }
    }

    pub fn time(&self) -> f64 {
        self.mass * self.action / (self.momentum * self.momentum)
    }

    pub fn momentum_to_model(&self, p: f64) -> f64 {
        p / self.momentum
    }

    pub fn mass_to_model(&self, m: f64) -> f64 {
        m / self.mass
    }

    pub fn action_to_model(&self, h: f64) -> f64 {
        h / self.action
    }

    pub fn time_to_model(&self, t: f64) -> f64 {
        t / self.time()
    }

    pub fn time_from_model(&self, t: f64) -> f64 {
        t * self.time()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::HBAR_SI;

    #[test]
    fn decoherence_time_is_invariant_under_rescaling() {
        let s = Scales {
            momentum: HBAR_SI / 1e-6,
            mass: 1e-17,
            action: HBAR_SI,
        };
        let (dpi, width, m_c) = (2e-6 * s.momentum, s.momentum, 1e-17);
        let tau_si = 2.0 * HBAR_SI * m_c / (dpi * width);
        let tau_model = 2.0 * s.action_to_model(HBAR_SI) * s.mass_to_model(m_c)
            / (s.momentum_to_model(dpi) * s.momentum_to_model(width));
        assert!((s.time_from_model(tau_model) / tau_si - 1.0).abs() < 1e-12);
        assert!((tau_model - 1e6).abs() < 1e-6);
    }

    #[test]
    fn unit_scales_are_identity() {
        let s = Scales::unit();
        assert_eq!(s.time(), 1.0);
        assert_eq!(s.time_to_model(3.5), 3.5);
    }
}
