//! Fractional momentum translations by Fourier interpolation.
//!
//! A column of momentum samples is treated as one period of a band-limited
//! function. Translating it by `a` is a position-diagonal phase `exp(i a x / hbar)`
//! between a forward and an inverse DFT, which is exactly unitary on the grid.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::states::{MomentumGrid, EDGE_GUARD_AMPLITUDE, GUARD_BAND_FRACTION};
use crate::{Error, Result, C64};

pub(crate) struct MomentumShifter {
    n: usize,
    dp: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
}

impl MomentumShifter {
    pub(crate) fn new(grid: &MomentumGrid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n: grid.n(),
            dp: grid.dp(),
            forward,
            inverse,
            scratch: vec![C64::new(0.0, 0.0); scratch_len],
        }
    }

    /// Signed frequency index of DFT bin `m`.
    fn signed(&self, m: usize) -> f64 {
        if m < self.n.div_ceil(2) {
            m as f64
        } else {
            m as f64 - self.n as f64
        }
    }

    /// Replace `col[k] = f(p_k)` by `f(p_k - shift)`.
    ///
    /// Content in the outer band of the conjugate position window is aliased
    /// by the translation; the estimated aliasing error (outer-band amplitude
    /// times `|exp(2 pi i shift/dp) - 1|`) must stay below the edge-guard
    /// amplitude.
    pub(crate) fn shift(&mut self, col: &mut [C64], shift: f64) -> Result<()> {
        debug_assert_eq!(col.len(), self.n);
        if shift == 0.0 {
            return Ok(());
        }
        self.forward.process_with_scratch(col, &mut self.scratch);

        let unit = 1.0 / (self.n as f64).sqrt();
        let band = (0.5 - GUARD_BAND_FRACTION) * self.n as f64;
        let wrap_error = 2.0 * (PI * shift / self.dp).sin().abs();
        for (m, value) in col.iter().enumerate() {
            let freq = self.signed(m);
            if freq.abs() > band {
                let amplitude = value.norm() * unit;
                if amplitude * wrap_error > EDGE_GUARD_AMPLITUDE {
                    return Err(Error::EdgeGuard {
                        context: "momentum shift (position window)".into(),
                        location: -freq * 2.0 * PI / (self.n as f64 * self.dp),
                        amplitude,
                    });
                }
            }
        }

        let samples = shift / self.dp;
        let inv_n = 1.0 / self.n as f64;
        for (m, value) in col.iter_mut().enumerate() {
            let angle = -2.0 * PI * self.signed(m) * samples / self.n as f64;
            *value *= C64::from_polar(inv_n, angle);
        }
        self.inverse.process_with_scratch(col, &mut self.scratch);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_column(grid: &MomentumGrid, center: f64, width: f64) -> Vec<C64> {
        (0..grid.n())
            .map(|i| {
                let p = grid.point(i);
                C64::new((-(p - center).powi(2) / (2.0 * width * width)).exp(), 0.0)
            })
            .collect()
    }

    #[test]
    fn fractional_shift_matches_resampling() {
        let grid = MomentumGrid::new(-10.0, 10.0, 256).unwrap();
        let mut col = gaussian_column(&grid, 0.3, 1.0);
        let mut shifter = MomentumShifter::new(&grid);
        shifter.shift(&mut col, 0.8137).unwrap();
        let expected = gaussian_column(&grid, 0.3 + 0.8137, 1.0);
        let err = col
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err}");
    }

    #[test]
    fn shift_is_unitary() {
        let grid = MomentumGrid::new(-8.0, 8.0, 128).unwrap();
        let mut col: Vec<C64> = gaussian_column(&grid, -1.0, 0.7)
            .into_iter()
            .enumerate()
            .map(|(i, v)| v * C64::from_polar(1.0, 0.37 * i as f64))
            .collect();
        let before: f64 = col.iter().map(|v| v.norm_sqr()).sum();
        let mut shifter = MomentumShifter::new(&grid);
        shifter.shift(&mut col, 0.61).unwrap();
        let after: f64 = col.iter().map(|v| v.norm_sqr()).sum();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn wrapped_position_content_is_rejected() {
        let grid = MomentumGrid::new(-8.0, 8.0, 64).unwrap();
        // A position far outside the window: phase ramp close to Nyquist.
        let x0 = 0.97 * PI / grid.dp();
        let mut col: Vec<C64> = gaussian_column(&grid, 0.0, 1.0)
            .into_iter()
            .enumerate()
            .map(|(i, v)| v * C64::from_polar(1.0, -grid.point(i) * x0))
            .collect();
        let mut shifter = MomentumShifter::new(&grid);
        assert!(matches!(
            shifter.shift(&mut col, 0.3),
            Err(Error::EdgeGuard { .. })
        ));
    }
}
