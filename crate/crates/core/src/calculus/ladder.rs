use serde::{Deserialize, Serialize};

use crate::curve::Interval;
use crate::error::{Error, Result};

/// Geometric scales `t_j = t0·ratio^j`, `j = 0..steps`, standing in for
/// `t → 0⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub t0: f64,
    pub ratio: f64,
    pub steps: usize,
}

impl Ladder {
    pub fn new(t0: f64, ratio: f64, steps: usize) -> Result<Self> {
        let l = Ladder { t0, ratio, steps };
        l.validate()?;
        Ok(l)
    }

    /// `t0 = (b − a)/100`, halving, 20 steps.
    pub fn default_for(domain: Interval) -> Self {
        Ladder {
            t0: 1e-2 * domain.len(),
            ratio: 0.5,
            steps: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidLadder(format!(
                "t0 must be positive, got {}",
                self.t0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidLadder(format!(
                "ratio must lie in (0, 1), got {}",
                self.ratio
            )));
        }
        if self.steps < 4 {
            return Err(Error::InvalidLadder(format!(
                "at least 4 steps needed, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn scale(&self, j: usize) -> f64 {
        self.t0 * self.ratio.powi(j as i32)
    }

    pub fn scales(&self) -> Vec<f64> {
        (0..self.steps).map(|j| self.scale(j)).collect()
    }

    pub fn finest(&self) -> f64 {
        self.scale(self.steps - 1)
    }

    /// Index of the first scale used for the limit estimates; coarser scales
    /// only feed the diagnostics table.
    pub fn tail_start(&self) -> usize {
        self.steps / 2
    }

    /// Errors when the finest scale is too small for `x + t` to be
    /// distinguishable from `x` with useful relative accuracy.
    pub fn check_resolvable(&self, x: f64) -> Result<()> {
        let floor = 1e3 * f64::EPSILON * x.abs().max(1.0);
        if self.finest() < floor {
            return Err(Error::LadderUnresolvable {
                scale: self.finest(),
                x,
            });
        }
        Ok(())
    }
}

impl std::str::FromStr for Ladder {
    type Err = Error;

    /// Parses `t0:ratio:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidLadder(format!("expected t0:ratio:steps, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let t0 = parts[0].trim().parse().map_err(|_| bad())?;
        let ratio = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Ladder::new(t0, ratio, steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_scales() {
        let l = Ladder::default_for(Interval::new(-1.0, 1.0).unwrap());
        assert_eq!(l.t0, 0.02);
        assert_eq!(l.scales().len(), 20);
        assert_eq!(l.scale(3), 0.02 / 8.0);
        assert_eq!(l.tail_start(), 10);
    }

    #[test]
    fn validation() {
        assert!(Ladder::new(0.0, 0.5, 10).is_err());
        assert!(Ladder::new(1.0, 1.0, 10).is_err());
        assert!(Ladder::new(1.0, 0.5, 3).is_err());
        assert!(matches!(
            Ladder::new(1.0, 0.5, 60).unwrap().check_resolvable(0.0),
            Err(Error::LadderUnresolvable { .. })
        ));
        Ladder::new(1.0, 0.5, 40)
            .unwrap()
            .check_resolvable(0.0)
            .unwrap();
        assert!(Ladder::new(1.0, 0.5, 40)
            .unwrap()
            .check_resolvable(1e6)
            .is_err());
    }

    #[test]
    fn parse() {
        let l: Ladder = "0.01:0.5:20".parse().unwrap();
        assert_eq!(l, Ladder::new(0.01, 0.5, 20).unwrap());
        assert!("0.01:0.5".parse::<Ladder>().is_err());
        assert!("a:0.5:20".parse::<Ladder>().is_err());
    }
}
