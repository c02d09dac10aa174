use crate::error::{Error, Result};

/// Two-tier comparison slack.
///
/// `eps_eq` is used for equalities (metric intervals, gates, exact
/// distances), `eps_feas` for feasibility of ball intersections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eps_feas: f64,
    pub eps_eq: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_feas: 1e-9, eps_eq: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(eps_feas: f64, eps_eq: f64) -> Result<Self> {
        if !(eps_eq > 0.0 && eps_eq <= eps_feas && eps_feas.is_finite()) {
            return Err(Error::InvalidTolerance { eps_feas, eps_eq });
        }
        Ok(Tolerance { eps_feas, eps_eq })
    }

    /// Slack used by half-plane clipping. Kept an order of magnitude below
    /// `eps_feas` so clipped witnesses still verify at `eps_feas`.
    pub fn clip(&self) -> f64 {
        self.eps_feas * 0.1
    }

    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps_eq
    }

    pub fn le_feas(&self, a: f64, b: f64) -> bool {
        a <= b + self.eps_feas
    }
}
