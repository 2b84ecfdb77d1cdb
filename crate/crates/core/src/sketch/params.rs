use serde::Serialize;

use crate::error::{Error, Result};

/// Inputs and derived constants of the degree-capped sketch.
///
/// `degree_cap` bounds the number of sets kept per element and `edge_budget`
/// is the number of edges at which the hash threshold stops growing. Both are
/// derived from `(n, k, eps, delta2, m_hint)` unless overridden with
/// [`with_limits`](SketchParams::with_limits).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SketchParams {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub delta2: f64,
    pub m_hint: u64,
    pub delta: f64,
    pub degree_cap: u64,
    pub edge_budget: u64,
}

pub const DEFAULT_M_HINT: u64 = 2;

impl SketchParams {
    pub fn new(n: usize, k: usize, eps: f64, delta2: f64, m_hint: Option<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("sketch needs n >= 1"));
        }
        if k == 0 {
            return Err(Error::param("sketch needs k >= 1"));
        }
        if !(eps > 0.0 && eps <= 0.2) {
            return Err(Error::param(format!("eps {eps} not in (0, 1/5]")));
        }
        if !(delta2 >= 1.0 && delta2.is_finite()) {
            return Err(Error::param(format!("delta2 {delta2} must be a finite value >= 1")));
        }
        let m_hint = m_hint.unwrap_or(DEFAULT_M_HINT).max(DEFAULT_M_HINT);
        let delta = delta_for(delta2, eps, m_hint);
        let log_inv_eps = (1.0 / eps).ln();
        let k_eff = k.min(n) as f64;
        let nf = n as f64;
        let degree_cap = ceil_u64(nf * log_inv_eps / (eps * k_eff)).max(1);
        let edge_budget = ceil_u64(
            24.0 * nf * delta * log_inv_eps * (n.max(2) as f64).ln()
                / ((1.0 - eps) * eps * eps * eps),
        )
        .max(1);
        Ok(Self {
            n,
            k,
            eps,
            delta2,
            m_hint,
            delta,
            degree_cap,
            edge_budget,
        })
    }

    /// Replaces the derived cap and budget with explicit values.
    pub fn with_limits(mut self, degree_cap: u64, edge_budget: u64) -> Result<Self> {
        if degree_cap == 0 || edge_budget == 0 {
            return Err(Error::param("degree cap and edge budget must be >= 1"));
        }
        self.degree_cap = degree_cap;
        self.edge_budget = edge_budget;
        Ok(self)
    }

    /// Upper bound on retained edges held by the streaming builder.
    pub fn working_bound(&self) -> u64 {
        self.edge_budget.saturating_add(self.degree_cap)
    }
}

/// `delta2 * max(1, ln(2 + ln m / ln(1/(1-eps))))`.
pub fn delta_for(delta2: f64, eps: f64, m_hint: u64) -> f64 {
    let grid = (m_hint.max(2) as f64).ln() / (1.0 / (1.0 - eps)).ln();
    delta2 * (2.0 + grid).ln().max(1.0)
}

fn ceil_u64(x: f64) -> u64 {
    // `as` saturates on overflow and maps NaN to 0.
    x.ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants_match_formulas() {
        let p = SketchParams::new(10, 3, 0.2, 1.0, Some(1000)).unwrap();
        let delta = (2.0 + 1000f64.ln() / (1.0f64 / 0.8).ln()).ln();
        assert!((p.delta - delta).abs() < 1e-12);
        let cap = (10.0 * 5f64.ln() / (0.2 * 3.0)).ceil() as u64;
        assert_eq!(p.degree_cap, cap);
        assert_eq!(cap, 27);
        let budget =
            (24.0 * 10.0 * delta * 5f64.ln() * 10f64.ln() / (0.8 * 0.008)).ceil() as u64;
        assert_eq!(p.edge_budget, budget);
    }

    #[test]
    fn k_is_clamped_to_n() {
        let a = SketchParams::new(4, 100, 0.1, 1.0, None).unwrap();
        let b = SketchParams::new(4, 4, 0.1, 1.0, None).unwrap();
        assert_eq!(a.degree_cap, b.degree_cap);
    }

    #[test]
    fn delta_floor_is_delta2() {
        // ln(2 + small) < 1 is lifted to 1.
        assert_eq!(delta_for(3.0, 0.7, 2), 3.0);
        assert!(delta_for(3.0, 0.2, 2) > 3.0);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(SketchParams::new(4, 2, 0.25, 1.0, None).is_err());
        assert!(SketchParams::new(4, 2, 0.0, 1.0, None).is_err());
        assert!(SketchParams::new(4, 2, 0.1, 0.5, None).is_err());
        assert!(SketchParams::new(0, 2, 0.1, 1.0, None).is_err());
        assert!(SketchParams::new(4, 2, 0.1, 1.0, None)
            .unwrap()
            .with_limits(0, 3)
            .is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            SketchParams::new(50, 5, 0.1, 2.0, Some(10_000)).unwrap(),
            SketchParams::new(50, 5, 0.1, 2.0, Some(10_000)).unwrap()
        );
    }
}
