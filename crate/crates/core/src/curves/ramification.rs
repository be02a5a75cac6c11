use super::SpectralCurve;
use crate::arith::Q;
use crate::error::{Error, Result};
use crate::series::Series1;
use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;
use std::collections::HashMap;

static CACHE: Lazy<RwLock<HashMap<String, RamificationData>>> = Lazy::new(|| RwLock::new(HashMap::new()));

/// Simple ramification points of `x` with their local involutions.
#[derive(Clone, Debug)]
pub struct RamificationData {
    pub points: Vec<Q>,
    /// `sigma_i(t)` with `z = beta_i + t`, known through `t^order`.
    pub involutions: Vec<Series1>,
    /// `x''(beta_i) / 2`, nonzero for simple ramification.
    pub quadratic: Vec<Q>,
    pub order: i64,
}

impl RamificationData {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Local involution at a simple zero `beta` of `x'`.
fn involution(c: &SpectralCurve, beta: &Q, order: i64) -> Result<(Series1, Q)> {
    let x = c.x.increment_at(beta, order + 2)?;
    let a2 = x.coeff(2);
    if a2.is_zero() {
        return Err(Error::HigherOrderRamification(crate::arith::fmt_q(beta)));
    }
    let normalized = x.shift(-2).scale(&a2.recip());
    let phi = normalized.sqrt()?.shift(1);
    let inv = phi.reversion()?;
    let sigma = inv.compose(&(-&phi))?;
    Ok((sigma.truncate(order), a2))
}

/// Finds all ramification points (rational zeros of `dx`) and expands involutions to `order`.
/// An unramified `x` yields empty data.
pub fn ramification(c: &SpectralCurve, order: i64) -> Result<RamificationData> {
    let key = c.x.describe();
    if let Some(r) = CACHE.read().get(&key) {
        if r.order >= order {
            return Ok(r.truncated(order));
        }
    }
    let r = compute(c, order)?;
    CACHE.write().insert(key, r.clone());
    Ok(r)
}

impl RamificationData {
    fn truncated(&self, order: i64) -> RamificationData {
        RamificationData {
            points: self.points.clone(),
            involutions: self.involutions.iter().map(|s| s.truncate(order)).collect(),
            quadratic: self.quadratic.clone(),
            order,
        }
    }
}

fn compute(c: &SpectralCurve, order: i64) -> Result<RamificationData> {
    let dx = c.dx();
    let (roots, rest) = dx.num.rational_roots();
    if rest.degree() > 0 {
        return Err(Error::UnsupportedCurve(format!(
            "{}: dx has irrational zeros; only rational ramification points are supported",
            c.name
        )));
    }
    let mut points = Vec::new();
    let mut involutions = Vec::new();
    let mut quadratic = Vec::new();
    for (beta, mult) in roots {
        if mult > 1 {
            return Err(Error::HigherOrderRamification(crate::arith::fmt_q(&beta)));
        }
        if c.dy().order_at(&beta) != 0 {
            return Err(Error::UnsupportedCurve(format!(
                "{}: dy is singular or vanishes at a ramification point",
                c.name
            )));
        }
        let (s, a2) = involution(c, &beta, order)?;
        points.push(beta);
        involutions.push(s);
        quadratic.push(a2);
    }
    Ok(RamificationData { points, involutions, quadratic, order })
}
