use crate::arith::bernoulli_half;
use crate::curves::{LogRationalFunction, SpectralCurve};
use crate::error::Result;
use crate::series::RationalFunction1;

/// One-point dual correlator `W^vee_{g,1}` in the `z`-chart.
#[derive(Clone, Debug, PartialEq)]
pub enum DualCorrection {
    /// Genus zero: `x` itself.
    Leading(LogRationalFunction),
    Rational(RationalFunction1),
}

/// `W^vee_{0,1} = x` and, for `g >= 1`, `b_g (d/dy)^{2g} x` when the form carries the
/// Bernoulli correction (zero otherwise).
pub fn dual_correction(curve: &SpectralCurve, g: usize) -> Result<DualCorrection> {
    if g == 0 {
        return Ok(DualCorrection::Leading(curve.x.clone()));
    }
    if !curve.bernoulli_correction() {
        return Ok(DualCorrection::Rational(RationalFunction1::zero()));
    }
    let dy = curve.dy();
    let mut d = curve.dx().div(&dy)?;
    for _ in 1..2 * g {
        d = d.derivative().div(&dy)?;
    }
    Ok(DualCorrection::Rational(d.scale(&bernoulli_half(g))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qr};
    use crate::curves::preset;

    #[test]
    fn lambert_exp_genus_one() {
        let c = preset("lambert-exp", &[]).unwrap();
        let DualCorrection::Rational(r) = dual_correction(&c, 1).unwrap() else { panic!() };
        assert_eq!(r, RationalFunction1::monomial(qr(-1, 24), -2));
    }

    #[test]
    fn algebraic_vanishes() {
        let c = preset("airy", &[]).unwrap();
        assert_eq!(dual_correction(&c, 2).unwrap(), DualCorrection::Rational(RationalFunction1::zero()));
        assert_eq!(dual_correction(&c, 0).unwrap(), DualCorrection::Leading(c.x.clone()));
    }

    #[test]
    fn dilog_genus_two() {
        // x = log(-1-z), y = log z: (d/dy)^4 x is rational; check one value.
        let c = preset("dilog", &[]).unwrap();
        let DualCorrection::Rational(r) = dual_correction(&c, 2).unwrap() else { panic!() };
        let dy = c.dy();
        let mut d = c.dx().div(&dy).unwrap();
        for _ in 0..3 {
            d = d.derivative().div(&dy).unwrap();
        }
        assert_eq!(r.eval(&q(1)).unwrap(), d.eval(&q(1)).unwrap() * qr(7, 5760));
    }
}
