//! Correlators of the swapped curve through the x-y duality: cycle sums, connected graph
//! sums, and the general bicoloured graph sum with dual correlators from recursion.

pub mod connected;
mod correction;
mod ctx;
pub mod enumerate;
mod general;

pub use correction::{dual_correction, DualCorrection};

use crate::arith::{q, qr, Q};
use crate::curves::{KernelType, SpectralCurve};
use crate::error::{Error, Result};
use crate::series::{Jet, Mono, MultiSeries};
use ctx::Ctx;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Tr,
    XyCycles,
    XyGraphs,
    XyGeneral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Tr => "tr",
            Method::XyCycles => "xy-cycles",
            Method::XyGraphs => "xy-graphs",
            Method::XyGeneral => "xy-general",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "tr" => Ok(Method::Tr),
            "xy-cycles" => Ok(Method::XyCycles),
            "xy-graphs" => Ok(Method::XyGraphs),
            "xy-general" => Ok(Method::XyGeneral),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

pub(crate) fn check_stable(g: usize, n: usize) -> Result<()> {
    if n == 0 || 2 * g + n < 3 {
        return Err(Error::InvalidArgument(format!("(g, n) = ({g}, {n}) is not stable")));
    }
    Ok(())
}

/// `W_{g,n}` as a jet at `base`, by the chosen method.
pub fn correlator(curve: &SpectralCurve, g: usize, n: usize, method: Method, base: &[Q], order: usize) -> Result<Jet> {
    match method {
        Method::Tr => {
            check_stable(g, n)?;
            if base.len() != n {
                return Err(Error::InvalidArgument(format!("need {n} base points, got {}", base.len())));
            }
            crate::tr::omega(curve, g, n)?.w_jet(curve, base, order)
        }
        Method::XyCycles => xy_cycles(curve, g, n, base, order),
        Method::XyGraphs => xy_graphs(curve, g, n, base, order),
        Method::XyGeneral => xy_general(curve, g, n, base, order),
    }
}

/// The dual side must be unramified: `y` a Möbius function of `z`, or `+-log z`.
fn require_simple_dual(curve: &SpectralCurve) -> Result<KernelType> {
    let k = curve.kernel_type()?;
    if k == KernelType::Linear {
        let y = &curve.y.rational;
        if y.num.degree() > 1 || y.den.degree() > 1 {
            return Err(Error::UnsupportedCurve(format!(
                "{}: y is not a global coordinate; use xy-general",
                curve.name
            )));
        }
    }
    Ok(k)
}

/// Factor `1/(a_i + b_j)` of the Cauchy matrix, times `Z_i` in the exponential case.
fn cauchy_entry(c: &Ctx, ys: &[MultiSeries], i: usize, j: usize) -> Result<MultiSeries> {
    let what = format!("{} and {}", ctx::fmt_var(i), ctx::fmt_var(j));
    match c.kernel {
        KernelType::Linear => {
            let h = c.mono(&[(c.h(), 1), (c.u(i), 1)], qr(1, 2)).add(&c.mono(&[(c.h(), 1), (c.u(j), 1)], qr(1, 2)));
            let d = ys[i].sub(&ys[j]).add(&h);
            c.inverse(&d, &what)
        }
        KernelType::Exponential => {
            let a = c.mulf(&ys[i], &c.exp_hu(i, qr(1, 2))?);
            let b = c.mulf(&ys[j], &c.exp_hu(j, qr(-1, 2))?);
            Ok(c.mulf(&ys[i], &c.inverse(&a.sub(&b), &what)?))
        }
    }
}

/// `P_ij - 1` where `P_ij` is the pair factor of the Cauchy determinant.
fn edge(c: &Ctx, ys: &[MultiSeries], i: usize, j: usize) -> Result<MultiSeries> {
    let what = format!("{} and {}", ctx::fmt_var(i), ctx::fmt_var(j));
    match c.kernel {
        KernelType::Linear => {
            let dl = ys[i].sub(&ys[j]);
            let s = c.mono(&[(c.h(), 1), (c.u(i), 1)], qr(1, 2)).add(&c.mono(&[(c.h(), 1), (c.u(j), 1)], qr(1, 2)));
            let den = c.mulf(&dl, &dl).sub(&c.mulf(&s, &s));
            let num = c.mono(&[(c.h(), 2), (c.u(i), 1), (c.u(j), 1)], q(1));
            Ok(c.mulf(&num, &c.inverse(&den, &what)?))
        }
        KernelType::Exponential => {
            let ai = c.mulf(&ys[i], &c.exp_hu(i, qr(1, 2))?);
            let aj = c.mulf(&ys[j], &c.exp_hu(j, qr(1, 2))?);
            let bi = c.mulf(&ys[i], &c.exp_hu(i, qr(-1, 2))?).neg();
            let bj = c.mulf(&ys[j], &c.exp_hu(j, qr(-1, 2))?).neg();
            let num = c.mulf(&ai.sub(&aj), &bi.sub(&bj));
            let den = c.mulf(&ai.add(&bj), &aj.add(&bi));
            Ok(c.mulf(&num.sub(&den), &c.inverse(&den, &what)?))
        }
    }
}

fn y_coordinates(c: &Ctx) -> Result<Vec<MultiSeries>> {
    (0..c.n).map(|i| c.y_coordinate(i)).collect()
}

fn exponents(c: &mut Ctx) -> Result<Vec<MultiSeries>> {
    (0..c.n).map(|i| c.exponent(i, &[])).collect()
}

/// `prod_i D_i / (hbar u_i)`.
fn one_point_factors(c: &Ctx) -> MultiSeries {
    let mut m = Mono::zero();
    let mut acc = c.constant(q(1));
    for i in 0..c.n {
        m.0[c.h()] -= 1;
        m.0[c.u(i)] -= 1;
        acc = acc.mul(&c.diagonal(i));
    }
    acc.mul_mono(&m, &q(1))
}

/// `W_{g,n}` from the connected cycle sum.
pub fn xy_cycles(curve: &SpectralCurve, g: usize, n: usize, base: &[Q], order: usize) -> Result<Jet> {
    check_stable(g, n)?;
    require_simple_dual(curve)?;
    let cycles = enumerate::n_cycles(n)?;
    let target = (2 * g + n) as i64 - 2;
    let mut c = Ctx::new(curve, n, base, order, target, 0)?;
    let ys = y_coordinates(&c)?;
    let t = if n == 1 {
        one_point_factors(&c)
    } else {
        let mut entries = std::collections::HashMap::new();
        let mut sum = c.ring().zero_like();
        for cyc in &cycles {
            let mut prod = c.constant(q(1));
            for (i, &j) in cyc.iter().enumerate() {
                if !entries.contains_key(&(i, j)) {
                    entries.insert((i, j), cauchy_entry(&c, &ys, i, j)?);
                }
                prod = c.mulf(&prod, &entries[&(i, j)]);
            }
            sum.add_assign(&prod);
        }
        if n % 2 == 0 {
            sum = sum.neg();
        }
        sum
    };
    let a = exponents(&mut c)?;
    c.apply(t, &a)
}

/// `W_{g,n}` from the sum over connected simple graphs with edge weights `P_ij - 1`.
pub fn xy_graphs(curve: &SpectralCurve, g: usize, n: usize, base: &[Q], order: usize) -> Result<Jet> {
    check_stable(g, n)?;
    require_simple_dual(curve)?;
    let graphs = enumerate::connected_graphs(n)?;
    let target = (2 * g + n) as i64 - 2;
    let mut c = Ctx::new(curve, n, base, order, target, n as i64)?;
    let ys = y_coordinates(&c)?;
    let mut edges = std::collections::HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.insert((i, j), edge(&c, &ys, i, j)?);
        }
    }
    let mut sum = c.ring().zero_like();
    for gr in &graphs {
        let mut prod = c.constant(q(1));
        for e in gr {
            prod = c.mulf(&prod, &edges[e]);
        }
        sum.add_assign(&prod);
    }
    let t = c.mulf(&sum, &one_point_factors(&c));
    let a = exponents(&mut c)?;
    c.apply(t, &a)
}

/// Connected sum over bicoloured graphs with dual correlators from recursion on the
/// swapped curve.
pub fn xy_general(curve: &SpectralCurve, g: usize, n: usize, base: &[Q], order: usize) -> Result<Jet> {
    check_stable(g, n)?;
    general::evaluate(curve, g, n, base, order)
}

/// `[hbar^{2g}]` of the dual one-point operator applied to `1`, as a jet in one variable.
/// For a curve whose dual one-point family makes the wave function annihilated by the
/// quantum curve, this vanishes for every `g >= 1`.
pub fn one_point_residual(curve: &SpectralCurve, g: usize, base: &Q, order: usize) -> Result<Jet> {
    let mut c = Ctx::new(curve, 1, std::slice::from_ref(base), order, 2 * g as i64, 0)?;
    let a = exponents(&mut c)?;
    let t = c.constant(q(1));
    c.apply(t, &a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::curves::preset;
    use crate::series::default_base_points;

    #[test]
    fn airy_one_point() {
        let c = preset("airy", &[]).unwrap();
        let b = [q(2)];
        let j = xy_cycles(&c, 1, 1, &b, 1).unwrap();
        // -1/(32 z^5) at z = 2.
        assert_eq!(j.value(), qr(-1, 1024));
        let t = correlator(&c, 1, 1, Method::Tr, &b, 1).unwrap();
        assert_eq!(j, t);
    }

    #[test]
    fn airy_three_point() {
        let c = preset("airy", &[]).unwrap();
        let b = [q(1), q(2), q(3)];
        let j = xy_cycles(&c, 0, 3, &b, 0).unwrap();
        assert_eq!(j.value(), qr(-1, 3456));
    }

    #[test]
    fn cycles_match_tr_small() {
        for (name, params) in [("lambert-exp", vec![]), ("vertex", vec![("f", q(1))]), ("gw-p1", vec![("t", q(1))])] {
            let c = preset(name, &params).unwrap();
            for (g, n) in [(1, 1), (0, 3), (1, 2)] {
                let b = default_base_points(n);
                let x = xy_cycles(&c, g, n, &b, 2).unwrap();
                let t = correlator(&c, g, n, Method::Tr, &b, 2).unwrap();
                assert_eq!(x, t, "{name} ({g},{n})");
            }
        }
    }

    #[test]
    fn graphs_match_cycles() {
        let c = preset("gw-p1", &[("t", q(2))]).unwrap();
        let b = default_base_points(3);
        assert_eq!(xy_graphs(&c, 0, 3, &b, 1).unwrap(), xy_cycles(&c, 0, 3, &b, 1).unwrap());
    }

    #[test]
    fn cubic_needs_general() {
        let c = preset("cubic", &[]).unwrap();
        assert!(matches!(xy_cycles(&c, 1, 1, &[q(2)], 1), Err(Error::UnsupportedCurve(_))));
    }

    #[test]
    fn unstable_rejected() {
        let c = preset("airy", &[]).unwrap();
        assert!(matches!(xy_cycles(&c, 0, 2, &[q(1), q(2)], 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn method_names() {
        for m in [Method::Tr, Method::XyCycles, Method::XyGraphs, Method::XyGeneral] {
            assert_eq!(Method::parse(m.as_str()).unwrap(), m);
        }
    }
}
