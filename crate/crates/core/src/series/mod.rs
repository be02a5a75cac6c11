//! Truncated formal series: univariate Laurent series, sparse multivariate series,
//! univariate rational functions and jets.

pub mod jet;
pub mod multi;
pub mod ratfun;
pub mod series1;

pub use jet::{default_base_points, jet_expand, jittered_base_points, jet_ring, Jet, JetExpr};
pub use multi::{Constraint, Mono, MultiSeries, MAXV};
pub use ratfun::{Poly, RationalFunction1};
pub use series1::{Series1, EXACT};
