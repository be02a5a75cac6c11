mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cauchy_determinant((a, b) in cauchy_inputs()) {
        cauchy_identity(&a, &b)?;
    }

    #[test]
    fn exp_and_log_invert(s in series(1)) {
        exp_log_round_trip(&s)?;
    }

    #[test]
    fn reversion_inverts(a in nonzero_rational(), rest in series(2)) {
        reversion_round_trip(&a, &rest)?;
    }

    #[test]
    fn derivatives_have_no_residue(s in series(-5)) {
        residue_of_derivative(&s)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tensors_scale_with_y(c in nonzero_rational(), pick in 0usize..20) {
        let cases = tensor_cases();
        let (curve, g, n) = &cases[pick % cases.len()];
        tensor_homogeneity(curve, *g, *n, &c)?;
    }
}

#[test]
fn tensors_are_symmetric() {
    for (c, g, n) in tensor_cases() {
        tensor_symmetry(&c, g, n).unwrap();
    }
}
