//! Fixtures shared by the benchmarks.

use anosov_core::{holonomy, shear_family, FGParams, Functional, Representation, SquareMatrix};

/// Holonomy of the shear family over the unit structure.
pub fn pants(t: f64) -> Representation {
    holonomy(&shear_family(t, &FGParams::unit())).expect("holonomy").rep
}

pub fn alpha_sum() -> Functional {
    Functional::from_roots(1.0, 1.0)
}

/// A fixed well-conditioned 3x3 matrix with distinct singular values.
pub fn sample_matrix() -> SquareMatrix {
    SquareMatrix::new3([[2.0, 0.3, -1.1], [0.7, 1.5, 0.2], [-0.4, 0.9, 3.1]])
}

/// The weighted transfer pattern of the `abc` coding at `t`.
pub fn abc_weights(t: f64) -> [f64; 6] {
    let p = shear_family(t, &FGParams::unit());
    anosov_core::pants::transfer_weights(&p, &alpha_sum()).expect("weights")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(pants(4.0).dim(), 3);
        assert!(abc_weights(2.0).iter().all(|&w| w > 0.0));
        assert!(sample_matrix().det().abs() > 1.0);
    }
}
