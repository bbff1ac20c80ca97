//! Cartan subspace of `sl(n)` for `n` in {2, 3}: vectors, linear functionals and
//! the opposition involution.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by [`CartanVector`] and [`Functional`] constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeylError {
    #[error("unsupported rank n = {0} (expected 2 or 3)")]
    UnsupportedRank(usize),
    #[error("expected {expected} coefficients, got {got}")]
    Length { expected: usize, got: usize },
    #[error("entries are not sorted in non-increasing order")]
    NotSorted,
    #[error("entries do not sum to zero (sum = {0:e})")]
    NotTraceless(f64),
    #[error("non-finite entry")]
    NonFinite,
    #[error("basis `{0}` is not available for n = {1}")]
    Basis(String, usize),
}

const SUM_TOL: f64 = 1e-9;

pub(crate) fn check_rank(n: usize) -> Result<(), WeylError> {
    match n {
        2 | 3 => Ok(()),
        _ => Err(WeylError::UnsupportedRank(n)),
    }
}

/// A point of the Cartan subspace `a = { x in R^n : sum x_i = 0 }`.
///
/// Vectors built by [`CartanVector::sorted`] live in the closed Weyl chamber.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CartanVector {
    n: usize,
    x: [f64; 3],
}

impl CartanVector {
    /// Traceless vector with arbitrary ordering.
    pub fn new(entries: &[f64]) -> Result<Self, WeylError> {
        check_rank(entries.len())?;
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(WeylError::NonFinite);
        }
        let sum: f64 = entries.iter().sum();
        let scale = entries.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if sum.abs() > SUM_TOL * scale {
            return Err(WeylError::NotTraceless(sum));
        }
        let mut x = [0.0; 3];
        x[..entries.len()].copy_from_slice(entries);
        Ok(Self { n: entries.len(), x })
    }

    /// Traceless vector whose entries are non-increasing.
    pub fn sorted(entries: &[f64]) -> Result<Self, WeylError> {
        let v = Self::new(entries)?;
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(WeylError::NotSorted);
        }
        Ok(v)
    }

    /// Projects an arbitrary vector onto the trace-zero hyperplane.
    pub fn centered(entries: &[f64]) -> Result<Self, WeylError> {
        check_rank(entries.len())?;
        let mean = entries.iter().sum::<f64>() / entries.len() as f64;
        let centered: Vec<f64> = entries.iter().map(|v| v - mean).collect();
        Self::new(&centered)
    }

    /// Trusted constructor for internal callers that already centered the input.
    pub(crate) fn from_raw(n: usize, x: [f64; 3]) -> Self {
        Self { n, x }
    }

    pub fn zero(n: usize) -> Result<Self, WeylError> {
        check_rank(n)?;
        Ok(Self { n, x: [0.0; 3] })
    }

    /// Vector whose root coordinates are `(d1, d2)`, i.e. `alpha_1(v) = d1` and
    /// `alpha_2(v) = d2`. This is the trace-zero dual of `d1*omega_1 + d2*omega_2`.
    pub fn from_weight_coords(d1: f64, d2: f64) -> Self {
        let c = [d1 + d2, d2, 0.0];
        let mean = (c[0] + c[1]) / 3.0;
        Self {
            n: 3,
            x: [c[0] - mean, c[1] - mean, c[2] - mean],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries()[i]
    }

    /// Opposition involution `(a_1, ..., a_n) -> (-a_n, ..., -a_1)`.
    pub fn opposition(&self) -> Self {
        let mut x = [0.0; 3];
        for i in 0..self.n {
            x[i] = -self.x[self.n - 1 - i];
        }
        Self { n: self.n, x }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut x = self.x;
        for (xi, yi) in x.iter_mut().zip(other.x.iter()) {
            *xi += yi;
        }
        Self { n: self.n, x }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut x = self.x;
        x.iter_mut().for_each(|v| *v *= s);
        Self { n: self.n, x }
    }

    pub fn norm(&self) -> f64 {
        self.entries().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Coordinates in the orthonormal basis `(1,-1,0)/sqrt 2`, `(1,1,-2)/sqrt 6` of the
    /// trace-zero plane (n = 3), or `((1,-1)/sqrt 2, 0)` for n = 2.
    pub fn plane_coords(&self) -> [f64; 2] {
        match self.n {
            2 => [(self.x[0] - self.x[1]) / 2f64.sqrt(), 0.0],
            _ => [
                (self.x[0] - self.x[1]) / 2f64.sqrt(),
                (self.x[0] + self.x[1] - 2.0 * self.x[2]) / 6f64.sqrt(),
            ],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|v| v.is_finite())
    }
}

impl fmt::Debug for CartanVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("CartanVector").field(&self.entries()).finish()
    }
}

impl TryFrom<Vec<f64>> for CartanVector {
    type Error = WeylError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(&v)
    }
}

impl From<CartanVector> for Vec<f64> {
    fn from(v: CartanVector) -> Self {
        v.entries().to_vec()
    }
}

/// The vector `R = e_1 - e_n`, which satisfies `omega_1(R) = 1`.
pub fn r_vector(n: usize) -> Result<CartanVector, WeylError> {
    check_rank(n)?;
    let mut x = [0.0; 3];
    x[0] = 1.0;
    x[n - 1] = -1.0;
    Ok(CartanVector::from_raw(n, x))
}

/// `R_eps = -log(sin eps) * R`.
pub fn r_epsilon(eps: f64, n: usize) -> Result<CartanVector, WeylError> {
    Ok(r_vector(n)?.scale(-eps.sin().ln()))
}

/// A linear functional on the Cartan subspace, stored by its coefficients in the
/// standard dual basis. Coefficient vectors that differ by a multiple of `(1,...,1)`
/// define the same functional.
#[derive(Clone, Copy, PartialEq)]
pub struct Functional {
    n: usize,
    c: [f64; 3],
}

impl Functional {
    pub fn raw(coeffs: &[f64]) -> Result<Self, WeylError> {
        check_rank(coeffs.len())?;
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(WeylError::NonFinite);
        }
        let mut c = [0.0; 3];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { n: coeffs.len(), c })
    }

    /// `c1*alpha_1 + c2*alpha_2` on `sl(3)`.
    pub fn from_roots(c1: f64, c2: f64) -> Self {
        Self {
            n: 3,
            c: [c1, c2 - c1, -c2],
        }
    }

    /// `d1*omega_1 + d2*omega_2` on `sl(3)`.
    pub fn from_weights(d1: f64, d2: f64) -> Self {
        Self {
            n: 3,
            c: [d1 + d2, d2, 0.0],
        }
    }

    /// Simple root `alpha_1 = a_1 - a_2`.
    pub fn alpha1(n: usize) -> Result<Self, WeylError> {
        check_rank(n)?;
        let mut c = [0.0; 3];
        c[0] = 1.0;
        c[1] = -1.0;
        Ok(Self { n, c })
    }

    /// Fundamental weight `omega_1 = a_1`.
    pub fn omega1(n: usize) -> Result<Self, WeylError> {
        check_rank(n)?;
        Ok(Self { n, c: [1.0, 0.0, 0.0] })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.n]
    }

    pub fn eval(&self, v: &CartanVector) -> f64 {
        debug_assert_eq!(self.n, v.dim());
        self.coeffs().iter().zip(v.entries()).map(|(a, b)| a * b).sum()
    }

    /// Representative with last coefficient zero.
    pub fn canonical(&self) -> Self {
        let last = self.c[self.n - 1];
        let mut c = self.c;
        c[..self.n].iter_mut().for_each(|v| *v -= last);
        Self { n: self.n, c }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && self
                .canonical()
                .coeffs()
                .iter()
                .zip(other.canonical().coeffs())
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// `phi o iota`.
    pub fn opposition(&self) -> Self {
        let mut c = [0.0; 3];
        for i in 0..self.n {
            c[i] = -self.c[self.n - 1 - i];
        }
        Self { n: self.n, c }
    }

    /// Root coordinates `(phi(e_1 - e_2), phi(e_2 - e_3))` of an `sl(3)` functional
    /// evaluated on the coroot basis.
    pub fn root_coords(&self) -> [f64; 2] {
        [self.c[0] - self.c[1], self.c[1] - self.c[2]]
    }

    /// True when `phi` is non-negative on the closed Weyl chamber.
    pub fn is_positive_on_chamber(&self) -> bool {
        let canon = self.canonical();
        // cone generators of the closed chamber are the fundamental coweights
        (1..self.n).all(|k| {
            let w: f64 = canon.c[..k].iter().sum::<f64>() * (self.n - k) as f64
                - canon.c[k..self.n].iter().sum::<f64>() * k as f64;
            w >= -1e-12
        }) && canon.coeffs().iter().any(|v| *v != 0.0)
    }
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Functional").field(&self.coeffs()).finish()
    }
}

/// Coordinate system of a [`FunctionalSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Roots,
    Weights,
    Raw,
}

/// Serialized form of a functional: `{"basis": "roots", "coeffs": [1, 1]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    pub basis: Basis,
    pub coeffs: Vec<f64>,
}

impl FunctionalSpec {
    pub fn resolve(&self, n: usize) -> Result<Functional, WeylError> {
        check_rank(n)?;
        let expect = |k: usize| {
            if self.coeffs.len() == k {
                Ok(())
            } else {
                Err(WeylError::Length {
                    expected: k,
                    got: self.coeffs.len(),
                })
            }
        };
        match (self.basis, n) {
            (Basis::Raw, _) => {
                expect(n)?;
                Functional::raw(&self.coeffs)
            }
            (Basis::Roots, 3) => {
                expect(2)?;
                Ok(Functional::from_roots(self.coeffs[0], self.coeffs[1]))
            }
            (Basis::Weights, 3) => {
                expect(2)?;
                Ok(Functional::from_weights(self.coeffs[0], self.coeffs[1]))
            }
            (Basis::Roots, _) => {
                expect(1)?;
                Functional::raw(&[self.coeffs[0], -self.coeffs[0]])
            }
            (Basis::Weights, _) => {
                expect(1)?;
                Functional::raw(&[self.coeffs[0], 0.0])
            }
        }
    }

    /// Parses the CLI shorthand `roots:1,1`, `weights:1,0` or `raw:1,0,-1`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (basis, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <basis>:<c1,c2,...>, got `{s}`"))?;
        let basis = match basis.trim() {
            "roots" => Basis::Roots,
            "weights" => Basis::Weights,
            "raw" => Basis::Raw,
            other => return Err(format!("unknown basis `{other}`")),
        };
        let coeffs = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { basis, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn root_and_weight_bases_agree() {
        let a = Functional::from_roots(1.0, 1.0);
        let b = Functional::from_weights(1.0, 1.0);
        assert!(a.approx_eq(&b, 1e-12));
        assert!(a.approx_eq(&Functional::raw(&[1.0, 0.0, -1.0]).unwrap(), 1e-12));
        assert!(b.approx_eq(&Functional::raw(&[2.0, 1.0, 0.0]).unwrap(), 1e-12));
        let c = Functional::from_roots(2.0, 1.0);
        assert!(c.approx_eq(&Functional::from_weights(3.0, 0.0), 1e-12));
    }

    #[test]
    fn r_epsilon_values() {
        let r = r_epsilon(0.1, 3).unwrap();
        let phi = Functional::from_roots(1.0, 1.0);
        assert_relative_eq!(phi.eval(&r), -2.0 * 0.1f64.sin().ln(), epsilon = 1e-14);
        assert_relative_eq!(phi.eval(&r), 4.6085, epsilon = 1e-4);
        let r2 = r_epsilon(std::f64::consts::FRAC_PI_2, 3).unwrap();
        assert_eq!(phi.eval(&r2), 0.0);
        assert_eq!(Functional::omega1(2).unwrap().eval(&r_vector(2).unwrap()), 1.0);
    }

    #[test]
    fn weight_coords_are_root_values() {
        let v = CartanVector::from_weight_coords(3.0, -1.5);
        assert_relative_eq!(Functional::from_roots(1.0, 0.0).eval(&v), 3.0, epsilon = 1e-14);
        assert_relative_eq!(Functional::from_roots(0.0, 1.0).eval(&v), -1.5, epsilon = 1e-14);
        let t = 0.7;
        let e = CartanVector::from_weight_coords(2.0 * t, 2.0 * t);
        assert_relative_eq!(e.get(0), 2.0 * t, epsilon = 1e-14);
        assert_relative_eq!(e.get(1), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(
            CartanVector::sorted(&[0.0, 1.0, -1.0]),
            Err(WeylError::NotSorted)
        ));
        assert!(matches!(
            CartanVector::new(&[1.0, 1.0]),
            Err(WeylError::NotTraceless(_))
        ));
        assert!(matches!(
            CartanVector::new(&[1.0; 4]),
            Err(WeylError::UnsupportedRank(4))
        ));
        assert!(CartanVector::new(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s = FunctionalSpec::parse("roots:1,1").unwrap();
        assert_eq!(s.basis, Basis::Roots);
        assert!(s.resolve(3).unwrap().approx_eq(&Functional::from_roots(1.0, 1.0), 0.0));
        assert!(FunctionalSpec::parse("roots").is_err());
        assert!(FunctionalSpec::parse("roots:1").unwrap().resolve(3).is_err());
        let j: FunctionalSpec = serde_json::from_str(r#"{"basis":"weights","coeffs":[1,0]}"#).unwrap();
        assert!(j.resolve(3).unwrap().approx_eq(&Functional::omega1(3).unwrap(), 0.0));
    }

    #[test]
    fn chamber_positivity() {
        assert!(Functional::from_roots(1.0, 1.0).is_positive_on_chamber());
        assert!(Functional::from_weights(1.0, 0.0).is_positive_on_chamber());
        assert!(!Functional::from_roots(1.0, -1.0).is_positive_on_chamber());
        assert!(Functional::alpha1(2).unwrap().is_positive_on_chamber());
    }

    proptest! {
        #[test]
        fn opposition_is_involution(a in -50.0..50.0f64, b in -50.0..50.0f64) {
            let v = CartanVector::centered(&[a, b, 0.0]).unwrap();
            let w = v.opposition().opposition();
            for i in 0..3 {
                prop_assert!((v.get(i) - w.get(i)).abs() < 1e-12);
            }
        }

        #[test]
        fn opposition_preserves_chamber(a in 0.0..30.0f64, b in 0.0..30.0f64) {
            let v = CartanVector::centered(&[a + b, b, 0.0]).unwrap();
            let o = v.opposition();
            prop_assert!(CartanVector::sorted(o.entries()).is_ok());
        }

        #[test]
        fn functional_opposition_is_adjoint(c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let phi = Functional::from_roots(c1, c2);
            let v = CartanVector::centered(&[a, b, 0.0]).unwrap();
            prop_assert!((phi.opposition().eval(&v) - phi.eval(&v.opposition())).abs() < 1e-10);
        }
    }
}
