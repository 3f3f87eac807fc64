//! Closed-form bounds and covering constructions for sections and
//! multisections of surface bundles, plus the factor-2 conversion between the
//! simplicial and genus-based semi-norms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fiber genus `h`, base genus `g`, multisection cardinality `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleShape {
    pub h: i64,
    pub g: i64,
    pub k: i64,
}

impl BundleShape {
    pub fn new(h: i64, g: i64, k: i64) -> Result<Self> {
        if h < 2 {
            return Err(Error::Hypothesis("fiber genus h must be at least 2".into()));
        }
        if g < 0 {
            return Err(Error::Hypothesis("base genus g must be non-negative".into()));
        }
        if k < 1 {
            return Err(Error::Hypothesis("multisection cardinality k must be at least 1".into()));
        }
        Ok(BundleShape { h, g, k })
    }
}

/// Data of a multisection produced by a covering construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultisectionData {
    pub cover_degree: i64,
    pub section_genus: i64,
    pub self_intersection: i64,
    pub euler_characteristic: i64,
}

/// Non-negative exact rational norm value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NormValue(BigRational);

impl NormValue {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidInput("norm values are non-negative".into()));
        }
        Ok(NormValue(value))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }
}

impl std::fmt::Display for NormValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `max{0, 2g - 2}`: self-intersection bound for a section over a genus-`g`
/// base (fiber genus >= 2).
pub fn section_bound(g: i64) -> Result<i64> {
    if g < 0 {
        return Err(Error::Hypothesis("base genus g must be non-negative".into()));
    }
    Ok((2 * g - 2).max(0))
}

/// `(2g - 2)(4gh + 2)`: universal bound for pure multisections.
pub fn pure_multisection_bound(g: i64, h: i64) -> Result<i64> {
    if g < 1 {
        return Err(Error::Hypothesis("base genus g must be at least 1".into()));
    }
    if h < 2 {
        return Err(Error::Hypothesis("fiber genus h must be at least 2".into()));
    }
    (2 * g - 2)
        .checked_mul(4 * g * h + 2)
        .ok_or(Error::Overflow)
}

/// The sup-norm of the vertical Euler class: exactly 1/2.
pub fn vertical_norm() -> NormValue {
    NormValue(ratio(1, 2))
}

/// `k/2`: sup-norm bound for the k-multisection class.
pub fn norm_bound_k(k: i64) -> Result<NormValue> {
    if k < 1 {
        return Err(Error::Hypothesis("k must be at least 1".into()));
    }
    Ok(NormValue(ratio(k, 2)))
}

/// Covering-trick multisection in `Sigma_h x Sigma_g` built from the genus-2
/// surface (chi = -2) covered along `Z_{g-1} x Z_{h-1}`.
pub fn covering_multisection(g: i64, h: i64) -> Result<MultisectionData> {
    if g < 2 || h < 2 {
        return Err(Error::Hypothesis("covering construction requires g, h >= 2".into()));
    }
    let degree = (g - 1).checked_mul(h - 1).ok_or(Error::Overflow)?;
    let euler = (-2i64).checked_mul(degree).ok_or(Error::Overflow)?;
    Ok(MultisectionData {
        cover_degree: degree,
        section_genus: 1 + degree,
        self_intersection: (2 - 2 * h).checked_mul(g - 1).ok_or(Error::Overflow)?,
        euler_characteristic: euler,
    })
}

/// Degree-`n` covers of the diagonal section of `Sigma_h x Sigma_h`; the case
/// where the section bound is attained: `|e| = 2 genus - 2`.
pub fn diagonal_cover_sequence(h: i64, n: i64) -> Result<MultisectionData> {
    if h < 2 {
        return Err(Error::Hypothesis("fiber genus h must be at least 2".into()));
    }
    if n < 1 {
        return Err(Error::Hypothesis("cover degree n must be at least 1".into()));
    }
    let e = n.checked_mul(2 * h - 2).ok_or(Error::Overflow)?;
    let genus = n.checked_mul(h - 1).and_then(|x| x.checked_add(1)).ok_or(Error::Overflow)?;
    Ok(MultisectionData {
        cover_degree: n,
        section_genus: genus,
        self_intersection: -e,
        euler_characteristic: 2 - 2 * genus,
    })
}

/// Per-bundle bound obtained by passing to the degree `N = k!` cover fixing
/// the marked points pointwise: `(2g - 2)(4(N(g - 1) + 1)h + 2)`. Exact big
/// integers throughout; `k = 1` recovers the pure bound.
pub fn factorial_cover_bound(g: i64, h: i64, k: i64) -> Result<BigInt> {
    if g < 1 {
        return Err(Error::Hypothesis("base genus g must be at least 1".into()));
    }
    if h < 2 {
        return Err(Error::Hypothesis("fiber genus h must be at least 2".into()));
    }
    if k < 1 {
        return Err(Error::Hypothesis("k must be at least 1".into()));
    }
    let mut n = BigInt::from(1);
    for i in 2..=k {
        n *= i;
    }
    let covered_pieces = BigInt::from(4) * (&n * BigInt::from(g - 1) + 1) * BigInt::from(h) + 2;
    Ok(BigInt::from(2 * g - 2) * covered_pieces)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormDirection {
    GtToL1,
    L1ToGt,
}

/// `||a||_1 = 2 ||a||_GT`: exact factor-2 conversion between the two degree-2
/// semi-norms.
pub fn gt_l1_convert(x: &NormValue, direction: NormDirection) -> NormValue {
    let two = ratio(2, 1);
    match direction {
        NormDirection::GtToL1 => NormValue(x.0.clone() * two),
        NormDirection::L1ToGt => NormValue(x.0.clone() / two),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn section_bound_examples() {
        assert_eq!(section_bound(2).unwrap(), 2);
        assert_eq!(section_bound(0).unwrap(), 0);
        assert_eq!(section_bound(1).unwrap(), 0);
        // Diagonal of Sigma_h x Sigma_h attains the bound.
        for h in 2..=10 {
            let d = diagonal_cover_sequence(h, 1).unwrap();
            assert_eq!(d.self_intersection.abs(), section_bound(h).unwrap());
        }
    }

    #[test]
    fn pure_bound_examples() {
        assert_eq!(pure_multisection_bound(2, 2).unwrap(), 36);
        assert_eq!(pure_multisection_bound(1, 5).unwrap(), 0);
        assert_eq!(pure_multisection_bound(3, 2).unwrap(), 104);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(vertical_norm().value(), &ratio(1, 2));
        assert_eq!(norm_bound_k(1).unwrap(), vertical_norm());
        assert_eq!(norm_bound_k(7).unwrap().value(), &ratio(7, 2));
        assert!(norm_bound_k(0).is_err());
    }

    #[test]
    fn covering_multisection_examples() {
        let d = covering_multisection(3, 2).unwrap();
        assert_eq!(d.cover_degree, 2);
        assert_eq!(d.section_genus, 3);
        assert_eq!(d.self_intersection, -4);
        assert_eq!(d.euler_characteristic.abs(), 4);

        let d = covering_multisection(2, 2).unwrap();
        assert_eq!(d.cover_degree, 1);
        assert_eq!(d.section_genus, 2);
        assert_eq!(d.self_intersection, -2);
    }

    #[test]
    fn diagonal_cover_examples() {
        let d = diagonal_cover_sequence(2, 1).unwrap();
        assert_eq!(d.self_intersection.abs(), 2);
        assert_eq!(d.section_genus, 2);

        let d = diagonal_cover_sequence(2, 100).unwrap();
        assert_eq!(d.self_intersection.abs(), 200);
        assert_eq!(d.section_genus, 101);

        let d = diagonal_cover_sequence(3, 5).unwrap();
        assert_eq!(d.self_intersection.abs(), 20);
        assert_eq!(d.section_genus, 11);
    }

    #[test]
    fn factorial_cover_examples() {
        assert_eq!(factorial_cover_bound(2, 2, 2).unwrap(), BigInt::from(52));
        assert!(factorial_cover_bound(1, 2, 5).unwrap().is_zero());
        assert_eq!(
            factorial_cover_bound(2, 2, 1).unwrap(),
            BigInt::from(pure_multisection_bound(2, 2).unwrap())
        );
    }

    #[test]
    fn gt_l1_examples() {
        let three = NormValue::new(ratio(3, 1)).unwrap();
        assert_eq!(gt_l1_convert(&three, NormDirection::GtToL1).value(), &ratio(6, 1));
        let zero = NormValue::new(ratio(0, 1)).unwrap();
        assert!(gt_l1_convert(&zero, NormDirection::L1ToGt).value().is_zero());
        let x = NormValue::new(ratio(17, 5)).unwrap();
        let rt = gt_l1_convert(&gt_l1_convert(&x, NormDirection::GtToL1), NormDirection::L1ToGt);
        assert_eq!(rt, x);
    }

    #[test]
    fn norm_value_rejects_negative() {
        assert!(NormValue::new(ratio(-1, 2)).is_err());
    }

    #[test]
    fn bundle_shape_validation() {
        assert!(BundleShape::new(2, 0, 1).is_ok());
        assert!(BundleShape::new(1, 2, 1).is_err());
        assert!(BundleShape::new(2, 2, 0).is_err());
    }
}
