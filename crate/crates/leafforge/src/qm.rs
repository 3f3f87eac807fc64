//! Exact-rational calculus of homogeneous quasimorphism values on Dehn-twist
//! classes: lantern-relation reduction, the closed form for `phi_k`, Bavard
//! lower bounds and a step-by-step replay of the unboundedness contradiction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::NormValue;
use crate::error::{Error, Result};

/// Conjugacy class of a Dehn twist about a curve enclosing `k` boundary
/// components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwistClass {
    pub holes: u64,
}

impl TwistClass {
    pub fn new(holes: u64) -> Result<Self> {
        if holes == 0 {
            return Err(Error::Hypothesis("twist class needs at least one hole".into()));
        }
        Ok(TwistClass { holes })
    }
}

/// Three disjoint hole collections of sizes `a`, `b`, `c` feeding a lantern
/// relation on the 4-holed sphere that contains them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LanternInstance {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl LanternInstance {
    pub fn new(a: u64, b: u64, c: u64) -> Result<Self> {
        if a == 0 || b == 0 || c == 0 {
            return Err(Error::Hypothesis("hole collections must be non-empty".into()));
        }
        Ok(LanternInstance { a, b, c })
    }
}

/// `sum coeff_k * phi_k = 0` with integer coefficients, like terms merged,
/// content 1, and the coefficient of the largest index negative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearIdentity {
    pub coefficients: BTreeMap<u64, BigInt>,
}

impl LinearIdentity {
    fn from_terms(terms: impl IntoIterator<Item = (u64, BigInt)>) -> Self {
        let mut coefficients: BTreeMap<u64, BigInt> = BTreeMap::new();
        for (k, c) in terms {
            let entry = coefficients.entry(k).or_insert_with(BigInt::zero);
            *entry += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        // Normalize: primitive, and the top coefficient negative.
        let content = coefficients
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() && !content.is_one() {
            for c in coefficients.values_mut() {
                *c /= &content;
            }
        }
        if let Some((_, top)) = coefficients.iter().next_back() {
            if top.is_positive() {
                for c in coefficients.values_mut() {
                    *c = -c.clone();
                }
            }
        }
        LinearIdentity { coefficients }
    }

    pub fn coefficient(&self, k: u64) -> BigInt {
        self.coefficients.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Evaluates the left-hand side on an assignment `k -> phi_k`; the
    /// identity holds iff this is zero. Unassigned indices count as zero.
    pub fn evaluate(&self, values: &BTreeMap<u64, BigRational>) -> BigRational {
        self.coefficients
            .iter()
            .map(|(k, c)| {
                values
                    .get(k)
                    .map(|v| v * BigRational::from_integer(c.clone()))
                    .unwrap_or_else(BigRational::zero)
            })
            .sum()
    }
}

impl fmt::Display for LinearIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0 = 0");
        }
        let mut first = true;
        for (k, c) in &self.coefficients {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "phi{k}")?;
            } else {
                write!(f, "{a}*phi{k}")?;
            }
        }
        write!(f, " = 0")
    }
}

/// The generalized lantern identity for hole collections of sizes (a, b, c):
/// `phi_{a+b} + phi_{b+c} + phi_{a+c} - phi_a - phi_b - phi_c - phi_{a+b+c}
/// = 0`, with like terms merged.
pub fn lantern_reduce(l: LanternInstance) -> LinearIdentity {
    let LanternInstance { a, b, c } = l;
    LinearIdentity::from_terms([
        (a + b, BigInt::one()),
        (b + c, BigInt::one()),
        (a + c, BigInt::one()),
        (a, -BigInt::one()),
        (b, -BigInt::one()),
        (c, -BigInt::one()),
        (a + b + c, -BigInt::one()),
    ])
}

/// `phi_k` in terms of `phi_1` and `phi_2`:
/// `phi_k = k*phi_1 + C(k,2)*(phi_2 - 2*phi_1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub k: u64,
    pub phi1_coeff: BigInt,
    pub phi2_coeff: BigInt,
}

impl ClosedForm {
    /// As the identity `phi1_coeff*phi_1 + phi2_coeff*phi_2 - phi_k = 0`.
    pub fn identity(&self) -> LinearIdentity {
        LinearIdentity::from_terms([
            (1, self.phi1_coeff.clone()),
            (2, self.phi2_coeff.clone()),
            (self.k, -BigInt::one()),
        ])
    }

    pub fn evaluate(&self, phi1: &BigRational, phi2: &BigRational) -> BigRational {
        phi1 * BigRational::from_integer(self.phi1_coeff.clone())
            + phi2 * BigRational::from_integer(self.phi2_coeff.clone())
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "phi{} = {}*phi1 + {}*phi2",
            self.k, self.phi1_coeff, self.phi2_coeff
        )
    }
}

/// Closed form obtained by eliminating `phi_3 .. phi_{k-1}` from the
/// recurrence `phi_{k+1} = 2 phi_k - phi_{k-1} + phi_2 - 2 phi_1`, the
/// (1, 1, k-1) lantern instance. `C(k,2)` is computed exactly.
pub fn phi_closed_form(k: u64) -> Result<ClosedForm> {
    if k == 0 {
        return Err(Error::Hypothesis("twist class index must be positive".into()));
    }
    let kk = BigInt::from(k);
    let choose2 = (&kk * (&kk - 1)) / 2;
    Ok(ClosedForm {
        k,
        phi1_coeff: &kk - BigInt::from(2) * &choose2,
        phi2_coeff: choose2,
    })
}

/// `|phi(g)| / (2 D)`: the Bavard-duality lower bound for the stable
/// commutator length of `g`.
pub fn bavard_bound(phi_val: &BigRational, defect: &BigRational) -> Result<NormValue> {
    if !defect.is_positive() {
        return Err(Error::Hypothesis("defect must be positive".into()));
    }
    NormValue::new(phi_val.abs() / (BigRational::from_integer(BigInt::from(2)) * defect))
}

/// Normalized replay inputs: `x1 = phi(D1)/2D`, `x2 = phi(D2)/2D`, and the
/// hypothesized stable commutator length `c` of the one-hole twist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmAssignment {
    pub c: BigRational,
    pub x1: BigRational,
    pub x2: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PremiseViolation {
    #[error("premise failed: c must be positive")]
    CNotPositive,
    #[error("premise P1 failed: x1 < (15/16) c")]
    P1,
    #[error("premise P2 failed: x{k} > c")]
    P2 { k: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rel {
    Eq,
    Ge,
    Gt,
}

/// One exact-rational inequality in the certified chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayStep {
    pub claim: String,
    pub lhs: BigRational,
    pub rel: Rel,
    pub rhs: BigRational,
    pub justification: String,
}

impl ReplayStep {
    pub fn holds(&self) -> bool {
        match self.rel {
            Rel::Eq => self.lhs == self.rhs,
            Rel::Ge => self.lhs >= self.rhs,
            Rel::Gt => self.lhs > self.rhs,
        }
    }
}

impl fmt::Display for ReplayStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.rel {
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        };
        write!(f, "{}: {} {} {} [{}]", self.claim, self.lhs, rel, self.rhs, self.justification)
    }
}

/// The certified contradiction chain. `verify` re-checks every step from the
/// recorded exact values, independent of the derivation path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContradictionCertificate {
    pub steps: Vec<ReplayStep>,
}

impl ContradictionCertificate {
    pub fn verify(&self) -> bool {
        self.steps.iter().all(ReplayStep::holds)
    }

    /// The value certified at the linear-bracket step (iii).
    pub fn bracket_value(&self) -> &BigRational {
        &self.steps[2].lhs
    }
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Replays the contradiction: under P1 (`x1 >= (15/16) c`) and P2
/// (`x1, x2 <= c`), the regrouped value `|6 x2 - 8 x1|` is at least
/// `(24/16) c`, yet it lower-bounds a quantity that is at most `c`.
pub fn replay_unbound(
    q: &QmAssignment,
) -> std::result::Result<ContradictionCertificate, PremiseViolation> {
    if !q.c.is_positive() {
        return Err(PremiseViolation::CNotPositive);
    }
    let p1_floor = frac(15, 16) * &q.c;
    if q.x1 < p1_floor {
        return Err(PremiseViolation::P1);
    }
    if q.x1 > q.c {
        return Err(PremiseViolation::P2 { k: 1 });
    }
    if q.x2 > q.c {
        return Err(PremiseViolation::P2 { k: 2 });
    }

    let six = BigRational::from_integer(BigInt::from(6));
    let phi4 = (&six * &q.x2 - frac(8, 1) * &q.x1).abs();
    let bracket_linear = frac(2, 1) * &q.x1 - frac(6, 16) * &q.x2;
    let bracket_scaled = &q.x1 - frac(15, 16) * &q.x2;
    let floor = frac(24, 16) * &q.c;

    let steps = vec![
        ReplayStep {
            claim: "regrouping".into(),
            lhs: phi4.clone(),
            rel: Rel::Eq,
            rhs: &bracket_linear + &six * &bracket_scaled,
            justification: "|6 x2 - 8 x1| = (2 x1 - (6/16) x2) + 6 (x1 - (15/16) x2)".into(),
        },
        ReplayStep {
            claim: "scaled bracket non-negative".into(),
            lhs: bracket_scaled,
            rel: Rel::Ge,
            rhs: BigRational::zero(),
            justification: "x1 >= (15/16) c >= (15/16) x2 by P1 and P2(k=2)".into(),
        },
        ReplayStep {
            claim: "linear bracket floor".into(),
            lhs: bracket_linear,
            rel: Rel::Ge,
            rhs: floor.clone(),
            justification: "2 x1 >= (30/16) c and -(6/16) x2 >= -(6/16) c".into(),
        },
        ReplayStep {
            claim: "normalized phi(D4) floor".into(),
            lhs: phi4,
            rel: Rel::Ge,
            rhs: floor.clone(),
            justification: "sum of the two non-negative brackets dominates the first".into(),
        },
        ReplayStep {
            claim: "contradiction".into(),
            lhs: floor,
            rel: Rel::Gt,
            rhs: q.c.clone(),
            justification: "(24/16) c > c contradicts scl(D4) <= c".into(),
        },
    ];
    let cert = ContradictionCertificate { steps };
    debug_assert!(cert.verify());
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(pairs: &[(u64, i64)]) -> BTreeMap<u64, BigInt> {
        pairs.iter().map(|(k, c)| (*k, BigInt::from(*c))).collect()
    }

    #[test]
    fn lantern_111() {
        let id = lantern_reduce(LanternInstance::new(1, 1, 1).unwrap());
        assert_eq!(id.coefficients, coeffs(&[(1, -3), (2, 3), (3, -1)]));
    }

    #[test]
    fn lantern_112() {
        // phi4 = 2 phi3 - 2 phi1 once the phi2 terms cancel.
        let id = lantern_reduce(LanternInstance::new(1, 1, 2).unwrap());
        assert_eq!(id.coefficients, coeffs(&[(1, -2), (3, 2), (4, -1)]));
    }

    #[test]
    fn lantern_222_merges() {
        let id = lantern_reduce(LanternInstance::new(2, 2, 2).unwrap());
        assert_eq!(id.coefficients, coeffs(&[(2, -3), (4, 3), (6, -1)]));
    }

    #[test]
    fn lantern_symmetric() {
        let base = lantern_reduce(LanternInstance::new(1, 2, 3).unwrap());
        for (a, b, c) in [(1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)] {
            assert_eq!(lantern_reduce(LanternInstance::new(a, b, c).unwrap()), base);
        }
    }

    #[test]
    fn closed_form_base_cases() {
        let f1 = phi_closed_form(1).unwrap();
        assert_eq!((f1.phi1_coeff, f1.phi2_coeff), (BigInt::from(1), BigInt::from(0)));
        let f2 = phi_closed_form(2).unwrap();
        assert_eq!((f2.phi1_coeff, f2.phi2_coeff), (BigInt::from(0), BigInt::from(1)));
    }

    #[test]
    fn closed_form_displayed_relations() {
        let f3 = phi_closed_form(3).unwrap();
        assert_eq!((f3.phi1_coeff, f3.phi2_coeff), (BigInt::from(-3), BigInt::from(3)));
        let f4 = phi_closed_form(4).unwrap();
        assert_eq!((f4.phi1_coeff, f4.phi2_coeff), (BigInt::from(-8), BigInt::from(6)));
    }

    #[test]
    fn closed_form_matches_recurrence_oracle() {
        // Unroll phi_{k+1} = 2 phi_k - phi_{k-1} + phi_2 - 2 phi_1 on
        // symbolic (phi1, phi2) coefficients.
        let mut prev = (BigInt::from(1), BigInt::from(0));
        let mut cur = (BigInt::from(0), BigInt::from(1));
        for k in 3..=50u64 {
            let next = (
                BigInt::from(2) * &cur.0 - &prev.0 - BigInt::from(2),
                BigInt::from(2) * &cur.1 - &prev.1 + BigInt::from(1),
            );
            prev = cur;
            cur = next;
            let f = phi_closed_form(k).unwrap();
            assert_eq!((f.phi1_coeff, f.phi2_coeff), cur.clone(), "k = {k}");
        }
    }

    #[test]
    fn closed_form_solves_all_lanterns() {
        for a in 1..=10u64 {
            for b in a..=10 {
                for c in b..=10 {
                    let id = lantern_reduce(LanternInstance::new(a, b, c).unwrap());
                    let mut acc = (BigInt::from(0), BigInt::from(0));
                    for (k, coef) in &id.coefficients {
                        let f = phi_closed_form(*k).unwrap();
                        acc.0 += coef * f.phi1_coeff;
                        acc.1 += coef * f.phi2_coeff;
                    }
                    assert!(acc.0.is_zero() && acc.1.is_zero(), "({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn bavard_examples() {
        assert_eq!(
            bavard_bound(&frac(1, 1), &frac(1, 2)).unwrap().value(),
            &frac(1, 1)
        );
        assert_eq!(
            bavard_bound(&frac(0, 1), &frac(3, 7)).unwrap().value(),
            &frac(0, 1)
        );
        assert_eq!(
            bavard_bound(&frac(-3, 1), &frac(1, 1)).unwrap().value(),
            &frac(3, 2)
        );
        assert!(bavard_bound(&frac(1, 1), &frac(0, 1)).is_err());
    }

    #[test]
    fn bavard_homogeneous() {
        let base = bavard_bound(&frac(5, 3), &frac(7, 4)).unwrap();
        for (n, d) in [(2, 1), (1, 2), (13, 5)] {
            let s = frac(n, d);
            let scaled = bavard_bound(&(frac(5, 3) * &s), &(frac(7, 4) * &s)).unwrap();
            assert_eq!(scaled, base);
        }
    }

    #[test]
    fn replay_boundary_instance() {
        let q = QmAssignment {
            c: frac(1, 1),
            x1: frac(15, 16),
            x2: frac(1, 1),
        };
        let cert = replay_unbound(&q).unwrap();
        assert!(cert.verify());
        assert_eq!(cert.bracket_value(), &frac(3, 2));
    }

    #[test]
    fn replay_interior_instance() {
        let q = QmAssignment {
            c: frac(1, 1),
            x1: frac(1, 1),
            x2: frac(1, 1),
        };
        let cert = replay_unbound(&q).unwrap();
        assert!(cert.verify());
        // |6 - 8| = 2 dominates 3/2.
        assert_eq!(cert.steps[0].lhs, frac(2, 1));
    }

    #[test]
    fn replay_premise_violations() {
        let q = QmAssignment {
            c: frac(1, 1),
            x1: frac(1, 2),
            x2: frac(1, 1),
        };
        assert_eq!(replay_unbound(&q), Err(PremiseViolation::P1));

        let q = QmAssignment {
            c: frac(-1, 1),
            x1: frac(1, 1),
            x2: frac(1, 1),
        };
        assert_eq!(replay_unbound(&q), Err(PremiseViolation::CNotPositive));

        let q = QmAssignment {
            c: frac(1, 1),
            x1: frac(1, 1),
            x2: frac(3, 2),
        };
        assert_eq!(replay_unbound(&q), Err(PremiseViolation::P2 { k: 2 }));
    }
}
