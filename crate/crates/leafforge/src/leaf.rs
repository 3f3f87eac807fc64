//! Realizability of a surface class as a closed leaf of a foliation: the
//! Milnor inequality gate plus a bounded search for a distribution whose
//! Euler classes satisfy the two leaf equations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{
    euler_from_pair, solve_pairs_with, CharacteristicPair, EulerComponent, EulerPair,
    ManifoldModel, SearchOutcome, SideConstraint, SolveOptions,
};
use crate::error::{Error, Result};
use crate::lattice::ClassVector;

/// An integer homology class together with the genus of the representing
/// surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceClass {
    pub cls: ClassVector,
    pub genus: i64,
}

impl SurfaceClass {
    pub fn new(cls: ClassVector, genus: i64) -> Self {
        SurfaceClass { cls, genus }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus
    }
}

/// The four verified equalities/inequalities behind a certificate, stored as
/// exact values so the record re-verifies from raw data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafChecks {
    pub kplus_square: i64,
    pub kminus_square: i64,
    pub e1_pairing: i64,
    pub e2_pairing: i64,
    pub self_intersection: i64,
    pub milnor_margin: i64,
}

/// A witness that the surface class is realizable as a closed leaf. Stores the
/// raw K± pair so verification does not trust derived data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafCertificate {
    pub pair: CharacteristicPair,
    pub euler: EulerPair,
    pub checks: LeafChecks,
}

impl LeafCertificate {
    /// Re-verifies everything from scratch: both square equations, both leaf
    /// equations, the Milnor inequality and the mod-8 congruence.
    pub fn verify(&self, m: &ManifoldModel, surface: &SurfaceClass) -> Result<()> {
        self.pair.verify(m)?;
        let euler = euler_from_pair(&self.pair)?;
        if euler != self.euler {
            return Err(Error::InvalidInput(
                "stored Euler pair does not match K± data".into(),
            ));
        }
        if !milnor_check(m, surface)? {
            return Err(Error::InvalidInput("Milnor inequality fails".into()));
        }
        let e1p = m.form.pair(&euler.e1, &surface.cls)?;
        let e2p = m.form.pair(&euler.e2, &surface.cls)?;
        let sq = m.form.square(&surface.cls)?;
        if e1p != surface.euler_characteristic() || e2p != sq {
            return Err(Error::InvalidInput("leaf equations fail".into()));
        }
        let expected = LeafChecks {
            kplus_square: m.form.square(&self.pair.kplus)?,
            kminus_square: m.form.square(&self.pair.kminus)?,
            e1_pairing: e1p,
            e2_pairing: e2p,
            self_intersection: sq,
            milnor_margin: surface.genus - 1 - sq.abs(),
        };
        if expected != self.checks {
            return Err(Error::InvalidInput("recorded checks do not re-verify".into()));
        }
        Ok(())
    }
}

/// `|[S]^2| <= g - 1`, the flat normal bundle obstruction. Genus 0 is outside
/// the inequality's hypotheses and is refused.
pub fn milnor_check(m: &ManifoldModel, surface: &SurfaceClass) -> Result<bool> {
    if surface.genus < 1 {
        return Err(Error::Unsupported(
            "Milnor inequality is implemented for genus >= 1 only".into(),
        ));
    }
    let sq = m.form.square(&surface.cls)?;
    Ok(sq.abs() <= surface.genus - 1)
}

/// Three-valued outcome: the bounded search cannot prove infeasibility, so a
/// fruitless scan is reported as undecided rather than as a refusal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeafOutcome {
    Realized(LeafCertificate),
    MilnorFail,
    ExhaustedWithinBound(i64),
}

/// Milnor gate, then a pair search with the two leaf equations
/// `<e1, [S]> = chi(S)` and `<e2, [S]> = [S]^2` as side constraints.
pub fn realize_leaf(m: &ManifoldModel, surface: &SurfaceClass, bound: i64) -> Result<LeafOutcome> {
    realize_leaf_with(m, surface, SolveOptions::new(bound).with_limit(1))
}

pub fn realize_leaf_with(
    m: &ManifoldModel,
    surface: &SurfaceClass,
    opts: SolveOptions,
) -> Result<LeafOutcome> {
    if !milnor_check(m, surface)? {
        return Ok(LeafOutcome::MilnorFail);
    }
    let sq = m.form.square(&surface.cls)?;
    let constraints = [
        SideConstraint {
            target: surface.cls.clone(),
            value: surface.euler_characteristic(),
            component: EulerComponent::E1,
        },
        SideConstraint {
            target: surface.cls.clone(),
            value: sq,
            component: EulerComponent::E2,
        },
    ];
    let opts = SolveOptions {
        limit: Some(opts.limit.unwrap_or(1)),
        ..opts
    };
    match solve_pairs_with(m, &constraints, opts)? {
        SearchOutcome::ExhaustedWithinBound(b) => Ok(LeafOutcome::ExhaustedWithinBound(b)),
        SearchOutcome::Found(pairs) => {
            let pair = pairs.into_iter().next().expect("non-empty witness list");
            let euler = euler_from_pair(&pair)?;
            let checks = LeafChecks {
                kplus_square: m.form.square(&pair.kplus)?,
                kminus_square: m.form.square(&pair.kminus)?,
                e1_pairing: m.form.pair(&euler.e1, &surface.cls)?,
                e2_pairing: m.form.pair(&euler.e2, &surface.cls)?,
                self_intersection: sq,
                milnor_margin: surface.genus - 1 - sq.abs(),
            };
            let cert = LeafCertificate { pair, euler, checks };
            cert.verify(m, surface)?;
            Ok(LeafOutcome::Realized(cert))
        }
    }
}

/// Per-genus outcomes for `genus = 1..=gmax` on a fixed class.
pub fn genus_spectrum(
    m: &ManifoldModel,
    cls: &ClassVector,
    gmax: i64,
    bound: i64,
) -> Result<BTreeMap<i64, LeafOutcome>> {
    if gmax < 1 {
        return Err(Error::InvalidInput("gmax must be at least 1".into()));
    }
    let mut out = BTreeMap::new();
    for genus in 1..=gmax {
        let surface = SurfaceClass::new(cls.clone(), genus);
        out.insert(genus, realize_leaf(m, &surface, bound)?);
    }
    Ok(out)
}
