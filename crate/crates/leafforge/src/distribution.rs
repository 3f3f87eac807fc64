//! Existence of oriented 2-plane distributions and enumeration of witnessing
//! characteristic pairs (K+, K-) with their Euler classes (e1, e2).
//!
//! The search is a coset-restricted box enumeration: candidates run over the
//! characteristic coset intersected with `[-B, B]^rank`, in lexicographic
//! order, as a depth-first scan with sound interval pruning (a subtree is cut
//! only when the target square or a linear side constraint is provably
//! unreachable from the fixed prefix). Pruning never changes the emitted set
//! or its order.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_form, Block, ClassVector, IntersectionForm};

/// Arithmetic model of a closed oriented 4-manifold: intersection form plus
/// Euler characteristic. The signature is always computed from the form.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    pub name: String,
    pub form: IntersectionForm,
    pub chi: i64,
    pub sigma: i64,
}

impl ManifoldModel {
    pub fn new(name: impl Into<String>, form: IntersectionForm, chi: i64) -> Self {
        let sigma = form.signature();
        ManifoldModel {
            name: name.into(),
            form,
            chi,
            sigma,
        }
    }
}

/// A pair of characteristic vectors with prescribed squares
/// `K+^2 = 2chi + 3sigma`, `K-^2 = -2chi + 3sigma`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacteristicPair {
    pub kplus: ClassVector,
    pub kminus: ClassVector,
}

/// Euler classes of a distribution and its orthogonal complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerPair {
    pub e1: ClassVector,
    pub e2: ClassVector,
}

impl CharacteristicPair {
    /// Re-checks every invariant from raw data: both vectors characteristic,
    /// exact squares, even coordinatewise sum, and the mod-8 congruence.
    pub fn verify(&self, m: &ManifoldModel) -> Result<()> {
        let (tp, tm) = target_squares(m);
        if !m.form.is_characteristic(&self.kplus)? || !m.form.is_characteristic(&self.kminus)? {
            return Err(Error::NotCharacteristic);
        }
        let sp = m.form.square(&self.kplus)?;
        let sm = m.form.square(&self.kminus)?;
        if sp != tp || sm != tm {
            return Err(Error::InvalidInput(format!(
                "squares ({sp}, {sm}) do not match targets ({tp}, {tm})"
            )));
        }
        self.kplus.add(&self.kminus)?.half()?;
        if !m.form.van_der_blij_check(&self.kplus)? || !m.form.van_der_blij_check(&self.kminus)? {
            return Err(Error::InvalidInput("mod-8 congruence failed".into()));
        }
        Ok(())
    }

    pub fn euler(&self) -> Result<EulerPair> {
        euler_from_pair(self)
    }
}

/// `e1 = (K+ + K-)/2`, `e2 = (-K+ + K-)/2`; the division is exact by the
/// coordinatewise parity invariant.
pub fn euler_from_pair(p: &CharacteristicPair) -> Result<EulerPair> {
    let e1 = p.kplus.add(&p.kminus)?.half()?;
    let e2 = p.kplus.neg().add(&p.kminus)?.half()?;
    Ok(EulerPair { e1, e2 })
}

/// True iff `sigma == 0 mod 2` and `chi == sigma mod 4`. Stated only for
/// indefinite forms; definite input is refused rather than extrapolated.
pub fn distribution_exists(m: &ManifoldModel) -> Result<bool> {
    if !m.form.is_indefinite() {
        return Err(Error::Unsupported(
            "existence criterion requires an indefinite intersection form".into(),
        ));
    }
    Ok(m.sigma.rem_euclid(2) == 0 && (m.chi - m.sigma).rem_euclid(4) == 0)
}

/// `(2chi + 3sigma, -2chi + 3sigma)`.
pub fn target_squares(m: &ManifoldModel) -> (i64, i64) {
    (2 * m.chi + 3 * m.sigma, -2 * m.chi + 3 * m.sigma)
}

/// Which Euler class a side constraint pins down.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EulerComponent {
    E1,
    E2,
}

/// Requires `<e_i, target> = value` of every emitted pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideConstraint {
    pub target: ClassVector,
    pub value: i64,
    pub component: EulerComponent,
}

/// Search result: witnesses in lexicographic `(K+, K-)` order, or an honest
/// report that the box was exhausted. Exhaustion is never a claim of
/// infeasibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<CharacteristicPair>),
    ExhaustedWithinBound(i64),
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub bound: i64,
    /// Stop after this many pairs; `None` collects the whole stream.
    pub limit: Option<usize>,
    pub jobs: usize,
}

impl SolveOptions {
    pub fn new(bound: i64) -> Self {
        SolveOptions {
            bound,
            limit: None,
            jobs: 1,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

/// Enumerates characteristic pairs with the prescribed squares satisfying all
/// side constraints, restricted to the coset within `[-B, B]^rank`.
pub fn solve_pairs(
    m: &ManifoldModel,
    constraints: &[SideConstraint],
    bound: i64,
) -> Result<SearchOutcome> {
    solve_pairs_with(m, constraints, SolveOptions::new(bound))
}

/// A constraint on `e1`/`e2` paired against `v` translates to linear
/// conditions on `K+`/`K-` via `2 e1 = K+ + K-`, `2 e2 = -K+ + K-`. When both
/// Euler classes are constrained against the same vector, the conditions
/// decouple per side; a lone constraint couples the two searches and is
/// resolved in the inner scan once `K+` is fixed.
pub fn solve_pairs_with(
    m: &ManifoldModel,
    constraints: &[SideConstraint],
    opts: SolveOptions,
) -> Result<SearchOutcome> {
    if opts.bound < 0 {
        return Err(Error::InvalidInput("bound must be non-negative".into()));
    }
    for c in constraints {
        if c.target.len() != m.form.rank() {
            return Err(Error::DimensionMismatch {
                expected: m.form.rank(),
                got: c.target.len(),
            });
        }
    }
    let (tp, tm) = target_squares(m);
    let coset = m.form.characteristic_coset();
    let translated = translate_constraints(&m.form, constraints)?;

    let plus_problem = DfsProblem::new(&m.form, &coset.parity, opts.bound, tp, translated.plus);
    let minus_base = DfsProblem::new(&m.form, &coset.parity, opts.bound, tm, translated.minus);

    let pairs = if opts.jobs > 1 {
        search_parallel(&plus_problem, &minus_base, &translated.coupled, &opts)
    } else {
        let mut pairs = Vec::new();
        run_nested(
            &plus_problem,
            &minus_base,
            &translated.coupled,
            None,
            opts.limit,
            &mut pairs,
        );
        pairs
    };

    // Emitted pairs all re-verify; this is an internal consistency check.
    debug_assert!(pairs.iter().all(|p| p.verify(m).is_ok()));

    if pairs.is_empty() {
        Ok(SearchOutcome::ExhaustedWithinBound(opts.bound))
    } else {
        Ok(SearchOutcome::Found(pairs))
    }
}

/// Paper family on `diag(1,1,-1,-1)` with `chi = 4`, `sigma = 0`:
/// `K+ = (2t - s, 2y + 1, 2y - 1, 1)`, `K- = (2t + s, 2z + 1, 2z - 1, 1)` with
/// `y = (9 - (2t - s)^2)/8`, `z = (-7 - (2t + s)^2)/8`. Odd squares are 1 mod
/// 8, so the completion is integral for every odd `s`.
pub fn family_cp2(t: i64, s: i64) -> Result<CharacteristicPair> {
    if s.rem_euclid(2) != 1 {
        return Err(Error::NoIntegerCompletion(s));
    }
    let a = 2 * t - s;
    let b = 2 * t + s;
    let ynum = 9 - a * a;
    let znum = -7 - b * b;
    if ynum.rem_euclid(8) != 0 || znum.rem_euclid(8) != 0 {
        return Err(Error::NoIntegerCompletion(s));
    }
    let y = ynum / 8;
    let z = znum / 8;
    Ok(CharacteristicPair {
        kplus: ClassVector(vec![a, 2 * y + 1, 2 * y - 1, 1]),
        kminus: ClassVector(vec![b, 2 * z + 1, 2 * z - 1, 1]),
    })
}

/// The manifold carrying [`family_cp2`] solutions.
pub fn cp2_fixture() -> ManifoldModel {
    let form = build_form(&[Block::PlusOne, Block::PlusOne, Block::MinusOne, Block::MinusOne])
        .expect("fixed block list");
    ManifoldModel::new("2CP2 # 2CP2bar # S1xS3", form, 4)
}

/// Paper family on `(2g + 1) H` with `chi = sigma = 0`:
/// `K+ = (-2 - 2g, 0, -2 - 2g', 0, ..., 0)`, `K- = (2 - 2g, 0, 2 - 2g', 0,
/// ..., 0)`; both squares vanish under the hyperbolic pairing.
pub fn family_product(g: i64, gprime: i64) -> Result<CharacteristicPair> {
    if g < 2 {
        return Err(Error::Hypothesis("family requires base genus g >= 2".into()));
    }
    if gprime < 0 {
        return Err(Error::Hypothesis("g' must be non-negative".into()));
    }
    let rank = (2 * (2 * g + 1)) as usize;
    let mut kplus = vec![0i64; rank];
    let mut kminus = vec![0i64; rank];
    kplus[0] = -2 - 2 * g;
    kplus[2] = -2 - 2 * gprime;
    kminus[0] = 2 - 2 * g;
    kminus[2] = 2 - 2 * gprime;
    Ok(CharacteristicPair {
        kplus: ClassVector(kplus),
        kminus: ClassVector(kminus),
    })
}

/// `T^2 x Sigma_g` data: form `(2g + 1) H`, `chi = sigma = 0`.
pub fn product_fixture(g: i64) -> Result<ManifoldModel> {
    if g < 1 {
        return Err(Error::Hypothesis("product fixture requires g >= 1".into()));
    }
    let blocks = vec![Block::Hyperbolic; (2 * g + 1) as usize];
    Ok(ManifoldModel::new(
        format!("T2xSigma{g}"),
        build_form(&blocks)?,
        0,
    ))
}

struct TranslatedConstraints {
    /// Linear conditions on K+ alone: `w . K+ = value` with `w = Q v`.
    plus: Vec<LinearConstraint>,
    minus: Vec<LinearConstraint>,
    /// Conditions mixing both sides, resolved once K+ is fixed:
    /// `sign * (w . K+) + (w . K-) = 2 value`.
    coupled: Vec<CoupledConstraint>,
}

#[derive(Clone, Debug)]
struct LinearConstraint {
    weights: Vec<i64>,
    value: i128,
}

#[derive(Clone, Debug)]
struct CoupledConstraint {
    weights: Vec<i64>,
    doubled_value: i128,
    plus_sign: i128,
}

fn translate_constraints(
    form: &IntersectionForm,
    constraints: &[SideConstraint],
) -> Result<TranslatedConstraints> {
    let mut out = TranslatedConstraints {
        plus: Vec::new(),
        minus: Vec::new(),
        coupled: Vec::new(),
    };
    // Pair up one E1 with one E2 constraint on the same target vector; the
    // remainder stays coupled.
    let mut e1: Vec<&SideConstraint> = Vec::new();
    let mut e2: Vec<&SideConstraint> = Vec::new();
    for c in constraints {
        match c.component {
            EulerComponent::E1 => e1.push(c),
            EulerComponent::E2 => e2.push(c),
        }
    }
    let mut used = vec![false; e2.len()];
    for c1 in &e1 {
        if let Some(j) = e2
            .iter()
            .enumerate()
            .position(|(j, c2)| !used[j] && c2.target == c1.target)
        {
            used[j] = true;
            let w = weights(form, &c1.target)?;
            // K+ . v = r1 - r2, K- . v = r1 + r2.
            out.plus.push(LinearConstraint {
                weights: w.clone(),
                value: c1.value as i128 - e2[j].value as i128,
            });
            out.minus.push(LinearConstraint {
                weights: w,
                value: c1.value as i128 + e2[j].value as i128,
            });
        } else {
            out.coupled.push(CoupledConstraint {
                weights: weights(form, &c1.target)?,
                doubled_value: 2 * c1.value as i128,
                plus_sign: 1,
            });
        }
    }
    for (j, c2) in e2.iter().enumerate() {
        if !used[j] {
            out.coupled.push(CoupledConstraint {
                weights: weights(form, &c2.target)?,
                doubled_value: 2 * c2.value as i128,
                plus_sign: -1,
            });
        }
    }
    Ok(out)
}

fn weights(form: &IntersectionForm, v: &ClassVector) -> Result<Vec<i64>> {
    let n = form.rank();
    let mut w = vec![0i64; n];
    for (j, wj) in w.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for i in 0..n {
            acc = acc
                .checked_add((form.gram()[j][i] as i128) * (v.0[i] as i128))
                .ok_or(Error::Overflow)?;
        }
        *wj = i64::try_from(acc).map_err(|_| Error::Overflow)?;
    }
    Ok(w)
}

fn dot(w: &[i64], x: &[i64]) -> i128 {
    w.iter()
        .zip(x)
        .map(|(a, b)| (*a as i128) * (*b as i128))
        .sum()
}

/// Outer scan over K+ candidates; for each, an inner scan over K- with the
/// coupled constraints instantiated. The nesting preserves lexicographic
/// order on the pair.
fn run_nested(
    plus: &DfsProblem<'_>,
    minus_base: &DfsProblem<'_>,
    coupled: &[CoupledConstraint],
    first_range: Option<(i64, i64)>,
    limit: Option<usize>,
    pairs: &mut Vec<CharacteristicPair>,
) {
    let _ = plus.run(first_range, &mut |kp| {
        let extra: Vec<LinearConstraint> = coupled
            .iter()
            .map(|c| LinearConstraint {
                weights: c.weights.clone(),
                value: c.doubled_value - c.plus_sign * dot(&c.weights, kp),
            })
            .collect();
        let minus = minus_base.with_extra_linear(&extra);
        let mut flow = ControlFlow::Continue(());
        let _ = minus.run(None, &mut |km| {
            pairs.push(CharacteristicPair {
                kplus: ClassVector(kp.to_vec()),
                kminus: ClassVector(km.to_vec()),
            });
            if limit.map_or(false, |l| pairs.len() >= l) {
                flow = ControlFlow::Break(());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        flow
    });
}

/// Partitions the outermost K+ coordinate range across workers; merging the
/// per-chunk results in chunk order restores lexicographic order.
fn search_parallel(
    plus: &DfsProblem<'_>,
    minus_base: &DfsProblem<'_>,
    coupled: &[CoupledConstraint],
    opts: &SolveOptions,
) -> Vec<CharacteristicPair> {
    let values = plus.coordinate_values(0);
    if values.is_empty() {
        return Vec::new();
    }
    let jobs = opts.jobs.min(values.len());
    let chunk = values.len().div_ceil(jobs);
    let chunks: Vec<(i64, i64)> = values
        .chunks(chunk)
        .map(|c| (c[0], *c.last().expect("non-empty chunk")))
        .collect();
    let mut results: Vec<Vec<CharacteristicPair>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|&range| {
                scope.spawn(move || {
                    let mut local = Vec::new();
                    run_nested(plus, minus_base, coupled, Some(range), opts.limit, &mut local);
                    local
                })
            })
            .collect();
        for h in handles {
            results.push(h.join().expect("search worker panicked"));
        }
    });
    let mut merged: Vec<CharacteristicPair> = results.into_iter().flatten().collect();
    if let Some(l) = opts.limit {
        merged.truncate(l);
    }
    merged
}

/// One side of the search: vectors in the characteristic coset inside the box
/// with a fixed square and linear conditions.
struct DfsProblem<'a> {
    gram: &'a [Vec<i64>],
    parity: &'a [u8],
    bound: i64,
    square_target: i128,
    sigma: i128,
    linear: Vec<LinearConstraint>,
    // rest_pos[d]/rest_neg[d]: extreme values of the quadratic terms entirely
    // in coordinates > d. cross_coef[i][d] = sum over j > d of 2|Q_ij|.
    rest_pos: Vec<i128>,
    rest_neg: Vec<i128>,
    cross_coef: Vec<Vec<i128>>,
    lin_rest: Vec<Vec<i128>>,
}

impl<'a> DfsProblem<'a> {
    fn new(
        form: &'a IntersectionForm,
        parity: &'a [u8],
        bound: i64,
        square_target: i64,
        linear: Vec<LinearConstraint>,
    ) -> Self {
        let gram = form.gram();
        let n = form.rank();
        let b = bound as i128;
        let mut rest_pos = vec![0i128; n + 1];
        let mut rest_neg = vec![0i128; n + 1];
        for d in 0..n {
            let mut pos = 0i128;
            let mut neg = 0i128;
            for j in d + 1..n {
                let q = gram[j][j] as i128;
                if q > 0 {
                    pos += q * b * b;
                } else {
                    neg += q * b * b;
                }
                for k in j + 1..n {
                    let a = 2 * (gram[j][k] as i128).abs() * b * b;
                    pos += a;
                    neg -= a;
                }
            }
            rest_pos[d] = pos;
            rest_neg[d] = neg;
        }
        let mut cross_coef = vec![vec![0i128; n]; n];
        for i in 0..n {
            let mut acc = 0i128;
            for d in (0..n).rev() {
                cross_coef[i][d] = acc;
                if d > 0 {
                    // entering depth d-1 adds column d as a free coordinate
                }
                acc += 2 * (gram[i][d] as i128).abs();
            }
        }
        let lin_rest = linear
            .iter()
            .map(|c| {
                let mut rest = vec![0i128; n + 1];
                for d in (0..n).rev() {
                    rest[d] = rest[d + 1] + (c.weights[d] as i128).abs() * b;
                }
                // rest[d] bounds coordinates > d, so shift by one.
                let mut shifted = vec![0i128; n + 1];
                for d in 0..n {
                    shifted[d] = rest[d + 1];
                }
                shifted
            })
            .collect();
        DfsProblem {
            gram,
            parity,
            bound,
            square_target: square_target as i128,
            sigma: form.signature() as i128,
            linear,
            rest_pos,
            rest_neg,
            cross_coef,
            lin_rest,
        }
    }

    fn with_extra_linear(&self, extra: &[LinearConstraint]) -> DfsProblem<'a> {
        let n = self.gram.len();
        let b = self.bound as i128;
        let mut linear = self.linear.clone();
        linear.extend_from_slice(extra);
        let lin_rest = linear
            .iter()
            .map(|c| {
                let mut rest = vec![0i128; n + 1];
                for d in (0..n).rev() {
                    rest[d] = rest[d + 1] + (c.weights[d] as i128).abs() * b;
                }
                let mut shifted = vec![0i128; n + 1];
                for d in 0..n {
                    shifted[d] = rest[d + 1];
                }
                shifted
            })
            .collect();
        DfsProblem {
            linear,
            lin_rest,
            ..DfsProblem {
                gram: self.gram,
                parity: self.parity,
                bound: self.bound,
                square_target: self.square_target,
                sigma: self.sigma,
                linear: Vec::new(),
                rest_pos: self.rest_pos.clone(),
                rest_neg: self.rest_neg.clone(),
                cross_coef: self.cross_coef.clone(),
                lin_rest: Vec::new(),
            }
        }
    }

    /// Coset values of coordinate `d` in ascending order.
    fn coordinate_values(&self, d: usize) -> Vec<i64> {
        let p = self.parity[d] as i64;
        let mut v = -self.bound;
        if v.rem_euclid(2) != p {
            v += 1;
        }
        let mut out = Vec::new();
        while v <= self.bound {
            out.push(v);
            v += 2;
        }
        out
    }

    fn run(
        &self,
        first_range: Option<(i64, i64)>,
        emit: &mut dyn FnMut(&[i64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = self.gram.len();
        let mut x = vec![0i64; n];
        let mut lin = vec![0i128; self.linear.len()];
        self.descend(0, &mut x, 0, &mut lin, first_range, emit)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        d: usize,
        x: &mut [i64],
        square: i128,
        lin: &mut [i128],
        first_range: Option<(i64, i64)>,
        emit: &mut dyn FnMut(&[i64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = self.gram.len();
        if d == n {
            // Mod-8 congruence filter, then exact square, then constraints.
            if (square - self.sigma).rem_euclid(8) != 0 {
                return ControlFlow::Continue(());
            }
            if square != self.square_target {
                return ControlFlow::Continue(());
            }
            if lin
                .iter()
                .zip(&self.linear)
                .any(|(p, c)| *p != c.value)
            {
                return ControlFlow::Continue(());
            }
            return emit(x);
        }
        let b = self.bound as i128;
        // Cross coefficient of x_d against the fixed prefix.
        let mut cross: i128 = 0;
        for i in 0..d {
            cross += (self.gram[i][d] as i128) * (x[i] as i128);
        }
        let qdd = self.gram[d][d] as i128;
        for v in self.coordinate_values(d) {
            if d == 0 {
                if let Some((lo, hi)) = first_range {
                    if v < lo || v > hi {
                        continue;
                    }
                }
            }
            let vi = v as i128;
            let s2 = square + qdd * vi * vi + 2 * vi * cross;
            // Reach of the free coordinates: pure free terms plus the
            // fixed-free cross terms.
            let mut cross_reach = 0i128;
            for i in 0..=d {
                let xi = if i == d { vi } else { x[i] as i128 };
                cross_reach += xi.abs() * self.cross_coef[i][d] * b;
            }
            let lo = s2 + self.rest_neg[d] - cross_reach;
            let hi = s2 + self.rest_pos[d] + cross_reach;
            if self.square_target < lo || self.square_target > hi {
                continue;
            }
            let mut feasible = true;
            for (k, c) in self.linear.iter().enumerate() {
                let p2 = lin[k] + (c.weights[d] as i128) * vi;
                if (c.value - p2).abs() > self.lin_rest[k][d] {
                    feasible = false;
                    break;
                }
            }
            if !feasible {
                continue;
            }
            x[d] = v;
            for (k, c) in self.linear.iter().enumerate() {
                lin[k] += (c.weights[d] as i128) * vi;
            }
            let flow = self.descend(d + 1, x, s2, lin, first_range, emit);
            for (k, c) in self.linear.iter().enumerate() {
                lin[k] -= (c.weights[d] as i128) * vi;
            }
            if flow.is_break() {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    }
}
