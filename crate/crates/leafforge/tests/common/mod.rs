//! Shared helpers for integration tests: a deliberately naive reference
//! oracle for the pair search and fixture builders. The oracle enumerates the
//! full box with the definitional characteristic test and no pruning, so any
//! agreement with the production solver is meaningful.
//!
//! Not every test binary uses every helper.
#![allow(dead_code)]

use leafforge::distribution::{
    target_squares, CharacteristicPair, EulerComponent, ManifoldModel, SideConstraint,
};
use leafforge::lattice::{build_form, Block, ClassVector};

/// All integer vectors in `[-bound, bound]^rank` in lexicographic order.
pub fn box_vectors(rank: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-bound; rank];
    loop {
        out.push(cur.clone());
        let mut d = rank;
        loop {
            if d == 0 {
                return out;
            }
            d -= 1;
            if cur[d] < bound {
                cur[d] += 1;
                for c in cur.iter_mut().skip(d + 1) {
                    *c = -bound;
                }
                break;
            }
        }
    }
}

/// Definitional characteristic test: `K . b_i == b_i . b_i mod 2` on every
/// basis vector, straight off the Gram matrix.
fn is_characteristic_naive(gram: &[Vec<i64>], v: &[i64]) -> bool {
    let n = gram.len();
    (0..n).all(|i| {
        let pairing: i64 = (0..n).map(|j| gram[i][j] * v[j]).sum();
        (pairing - gram[i][i]).rem_euclid(2) == 0
    })
}

fn square_naive(gram: &[Vec<i64>], v: &[i64]) -> i64 {
    let n = gram.len();
    let mut acc = 0;
    for i in 0..n {
        for j in 0..n {
            acc += gram[i][j] * v[i] * v[j];
        }
    }
    acc
}

fn pair_naive(gram: &[Vec<i64>], u: &[i64], v: &[i64]) -> i64 {
    let n = gram.len();
    let mut acc = 0;
    for i in 0..n {
        for j in 0..n {
            acc += gram[i][j] * u[i] * v[j];
        }
    }
    acc
}

/// Exhaustive reference search: every `(K+, K-)` in the box with the right
/// squares, both characteristic by definition, coordinatewise-even sum, and
/// all side constraints satisfied on the halved Euler classes. Emitted in
/// lexicographic pair order, exactly like the production solver claims.
pub fn oracle_pairs(
    m: &ManifoldModel,
    constraints: &[SideConstraint],
    bound: i64,
) -> Vec<CharacteristicPair> {
    let gram: Vec<Vec<i64>> = m.form.gram().to_vec();
    let (tp, tm) = target_squares(m);
    let candidates =
        |target: i64| -> Vec<Vec<i64>> {
            box_vectors(m.form.rank(), bound)
                .into_iter()
                .filter(|v| is_characteristic_naive(&gram, v) && square_naive(&gram, v) == target)
                .collect()
        };
    let plus = candidates(tp);
    let minus = candidates(tm);
    let mut out = Vec::new();
    for kp in &plus {
        'next: for km in &minus {
            if kp.iter().zip(km).any(|(a, b)| (a + b).rem_euclid(2) != 0) {
                continue;
            }
            let e1: Vec<i64> = kp.iter().zip(km).map(|(a, b)| (a + b) / 2).collect();
            let e2: Vec<i64> = kp.iter().zip(km).map(|(a, b)| (b - a) / 2).collect();
            for c in constraints {
                let e = match c.component {
                    EulerComponent::E1 => &e1,
                    EulerComponent::E2 => &e2,
                };
                if pair_naive(&gram, e, &c.target.0) != c.value {
                    continue 'next;
                }
            }
            out.push(CharacteristicPair {
                kplus: ClassVector(kp.clone()),
                kminus: ClassVector(km.clone()),
            });
        }
    }
    out
}

/// `3<1> + 19<-1>` with `chi = 24`, `sigma = -16`.
pub fn k3like_fixture() -> ManifoldModel {
    let blocks: Vec<Block> = std::iter::repeat(Block::PlusOne)
        .take(3)
        .chain(std::iter::repeat(Block::MinusOne).take(19))
        .collect();
    ManifoldModel::new("k3-like", build_form(&blocks).expect("fixed block list"), 24)
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}
