//! Exact arithmetic on unimodular symmetric integer bilinear forms: pairing,
//! signature, characteristic-vector predicates and the mod-2 coset they form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Building block of a form in the standard basis: `<1>`, `<-1>` or the
/// hyperbolic plane `[[0,1],[1,0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    PlusOne,
    MinusOne,
    Hyperbolic,
}

impl Block {
    pub fn rank(self) -> usize {
        match self {
            Block::Hyperbolic => 2,
            _ => 1,
        }
    }
}

/// Integer homology/cohomology class in the chosen basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassVector(pub Vec<i64>);

impl ClassVector {
    pub fn zero(rank: usize) -> Self {
        ClassVector(vec![0; rank])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Coordinatewise sum, overflow-checked.
    pub fn add(&self, other: &ClassVector) -> Result<ClassVector> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(ClassVector)
    }

    pub fn neg(&self) -> ClassVector {
        ClassVector(self.0.iter().map(|a| -a).collect())
    }

    /// Exact halving; errors if any coordinate is odd.
    pub fn half(&self) -> Result<ClassVector> {
        if self.0.iter().any(|a| a % 2 != 0) {
            return Err(Error::ParityViolation);
        }
        Ok(ClassVector(self.0.iter().map(|a| a / 2).collect()))
    }
}

impl From<Vec<i64>> for ClassVector {
    fn from(coords: Vec<i64>) -> Self {
        ClassVector(coords)
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A unimodular symmetric integer bilinear form. Signature data and the
/// determinant check are computed exactly at construction time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionForm {
    rank: usize,
    gram: Vec<Vec<i64>>,
    blocks: Option<Vec<Block>>,
    positives: usize,
    negatives: usize,
}

/// The coset of characteristic vectors: `base + 2L`. Membership is a
/// coordinatewise mod-2 test against `parity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacteristicDescriptor {
    pub base: ClassVector,
    pub parity: Vec<u8>,
}

impl CharacteristicDescriptor {
    pub fn contains(&self, v: &ClassVector) -> bool {
        v.len() == self.parity.len()
            && v.0
                .iter()
                .zip(&self.parity)
                .all(|(c, p)| (c.rem_euclid(2)) as u8 == *p)
    }
}

/// Assembles a form from block descriptors.
pub fn build_form(blocks: &[Block]) -> Result<IntersectionForm> {
    IntersectionForm::from_blocks(blocks)
}

impl IntersectionForm {
    pub fn from_blocks(blocks: &[Block]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyBlocks);
        }
        let rank: usize = blocks.iter().map(|b| b.rank()).sum();
        let mut gram = vec![vec![0i64; rank]; rank];
        let mut i = 0;
        for b in blocks {
            match b {
                Block::PlusOne => {
                    gram[i][i] = 1;
                    i += 1;
                }
                Block::MinusOne => {
                    gram[i][i] = -1;
                    i += 1;
                }
                Block::Hyperbolic => {
                    gram[i][i + 1] = 1;
                    gram[i + 1][i] = 1;
                    i += 2;
                }
            }
        }
        let mut form = Self::from_gram(gram)?;
        form.blocks = Some(blocks.to_vec());
        Ok(form)
    }

    pub fn from_gram(gram: Vec<Vec<i64>>) -> Result<Self> {
        let rank = gram.len();
        if rank == 0 {
            return Err(Error::EmptyBlocks);
        }
        if gram.iter().any(|row| row.len() != rank) {
            return Err(Error::NotSquare);
        }
        for i in 0..rank {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let (positives, negatives, det) = inertia(&gram)?;
        if !det.abs().is_one() {
            return Err(Error::NonUnimodular {
                det: det.to_string(),
            });
        }
        Ok(IntersectionForm {
            rank,
            gram,
            blocks: None,
            positives,
            negatives,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn blocks(&self) -> Option<&[Block]> {
        self.blocks.as_deref()
    }

    /// Number of positive minus number of negative eigenvalues.
    pub fn signature(&self) -> i64 {
        self.positives as i64 - self.negatives as i64
    }

    pub fn positives(&self) -> usize {
        self.positives
    }

    pub fn negatives(&self) -> usize {
        self.negatives
    }

    pub fn is_indefinite(&self) -> bool {
        self.positives > 0 && self.negatives > 0
    }

    fn check_len(&self, v: &ClassVector) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Evaluates `v^T Q w`, overflow-checked.
    pub fn pair(&self, v: &ClassVector, w: &ClassVector) -> Result<i64> {
        self.check_len(v)?;
        self.check_len(w)?;
        let mut acc: i128 = 0;
        for (i, vi) in v.0.iter().enumerate() {
            if *vi == 0 {
                continue;
            }
            for (j, wj) in w.0.iter().enumerate() {
                let q = self.gram[i][j];
                if q == 0 || *wj == 0 {
                    continue;
                }
                let term = (q as i128)
                    .checked_mul(*vi as i128)
                    .and_then(|t| t.checked_mul(*wj as i128))
                    .ok_or(Error::Overflow)?;
                acc = acc.checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        i64::try_from(acc).map_err(|_| Error::Overflow)
    }

    pub fn square(&self, v: &ClassVector) -> Result<i64> {
        self.pair(v, v)
    }

    /// True iff `K.b == b.b mod 2` for every basis vector `b`; by bilinearity
    /// this is equivalent to the universally quantified definition.
    pub fn is_characteristic(&self, k: &ClassVector) -> Result<bool> {
        self.check_len(k)?;
        for j in 0..self.rank {
            let mut dot: i128 = 0;
            for i in 0..self.rank {
                let term = (self.gram[i][j] as i128)
                    .checked_mul(k.0[i] as i128)
                    .ok_or(Error::Overflow)?;
                dot = dot.checked_add(term).ok_or(Error::Overflow)?;
            }
            if (dot - self.gram[j][j] as i128).rem_euclid(2) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Base characteristic vector plus the mod-2 pattern of the whole coset.
    /// Solves `Q x = diag(Q) mod 2`; unimodularity makes the solution unique
    /// mod 2, so a characteristic vector always exists.
    pub fn characteristic_coset(&self) -> CharacteristicDescriptor {
        let n = self.rank;
        // Augmented GF(2) system.
        let mut rows: Vec<Vec<u8>> = (0..n)
            .map(|j| {
                let mut row: Vec<u8> = (0..n)
                    .map(|i| (self.gram[i][j].rem_euclid(2)) as u8)
                    .collect();
                row.push((self.gram[j][j].rem_euclid(2)) as u8);
                row
            })
            .collect();
        let mut pivot_col = vec![usize::MAX; n];
        let mut r = 0;
        for c in 0..n {
            if let Some(p) = (r..n).find(|&p| rows[p][c] == 1) {
                rows.swap(r, p);
                for q in 0..n {
                    if q != r && rows[q][c] == 1 {
                        for t in 0..=n {
                            rows[q][t] ^= rows[r][t];
                        }
                    }
                }
                pivot_col[r] = c;
                r += 1;
            }
        }
        // Invertible mod 2 for unimodular gram matrices, so r == n here.
        debug_assert_eq!(r, n);
        let mut base = vec![0i64; n];
        for q in 0..r {
            base[pivot_col[q]] = rows[q][n] as i64;
        }
        let parity: Vec<u8> = base.iter().map(|b| *b as u8).collect();
        let base = ClassVector(base);
        debug_assert_eq!(self.is_characteristic(&base), Ok(true));
        CharacteristicDescriptor { base, parity }
    }

    /// `K^2 == signature mod 8` for a characteristic vector `K`.
    pub fn van_der_blij_check(&self, k: &ClassVector) -> Result<bool> {
        if !self.is_characteristic(k)? {
            return Err(Error::NotCharacteristic);
        }
        let sq = self.square(k)? as i128;
        Ok((sq - self.signature() as i128).rem_euclid(8) == 0)
    }
}

/// Inertia of a symmetric integer matrix by exact symmetric Gaussian
/// elimination over the rationals. Diagonal pivots when available, otherwise
/// the 2x2 off-diagonal pivot whose diagonal is zero (signature contribution
/// (+1, -1)). Returns (positives, negatives, determinant).
fn inertia(gram: &[Vec<i64>]) -> Result<(usize, usize, BigInt)> {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut det = BigRational::one();
    let mut pos = 0usize;
    let mut neg = 0usize;
    let mut i = 0usize;
    while i < n {
        if let Some(k) = (i..n).find(|&k| !a[k][k].is_zero()) {
            swap_sym(&mut a, i, k);
            let d = a[i][i].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            det *= &d;
            for r in i + 1..n {
                if a[r][i].is_zero() {
                    continue;
                }
                let f = &a[r][i] / &d;
                for c in i + 1..n {
                    let sub = &f * &a[i][c];
                    a[r][c] -= sub;
                }
            }
            i += 1;
        } else if let Some((p, q)) = find_off_diagonal(&a, i, n) {
            swap_sym(&mut a, i, p);
            let q = if q == i { p } else { q };
            swap_sym(&mut a, i + 1, q);
            // Pivot block [[0,b],[b,0]]: one positive, one negative.
            let b = a[i][i + 1].clone();
            pos += 1;
            neg += 1;
            det *= -(&b * &b);
            for r in i + 2..n {
                let u = a[r][i].clone();
                let v = a[r][i + 1].clone();
                if u.is_zero() && v.is_zero() {
                    continue;
                }
                for c in i + 2..n {
                    let sub = (&u * &a[i + 1][c] + &v * &a[i][c]) / &b;
                    a[r][c] -= sub;
                }
            }
            i += 2;
        } else {
            return Err(Error::Degenerate);
        }
    }
    debug_assert!(det.is_integer());
    Ok((pos, neg, det.to_integer()))
}

fn swap_sym(a: &mut [Vec<BigRational>], i: usize, k: usize) {
    if i == k {
        return;
    }
    a.swap(i, k);
    for row in a.iter_mut() {
        row.swap(i, k);
    }
}

fn find_off_diagonal(a: &[Vec<BigRational>], from: usize, n: usize) -> Option<(usize, usize)> {
    for p in from..n {
        for q in p + 1..n {
            if !a[p][q].is_zero() {
                return Some((p, q));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_form() -> IntersectionForm {
        build_form(&[Block::PlusOne, Block::PlusOne, Block::MinusOne, Block::MinusOne]).unwrap()
    }

    #[test]
    fn build_form_diagonal() {
        let q = diag_form();
        assert_eq!(q.rank(), 4);
        assert_eq!(q.gram()[0][0], 1);
        assert_eq!(q.gram()[1][1], 1);
        assert_eq!(q.gram()[2][2], -1);
        assert_eq!(q.gram()[3][3], -1);
        assert_eq!(q.gram()[0][1], 0);
    }

    #[test]
    fn build_form_hyperbolic() {
        let q = build_form(&[Block::Hyperbolic]).unwrap();
        assert_eq!(q.gram(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(q.signature(), 0);
    }

    #[test]
    fn build_form_seven_hyperbolic() {
        let q = build_form(&[Block::Hyperbolic; 7]).unwrap();
        assert_eq!(q.rank(), 14);
        assert_eq!(q.signature(), 0);
    }

    #[test]
    fn pair_examples() {
        let q = diag_form();
        let v = ClassVector(vec![1, 0, 0, 0]);
        assert_eq!(q.pair(&v, &v).unwrap(), 1);

        let h = build_form(&[Block::Hyperbolic; 7]).unwrap();
        let mut sigma = vec![0; 14];
        sigma[0] = 1;
        sigma[1] = 1;
        let sigma = ClassVector(sigma);
        assert_eq!(q.pair(&v, &ClassVector::zero(4)).unwrap(), 0);
        assert_eq!(h.pair(&sigma, &sigma).unwrap(), 2);
    }

    #[test]
    fn pair_dimension_mismatch() {
        let q = diag_form();
        let v = ClassVector(vec![1, 0]);
        assert_eq!(
            q.pair(&v, &v),
            Err(Error::DimensionMismatch { expected: 4, got: 2 })
        );
    }

    #[test]
    fn signature_examples() {
        assert_eq!(diag_form().signature(), 0);
        assert_eq!(build_form(&[Block::Hyperbolic]).unwrap().signature(), 0);
        let q = build_form(&[
            Block::PlusOne,
            Block::PlusOne,
            Block::PlusOne,
            Block::MinusOne,
        ])
        .unwrap();
        assert_eq!(q.signature(), 2);
    }

    #[test]
    fn signature_of_generic_gram() {
        // Same form as H but presented with nonzero diagonal.
        let q = IntersectionForm::from_gram(vec![vec![2, 1], vec![1, 0]]).unwrap();
        assert_eq!(q.signature(), 0);
        assert_eq!(q.positives(), 1);
        assert_eq!(q.negatives(), 1);
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            IntersectionForm::from_gram(vec![vec![2]]),
            Err(Error::NonUnimodular { .. })
        ));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(matches!(
            IntersectionForm::from_gram(vec![vec![0]]),
            Err(Error::Degenerate) | Err(Error::NonUnimodular { .. })
        ));
    }

    #[test]
    fn rejects_asymmetric() {
        assert_eq!(
            IntersectionForm::from_gram(vec![vec![0, 1], vec![2, 0]]),
            Err(Error::NotSymmetric)
        );
    }

    #[test]
    fn is_characteristic_examples() {
        let q = diag_form();
        assert!(q.is_characteristic(&ClassVector(vec![1, 3, 1, 1])).unwrap());

        let h = build_form(&[Block::Hyperbolic]).unwrap();
        assert!(h.is_characteristic(&ClassVector(vec![0, 0])).unwrap());
        assert!(!h.is_characteristic(&ClassVector(vec![1, 0])).unwrap());
    }

    #[test]
    fn characteristic_coset_examples() {
        assert_eq!(diag_form().characteristic_coset().parity, vec![1, 1, 1, 1]);
        assert_eq!(
            build_form(&[Block::Hyperbolic]).unwrap().characteristic_coset().parity,
            vec![0, 0]
        );
        assert_eq!(
            build_form(&[Block::PlusOne]).unwrap().characteristic_coset().parity,
            vec![1]
        );
    }

    #[test]
    fn coset_membership_matches_predicate() {
        let q = diag_form();
        let coset = q.characteristic_coset();
        for a in -2..=2 {
            for b in -2..=2 {
                let v = ClassVector(vec![a, b, 1, 1]);
                assert_eq!(coset.contains(&v), q.is_characteristic(&v).unwrap());
            }
        }
    }

    #[test]
    fn van_der_blij_examples() {
        let q = diag_form();
        assert!(q.van_der_blij_check(&ClassVector(vec![1, 3, 1, 1])).unwrap());

        let h = build_form(&[Block::Hyperbolic]).unwrap();
        assert!(h.van_der_blij_check(&ClassVector(vec![0, 0])).unwrap());

        let one = build_form(&[Block::PlusOne]).unwrap();
        assert!(one.van_der_blij_check(&ClassVector(vec![1])).unwrap());
    }

    #[test]
    fn van_der_blij_rejects_non_characteristic() {
        let h = build_form(&[Block::Hyperbolic]).unwrap();
        assert_eq!(
            h.van_der_blij_check(&ClassVector(vec![1, 0])),
            Err(Error::NotCharacteristic)
        );
    }

    #[test]
    fn signature_additivity_small() {
        for p in 0..3usize {
            for m in 0..3usize {
                for h in 0..2usize {
                    if p + m + h == 0 {
                        continue;
                    }
                    let mut blocks = vec![Block::PlusOne; p];
                    blocks.extend(vec![Block::MinusOne; m]);
                    blocks.extend(vec![Block::Hyperbolic; h]);
                    let q = build_form(&blocks).unwrap();
                    assert_eq!(q.signature(), p as i64 - m as i64);
                }
            }
        }
    }
}
