//! The free `s`-step nilpotent group of rank `r`, realised inside the
//! degree-`s` truncation of the free associative ring `Z<X_1, ..., X_r>`.
//!
//! Group elements are the polynomials with constant term 1; the generators
//! are `1 + X_i`. Products are truncated convolutions over words, so the
//! arithmetic is exact at any coefficient size.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Word indexing for one `(r, s)` pair.
#[derive(Debug, Clone)]
pub struct TruncatedAlgebra {
    rank: usize,
    step: usize,
    /// `offsets[l]` is the index of the first word of length `l`.
    offsets: Vec<usize>,
    /// `powers[l] = rank^l`.
    powers: Vec<usize>,
}

impl TruncatedAlgebra {
    pub fn new(rank: usize, step: usize) -> Self {
        let mut offsets = Vec::with_capacity(step + 2);
        let mut powers = Vec::with_capacity(step + 1);
        let mut acc = 0usize;
        let mut pw = 1usize;
        for _ in 0..=step {
            offsets.push(acc);
            powers.push(pw);
            acc += pw;
            pw *= rank;
        }
        offsets.push(acc);
        TruncatedAlgebra {
            rank,
            step,
            offsets,
            powers,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Number of coefficients, one per word of length at most `s`.
    pub fn dimension(&self) -> usize {
        self.offsets[self.step + 1]
    }

    /// Coefficient index of a word given as letter indices.
    pub fn word_index(&self, word: &[usize]) -> usize {
        debug_assert!(word.len() <= self.step);
        let local = word.iter().fold(0usize, |acc, &a| acc * self.rank + a);
        self.offsets[word.len()] + local
    }

    pub fn one(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.dimension()];
        v[0] = BigInt::one();
        v
    }

    /// `1 + X_i`.
    pub fn generator(&self, letter: usize) -> Vec<BigInt> {
        let mut v = self.one();
        if self.step >= 1 {
            v[self.word_index(&[letter])] = BigInt::one();
        }
        v
    }

    /// Truncated product: coefficient of `uv` accumulates `a[u] b[v]`.
    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        if self.step < 1024 {
            if let (Some(sa), Some(sb)) = (small(a), small(b)) {
                return self
                    .mul_small(&sa, &sb)
                    .iter()
                    .map(|&c| BigInt::from(c))
                    .collect();
            }
        }
        self.mul_big(a, b)
    }

    // each output coefficient sums at most `step + 1` products below 2^52
    fn mul_small(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.dimension()];
        for la in 0..=self.step {
            for ia in 0..self.powers[la] {
                let ca = a[self.offsets[la] + ia];
                if ca == 0 {
                    continue;
                }
                for lb in 0..=(self.step - la) {
                    let base = self.offsets[la + lb] + ia * self.powers[lb];
                    let bs = &b[self.offsets[lb]..self.offsets[lb + 1]];
                    for (ib, &cb) in bs.iter().enumerate() {
                        out[base + ib] += ca * cb;
                    }
                }
            }
        }
        out
    }

    fn mul_big(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.dimension()];
        for la in 0..=self.step {
            let a_range = self.offsets[la]..self.offsets[la + 1];
            for (ia, ca) in a[a_range].iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for lb in 0..=(self.step - la) {
                    let b_range = self.offsets[lb]..self.offsets[lb + 1];
                    let base = self.offsets[la + lb] + ia * self.powers[lb];
                    for (ib, cb) in b[b_range].iter().enumerate() {
                        if cb.is_zero() {
                            continue;
                        }
                        out[base + ib] += ca * cb;
                    }
                }
            }
        }
        out
    }

    /// Inverse of a constant-term-one element: `sum_k (-x)^k` with `x = g - 1`.
    pub fn inv(&self, g: &[BigInt]) -> Vec<BigInt> {
        let mut neg_x: Vec<BigInt> = g.iter().map(|c| -c).collect();
        neg_x[0] = BigInt::zero();
        let mut result = self.one();
        let mut term = self.one();
        for _ in 0..self.step {
            term = self.mul(&term, &neg_x);
            for (r, t) in result.iter_mut().zip(&term) {
                *r += t;
            }
        }
        result
    }
}

fn small(a: &[BigInt]) -> Option<Vec<i64>> {
    const LIMIT: i64 = 1 << 26;
    a.iter()
        .map(|c| i64::try_from(c).ok().filter(|v| v.abs() < LIMIT))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(alg: &TruncatedAlgebra, terms: &[(&[usize], i64)]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); alg.dimension()];
        for (w, c) in terms {
            v[alg.word_index(w)] += BigInt::from(*c);
        }
        v
    }

    #[test]
    fn product_of_generators_rank_two_step_two() {
        let alg = TruncatedAlgebra::new(2, 2);
        let x1 = alg.generator(0);
        let x2 = alg.generator(1);
        let got = alg.mul(&x1, &x2);
        let want = poly(&alg, &[(&[], 1), (&[0], 1), (&[1], 1), (&[0, 1], 1)]);
        assert_eq!(got, want);
    }

    #[test]
    fn commutator_rank_two_step_two() {
        // [a,b] = a^-1 b^-1 a b = 1 + X1 X2 - X2 X1 after truncation.
        let alg = TruncatedAlgebra::new(2, 2);
        let a = alg.generator(0);
        let b = alg.generator(1);
        let c = alg.mul(&alg.mul(&alg.inv(&a), &alg.inv(&b)), &alg.mul(&a, &b));
        let want = poly(&alg, &[(&[], 1), (&[0, 1], 1), (&[1, 0], -1)]);
        assert_eq!(c, want);
    }

    #[test]
    fn inverse_of_generator() {
        let alg = TruncatedAlgebra::new(1, 4);
        let inv = alg.inv(&alg.generator(0));
        let want = poly(
            &alg,
            &[
                (&[], 1),
                (&[0], -1),
                (&[0, 0], 1),
                (&[0, 0, 0], -1),
                (&[0, 0, 0, 0], 1),
            ],
        );
        assert_eq!(inv, want);
        assert_eq!(alg.mul(&inv, &alg.generator(0)), alg.one());
    }

    #[test]
    fn small_and_big_paths_agree() {
        let alg = TruncatedAlgebra::new(2, 3);
        let mut a = alg.generator(0);
        let mut b = alg.generator(1);
        a[3] = BigInt::from(-(1i64 << 25) + 7);
        b[5] = BigInt::from(1i64 << 25);
        b[9] = BigInt::from(-12345);
        assert_eq!(alg.mul(&a, &b), alg.mul_big(&a, &b));
        a[4] = BigInt::from(1i64 << 40);
        assert_eq!(alg.mul(&a, &b), alg.mul_big(&a, &b));
    }
}
