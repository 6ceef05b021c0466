//! Brute-force Wick expansion over matrix entries.
//!
//! Works straight from the entrywise definition: every letter is an entry
//! `X_{i j}` of the Gaussian matrix, a pairing forces paired letters to share
//! both indices, and each block carries one free row index in `[M]` and one
//! free column index in `[N]`. Nothing here goes through permutations.

use crate::engine::{Kind, MomentSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Work cap from `WTE_BUDGET` (integer or float literal), else the default.
pub fn budget_from_env() -> u128 {
    std::env::var("WTE_BUDGET")
        .ok()
        .and_then(|s| {
            let s = s.trim();
            s.parse::<u128>()
                .ok()
                .or_else(|| s.parse::<f64>().ok().filter(|v| *v >= 0.0).map(|v| v as u128))
        })
        .unwrap_or(DEFAULT_BUDGET)
}

/// Index assignments the oracle would visit for `spec`.
pub fn work_estimate<T: Scalar>(spec: &MomentSpec<T>) -> u128 {
    let m = spec.shape.lengths().iter().sum::<usize>();
    if m % 2 == 1 {
        return 0;
    }
    let mut pairings: u128 = 1;
    let mut k = m as u128;
    while k > 1 {
        pairings = pairings.saturating_mul(k - 1);
        k -= 2;
    }
    let per_block = (spec.n as u128) * (spec.m as u128);
    let wigner = wigner_positions(spec).len() as u32;
    pairings
        .saturating_mul(per_block.saturating_pow((m / 2) as u32))
        .saturating_mul(1u128 << wigner.min(100))
}

fn wigner_positions<T: Scalar>(spec: &MomentSpec<T>) -> Vec<usize> {
    spec.shape
        .labels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| spec.wigner.get(l).copied().unwrap_or(false))
        .map(|(i, _)| i)
        .collect()
}

pub fn wick_oracle<T: Scalar>(spec: &MomentSpec<T>, kind: Kind) -> Result<T> {
    wick_oracle_with_budget(spec, kind, budget_from_env())
}

pub fn wick_oracle_with_budget<T: Scalar>(
    spec: &MomentSpec<T>,
    kind: Kind,
    budget: u128,
) -> Result<T> {
    let lengths = spec.shape.lengths();
    let m: usize = lengths.iter().sum();
    if m % 2 == 1 {
        return Ok(T::zero());
    }
    let needed = work_estimate(spec);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }

    // factor of each letter and the letter that follows it cyclically
    let mut factor = Vec::with_capacity(m);
    let mut next = Vec::with_capacity(m);
    let mut start = 0;
    for (f, &len) in lengths.iter().enumerate() {
        for i in 0..len {
            factor.push(f);
            next.push(start + (i + 1) % len);
        }
        start += len;
    }
    let labels = spec.shape.labels();
    let wigner = wigner_positions(spec);
    let variants = 1usize << wigner.len();
    let variant_scale = T::from_i64(2).powi(-(wigner.len() as i32));

    let mut total = T::zero();
    for variant in 0..variants {
        let mut eps: Vec<i8> = spec.shape.signs().to_vec();
        for (b, &k) in wigner.iter().enumerate() {
            eps[k] = if variant >> b & 1 == 1 { -1 } else { 1 };
        }
        let mut part = T::zero();
        for_each_pairing(m, &mut |partner| {
            if kind == Kind::Cumulant && !connects_all(partner, &factor, lengths.len()) {
                return;
            }
            let mut weight = spec.q.powi(count_crossings(partner) as i32);
            for a in 0..m {
                if a < partner[a] {
                    weight = weight.mul(spec.gram.get(labels[a], labels[partner[a]]));
                }
            }
            if weight.is_zero() {
                return;
            }
            let s = index_sum(spec, partner, &eps, &next);
            part = part.add(&weight.mul(&s));
        });
        total = total.add(&variant_scale.mul(&part));
    }
    let exponent = -((m / 2) as i32) - lengths.len() as i32;
    Ok(T::from_i64(spec.n as i64).powi(exponent).mul(&total))
}

/// Calls `visit` with the partner array of every perfect matching of
/// `0..m`.
fn for_each_pairing(m: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(partner: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
        let first = partner.iter().position(|&p| p == usize::MAX);
        let Some(a) = first else {
            visit(partner);
            return;
        };
        for b in a + 1..partner.len() {
            if partner[b] == usize::MAX {
                partner[a] = b;
                partner[b] = a;
                rec(partner, visit);
                partner[a] = usize::MAX;
                partner[b] = usize::MAX;
            }
        }
    }
    let mut partner = vec![usize::MAX; m];
    rec(&mut partner, visit);
}

fn count_crossings(partner: &[usize]) -> usize {
    let mut c = 0;
    for a in 0..partner.len() {
        let b = partner[a];
        if b < a {
            continue;
        }
        for x in a + 1..b {
            if partner[x] > b {
                c += 1;
            }
        }
    }
    c
}

fn connects_all(partner: &[usize], factor: &[usize], r: usize) -> bool {
    let mut reached = vec![false; r];
    if r == 0 {
        return true;
    }
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..partner.len() {
            let (fa, fb) = (factor[a], factor[partner[a]]);
            if reached[fa] != reached[fb] {
                reached[fa] = true;
                reached[fb] = true;
                changed = true;
            }
        }
    }
    reached.iter().all(|&x| x)
}

/// `Σ_{free indices} Π_k D_k[right index of letter k, left index of letter k+1]`.
fn index_sum<T: Scalar>(spec: &MomentSpec<T>, partner: &[usize], eps: &[i8], next: &[usize]) -> T {
    let m = partner.len();
    let mut block = vec![0usize; m];
    let mut blocks = 0;
    for a in 0..m {
        if a < partner[a] {
            block[a] = blocks;
            block[partner[a]] = blocks;
            blocks += 1;
        }
    }
    // row index in [M] and column index in [N] per block
    let mut rows = vec![0usize; blocks];
    let mut cols = vec![0usize; blocks];
    let mut sum = T::zero();
    loop {
        let mut term = T::one();
        for k in 0..m {
            let (i, j) = (rows[block[k]], cols[block[k]]);
            let right = if eps[k] > 0 { j } else { i };
            let l = next[k];
            let (i2, j2) = (rows[block[l]], cols[block[l]]);
            let left_next = if eps[l] > 0 { i2 } else { j2 };
            term = term.mul(spec.matrices.slot(k + 1).get(right, left_next));
            if term.is_zero() {
                break;
            }
        }
        sum = sum.add(&term);

        // odometer over (rows, cols)
        let mut pos = 0;
        loop {
            if pos == 2 * blocks {
                return sum;
            }
            let (digit, radix) = if pos < blocks {
                (&mut rows[pos], spec.m)
            } else {
                (&mut cols[pos - blocks], spec.n)
            };
            *digit += 1;
            if *digit < radix {
                break;
            }
            *digit = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::WordShape;
    use crate::matrix::{Matrix, MatrixSet};
    use crate::scalar::Rational;
    use num_bigint::BigInt;

    fn int(v: i64) -> Rational {
        Rational::from_integer(BigInt::from(v))
    }

    fn ints(rows: usize, cols: usize, v: &[i64]) -> Matrix<Rational> {
        Matrix::new(rows, cols, v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    fn spec(shape: WordShape, slots: Vec<Matrix<Rational>>, n: usize, m: usize) -> MomentSpec<Rational> {
        MomentSpec::new(shape, MatrixSet::new(slots), n, m).unwrap()
    }

    #[test]
    fn first_moment_is_m_over_n() {
        for (n, m) in [(1, 1), (2, 3), (4, 2), (3, 3)] {
            let shape = WordShape::alternating(vec![2]).unwrap();
            let s = spec(shape, vec![Matrix::identity(m), Matrix::identity(n)], n, m);
            let v = wick_oracle(&s, Kind::Moment).unwrap();
            assert_eq!(v, Rational::new(BigInt::from(m), BigInt::from(n)));
        }
    }

    #[test]
    fn transposed_pair_with_explicit_matrix() {
        let shape = WordShape::alternating(vec![2]).unwrap();
        let d1 = ints(2, 2, &[1, 2, 3, 4]);
        let s = spec(shape, vec![d1, Matrix::identity(2)], 2, 2);
        // N⁻² Tr(D₁) Tr(D₂) = 5·2/4
        assert_eq!(wick_oracle(&s, Kind::Moment).unwrap(), Rational::new(BigInt::from(5), BigInt::from(2)));
    }

    #[test]
    fn odd_word_is_zero() {
        let shape = WordShape::with_signs(vec![3], vec![1, -1, 1]).unwrap();
        let s = spec(shape, vec![Matrix::identity(2), Matrix::identity(2), Matrix::identity(2)], 2, 2);
        assert_eq!(wick_oracle(&s, Kind::Moment).unwrap(), int(0));
    }

    #[test]
    fn transpose_symmetry() {
        // tr(X' A X B X' C X D) vs the reversed word with transposed slots
        let a = ints(2, 2, &[1, -2, 0, 3]);
        let b = ints(3, 3, &[2, 1, 0, -1, 1, 4, 0, 2, 1]);
        let c = ints(2, 2, &[0, 1, 5, -1]);
        let d = ints(3, 3, &[1, 0, 2, 3, -2, 1, 1, 1, 0]);
        let shape = WordShape::alternating(vec![4]).unwrap();
        let fwd = spec(shape, vec![a.clone(), b.clone(), c.clone(), d.clone()], 3, 2);
        // reversing X'AXBX'CXD gives Dᵀ X' Cᵀ X Bᵀ X' Aᵀ X, cycled to start at X'
        let rev_shape = WordShape::alternating(vec![4]).unwrap();
        let rev = spec(
            rev_shape,
            vec![c.transpose(), b.transpose(), a.transpose(), d.transpose()],
            3,
            2,
        );
        assert_eq!(
            wick_oracle(&fwd, Kind::Moment).unwrap(),
            wick_oracle(&rev, Kind::Moment).unwrap()
        );
    }

    #[test]
    fn cumulant_drops_disconnected_pairings() {
        let shape = WordShape::alternating(vec![2, 2]).unwrap();
        let s = spec(shape, vec![Matrix::identity(2); 4], 2, 2);
        let moment = wick_oracle(&s, Kind::Moment).unwrap();
        let k2 = wick_oracle(&s, Kind::Cumulant).unwrap();
        // E[Y²] − E[Y]² with E[Y] = 1
        assert_eq!(moment - int(1), k2);
    }

    #[test]
    fn budget_is_enforced() {
        let shape = WordShape::alternating(vec![4]).unwrap();
        let s = spec(shape, vec![Matrix::identity(3); 4], 3, 3);
        assert_eq!(work_estimate(&s), 3 * 81);
        let err = wick_oracle_with_budget(&s, Kind::Moment, 10).unwrap_err();
        assert!(matches!(err, Error::Budget { needed: 243, budget: 10 }));
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn crossing_count() {
        assert_eq!(count_crossings(&[2, 3, 0, 1]), 1);
        assert_eq!(count_crossings(&[3, 2, 1, 0]), 0);
        assert_eq!(count_crossings(&[3, 4, 5, 0, 1, 2]), 3);
    }
}
