//! Monte Carlo estimates by sampling Gaussian matrices.
//!
//! Sample `s` draws from a ChaCha8 stream selected by `(seed, s)`, so any
//! partition of the samples over threads gives the same numbers.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{Kind, MomentSpec};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    /// Sample mean of each factor `tr(⋯)`.
    pub factor_means: Vec<f64>,
}

impl McReport {
    /// `|estimate − exact| / std_error`; infinite when the error is zero and
    /// the values differ.
    pub fn z_score(&self, exact: f64) -> f64 {
        let d = (self.estimate - exact).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

/// Lower factor `L` with `L Lᵀ = G` from a symmetric eigendecomposition.
pub fn gram_factor(gram: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = gram.nrows();
    if k == 0 {
        return Ok(gram.clone());
    }
    let eig = SymmetricEigen::new(gram.clone());
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    let mut roots = Vec::with_capacity(k);
    for &l in eig.eigenvalues.iter() {
        if l < -1e-12 * scale {
            return Err(Error::NotPsd(l));
        }
        roots.push(l.max(0.0).sqrt());
    }
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots)))
}

struct Plan {
    factors: Vec<Vec<(usize, i8, DMatrix<f64>)>>,
    lfactor: DMatrix<f64>,
    wigner: Vec<bool>,
    n: usize,
    m: usize,
}

impl Plan {
    fn new<T: Scalar>(spec: &MomentSpec<T>) -> Result<Self> {
        if spec.q.to_f64() != 1.0 {
            return Err(Error::Unsupported(format!(
                "Monte Carlo needs q = 1 (got {}); q-deformed families have no matrix model",
                spec.q
            )));
        }
        let f = spec.families.len();
        let gram = DMatrix::from_fn(f, f, |i, j| spec.gram.get(i, j).to_f64());
        let lfactor = gram_factor(&gram)?;
        let mut factors = Vec::new();
        let mut k = 1;
        for &len in spec.shape.lengths() {
            let mut letters = Vec::with_capacity(len);
            for _ in 0..len {
                let d = spec.matrices.slot(k);
                let dm = DMatrix::from_fn(d.rows(), d.cols(), |i, j| d.get(i, j).to_f64());
                letters.push((spec.shape.label(k), spec.shape.epsilon(k), dm));
                k += 1;
            }
            factors.push(letters);
        }
        Ok(Self {
            factors,
            lfactor,
            wigner: spec.wigner.clone(),
            n: spec.n,
            m: spec.m,
        })
    }

    /// Per-factor normalized traces for sample `index`.
    fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let fams = self.lfactor.nrows();
        let scale = 1.0 / (self.n as f64).sqrt();
        let white: Vec<DMatrix<f64>> = (0..fams)
            .map(|_| DMatrix::from_fn(self.m, self.n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale))
            .collect();
        let family: Vec<DMatrix<f64>> = (0..fams)
            .map(|f| {
                let mut x = DMatrix::zeros(self.m, self.n);
                for (g, w) in white.iter().enumerate() {
                    let c = self.lfactor[(f, g)];
                    if c != 0.0 {
                        x += w * c;
                    }
                }
                if self.wigner[f] {
                    (&x + x.transpose()) * 0.5
                } else {
                    x
                }
            })
            .collect();
        let transposed: Vec<DMatrix<f64>> = family.iter().map(|x| x.transpose()).collect();
        self.factors
            .iter()
            .map(|letters| {
                let mut acc: Option<DMatrix<f64>> = None;
                for (label, eps, d) in letters {
                    let x = if *eps > 0 || self.wigner[*label] {
                        &family[*label]
                    } else {
                        &transposed[*label]
                    };
                    let step = x * d;
                    acc = Some(match acc {
                        None => step,
                        Some(a) => a * step,
                    });
                }
                acc.map_or(1.0, |a| a.trace()) / self.n as f64
            })
            .collect()
    }
}

fn mean(xs: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut s = CompensatedSum::new();
    xs.for_each(|x| s.add(x));
    s.value() / n as f64
}

fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mu = mean(values.iter().copied(), n);
    let var = mean(values.iter().map(|v| (v - mu) * (v - mu)), n) * n as f64 / (n - 1) as f64;
    (mu, (var / n as f64).sqrt())
}

/// Estimates `E[Y₁⋯Y_r]` (moment) or `k_r` for `r ≤ 2` (cumulant) from
/// `samples` independent draws.
pub fn mc_oracle<T: Scalar>(
    spec: &MomentSpec<T>,
    kind: Kind,
    samples: usize,
    seed: u64,
) -> Result<McReport> {
    if samples < 2 {
        return Err(Error::Input(format!("Monte Carlo needs at least 2 samples, got {samples}")));
    }
    let r = spec.shape.factors();
    if kind == Kind::Cumulant && r > 2 {
        return Err(Error::Unsupported(format!(
            "Monte Carlo cumulants are available for r ≤ 2, got r = {r}"
        )));
    }
    let plan = Plan::new(spec)?;
    let draws: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|s| plan.sample(seed, s))
        .collect();
    let factor_means: Vec<f64> = (0..r)
        .map(|f| mean(draws.iter().map(|d| d[f]), samples))
        .collect();
    let values: Vec<f64> = match (kind, r) {
        (Kind::Cumulant, 2) => draws
            .iter()
            .map(|d| (d[0] - factor_means[0]) * (d[1] - factor_means[1]))
            .collect(),
        _ => draws.iter().map(|d| d.iter().product()).collect(),
    };
    let (mut estimate, std_error) = mean_and_error(&values);
    if kind == Kind::Cumulant && r == 2 {
        // unbiased sample covariance
        estimate *= samples as f64 / (samples - 1) as f64;
    }
    Ok(McReport {
        estimate,
        std_error,
        samples,
        seed,
        factor_means,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::WordShape;
    use crate::matrix::{Matrix, MatrixSet};

    fn identity_spec(shape: WordShape, n: usize) -> MomentSpec<f64> {
        let slots = shape.letters();
        MomentSpec::new(shape, MatrixSet::new(vec![Matrix::identity(n); slots]), n, n).unwrap()
    }

    #[test]
    fn first_moment_within_five_sigma() {
        let spec = identity_spec(WordShape::alternating(vec![2]).unwrap(), 8);
        let rep = mc_oracle(&spec, Kind::Moment, 20_000, 7).unwrap();
        assert!(rep.z_score(1.0) <= 5.0, "{rep:?}");
        assert_eq!(rep.samples, 20_000);
    }

    #[test]
    fn replay_is_bit_identical_across_pools() {
        let spec = identity_spec(WordShape::alternating(vec![2, 2]).unwrap(), 3);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_oracle(&spec, Kind::Moment, 500, 11).unwrap());
        let b = four.install(|| mc_oracle(&spec, Kind::Moment, 500, 11).unwrap());
        assert_eq!(a, b);
        let c = mc_oracle(&spec, Kind::Moment, 500, 12).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn independent_families_odd_counts_vanish() {
        let shape = WordShape::new(vec![2], vec![-1, 1], vec![0, 1]).unwrap();
        let spec = identity_spec(shape, 4)
            .with_gram(vec!["G".into(), "H".into()], Matrix::identity(2))
            .unwrap();
        let rep = mc_oracle(&spec, Kind::Moment, 20_000, 3).unwrap();
        assert!(rep.z_score(0.0) <= 5.0, "{rep:?}");
    }

    #[test]
    fn variance_of_first_moment() {
        // k₂(tr XᵀX, tr XᵀX) = 2M/N³
        let spec = identity_spec(WordShape::alternating(vec![2, 2]).unwrap(), 4);
        let rep = mc_oracle(&spec, Kind::Cumulant, 40_000, 5).unwrap();
        assert!(rep.z_score(2.0 * 4.0 / 64.0) <= 5.0, "{rep:?}");
    }

    #[test]
    fn rejections() {
        let spec = identity_spec(WordShape::alternating(vec![2]).unwrap(), 2);
        assert!(mc_oracle(&spec, Kind::Moment, 1, 0).is_err());
        let q = spec.clone().with_q(0.5).unwrap();
        assert!(matches!(mc_oracle(&q, Kind::Moment, 10, 0), Err(Error::Unsupported(_))));
        let shape = WordShape::new(vec![2], vec![-1, 1], vec![0, 1]).unwrap();
        let bad = identity_spec(shape, 2)
            .with_gram(
                vec!["G".into(), "H".into()],
                Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap(),
            )
            .unwrap();
        assert!(matches!(mc_oracle(&bad, Kind::Moment, 10, 0), Err(Error::NotPsd(_))));
        let three = identity_spec(WordShape::alternating(vec![2, 2, 2]).unwrap(), 2);
        assert!(mc_oracle(&three, Kind::Cumulant, 10, 0).is_err());
    }

    #[test]
    fn gram_factor_reconstructs() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let l = gram_factor(&g).unwrap();
        assert!((&l * l.transpose() - &g).norm() < 1e-12);
        let rank_one = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let l = gram_factor(&rank_one).unwrap();
        assert!((&l * l.transpose() - &rank_one).norm() < 1e-12);
    }
}
