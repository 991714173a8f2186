//! Laplace-approximation baseline on multinomial logistic regression.
//!
//! Parameters are a `K × d` weight matrix flattened class-major
//! (`θ[k * d + j]`). The MAP objective is the summed cross-entropy plus
//! `(λ/2)‖θ‖²`; the posterior is approximated by `N(θ̂, Σ)` with
//! `Σ = (H + λI)⁻¹` and `H = Σ_i (diag p_i − p_i p_iᵀ) ⊗ x_i x_iᵀ`, the
//! Gauss–Newton (here also exact) Hessian of the data term.
//!
//! The predictive `E_θ[softmax(θ x)]` is estimated by Monte Carlo. Since the
//! logits `θ x` are linear in `θ`, they are sampled directly from their
//! implied `K`-dimensional Gaussian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::ProbVec;

/// Largest supported `K · d`.
pub const MAX_PARAMETERS: usize = 200;
pub const DEFAULT_MC_SAMPLES: usize = 1000;
const GRAD_TOL: f64 = 1e-6;
const MAX_NEWTON_STEPS: usize = 200;

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn logits(theta: &[f64], x: &[f64], k: usize) -> Vec<f64> {
    let d = x.len();
    (0..k)
        .map(|c| {
            theta[c * d..(c + 1) * d]
                .iter()
                .zip(x)
                .map(|(w, v)| w * v)
                .sum()
        })
        .collect()
}

/// Training data shape check. Returns `d`.
fn check_data(features: &[Vec<f64>], labels: &[usize], k: usize) -> Result<usize> {
    if k < 2 {
        return Err(Error::TooFewClasses { got: k });
    }
    if features.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let d = features.first().map_or(0, Vec::len);
    if let Some(row) = features.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: row.len(),
        });
    }
    if let Some(&label) = labels.iter().find(|&&y| y >= k) {
        return Err(Error::LabelOutOfRange { label, k });
    }
    Ok(d)
}

fn check_precision(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "prior precision must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Regularized negative log-likelihood.
pub fn map_objective(
    theta: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
    k: usize,
    lambda: f64,
) -> f64 {
    let mut total = 0.5 * lambda * theta.iter().map(|t| t * t).sum::<f64>();
    for (x, &y) in features.iter().zip(labels) {
        let z = logits(theta, x, k);
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        total += lse - z[y];
    }
    total
}

/// Gradient of [`map_objective`].
pub fn map_gradient(
    theta: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
    k: usize,
    lambda: f64,
) -> Vec<f64> {
    let mut grad: Vec<f64> = theta.iter().map(|t| lambda * t).collect();
    for (x, &y) in features.iter().zip(labels) {
        let d = x.len();
        let p = softmax(&logits(theta, x, k));
        for c in 0..k {
            let r = p[c] - if c == y { 1.0 } else { 0.0 };
            for j in 0..d {
                grad[c * d + j] += r * x[j];
            }
        }
    }
    grad
}

/// Gauss–Newton Hessian of the data term (no prior).
fn data_hessian(theta: &[f64], features: &[Vec<f64>], k: usize, d: usize) -> DMatrix<f64> {
    let dim = k * d;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for x in features {
        let p = softmax(&logits(theta, x, k));
        for a in 0..k {
            for b in 0..k {
                let w = if a == b {
                    p[a] - p[a] * p[a]
                } else {
                    -p[a] * p[b]
                };
                if w == 0.0 {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        h[(a * d + i, b * d + j)] += w * x[i] * x[j];
                    }
                }
            }
        }
    }
    h
}

fn check_dim(k: usize, d: usize) -> Result<()> {
    if k * d > MAX_PARAMETERS {
        return Err(Error::InvalidArgument(format!(
            "K·d = {} exceeds the supported {MAX_PARAMETERS} parameters",
            k * d
        )));
    }
    Ok(())
}

/// MAP weights by damped Newton iterations, stopping at gradient norm
/// below `1e-6`.
pub fn fit_map(features: &[Vec<f64>], labels: &[usize], k: usize, lambda: f64) -> Result<Vec<f64>> {
    check_precision(lambda)?;
    let d = check_data(features, labels, k)?;
    check_dim(k, d)?;
    let dim = k * d;
    let mut theta = vec![0.0; dim];
    let mut grad_norm = f64::INFINITY;
    for _ in 0..MAX_NEWTON_STEPS {
        let grad = map_gradient(&theta, features, labels, k, lambda);
        grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if grad_norm < GRAD_TOL {
            return Ok(theta);
        }
        let mut h = data_hessian(&theta, features, k, d);
        for i in 0..dim {
            h[(i, i)] += lambda;
        }
        let g = DVector::from_vec(grad.clone());
        let step = h
            .cholesky()
            .map(|c| c.solve(&g))
            .unwrap_or_else(|| g.clone());
        let f0 = map_objective(&theta, features, labels, k, lambda);
        let slope: f64 = g.dot(&step);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = theta
                .iter()
                .zip(step.iter())
                .map(|(a, s)| a - t * s)
                .collect();
            if map_objective(&cand, features, labels, k, lambda) <= f0 - 1e-4 * t * slope
                || t < 1e-10
            {
                theta = cand;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_NEWTON_STEPS,
        grad_norm,
    })
}

/// `Σ = (H(θ̂) + λI)⁻¹`.
pub fn laplace_covariance(
    theta_hat: &[f64],
    features: &[Vec<f64>],
    k: usize,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    check_precision(lambda)?;
    if !theta_hat.len().is_multiple_of(k) {
        return Err(Error::InvalidArgument(format!(
            "{} parameters do not split into {k} classes",
            theta_hat.len()
        )));
    }
    let d = theta_hat.len() / k;
    if let Some(row) = features.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: row.len(),
        });
    }
    let dim = k * d;
    let mut precision = data_hessian(theta_hat, features, k, d);
    for i in 0..dim {
        precision[(i, i)] += lambda;
    }
    let chol = precision.cholesky().ok_or(Error::SingularHessian)?;
    let mut cov = chol.inverse();
    // Symmetrize away rounding asymmetry.
    for i in 0..dim {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// Gaussian posterior over logistic-regression weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LaplaceRecord", into = "LaplaceRecord")]
pub struct LaplaceModel {
    k: usize,
    d: usize,
    theta_hat: Vec<f64>,
    covariance: DMatrix<f64>,
    prior_precision: f64,
    n_mc: usize,
    seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LaplaceRecord {
    classes: usize,
    features: usize,
    theta_hat: Vec<f64>,
    covariance: Vec<Vec<f64>>,
    prior_precision: f64,
    n_mc: usize,
    seed: u64,
}

impl TryFrom<LaplaceRecord> for LaplaceModel {
    type Error = Error;

    fn try_from(r: LaplaceRecord) -> Result<Self> {
        let dim = r.classes * r.features;
        if r.covariance.len() != dim || r.covariance.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidArgument(format!(
                "covariance must be {dim} × {dim}"
            )));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| r.covariance[i][j]);
        LaplaceModel::new(
            r.classes,
            r.theta_hat,
            cov,
            r.prior_precision,
            r.n_mc,
            r.seed,
        )
    }
}

impl From<LaplaceModel> for LaplaceRecord {
    fn from(m: LaplaceModel) -> Self {
        let dim = m.k * m.d;
        LaplaceRecord {
            classes: m.k,
            features: m.d,
            covariance: (0..dim)
                .map(|i| (0..dim).map(|j| m.covariance[(i, j)]).collect())
                .collect(),
            theta_hat: m.theta_hat,
            prior_precision: m.prior_precision,
            n_mc: m.n_mc,
            seed: m.seed,
        }
    }
}

impl LaplaceModel {
    /// Assembles a model, checking the covariance is symmetric positive
    /// semidefinite (`Σ = 0` is accepted and yields the plug-in predictor).
    pub fn new(
        k: usize,
        theta_hat: Vec<f64>,
        covariance: DMatrix<f64>,
        prior_precision: f64,
        n_mc: usize,
        seed: u64,
    ) -> Result<Self> {
        check_precision(prior_precision)?;
        if k < 2 {
            return Err(Error::TooFewClasses { got: k });
        }
        if theta_hat.is_empty() || !theta_hat.len().is_multiple_of(k) {
            return Err(Error::InvalidArgument(format!(
                "{} parameters do not split into {k} classes",
                theta_hat.len()
            )));
        }
        if n_mc < 1 {
            return Err(Error::InvalidArgument("n_mc must be at least 1".into()));
        }
        let d = theta_hat.len() / k;
        check_dim(k, d)?;
        let dim = k * d;
        if covariance.shape() != (dim, dim) {
            return Err(Error::InvalidArgument(format!(
                "covariance must be {dim} × {dim}"
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-8 {
                    return Err(Error::InvalidArgument("covariance is not symmetric".into()));
                }
            }
        }
        let scale = covariance.amax().max(1.0);
        let eig = SymmetricEigen::new(covariance.clone());
        if eig.eigenvalues.iter().any(|&v| v < -1e-10 * scale) {
            return Err(Error::InvalidArgument(
                "covariance is not positive semidefinite".into(),
            ));
        }
        Ok(LaplaceModel {
            k,
            d,
            theta_hat,
            covariance,
            prior_precision,
            n_mc,
            seed,
        })
    }

    /// MAP fit followed by the Laplace covariance.
    pub fn fit(
        features: &[Vec<f64>],
        labels: &[usize],
        k: usize,
        lambda: f64,
        n_mc: usize,
        seed: u64,
    ) -> Result<Self> {
        let theta = fit_map(features, labels, k, lambda)?;
        let cov = laplace_covariance(&theta, features, k, lambda)?;
        LaplaceModel::new(k, theta, cov, lambda, n_mc, seed)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta_hat(&self) -> &[f64] {
        &self.theta_hat
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn prior_precision(&self) -> f64 {
        self.prior_precision
    }

    pub fn with_samples(mut self, n_mc: usize, seed: u64) -> Self {
        self.n_mc = n_mc.max(1);
        self.seed = seed;
        self
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: x.len(),
            });
        }
        Ok(())
    }

    /// `softmax(θ̂ x)`.
    pub fn plugin_predict(&self, x: &[f64]) -> Result<ProbVec> {
        self.check_input(x)?;
        ProbVec::new(&softmax(&logits(&self.theta_hat, x, self.k)))
    }

    /// Monte-Carlo estimate of `E_{θ ~ N(θ̂, Σ)}[softmax(θ x)]`.
    pub fn predict(&self, x: &[f64]) -> Result<ProbVec> {
        self.check_input(x)?;
        let (k, d) = (self.k, self.d);
        let mean = logits(&self.theta_hat, x, k);
        // Logit covariance A Σ Aᵀ with A = I_K ⊗ xᵀ.
        let logit_cov = DMatrix::from_fn(k, k, |a, b| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    s += x[i] * self.covariance[(a * d + i, b * d + j)] * x[j];
                }
            }
            s
        });
        let eig = SymmetricEigen::new(logit_cov);
        let mut factor = eig.eigenvectors.clone();
        for (col, &v) in eig.eigenvalues.iter().enumerate() {
            let s = v.max(0.0).sqrt();
            for row in 0..k {
                factor[(row, col)] *= s;
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut avg = vec![0.0; k];
        let mut z = DVector::<f64>::zeros(k);
        let mut sample = vec![0.0; k];
        for n in 0..self.n_mc {
            for v in z.iter_mut() {
                *v = StandardNormal.sample(&mut rng);
            }
            let offset = &factor * &z;
            for c in 0..k {
                sample[c] = mean[c] + offset[c];
            }
            let p = softmax(&sample);
            // Running mean: exact when every sample is identical.
            for c in 0..k {
                avg[c] += (p[c] - avg[c]) / (n + 1) as f64;
            }
        }
        ProbVec::new(&avg)
    }
}

pub fn laplace_predict(model: &LaplaceModel, x: &[f64]) -> Result<ProbVec> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn toy_data(
        seed: u64,
        n: usize,
        k: usize,
        d: usize,
        scale: f64,
    ) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<f64> = (0..k * d)
            .map(|_| rng.random_range(-1.0..1.0) * scale)
            .collect();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for _ in 0..n {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = softmax(&logits(&truth, &x, k));
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut y = k - 1;
            for (c, pc) in p.iter().enumerate() {
                acc += pc;
                if u < acc {
                    y = c;
                    break;
                }
            }
            xs.push(x);
            ys.push(y);
        }
        (xs, ys)
    }

    fn plain_gradient_descent(xs: &[Vec<f64>], ys: &[usize], k: usize, lambda: f64) -> Vec<f64> {
        let d = xs[0].len();
        let lipschitz = lambda
            + xs.iter()
                .map(|x| x.iter().map(|v| v * v).sum::<f64>())
                .sum::<f64>();
        let mut theta = vec![0.0; k * d];
        for _ in 0..200_000 {
            let g = map_gradient(&theta, xs, ys, k, lambda);
            if g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-9 {
                break;
            }
            for (t, gi) in theta.iter_mut().zip(&g) {
                *t -= gi / lipschitz;
            }
        }
        theta
    }

    #[test]
    fn no_information_gives_zero_map() {
        let xs = vec![vec![0.0, 0.0]; 10];
        let ys: Vec<usize> = (0..10).map(|i| i % 3).collect();
        let theta = fit_map(&xs, &ys, 3, 1.0).unwrap();
        assert!(theta.iter().all(|&t| t.abs() < 1e-12));
        let theta = fit_map(&[], &[], 3, 1.0);
        assert!(theta.is_err() || theta.unwrap().is_empty());
    }

    #[test]
    fn symmetric_data_predicts_half_at_origin() {
        let xs: Vec<Vec<f64>> = vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]];
        let ys = vec![0, 0, 1, 1];
        let theta = fit_map(&xs, &ys, 2, 0.5).unwrap();
        let cov = laplace_covariance(&theta, &xs, 2, 0.5).unwrap();
        let model = LaplaceModel::new(2, theta.clone(), cov, 0.5, 100, 0).unwrap();
        let p = model.plugin_predict(&[0.0]).unwrap();
        assert!((p.as_slice()[0] - 0.5).abs() < 1e-12);
        assert!(theta[1] > theta[0]);
    }

    #[test]
    fn separable_fit_matches_gradient_descent() {
        let xs: Vec<Vec<f64>> = vec![
            vec![1.0, 2.0],
            vec![1.0, 1.5],
            vec![1.0, 3.0],
            vec![1.0, -2.0],
            vec![1.0, -1.0],
            vec![1.0, -2.5],
        ];
        let ys = vec![1, 1, 1, 0, 0, 0];
        let theta = fit_map(&xs, &ys, 2, 1.0).unwrap();
        assert!(theta.iter().all(|t| t.is_finite()));
        let reference = plain_gradient_descent(&xs, &ys, 2, 1.0);
        for (a, b) in theta.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        let model = LaplaceModel::new(2, theta, DMatrix::zeros(4, 4), 1.0, 1, 0).unwrap();
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(model.plugin_predict(x).unwrap().argmax(), y);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..10 {
            let (xs, ys) = toy_data(trial, 20, 3, 3, 2.0);
            let theta: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g = map_gradient(&theta, &xs, &ys, 3, 0.7);
            let h = 1e-5;
            let mut err = 0.0;
            let mut norm = 0.0;
            for i in 0..9 {
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[i] += h;
                tm[i] -= h;
                let fd = (map_objective(&tp, &xs, &ys, 3, 0.7)
                    - map_objective(&tm, &xs, &ys, 3, 0.7))
                    / (2.0 * h);
                err += (fd - g[i]).powi(2);
                norm += g[i] * g[i];
            }
            assert!((err / norm).sqrt() < 1e-5);
        }
    }

    #[test]
    fn covariance_without_data_is_prior() {
        let cov = laplace_covariance(&[0.0; 6], &[], 3, 4.0).unwrap();
        assert!((cov - DMatrix::identity(6, 6) * 0.25).amax() < 1e-15);
    }

    #[test]
    fn covariance_shrinks_with_precision() {
        let (xs, ys) = toy_data(1, 30, 2, 2, 1.0);
        let theta = fit_map(&xs, &ys, 2, 1.0).unwrap();
        let big = laplace_covariance(&theta, &xs, 2, 1e8).unwrap();
        assert!(big.amax() < 1e-7);
    }

    #[test]
    fn covariance_inverse_matches_fd_hessian() {
        let (xs, ys) = toy_data(2, 15, 2, 1, 1.0);
        let lambda = 1.0;
        let theta = fit_map(&xs, &ys, 2, lambda).unwrap();
        let cov = laplace_covariance(&theta, &xs, 2, lambda).unwrap();
        let precision = cov.try_inverse().unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[i] += h;
            tm[i] -= h;
            let gp = map_gradient(&tp, &xs, &ys, 2, lambda);
            let gm = map_gradient(&tm, &xs, &ys, 2, lambda);
            for j in 0..2 {
                let fd = (gp[j] - gm[j]) / (2.0 * h);
                let rel = (fd - precision[(j, i)]).abs() / precision[(j, i)].abs().max(1e-3);
                assert!(rel < 0.05, "entry ({j},{i}): {fd} vs {}", precision[(j, i)]);
            }
        }
    }

    #[test]
    fn zero_covariance_equals_plugin() {
        let theta = vec![0.3, -1.0, 0.5, 2.0, -0.2, 0.1];
        let model = LaplaceModel::new(3, theta, DMatrix::zeros(6, 6), 1.0, 500, 3).unwrap();
        for x in [[0.5, -1.0], [2.0, 0.3], [0.0, 0.0]] {
            assert_eq!(
                model.predict(&x).unwrap(),
                model.plugin_predict(&x).unwrap()
            );
        }
    }

    #[test]
    fn symmetric_posterior_predicts_uniform() {
        let model =
            LaplaceModel::new(3, vec![0.0; 6], DMatrix::identity(6, 6), 1.0, 10_000, 8).unwrap();
        let p = model.predict(&[1.0, -0.5]).unwrap();
        for &v in p.as_slice() {
            assert!((v - 1.0 / 3.0).abs() < 0.02, "{p:?}");
        }
    }

    #[test]
    fn mc_estimates_agree_within_standard_error() {
        let (xs, ys) = toy_data(5, 40, 3, 2, 2.0);
        let model = LaplaceModel::fit(&xs, &ys, 3, 1.0, 100, 1).unwrap();
        let x = [0.4, -0.7];
        let small = model.predict(&x).unwrap();
        let big = model.clone().with_samples(100_000, 2).predict(&x).unwrap();
        // Per-class sample variance from a separate draw.
        let probe = model.clone().with_samples(1, 0);
        let draws = 2000;
        let mut draws_p = Vec::new();
        for s in 0..draws {
            draws_p.push(probe.clone().with_samples(1, 1000 + s).predict(&x).unwrap());
        }
        for (c, (s, b)) in small.as_slice().iter().zip(big.as_slice()).enumerate() {
            let m = draws_p.iter().map(|p| p.as_slice()[c]).sum::<f64>() / draws as f64;
            let var = draws_p
                .iter()
                .map(|p| (p.as_slice()[c] - m).powi(2))
                .sum::<f64>()
                / (draws - 1) as f64;
            let se = (var / 100.0 + var / 100_000.0).sqrt();
            assert!((s - b).abs() <= 3.0 * se);
        }
    }

    #[test]
    fn ensembling_softens_predictions() {
        let (xs, ys) = toy_data(6, 25, 3, 2, 3.0);
        let model = LaplaceModel::fit(&xs, &ys, 3, 1.0, 2000, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let lap = model.predict(&x).unwrap().max_prob();
            let plug = model.plugin_predict(&x).unwrap().max_prob();
            assert!(lap <= plug + 0.01, "{lap} > {plug}");
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let (xs, ys) = toy_data(9, 20, 2, 2, 1.0);
        let model = LaplaceModel::fit(&xs, &ys, 2, 2.0, 50, 4).unwrap();
        let s = serde_json::to_string(&model).unwrap();
        let back: LaplaceModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, model);
        assert_eq!(
            back.predict(&[0.1, 0.2]).unwrap(),
            model.predict(&[0.1, 0.2]).unwrap()
        );

        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(LaplaceModel::new(2, vec![0.0, 0.0], bad, 1.0, 1, 0).is_err());
        assert!(LaplaceModel::new(2, vec![0.0; 2], DMatrix::zeros(2, 2), 0.0, 1, 0).is_err());
        assert!(fit_map(&[vec![0.0; 101]], &[0], 2, 1.0).is_err());
        assert!(model.predict(&[1.0]).is_err());
    }
}
