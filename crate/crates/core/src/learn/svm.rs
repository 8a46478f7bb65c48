//! Kernel SVM trained by SMO with second-order working-set selection.
//!
//! Solves `min ½αᵀQα − Σα` subject to `0 ≤ αᵢ ≤ C`, `Σ yᵢαᵢ = 0`, where
//! `Qᵢⱼ = yᵢyⱼKᵢⱼ`. Each step picks the maximal-violating `i` and the `j`
//! with the largest second-order decrease, solves the two-variable problem
//! analytically, and stops once the KKT violation `m(α) − M(α)` falls below
//! `tol`.

use crate::molgraph::Class;

use super::{KernelMatrix, LearnError};

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_iterations: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    /// Dual coefficient per training molecule.
    pub alpha: Vec<f64>,
    /// Training labels as ±1.
    pub y: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    pub iterations: usize,
    /// `Σα − ½αᵀQα` at the stopping point.
    pub dual_objective: f64,
}

impl SvmModel {
    pub fn support_vectors(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alpha.len()).filter(|&i| self.alpha[i] > 0.0)
    }
}

pub fn train_svm(kernel: &KernelMatrix, labels: &[Class], params: &SvmParams) -> Result<SvmModel, LearnError> {
    if !kernel.is_square() {
        return Err(LearnError::NotSquare);
    }
    let n = labels.len();
    if kernel.rows() != n {
        return Err(LearnError::LengthMismatch(kernel.rows(), n));
    }
    if !labels.iter().any(|c| c.is_active()) || labels.iter().all(|c| c.is_active()) {
        return Err(LearnError::SingleClass);
    }
    if params.c.is_nan() || params.c <= 0.0 {
        return Err(LearnError::InvalidC(params.c));
    }
    let c = params.c;
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let q = |i: usize, j: usize| y[i] * y[j] * kernel.get(i, j);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    while iterations < params.max_iterations {
        // i: maximal violator in the up set.
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if up(alpha[t], y[t]) && -y[t] * grad[t] > g_max {
                g_max = -y[t] * grad[t];
                i = t;
            }
        }
        // j: best second-order gain in the low set.
        let mut g_min = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            g_min = g_min.min(v);
            if i == usize::MAX {
                continue;
            }
            let b = g_max - v;
            if b > 0.0 {
                let mut a = kernel.get(i, i) + kernel.get(t, t) - 2.0 * kernel.get(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let gain = -(b * b) / a;
                if gain < best {
                    best = gain;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < params.tol {
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = kernel.get(i, i) + kernel.get(j, j) - 2.0 * kernel.get(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    // Bias from free vectors, else the midpoint of the feasible interval.
    let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free_sum, mut free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (upper + lower) / 2.0
    };
    // Σα − ½αᵀQα = −½ Σ αᵢ(Gᵢ − 1)
    let dual_objective = -0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();
    Ok(SvmModel {
        alpha,
        y,
        bias: -rho,
        c,
        iterations,
        dual_objective,
    })
}

/// `f(x) = Σ αᵢyᵢK(x, xᵢ) + bias` for each row of `kernel_test_train`.
pub fn decision_values(model: &SvmModel, kernel_test_train: &KernelMatrix) -> Result<Vec<f64>, LearnError> {
    if kernel_test_train.cols() != model.alpha.len() {
        return Err(LearnError::LengthMismatch(kernel_test_train.cols(), model.alpha.len()));
    }
    let sv: Vec<usize> = model.support_vectors().collect();
    Ok((0..kernel_test_train.rows())
        .map(|r| {
            let row = kernel_test_train.row(r);
            sv.iter().map(|&i| model.alpha[i] * model.y[i] * row[i]).sum::<f64>() + model.bias
        })
        .collect())
}
