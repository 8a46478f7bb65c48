//! Reference numerics: dual SVM by projected gradient, pairwise AUC,
//! enumerated Wilcoxon p-values, χ² quantiles by quadrature.

/// Dual objective `Σα − ½ ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ`.
pub fn dual_objective(kernel: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Euclidean projection onto `{0 ≤ α ≤ c, yᵀα = 0}`: clip(v − λy) with the
/// multiplier λ found by bisection.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .map(|(&vi, &yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let balance = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(a, y)| a * y).sum() };
    let span = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        // balance is non-increasing in λ
        if balance(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

/// Maximizes the SVM dual with accelerated projected gradient. Returns α.
pub fn solve_dual(kernel: &[Vec<f64>], y: &[f64], c: f64, iterations: usize) -> Vec<f64> {
    let n = y.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * kernel[i][j]).collect())
        .collect();
    // Gershgorin bound on the largest eigenvalue.
    let lipschitz = q
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(1e-12, f64::max);
    let step = 1.0 / lipschitz;
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        // gradient of ½αᵀQα − 1ᵀα at z
        let grad: Vec<f64> = (0..n)
            .map(|i| q[i].iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() - 1.0)
            .collect();
        let v: Vec<f64> = z.iter().zip(&grad).map(|(zi, g)| zi - step * g).collect();
        let next = project(&v, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        x = next;
        t = t_next;
    }
    x
}

/// AUC by comparing every (positive, negative) pair; ties count one half.
pub fn auc_pairwise(scores: &[f64], positive: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if !positive[i] {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if positive[j] {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

/// Average ranks (1-based) of `values`.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let below = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Two-sided exact Wilcoxon signed-rank test by enumerating all sign
/// assignments of the nonzero differences. Returns `(W, p)` where
/// `W = min(W⁺, W⁻)` and `p = P(min(W⁺, W⁻) ≤ W)` under the null.
pub fn wilcoxon_enumerated(x: &[f64], y: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let n = d.len();
    assert!(n <= 22, "too many differences to enumerate");
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&abs);
    let total: f64 = ranks.iter().sum();
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w = w_plus.min(total - w_plus);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let wp: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if wp.min(total - wp) <= w + 1e-9 {
            hits += 1;
        }
    }
    (w, hits as f64 / (1u64 << n) as f64)
}

/// χ²₁ quantile found by bisection on a Simpson-rule CDF.
pub fn chi2_quantile_by_quadrature(confidence: f64) -> f64 {
    // With x = u², P(X ≤ q) = ∫₀^√q 2φ(u) du.
    let cdf = |q: f64| -> f64 {
        let b = q.sqrt();
        let steps = 20_000;
        let h = b / steps as f64;
        let f = |u: f64| 2.0 * (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = f(0.0) + f(b);
        for i in 1..steps {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < confidence {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of (active, inactive) pairs with identical feature vectors.
pub fn correspondences_pairwise(vectors: &[Vec<bool>], active: &[bool]) -> usize {
    let mut count = 0;
    for i in 0..vectors.len() {
        for j in 0..vectors.len() {
            if active[i] && !active[j] && vectors[i] == vectors[j] {
                count += 1;
            }
        }
    }
    count
}

/// Pearson correlation of two 0/1 columns; zero if either is constant.
pub fn phi(a: &[bool], b: &[bool]) -> f64 {
    let n = a.len() as f64;
    let x: Vec<f64> = a.iter().map(|&v| v as u8 as f64).collect();
    let y: Vec<f64> = b.iter().map(|&v| v as u8 as f64).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_matches_tables() {
        assert!((chi2_quantile_by_quadrature(0.95) - 3.841459).abs() < 1e-5);
        assert!((chi2_quantile_by_quadrature(0.999) - 10.827566).abs() < 1e-5);
    }

    #[test]
    fn separable_pair() {
        // Two points, linear kernel on x = ±1: α = 0.5 each.
        let k = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let a = solve_dual(&k, &[1.0, -1.0], 10.0, 5000);
        assert!((a[0] - 0.5).abs() < 1e-6 && (a[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn wilcoxon_small() {
        // All five differences positive: W = 0, p = 2/32.
        let (w, p) = wilcoxon_enumerated(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0.0; 5]);
        assert_eq!(w, 0.0);
        assert!((p - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn auc_ties() {
        assert_eq!(auc_pairwise(&[1.0, 1.0], &[true, false]), 0.5);
    }
}
