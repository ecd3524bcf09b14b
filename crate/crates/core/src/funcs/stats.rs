//! Numeric kernels behind the registered functions. Inputs are plain slices;
//! row alignment and kinds are checked by the caller.

use statrs::function::erf::erfc;

use super::FuncError;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sum of squared deviations from the mean.
pub fn sum_sq_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

pub fn variance(v: &[f64], sample: bool) -> Result<f64, FuncError> {
    let n = v.len();
    if n == 0 {
        return Err(FuncError::EmptyOperand);
    }
    if sample {
        if n < 2 {
            return Err(FuncError::Precondition("sample variance needs at least 2 values".into()));
        }
        Ok(sum_sq_dev(v) / (n - 1) as f64)
    } else {
        Ok(sum_sq_dev(v) / n as f64)
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, FuncError> {
    if x.len() < 2 {
        return Err(FuncError::Precondition("CORR needs at least 2 aligned rows".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Smoothed equal-width histograms of `x` and `y` over their joint range.
pub fn histograms(x: &[f64], y: &[f64], bins: usize, eps: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let lo = x.iter().chain(y).copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().chain(y).copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let hist = |v: &[f64]| {
        let mut counts = vec![0usize; bins];
        for &a in v {
            let i = if width > 0.0 { ((a - lo) / width).floor() as usize } else { 0 };
            counts[i.min(bins - 1)] += 1;
        }
        let n = v.len() as f64;
        counts
            .into_iter()
            .map(|c| (c as f64 / n + eps) / (1.0 + bins as f64 * eps))
            .collect::<Vec<_>>()
    };
    (hist(x), hist(y), width)
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| a * (a / b).ln()).sum::<f64>().max(0.0)
}

pub fn emd(p: &[f64], q: &[f64], width: f64) -> f64 {
    let mut cp = 0.0;
    let mut cq = 0.0;
    let mut total = 0.0;
    for (a, b) in p.iter().zip(q) {
        cp += a;
        cq += b;
        total += (cp - cq).abs();
    }
    total * width
}

pub fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * erfc(-(x - mu) / (sigma * std::f64::consts::SQRT_2))
}

/// Two-sided one-sample K-S statistic against a continuous CDF.
pub fn ks_statistic(v: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form converges quickly for small lambda
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for j in 1..=20 {
            let k = (2 * j - 1) as f64;
            s += (-k * k * c).exp();
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut s = 0.0;
        for j in 1..=100 {
            let j = j as f64;
            let term = (-2.0 * j * j * lambda * lambda).exp();
            s += if j as u64 % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        (2.0 * s).clamp(0.0, 1.0)
    }
}

pub fn ks_normal_pvalue(v: &[f64]) -> Result<f64, FuncError> {
    if v.len() < 3 {
        return Err(FuncError::Precondition("KS_normal needs at least 3 values".into()));
    }
    let mu = mean(v);
    let sd = variance(v, true)?.sqrt();
    if sd == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    let d = ks_statistic(v, |x| normal_cdf(x, mu, sd));
    Ok(kolmogorov_sf((v.len() as f64).sqrt() * d))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Result<LinearFit, FuncError> {
    if x.len() < 2 {
        return Err(FuncError::Precondition("fit_LM needs at least 2 aligned rows".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 0.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(LinearFit { slope, intercept, r_squared })
}

/// Residuals divided by the residual standard error (n - 2 dof).
pub fn standardized_residuals(fit: &LinearFit, x: &[f64], y: &[f64]) -> Result<Vec<f64>, FuncError> {
    let n = x.len();
    if n < 3 {
        return Err(FuncError::Precondition("SRES needs at least 3 aligned rows".into()));
    }
    let res: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - (fit.slope * a + fit.intercept)).collect();
    let ss: f64 = res.iter().map(|r| r * r).sum();
    let s = (ss / (n - 2) as f64).sqrt();
    // exact fits leave rounding noise only; treat it as zero spread
    let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if s <= 1e-12 * scale {
        return Ok(vec![0.0; n]);
    }
    Ok(res.into_iter().map(|r| r / s).collect())
}

pub fn gaussian_loss(v: &[f64]) -> Result<f64, FuncError> {
    at_least(v, 3, "fit_Gaussian")?;
    let mu = mean(v);
    let sd = variance(v, true)?.sqrt();
    if sd == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    Ok(ks_statistic(v, |x| normal_cdf(x, mu, sd)))
}

pub fn powerlaw_loss(v: &[f64]) -> Result<f64, FuncError> {
    at_least(v, 3, "fit_Powerlaw")?;
    if v.iter().any(|&x| x <= 0.0) {
        return Err(FuncError::DomainError("fit_Powerlaw needs positive values".into()));
    }
    let xmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let logs: f64 = v.iter().map(|x| (x / xmin).ln()).sum();
    if logs == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    let alpha = 1.0 + v.len() as f64 / logs;
    Ok(ks_statistic(v, |x| 1.0 - (x / xmin).powf(1.0 - alpha)))
}

pub fn uniform_loss(v: &[f64]) -> Result<f64, FuncError> {
    at_least(v, 3, "fit_Linear")?;
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Err(FuncError::DegenerateVariance);
    }
    Ok(ks_statistic(v, |x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0)))
}

fn at_least(v: &[f64], n: usize, name: &str) -> Result<(), FuncError> {
    if v.is_empty() {
        return Err(FuncError::EmptyOperand);
    }
    if v.len() < n {
        return Err(FuncError::Precondition(format!("{name} needs at least {n} values")));
    }
    Ok(())
}

fn cluster_prep(v: &[f64], k: usize, name: &str) -> Result<Vec<f64>, FuncError> {
    if v.is_empty() {
        return Err(FuncError::EmptyOperand);
    }
    if k == 0 || v.len() < k {
        return Err(FuncError::Precondition(format!("{name} needs at least k = {k} values")));
    }
    if sum_sq_dev(v) == 0.0 {
        return Err(FuncError::DegenerateVariance);
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Within-cluster sum of squares over total sum of squares.
fn loss_of(groups: &[&[f64]], total: f64) -> f64 {
    let within: f64 = groups.iter().filter(|g| !g.is_empty()).map(|g| sum_sq_dev(g)).sum();
    (within / total).clamp(0.0, 1.0)
}

/// 1-D k-means (Lloyd) seeded at the (i + 1/2)/k quantiles.
pub fn kmeans_loss(v: &[f64], k: usize) -> Result<f64, FuncError> {
    let s = cluster_prep(v, k, "fit_Kmeans")?;
    let n = s.len();
    let mut centers: Vec<f64> = (0..k)
        .map(|i| s[(((i as f64 + 0.5) / k as f64) * n as f64).floor() as usize].min(s[n - 1]))
        .collect();
    let mut assign = vec![usize::MAX; n];
    for _ in 0..200 {
        let mut changed = false;
        for (i, &x) in s.iter().enumerate() {
            let mut best = 0;
            for c in 1..k {
                if (x - centers[c]).abs() < (x - centers[best]).abs() {
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<f64> = s.iter().zip(&assign).filter(|(_, &a)| a == c).map(|(x, _)| *x).collect();
            if !members.is_empty() {
                *center = mean(&members);
            }
        }
    }
    let groups: Vec<Vec<f64>> = (0..k)
        .map(|c| s.iter().zip(&assign).filter(|(_, &a)| a == c).map(|(x, _)| *x).collect())
        .collect();
    let refs: Vec<&[f64]> = groups.iter().map(Vec::as_slice).collect();
    Ok(loss_of(&refs, sum_sq_dev(&s)))
}

/// Complete-linkage agglomeration cut at `k` clusters. In one dimension the
/// clusters stay contiguous runs of the sorted values and the cheapest merge
/// is always between neighbours, so only adjacent pairs are compared.
pub fn hierarchical_loss(v: &[f64], k: usize) -> Result<f64, FuncError> {
    let s = cluster_prep(v, k, "fit_Hierarchical")?;
    let mut bounds: Vec<(usize, usize)> = (0..s.len()).map(|i| (i, i + 1)).collect();
    while bounds.len() > k {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..bounds.len() - 1 {
            let d = s[bounds[i + 1].1 - 1] - s[bounds[i].0];
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        let merged = (bounds[best].0, bounds[best + 1].1);
        bounds[best] = merged;
        bounds.remove(best + 1);
    }
    let refs: Vec<&[f64]> = bounds.iter().map(|&(a, b)| &s[a..b]).collect();
    Ok(loss_of(&refs, sum_sq_dev(&s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kolmogorov_survival() {
        // scipy.stats.kstwobign.sf at the same points
        let reference = [
            (0.2, 0.999999999999495),
            (0.5, 0.9639452436648751),
            (1.0, 0.26999967167735456),
            (1.17, 0.12939004218561884),
            (1.18, 0.1234538094297657),
            (1.19, 0.11774229287977166),
            (1.5, 0.022217962616525127),
            (2.5, 7.453306344157342e-06),
        ];
        for (l, p) in reference {
            assert!((kolmogorov_sf(l) - p).abs() < 1e-13, "{l}: {} vs {p}", kolmogorov_sf(l));
        }
    }

    #[test]
    fn two_bin_kl() {
        // 2 of 4 points per bin against 1 of 4 and 3 of 4
        let x = [0.0, 0.1, 0.9, 1.0];
        let y = [0.0, 0.9, 0.95, 1.0];
        let (p, q, _) = histograms(&x, &y, 2, 1e-9);
        let expect = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl(&p, &q) - expect).abs() < 1e-7);
    }

    #[test]
    fn exact_line_fit() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = least_squares(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
        assert!(standardized_residuals(&f, &x, &y).unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn constant_y_fit() {
        let f = least_squares(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).unwrap();
        assert_eq!((f.slope, f.r_squared), (0.0, 0.0));
        assert_eq!(least_squares(&[1.0, 1.0], &[1.0, 2.0]), Err(FuncError::DegenerateVariance));
    }

    #[test]
    fn clustering_extremes() {
        let v = [1.0, 1.1, 0.9, 10.0, 10.1, 9.9, 20.0, 20.1, 19.9];
        assert!(kmeans_loss(&v, 3).unwrap() < 0.01);
        assert!(hierarchical_loss(&v, 3).unwrap() < 0.01);
        assert_eq!(kmeans_loss(&v, 1).unwrap(), 1.0);
        assert_eq!(hierarchical_loss(&v, 1).unwrap(), 1.0);
        assert_eq!(kmeans_loss(&[2.0, 2.0, 2.0], 3), Err(FuncError::DegenerateVariance));
    }
}
