//! Correlation, alpha calibration and Fisher-Z confidence intervals.

use serde::Serialize;

use crate::error::StatsError;
use crate::exec::Exec;
use crate::metrics::{weighted_intensity, Reuse};

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewSamples {
            needed: 3,
            got: xs.len(),
        });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys)?;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys)?;
    pearson(&average_ranks(xs), &average_ranks(ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub r_p: f64,
    pub r_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationCurve {
    pub grid: Vec<GridPoint>,
    pub selected_alpha: f64,
    pub step: f64,
    pub epsilon: f64,
}

pub const DEFAULT_STEP: f64 = 0.05;
pub const DEFAULT_EPSILON: f64 = 0.005;

/// `0, step, 2·step, …, 1`. The endpoint 1 is always included.
pub fn alpha_grid(step: f64) -> Result<Vec<f64>, StatsError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(StatsError::InvalidStep(step));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let a = (k as f64 * step * 1e12).round() / 1e12;
        if a >= 1.0 - 1e-9 {
            break;
        }
        grid.push(a);
        k += 1;
    }
    grid.push(1.0);
    Ok(grid)
}

/// Correlation of `DI(α)` with measured efficiency over an α grid, with
/// the plateau pick from [`select_alpha`].
pub fn alpha_sweep(
    reuses: &[Reuse],
    efficiencies: &[f64],
    step: f64,
    epsilon: f64,
    exec: Exec,
) -> Result<CalibrationCurve, StatsError> {
    if reuses.len() != efficiencies.len() {
        return Err(StatsError::LengthMismatch(reuses.len(), efficiencies.len()));
    }
    let alphas = alpha_grid(step)?;
    let grid = exec.try_map(&alphas, |&alpha| {
        let di = reuses
            .iter()
            .map(|r| weighted_intensity(r, alpha))
            .collect::<Result<Vec<_>, _>>()?;
        Ok::<_, StatsError>(GridPoint {
            alpha,
            r_p: pearson(&di, efficiencies)?,
            r_s: spearman(&di, efficiencies)?,
        })
    })?;
    let selected_alpha = select_alpha(&grid, epsilon);
    Ok(CalibrationCurve {
        grid,
        selected_alpha,
        step,
        epsilon,
    })
}

/// Smallest grid α whose next grid point improves `r_p` by less than
/// `epsilon`. If `r_p` keeps rising by at least `epsilon` to the end, the
/// argmax (first among ties) is returned.
pub fn select_alpha(grid: &[GridPoint], epsilon: f64) -> f64 {
    if let Some(w) = grid.windows(2).find(|w| w[1].r_p - w[0].r_p < epsilon) {
        return w[0].alpha;
    }
    grid.iter()
        .fold(None::<&GridPoint>, |best, p| match best {
            Some(b) if b.r_p >= p.r_p => Some(b),
            _ => Some(p),
        })
        .map(|p| p.alpha)
        .unwrap_or(0.0)
}

/// Two-sided normal critical value for the supported confidence levels.
pub fn z_critical(level: f64) -> Result<f64, StatsError> {
    if (level - 0.95).abs() < 1e-9 {
        Ok(1.96)
    } else if (level - 0.99).abs() < 1e-9 {
        Ok(2.58)
    } else {
        Err(StatsError::UnsupportedLevel(level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub r: f64,
    pub n: usize,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    /// `upper − lower` on the correlation scale.
    pub width: f64,
    /// Width on the Fisher-Z scale; independent of `r`.
    pub z_width: f64,
}

pub fn fisher_z(r: f64) -> f64 {
    0.5 * ((1.0 + r) / (1.0 - r)).ln()
}

pub fn inverse_fisher_z(z: f64) -> f64 {
    let e = (2.0 * z).exp();
    if e.is_infinite() {
        return 1.0;
    }
    (e - 1.0) / (e + 1.0)
}

/// Fisher-Z interval for a population correlation given sample `r` over
/// `n` pairs.
pub fn fisher_ci(r: f64, n: usize, level: f64) -> Result<ConfidenceInterval, StatsError> {
    let z_crit = z_critical(level)?;
    if n < 4 {
        return Err(StatsError::TooFewSamples { needed: 4, got: n });
    }
    if r.is_nan() || r.abs() >= 1.0 {
        return Err(StatsError::PerfectCorrelation(r));
    }
    let z = fisher_z(r);
    let se = 1.0 / ((n - 3) as f64).sqrt();
    let lower = inverse_fisher_z(z - z_crit * se);
    let upper = inverse_fisher_z(z + z_crit * se);
    Ok(ConfidenceInterval {
        r,
        n,
        level,
        lower,
        upper,
        width: upper - lower,
        z_width: 2.0 * z_crit * se,
    })
}

/// Fisher-Z interval width for `n` samples.
pub fn z_width(n: usize, level: f64) -> Result<f64, StatsError> {
    if n < 4 {
        return Err(StatsError::TooFewSamples { needed: 4, got: n });
    }
    Ok(2.0 * z_critical(level)? / ((n - 3) as f64).sqrt())
}

/// Smallest sample size whose Fisher-Z interval is no wider than
/// `max_z_width`.
pub fn min_sample_size(level: f64, max_z_width: f64) -> Result<usize, StatsError> {
    if !(max_z_width > 0.0 && max_z_width.is_finite()) {
        return Err(StatsError::NonPositive("interval width"));
    }
    let ratio = 2.0 * z_critical(level)? / max_z_width;
    let mut n = 3 + (ratio * ratio).floor().max(1.0) as usize;
    while n > 4 && z_width(n - 1, level)? <= max_z_width {
        n -= 1;
    }
    while z_width(n, level)? > max_z_width {
        n += 1;
    }
    Ok(n)
}
