//! Log-log survival regression with a bootstrap slope interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum GridRule {
    /// `points` geometric thresholds between two quantiles of the positive
    /// samples.
    Quantile { lo: f64, hi: f64, points: usize },
    /// Given thresholds; those exceeded by fewer than `min_count` positive
    /// samples are dropped.
    Fixed {
        thresholds: Vec<f64>,
        min_count: usize,
    },
}

impl Default for GridRule {
    fn default() -> Self {
        GridRule::Quantile {
            lo: 0.7,
            hi: 0.99,
            points: 20,
        }
    }
}

impl GridRule {
    pub fn describe(&self) -> String {
        match self {
            GridRule::Quantile { lo, hi, points } => format!("quantile {lo}-{hi} x{points}"),
            GridRule::Fixed {
                thresholds,
                min_count,
            } => {
                format!("fixed x{} min_count {min_count}", thresholds.len())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub grid: GridRule,
    pub bootstrap: usize,
    pub seed: u64,
    pub min_samples: usize,
    /// The window ends at this quantile of the censored values.
    pub censored_cap: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            grid: GridRule::default(),
            bootstrap: 200,
            seed: 0,
            min_samples: MIN_SAMPLES,
            censored_cap: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    pub thresholds: Vec<f64>,
    /// Fraction of positive samples at or above each threshold, censored
    /// samples included.
    pub survival: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub bootstrap_lo: f64,
    pub bootstrap_hi: f64,
    /// Samples entering the fit, zeros included.
    pub n_samples: usize,
    /// Zero samples, which are left out of the tail.
    pub n_zero: usize,
    pub censored_fraction: f64,
    pub rule: String,
}

impl TailFit {
    pub fn zero_fraction(&self) -> f64 {
        self.n_zero as f64 / self.n_samples as f64
    }
}

/// Value at quantile `q` of sorted data (nearest rank).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let i = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[i]
}

/// Count of sorted values `>= t`.
fn exceeding(sorted: &[f64], t: f64) -> usize {
    sorted.len() - sorted.partition_point(|&x| x < t)
}

fn ols(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Positive samples split into sorted uncensored values and censored
/// lower bounds. A censored sample counts as an exceedance of every
/// threshold up to its smallest censored value.
struct Pool {
    uncensored: Vec<f64>,
    censored: usize,
}

impl Pool {
    fn total(&self) -> usize {
        self.uncensored.len() + self.censored
    }

    fn exceeding(&self, t: f64) -> usize {
        exceeding(&self.uncensored, t) + self.censored
    }

    fn regress(&self, thresholds: &[f64]) -> Option<(f64, f64)> {
        let n = self.total() as f64;
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &t in thresholds {
            let k = self.exceeding(t);
            if k > 0 {
                xs.push(t.ln());
                ys.push((k as f64 / n).ln());
            }
        }
        ols(&xs, &ys)
    }
}

fn grid(pool: &Pool, cap: f64, rule: &GridRule) -> Result<Vec<f64>> {
    let sorted = &pool.uncensored;
    match rule {
        GridRule::Quantile { lo, hi, points } => {
            if !(0.0 < *lo && lo < hi && *hi <= 1.0) || *points < 2 {
                return Err(Error::Fit(format!("invalid quantile window {lo}-{hi}")));
            }
            let (a, b) = (quantile(sorted, *lo), quantile(sorted, *hi).min(cap));
            if !(b > a) {
                return Err(Error::Fit(format!("empty tail window [{a}, {b}]")));
            }
            let step = (b / a).ln() / (*points - 1) as f64;
            Ok((0..*points).map(|i| a * (step * i as f64).exp()).collect())
        }
        GridRule::Fixed {
            thresholds,
            min_count,
        } => {
            let kept: Vec<f64> = thresholds
                .iter()
                .copied()
                .filter(|&t| t > 0.0 && t <= cap && exceeding(sorted, t) >= (*min_count).max(1))
                .collect();
            if kept.len() < 2 {
                return Err(Error::Fit("fewer than two usable thresholds".into()));
            }
            Ok(kept)
        }
    }
}

/// Fits `ln S(R) = intercept + slope ln R` on the positive samples.
/// Zeros are counted separately.
pub fn fit_tail(samples: &[f64], opts: &FitOptions) -> Result<TailFit> {
    fit_censored_tail(samples, &vec![false; samples.len()], opts)
}

/// As [`fit_tail`], with right-censored samples whose value is a lower
/// bound. Censored samples count as exceedances throughout the window,
/// which ends at the `censored_cap` quantile of the censored values; only
/// the censored samples below that quantile are miscounted.
pub fn fit_censored_tail(samples: &[f64], censored: &[bool], opts: &FitOptions) -> Result<TailFit> {
    if censored.len() != samples.len() {
        return Err(Error::Fit(
            "censoring flags do not match the samples".into(),
        ));
    }
    let n_censored = censored.iter().filter(|&&c| c).count();
    if samples.len() - n_censored < opts.min_samples {
        return Err(Error::Fit(format!(
            "{} uncensored samples; at least {} are needed",
            samples.len() - n_censored,
            opts.min_samples
        )));
    }
    if let Some(x) = samples.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Fit(format!("sample {x} is not a nonnegative real")));
    }
    let mut positive: Vec<f64> = samples
        .iter()
        .zip(censored)
        .filter(|&(&x, &c)| x > 0.0 && !c)
        .map(|(&x, _)| x)
        .collect();
    positive.sort_by(f64::total_cmp);
    if positive.is_empty() || positive[0] == positive[positive.len() - 1] {
        return Err(Error::Fit("positive samples are all equal".into()));
    }
    if !(0.0..=1.0).contains(&opts.censored_cap) {
        return Err(Error::Fit(format!(
            "censored cap quantile {} is outside [0, 1]",
            opts.censored_cap
        )));
    }
    let mut lower_bounds: Vec<f64> = samples
        .iter()
        .zip(censored)
        .filter(|&(_, &c)| c)
        .map(|(&x, _)| x)
        .collect();
    lower_bounds.sort_by(f64::total_cmp);
    let cap = if lower_bounds.is_empty() {
        f64::INFINITY
    } else {
        quantile(&lower_bounds, opts.censored_cap)
    };
    let pool = Pool {
        uncensored: positive,
        censored: n_censored,
    };
    let thresholds = grid(&pool, cap, &opts.grid)?;
    let (slope, intercept) = pool
        .regress(&thresholds)
        .ok_or_else(|| Error::Fit("degenerate regression".into()))?;
    let at_risk: Vec<usize> = thresholds.iter().map(|&t| pool.exceeding(t)).collect();
    let survival = at_risk
        .iter()
        .map(|&k| k as f64 / pool.total() as f64)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut slopes = Vec::with_capacity(opts.bootstrap);
    let total = pool.total();
    let mut resample = Pool {
        uncensored: Vec::with_capacity(total),
        censored: 0,
    };
    for _ in 0..opts.bootstrap {
        resample.uncensored.clear();
        resample.censored = 0;
        for _ in 0..total {
            let i = rng.gen_range(0..total);
            match pool.uncensored.get(i) {
                Some(&x) => resample.uncensored.push(x),
                None => resample.censored += 1,
            }
        }
        resample.uncensored.sort_by(f64::total_cmp);
        if let Some((s, _)) = resample.regress(&thresholds) {
            slopes.push(s);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let (bootstrap_lo, bootstrap_hi) = if slopes.is_empty() {
        (slope, slope)
    } else {
        (quantile(&slopes, 0.025), quantile(&slopes, 0.975))
    };
    Ok(TailFit {
        window: (thresholds[0], thresholds[thresholds.len() - 1]),
        thresholds,
        survival,
        at_risk,
        slope,
        intercept,
        bootstrap_lo,
        bootstrap_hi,
        n_samples: samples.len(),
        n_zero: samples.iter().filter(|&&x| x == 0.0).count(),
        censored_fraction: n_censored as f64 / samples.len() as f64,
        rule: if n_censored > 0 {
            format!(
                "{} censored cap q{}",
                opts.grid.describe(),
                opts.censored_cap
            )
        } else {
            opts.grid.describe()
        },
    })
}

/// Warning text when the slope of `large` leaves the bootstrap interval of
/// `small` or the other way round.
pub fn robustness_warning(small: &TailFit, large: &TailFit) -> Option<String> {
    let inside = |f: &TailFit, s: f64| f.bootstrap_lo <= s && s <= f.bootstrap_hi;
    if inside(small, large.slope) || inside(large, small.slope) {
        None
    } else {
        Some(format!(
            "slope moved from {:.4} [{:.4}, {:.4}] to {:.4} [{:.4}, {:.4}] when the depth grew",
            small.slope,
            small.bootstrap_lo,
            small.bootstrap_hi,
            large.slope,
            large.bootstrap_lo,
            large.bootstrap_hi
        ))
    }
}
