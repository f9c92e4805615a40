use std::io::Write;

use super::{ParabolicRow, Sample, TailFit};
use crate::error::Result;

/// Columns `sample_id,observable,censored`.
pub fn write_samples_csv<W: Write>(samples: &[Sample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample_id", "observable", "censored"])?;
    for s in samples {
        w.write_record([
            s.id.to_string(),
            s.value.to_string(),
            u8::from(s.censored).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `R,survival,n_at_risk`, then two `#` lines holding the fitted
/// parameters.
pub fn write_fit_csv<W: Write>(fit: &TailFit, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["R", "survival", "n_at_risk"])?;
    for ((r, s), k) in fit.thresholds.iter().zip(&fit.survival).zip(&fit.at_risk) {
        w.write_record([r.to_string(), s.to_string(), k.to_string()])?;
    }
    w.flush()?;
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    writeln!(
        out,
        "# slope,intercept,window_lo,window_hi,bootstrap_lo,bootstrap_hi,censored_fraction,n_samples,n_zero,rule"
    )?;
    writeln!(
        out,
        "# {},{},{},{},{},{},{},{},{},{}",
        fit.slope,
        fit.intercept,
        fit.window.0,
        fit.window.1,
        fit.bootstrap_lo,
        fit.bootstrap_hi,
        fit.censored_fraction,
        fit.n_samples,
        fit.n_zero,
        fit.rule
    )?;
    Ok(())
}

/// Columns `c,ring,empirical,sigma,bound`.
pub fn write_reach_csv<W: Write>(rows: &[ParabolicRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["c", "ring", "empirical", "sigma", "bound"])?;
    for row in rows {
        for r in &row.reach {
            w.write_record([
                row.c.to_string(),
                r.ring.to_string(),
                r.empirical.to_string(),
                r.sigma.to_string(),
                r.bound.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
