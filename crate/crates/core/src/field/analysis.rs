//! Fringe contrast and relative fringe position of intensity traces.

use super::TimeGrid;
use crate::error::{Error, Result};

const MIN_WINDOW_SAMPLES: usize = 8;

fn windowed(trace: &[f64], grid: &TimeGrid, window: (f64, f64), envelope_correct: bool) -> Result<(usize, Vec<f64>)> {
    if trace.len() != grid.samples {
        return Err(Error::GridMismatch(format!(
            "trace has {} samples, grid has {}",
            trace.len(),
            grid.samples
        )));
    }
    let (a, b) = window;
    if !(b > a) {
        return Err(Error::InvalidWindow(format!("empty window [{a}, {b}]")));
    }
    let range = grid.window(a, b);
    if range.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidWindow(format!(
            "window [{a}, {b}] holds {} samples, need at least {MIN_WINDOW_SAMPLES}",
            range.len()
        )));
    }
    let start = range.start;
    let ys = range
        .map(|n| if envelope_correct { trace[n] * grid.tau(n).exp() } else { trace[n] })
        .collect();
    Ok((start, ys))
}

/// Beat contrast inside `window` (dimensionless time).
///
/// Local maxima and minima are paired in order and each adjacent pair gives
/// |a − b|/(a + b); the median over pairs is returned. A trace with no
/// interior extremum has visibility 0.
pub fn visibility(trace: &[f64], grid: &TimeGrid, window: (f64, f64), envelope_correct: bool) -> Result<f64> {
    let (_, y) = windowed(trace, grid, window, envelope_correct)?;
    let mut extrema = Vec::new();
    for i in 1..y.len() - 1 {
        let is_max = y[i] > y[i - 1] && y[i] >= y[i + 1];
        let is_min = y[i] < y[i - 1] && y[i] <= y[i + 1];
        if is_max || is_min {
            extrema.push(y[i]);
        }
    }
    let mut contrasts: Vec<f64> = extrema
        .windows(2)
        .filter_map(|w| {
            let s = w[0] + w[1];
            (s > 0.0).then(|| (w[0] - w[1]).abs() / s)
        })
        .collect();
    if contrasts.is_empty() {
        return Ok(0.0);
    }
    contrasts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = contrasts.len();
    Ok(if m % 2 == 1 {
        contrasts[m / 2]
    } else {
        0.5 * (contrasts[m / 2 - 1] + contrasts[m / 2])
    })
}

/// Relative amplitude of the intensity component oscillating at `omega`.
///
/// The envelope-corrected trace is divided by its moving average over one
/// fringe period 2π/ω and the remainder is demodulated at ω. A trace
/// (1 + V cos ωτ)e^{−τ} gives V; oscillations at other frequencies
/// contribute little.
pub fn beat_contrast(trace: &[f64], grid: &TimeGrid, window: (f64, f64), omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidWindow(format!("beat frequency must be > 0, got {omega}")));
    }
    let (start, y) = windowed(trace, grid, window, true)?;
    let width = ((2.0 * std::f64::consts::PI / omega / grid.step).round() as usize).max(1);
    let trim = width / 2;
    if y.len() <= 2 * trim + MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidWindow("window shorter than two fringe periods".into()));
    }
    let base: Vec<f64> = y.iter().zip(detrend(&y, width)).map(|(v, d)| v - d).collect();
    let (mut c, mut s, mut n) = (0.0, 0.0, 0.0);
    for i in trim..y.len() - trim {
        if base[i] <= 0.0 {
            continue;
        }
        let r = y[i] / base[i] - 1.0;
        let ph = omega * grid.tau(start + i);
        c += r * ph.cos();
        s += r * ph.sin();
        n += 1.0;
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (c * c + s * s).sqrt() / n)
}

fn detrend(y: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let mut prefix = vec![0.0; y.len() + 1];
    for (i, v) in y.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
    }
    (0..y.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(y.len());
            y[i] - (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

fn correlation(a: &[f64], b: &[f64], lag: isize, margin: usize) -> f64 {
    // a[n] over a fixed central range, paired with b[n + lag]
    let lo = margin as isize;
    let hi = a.len() as isize - margin as isize;
    if hi - lo < 2 || lo + lag < 0 || hi + lag > b.len() as isize {
        return f64::NEG_INFINITY;
    }
    let xs = &a[lo as usize..hi as usize];
    let ys = &b[(lo + lag) as usize..(hi + lag) as usize];
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NEG_INFINITY;
    }
    sxy / (sxx * syy).sqrt()
}

/// Lag of trace `b` relative to trace `a` in units of `period`, from the
/// peak of their normalized cross-correlation. Positive means `b` is later.
///
/// Same as [`fringe_shift_with`] for traces whose fringes repeat once per
/// `period`.
pub fn fringe_shift(a: &[f64], b: &[f64], grid: &TimeGrid, window: (f64, f64), period: f64) -> Result<f64> {
    fringe_shift_with(a, b, grid, window, period, period)
}

/// Cross-correlation lag in units of `period` for traces whose intensity
/// fringes repeat every `fringe_period`.
///
/// Both traces are envelope-corrected (×e^τ) and a moving average one
/// fringe period wide is removed before correlating. The peak is searched
/// within half a `period` and refined by a parabola through its neighbours.
pub fn fringe_shift_with(
    a: &[f64],
    b: &[f64],
    grid: &TimeGrid,
    window: (f64, f64),
    period: f64,
    fringe_period: f64,
) -> Result<f64> {
    if !(period > 0.0) || !(fringe_period > 0.0) {
        return Err(Error::InvalidWindow(format!(
            "periods must be > 0, got {period} and {fringe_period}"
        )));
    }
    let (_, ya) = windowed(a, grid, window, true)?;
    let (_, yb) = windowed(b, grid, window, true)?;
    let per_samples = period / grid.step;
    let width = ((fringe_period / grid.step).round() as usize).max(1);
    let trim = width / 2;
    let (da, db) = (detrend(&ya, width), detrend(&yb, width));
    if da.len() <= 2 * trim + MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidWindow("window shorter than two periods".into()));
    }
    // the moving average is biased within half a period of the edges
    let (da, db) = (&da[trim..da.len() - trim], &db[trim..db.len() - trim]);
    for (name, d, reference) in [("first", da, &ya), ("second", db, &yb)] {
        let scale = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let level = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if level == 0.0 || !(scale > 1e-12 * level) {
            return Err(Error::DegenerateTrace(format!("{name} trace has no fringes in the window")));
        }
    }
    let max_lag = ((0.5 * per_samples).floor() as isize).clamp(1, da.len() as isize / 4);
    let corr: Vec<f64> = (-max_lag - 1..=max_lag + 1)
        .map(|l| correlation(da, db, l, max_lag as usize + 1))
        .collect();
    let offset = max_lag + 1;
    let mut best = offset;
    for l in (1..corr.len() - 1).map(|i| i as isize) {
        if corr[l as usize] > corr[best as usize] {
            best = l;
        }
    }
    let (cm, c0, cp) = (corr[best as usize - 1], corr[best as usize], corr[best as usize + 1]);
    let denom = cm - 2.0 * c0 + cp;
    let frac = if denom.abs() > 0.0 && cm.is_finite() && cp.is_finite() {
        (0.5 * (cm - cp) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok(((best - offset) as f64 + frac) * grid.step / period)
}
