//! Monte Carlo logical-error estimation, fixed-weight failure spectra,
//! spectrum fits and prediction curves.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::decode::{DecodeError, Decoder, DecoderConfig};
use crate::gf2::Bits;
use crate::noise::DetectorErrorModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorType {
    BitFlip,
    PhaseFlip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub shots: u64,
    /// Shots where any observable was mispredicted.
    pub failures: u64,
    pub failures_per_observable: Vec<u64>,
    pub p_l_estimate: f64,
    pub ci99: (f64, f64),
    pub seed: u64,
    pub error_type: ErrorType,
    /// Shots whose correction did not reproduce the syndrome.
    #[serde(default)]
    pub invalid_corrections: u64,
}

/// Two-sided Wilson score interval.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn shot_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sum of per-shot contributions over `0..n`, split into fixed chunks so the
/// result does not depend on the thread count.
fn par_sum<T, F>(n: u64, zero: T, f: F, add: impl Fn(&mut T, T) + Sync) -> Result<T, HarnessError>
where
    T: Send + Sync + Clone,
    F: Fn(u64) -> Result<T, HarnessError> + Sync,
{
    const CHUNK: u64 = 256;
    let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
    let parts: Vec<Result<T, HarnessError>> = chunks
        .par_iter()
        .map(|&c| {
            let mut acc = zero.clone();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                add(&mut acc, f(i)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = zero;
    for p in parts {
        add(&mut total, p?);
    }
    Ok(total)
}

/// Samples each mechanism independently, decodes, and counts shots whose
/// predicted observable flips differ from the true ones.
pub fn run_monte_carlo(
    dem: &DetectorErrorModel,
    cfg: &DecoderConfig,
    shots: u64,
    seed: u64,
    error_type: ErrorType,
) -> Result<MonteCarloResult, HarnessError> {
    if shots == 0 {
        return Err(HarnessError::InvalidInput("shots must be at least 1".into()));
    }
    let decoder = Decoder::new(dem, *cfg)?;
    let probs: Vec<f64> = dem.mechanisms.iter().map(|m| m.prob).collect();
    let no = dem.num_observables;
    let per_shot = |i: u64| -> Result<Vec<u64>, HarnessError> {
        let mut rng = shot_rng(seed, i);
        let fired: Vec<usize> = probs.iter().enumerate().filter(|(_, &p)| rng.random::<f64>() < p).map(|(j, _)| j).collect();
        let mut out = vec![0u64; no + 2];
        if fired.is_empty() {
            return Ok(out);
        }
        let actual = decoder.observables_of(&fired);
        let syndrome = decoder.syndrome_of(&fired);
        let res = decoder.decode(&syndrome)?;
        out[no + 1] = (decoder.syndrome_of(&res.correction) != syndrome) as u64;
        let mut diff = actual;
        diff.xor_assign(&res.observable_flips);
        for k in diff.iter_ones() {
            out[k] += 1;
        }
        out[no] = (!diff.is_zero()) as u64;
        Ok(out)
    };
    let counts = par_sum(shots, vec![0u64; no + 2], per_shot, |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y))?;
    let failures = counts[no];
    Ok(MonteCarloResult {
        shots,
        failures,
        failures_per_observable: counts[..no].to_vec(),
        p_l_estimate: failures as f64 / shots as f64,
        ci99: wilson_interval(failures, shots, 0.99),
        seed,
        error_type,
        invalid_corrections: counts[no + 1],
    })
}

/// Elementary faults in units of the uniform rate q = p/30: mechanism `j`
/// owns `units[j]` of them, the remaining ones up to `total` are silent.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultUnits {
    pub units: Vec<u64>,
    cumulative: Vec<u64>,
    pub total: u64,
}

impl FaultUnits {
    pub fn of(dem: &DetectorErrorModel) -> Self {
        let q = dem.reference_p / 30.0;
        let units: Vec<u64> = dem
            .mechanisms
            .iter()
            .map(|m| if q > 0.0 { ((m.prob / q).round() as u64).max(1) } else { 1 })
            .collect();
        let mut cumulative = Vec::with_capacity(units.len());
        let mut acc = 0;
        for &u in &units {
            acc += u;
            cumulative.push(acc);
        }
        let total = acc.max(dem.fault_units.round() as u64);
        FaultUnits { units, cumulative, total }
    }

    pub fn silent(&self) -> u64 {
        self.total - self.cumulative.last().copied().unwrap_or(0)
    }

    /// Mechanism owning unit `u`, or None for a silent unit.
    pub fn mechanism(&self, u: u64) -> Option<usize> {
        let j = self.cumulative.partition_point(|&c| c <= u);
        (j < self.units.len()).then_some(j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub weight: usize,
    /// Decodes performed.
    pub samples: u64,
    /// Failures observed; fractional in exhaustive mode where outcomes are
    /// weighted by multiplicity.
    pub failures: f64,
    pub f_hat: f64,
    pub ci99: (f64, f64),
    pub exhaustive: bool,
}

/// Fixed-weight failure rates: uniform w-subsets of fault units are
/// injected and decoded. Weights 1 and 2 are enumerated exactly when the
/// enumeration is no larger than `samples_per_weight`.
pub fn sample_failure_spectrum(
    dem: &DetectorErrorModel,
    cfg: &DecoderConfig,
    weights: &[usize],
    samples_per_weight: u64,
    seed: u64,
) -> Result<Vec<SpectrumPoint>, HarnessError> {
    let decoder = Decoder::new(dem, *cfg)?;
    let fu = FaultUnits::of(dem);
    let fails = |mechs: &[usize]| injection_fails(&decoder, mechs);
    let nm = fu.units.len() as u64;
    let mut out = Vec::new();
    for &w in weights {
        if w as u64 > fu.total {
            return Err(HarnessError::InvalidInput(format!("weight {w} exceeds {} faults", fu.total)));
        }
        let point = if w == 0 {
            SpectrumPoint { weight: 0, samples: 0, failures: 0.0, f_hat: 0.0, ci99: (0.0, 0.0), exhaustive: true }
        } else if w == 1 {
            let single: Vec<bool> =
                (0..fu.units.len()).into_par_iter().map(|j| fails(&[j])).collect::<Result<_, _>>()?;
            let f: f64 = single.iter().zip(&fu.units).filter(|(b, _)| **b).fold(0.0, |a, (_, &u)| a + u as f64);
            let f_hat = f / fu.total as f64;
            SpectrumPoint { weight: 1, samples: nm, failures: f_hat, f_hat, ci99: (f_hat, f_hat), exhaustive: true }
        } else if w == 2 && nm * (nm + 1) / 2 <= samples_per_weight {
            let single: Vec<bool> = (0..fu.units.len()).map(|j| fails(&[j])).collect::<Result<_, _>>()?;
            let total = fu.total as f64;
            let pairs = total * (total - 1.0) / 2.0;
            let mut acc = 0.0;
            for j in 0..fu.units.len() {
                if single[j] {
                    acc += fu.units[j] as f64 * fu.silent() as f64;
                }
                for k in j + 1..fu.units.len() {
                    if fails(&[j, k])? {
                        acc += (fu.units[j] * fu.units[k]) as f64;
                    }
                }
            }
            let f_hat = acc / pairs;
            SpectrumPoint { weight: 2, samples: nm * (nm + 1) / 2, failures: f_hat, f_hat, ci99: (f_hat, f_hat), exhaustive: true }
        } else {
            let wseed = seed ^ (w as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let per = |i: u64| -> Result<u64, HarnessError> {
                let mut rng = shot_rng(wseed, i);
                let mut mechs: Vec<usize> =
                    index::sample(&mut rng, fu.total as usize, w).into_iter().filter_map(|u| fu.mechanism(u as u64)).collect();
                mechs.sort_unstable();
                let mut odd = Vec::with_capacity(mechs.len());
                for m in mechs {
                    if odd.last() == Some(&m) {
                        odd.pop();
                    } else {
                        odd.push(m);
                    }
                }
                Ok(fails(&odd)? as u64)
            };
            let k = par_sum(samples_per_weight, 0u64, per, |a, b| *a += b)?;
            let f_hat = if samples_per_weight == 0 { 0.0 } else { k as f64 / samples_per_weight as f64 };
            SpectrumPoint {
                weight: w,
                samples: samples_per_weight,
                failures: k as f64,
                f_hat,
                ci99: wilson_interval(k, samples_per_weight, 0.99),
                exhaustive: false,
            }
        };
        out.push(point);
    }
    Ok(out)
}

/// f(w) = a(1 − exp(−(f0/a)(w/w0)^γ)) for w ≥ w0, zero below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureSpectrumFit {
    pub f0: f64,
    pub gamma: f64,
    pub w0: usize,
    pub n_faults: u64,
    pub k_logical: usize,
    pub a: f64,
    /// Covariance of (ln f0, γ); zero when unknown.
    pub covariance: [[f64; 2]; 2],
}

impl FailureSpectrumFit {
    pub fn new(ln_f0: f64, gamma: f64, w0: usize, n_faults: u64, k_logical: usize) -> Self {
        FailureSpectrumFit {
            f0: ln_f0.exp(),
            gamma,
            w0,
            n_faults,
            k_logical,
            a: saturation(k_logical),
            covariance: [[0.0; 2]; 2],
        }
    }

    pub fn ln_f0(&self) -> f64 {
        self.f0.ln()
    }

    pub fn f(&self, w: usize) -> f64 {
        spectrum_value(self.f0.ln(), self.gamma, self.a, self.w0, w as f64)
    }
}

pub fn saturation(k: usize) -> f64 {
    1.0 - 0.5f64.powi(k as i32)
}

fn spectrum_value(ln_f0: f64, gamma: f64, a: f64, w0: usize, w: f64) -> f64 {
    if w < w0 as f64 {
        return 0.0;
    }
    let x = (ln_f0 - a.ln() + gamma * (w / w0 as f64).ln()).exp();
    -a * (-x).exp_m1()
}

/// Weighted least squares for (ln f0, γ): a linearized fit seeds a
/// damped Gauss-Newton refinement on the binomial-weighted residuals.
pub fn fit_failure_spectrum(
    points: &[SpectrumPoint],
    w0: usize,
    k_logical: usize,
    n_faults: u64,
) -> Result<FailureSpectrumFit, HarnessError> {
    let a = saturation(k_logical);
    let pts: Vec<&SpectrumPoint> = points.iter().filter(|p| p.weight >= w0 && p.weight > 0 && p.samples > 0).collect();
    let informative: Vec<&&SpectrumPoint> = pts.iter().filter(|p| p.f_hat > 0.0 && p.f_hat < a).collect();
    if informative.len() < 3 {
        return Err(HarnessError::InsufficientData(format!(
            "{} weights with nonzero failure estimates, need 3",
            informative.len()
        )));
    }
    let n_eff = |p: &SpectrumPoint| if p.exhaustive { 1e12 } else { p.samples as f64 };

    // ln(−ln(1 − f/a)) = ln(f0/a) + γ ln(w/w0)
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &informative {
        let f = p.f_hat;
        let l = -(-f / a).ln_1p();
        let y = l.ln();
        let x = (p.weight as f64 / w0 as f64).ln();
        let dy = 1.0 / ((a - f) * l);
        let var = (f * (1.0 - f) / n_eff(p)).max(1e-300) * dy * dy;
        let wt = 1.0 / var;
        s += wt;
        sx += wt * x;
        sy += wt * y;
        sxx += wt * x * x;
        sxy += wt * x * y;
    }
    let det = s * sxx - sx * sx;
    let mut theta = if det.abs() > 1e-12 * s * sxx {
        let g = (s * sxy - sx * sy) / det;
        [(sy - g * sx) / s + a.ln(), g]
    } else {
        [sy / s + a.ln(), 1.0]
    };

    let sigma2 = |p: &SpectrumPoint| {
        let n = n_eff(p);
        let f = p.f_hat.max(1.0 / n);
        f * (1.0 - f).max(1.0 / n) / n
    };
    let cost = |t: &[f64; 2]| -> f64 {
        pts.iter().map(|p| (p.f_hat - spectrum_value(t[0], t[1], a, w0, p.weight as f64)).powi(2) / sigma2(p)).sum()
    };
    let normal_eq = |t: &[f64; 2]| -> ([[f64; 2]; 2], [f64; 2]) {
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for p in &pts {
            let w = p.weight as f64;
            let lx = (w / w0 as f64).ln();
            let x = (t[0] - a.ln() + t[1] * lx).exp();
            let f = -a * (-x).exp_m1();
            // df/dθ = a e^{−x} x · (1, ln(w/w0))
            let d = a * (-x).exp() * x;
            let j = [d, d * lx];
            let r = p.f_hat - f;
            let wt = 1.0 / sigma2(p);
            for u in 0..2 {
                jtr[u] += wt * j[u] * r;
                for v in 0..2 {
                    jtj[u][v] += wt * j[u] * j[v];
                }
            }
        }
        (jtj, jtr)
    };
    let mut lambda = 1e-3;
    let mut c = cost(&theta);
    for _ in 0..200 {
        let (jtj, jtr) = normal_eq(&theta);
        let m = [[jtj[0][0] * (1.0 + lambda), jtj[0][1]], [jtj[1][0], jtj[1][1] * (1.0 + lambda)]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step = [(m[1][1] * jtr[0] - m[0][1] * jtr[1]) / det, (m[0][0] * jtr[1] - m[1][0] * jtr[0]) / det];
        let cand = [theta[0] + step[0], theta[1] + step[1]];
        let cc = cost(&cand);
        if cc.is_finite() && cc <= c {
            let done = (c - cc) <= 1e-12 * c.max(1e-300) && step[0].abs() < 1e-10 && step[1].abs() < 1e-10;
            theta = cand;
            c = cc;
            lambda = (lambda * 0.3).max(1e-12);
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    if !(theta[0].is_finite() && theta[1].is_finite() && theta[1] > 0.0) {
        return Err(HarnessError::InsufficientData("fit did not converge to a positive exponent".into()));
    }
    let (jtj, _) = normal_eq(&theta);
    let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    let covariance = if det.abs() > 0.0 {
        [[jtj[1][1] / det, -jtj[0][1] / det], [-jtj[1][0] / det, jtj[0][0] / det]]
    } else {
        [[0.0; 2]; 2]
    };
    Ok(FailureSpectrumFit { f0: theta[0].exp(), gamma: theta[1], w0, n_faults, k_logical, a, covariance })
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Σ_{w ≥ w0} f(w) C(N, w) q^w (1 − q)^{N−w} with q = p/30.
pub fn predict_logical_error(fit: &FailureSpectrumFit, p: f64) -> f64 {
    predict_with(fit.f0.ln(), fit.gamma, fit, p)
}

fn predict_with(ln_f0: f64, gamma: f64, fit: &FailureSpectrumFit, p: f64) -> f64 {
    let q = p / 30.0;
    let n = fit.n_faults;
    if q <= 0.0 || n == 0 || fit.w0 as u64 > n {
        return 0.0;
    }
    if q >= 1.0 {
        return spectrum_value(ln_f0, gamma, fit.a, fit.w0, n as f64);
    }
    let (lq, l1q) = (q.ln(), (-q).ln_1p());
    let mode = (n as f64 * q).floor() as u64;
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for w in fit.w0 as u64..=n {
        let f = spectrum_value(ln_f0, gamma, fit.a, fit.w0, w as f64);
        let term = if f > 0.0 { (f.ln() + ln_choose(n, w) + w as f64 * lq + (n - w) as f64 * l1q).exp() } else { 0.0 };
        sum += term;
        if w > mode && term < prev && term < 1e-3 * sum {
            // Geometric estimate of the dropped tail.
            let r = term / prev;
            sum += term * r / (1.0 - r);
            break;
        }
        prev = term;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p: f64,
    pub p_l: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Prediction with a band from the fit covariance: the quantiles of p_L
/// over parameter draws from the fitted normal.
pub fn predict_with_band(fit: &FailureSpectrumFit, p: f64, confidence: f64, draws: usize, seed: u64) -> CurvePoint {
    let centre = predict_logical_error(fit, p);
    let c = fit.covariance;
    let l00 = c[0][0].max(0.0).sqrt();
    if l00 == 0.0 || draws == 0 {
        return CurvePoint { p, p_l: centre, ci_lo: centre, ci_hi: centre };
    }
    let l10 = c[1][0] / l00;
    let l11 = (c[1][1] - l10 * l10).max(0.0).sqrt();
    let normal = Normal::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals: Vec<f64> = (0..draws)
        .map(|_| {
            let z0 = normal.inverse_cdf(rng.random_range(1e-12..1.0 - 1e-12));
            let z1 = normal.inverse_cdf(rng.random_range(1e-12..1.0 - 1e-12));
            let lf = fit.f0.ln() + l00 * z0;
            let g = (fit.gamma + l10 * z0 + l11 * z1).max(1e-6);
            predict_with(lf, g, fit, p)
        })
        .collect();
    vals.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    let at = |t: f64| vals[((t * (draws - 1) as f64).round() as usize).min(draws - 1)];
    CurvePoint { p, p_l: centre, ci_lo: at(tail).min(centre), ci_hi: at(1.0 - tail).max(centre) }
}

/// Log-spaced prediction curve with 99% bands.
pub fn prediction_curve(fit: &FailureSpectrumFit, lo: f64, hi: f64, steps: usize) -> Vec<CurvePoint> {
    (0..steps)
        .map(|i| {
            let t = if steps > 1 { i as f64 / (steps - 1) as f64 } else { 0.0 };
            let p = if lo > 0.0 { (lo.ln() + t * (hi.ln() - lo.ln())).exp() } else { lo + t * (hi - lo) };
            predict_with_band(fit, p, 0.99, 400, i as u64)
        })
        .collect()
}

pub fn curve_to_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("p,p_l,ci_lo,ci_hi\n");
    for c in points {
        s.push_str(&format!("{:e},{:e},{:e},{:e}\n", c.p, c.p_l, c.ci_lo, c.ci_hi));
    }
    s
}

/// Outcome of injecting a specific set of mechanisms.
pub fn injection_fails(decoder: &Decoder, mechanisms: &[usize]) -> Result<bool, HarnessError> {
    if mechanisms.is_empty() {
        return Ok(false);
    }
    let r = decoder.decode(&decoder.syndrome_of(mechanisms))?;
    Ok(r.observable_flips != decoder.observables_of(mechanisms))
}

/// Number of sampled syndromes whose decoded correction does not reproduce
/// the syndrome.
pub fn correction_validity(
    dem: &DetectorErrorModel,
    cfg: &DecoderConfig,
    syndromes: u64,
    seed: u64,
) -> Result<u64, HarnessError> {
    let decoder = Decoder::new(dem, *cfg)?;
    let probs: Vec<f64> = dem.mechanisms.iter().map(|m| m.prob).collect();
    let per = |i: u64| -> Result<u64, HarnessError> {
        let mut rng = shot_rng(seed, i);
        let fired: Vec<usize> = probs.iter().enumerate().filter(|(_, &p)| rng.random::<f64>() < p).map(|(j, _)| j).collect();
        let s: Bits = decoder.syndrome_of(&fired);
        let r = decoder.decode(&s)?;
        Ok((decoder.syndrome_of(&r.correction) != s) as u64)
    };
    par_sum(syndromes, 0u64, per, |a, b| *a += b)
}

#[cfg(test)]
mod tests;
