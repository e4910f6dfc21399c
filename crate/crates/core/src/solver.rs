//! ADMM training of the region-filtered correlation filter.
//!
//! Per channel `l` the solver minimizes
//!
//! ```text
//! || x_l * (c . w_l) - y ||^2 + lambda || w_l ||^2
//! ```
//!
//! by splitting `t_l = c . w_l` and alternating three closed-form steps:
//! a per-frequency update of `t_l`, a per-pixel update of `w_l` and a dual
//! ascent step on the multiplier with a geometrically growing penalty `mu`.
//! Channels are independent; they share only the penalty schedule.
//!
//! `t`, `zeta` and `y` are carried as unitary spectra. The sample enters
//! through its *operator spectrum* `sqrt(MN) . dft2(x)`, the per-frequency
//! gain of circular convolution with `x`, which keeps the Fourier-domain
//! data term equal to the spatial one.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureSample;
use crate::spatial_map::SpatialMap;
use crate::spectral::{dft2, ensure_same_dims, idft2, ComplexPlane, RealPlane};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub lambda: f64,
    pub mu0: f64,
    pub beta: f64,
    pub mu_max: f64,
    pub iterations: usize,
    /// Stop early once the relative constraint residual
    /// `||t - (c.w)^|| / ||(c.w)^||` falls below this value. Off by default.
    pub early_exit_tol: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { lambda: 0.01, mu0: 5.0, beta: 3.0, mu_max: 20.0, iterations: 8, early_exit_tol: None }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::config(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.mu0 > 0.0) || !self.mu0.is_finite() {
            return Err(Error::config(format!("mu0 must be positive, got {}", self.mu0)));
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::config(format!("beta must exceed 1, got {}", self.beta)));
        }
        if !(self.mu_max >= self.mu0) || !self.mu_max.is_finite() {
            return Err(Error::config(format!("mu_max ({}) must be at least mu0 ({})", self.mu_max, self.mu0)));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        if let Some(tol) = self.early_exit_tol {
            if !(tol > 0.0) {
                return Err(Error::config(format!("early exit tolerance must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

/// Multi-channel filter together with the cached spectra of `c . w_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    w: Vec<RealPlane>,
    effective_spectrum: Vec<ComplexPlane>,
}

impl FilterBank {
    pub fn new(w: Vec<RealPlane>, map: &SpatialMap) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::invalid("filter bank needs at least one channel"));
        }
        let effective_spectrum = w.iter().map(|wl| dft2(&wl.hadamard(map.plane())?)).collect::<Result<Vec<_>>>()?;
        Ok(Self { w, effective_spectrum })
    }

    pub fn zeros(d: usize, dims: (usize, usize)) -> Self {
        Self {
            w: vec![RealPlane::zeros(dims.0, dims.1); d],
            effective_spectrum: vec![ComplexPlane::zeros(dims.0, dims.1); d],
        }
    }

    pub fn w(&self) -> &[RealPlane] {
        &self.w
    }

    pub fn effective_spectrum(&self) -> &[ComplexPlane] {
        &self.effective_spectrum
    }

    pub fn d(&self) -> usize {
        self.w.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.w[0].dims()
    }

    /// `a . self + b . other`. Both the filter and its effective spectrum are
    /// linear in `w`, so the cache stays consistent.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.d() != other.d() {
            return Err(Error::invalid(format!("channel count mismatch: {} vs {}", self.d(), other.d())));
        }
        let w = self.w.iter().zip(&other.w).map(|(x, y)| x.lincomb(a, y, b)).collect::<Result<Vec<_>>>()?;
        let effective_spectrum = self
            .effective_spectrum
            .iter()
            .zip(&other.effective_spectrum)
            .map(|(x, y)| x.lincomb(a, y, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { w, effective_spectrum })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmmState {
    pub t_hat: Vec<ComplexPlane>,
    pub zeta_hat: Vec<ComplexPlane>,
    pub mu: f64,
    pub iteration: usize,
}

impl AdmmState {
    pub fn new(d: usize, dims: (usize, usize), mu0: f64) -> Self {
        Self {
            t_hat: vec![ComplexPlane::zeros(dims.0, dims.1); d],
            zeta_hat: vec![ComplexPlane::zeros(dims.0, dims.1); d],
            mu: mu0,
            iteration: 0,
        }
    }
}

/// Operator spectrum of a sample channel: `sqrt(MN) . dft2(x)`.
pub fn operator_spectrum(x: &RealPlane) -> Result<ComplexPlane> {
    let gain = (x.len() as f64).sqrt();
    Ok(dft2(x)?.scale(gain))
}

/// Auxiliary-variable step,
/// `t = (conj(x) y - zeta + mu cw) / (|x|^2 + mu)` per frequency.
pub fn update_t(
    x_op_hat: &ComplexPlane,
    y_hat: &ComplexPlane,
    zeta_hat: &ComplexPlane,
    mu: f64,
    cw_hat: &ComplexPlane,
) -> Result<ComplexPlane> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    let dims = x_op_hat.dims();
    ensure_same_dims(dims, y_hat.dims())?;
    ensure_same_dims(dims, zeta_hat.dims())?;
    ensure_same_dims(dims, cw_hat.dims())?;
    let data = x_op_hat
        .as_slice()
        .iter()
        .zip(y_hat.as_slice())
        .zip(zeta_hat.as_slice())
        .zip(cw_hat.as_slice())
        .map(|(((x, y), z), cw)| {
            let denom = x.norm_sqr() + mu;
            (x.conj() * y - z + cw * mu) / denom
        })
        .collect();
    ComplexPlane::new(dims.0, dims.1, data)
}

/// Filter step, `w = c . idft2(zeta + mu t) / (lambda + mu c^2)` per pixel.
pub fn update_w(
    zeta_hat: &ComplexPlane,
    t_hat: &ComplexPlane,
    mu: f64,
    c: &RealPlane,
    lambda: f64,
) -> Result<RealPlane> {
    if !(lambda > 0.0) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be positive, got {mu}")));
    }
    ensure_same_dims(zeta_hat.dims(), t_hat.dims())?;
    ensure_same_dims(zeta_hat.dims(), c.dims())?;
    let g = idft2(&zeta_hat.lincomb(1.0, t_hat, mu)?)?.re();
    g.zip_map(c, |g, c| c * g / (lambda + mu * c * c))
}

/// Multiplier ascent `zeta += mu (t - cw)` followed by
/// `mu = min(mu_max, beta mu)`.
pub fn update_multiplier(state: AdmmState, cw_hat: &[ComplexPlane], beta: f64, mu_max: f64) -> Result<AdmmState> {
    if cw_hat.len() != state.t_hat.len() {
        return Err(Error::invalid("multiplier update: channel count mismatch"));
    }
    let AdmmState { t_hat, zeta_hat, mu, iteration } = state;
    let zeta_hat = zeta_hat
        .iter()
        .zip(&t_hat)
        .zip(cw_hat)
        .map(|((z, t), cw)| {
            ensure_same_dims(z.dims(), cw.dims())?;
            let r = t.lincomb(1.0, cw, -1.0)?;
            z.lincomb(1.0, &r, mu)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AdmmState { t_hat, zeta_hat, mu: mu_max.min(beta * mu), iteration: iteration + 1 })
}

/// Trace of one channel's solve, for diagnostics and tests.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChannelTrace {
    pub mu: Vec<f64>,
    pub constraint_residual: Vec<f64>,
}

fn train_channel(
    x: &RealPlane,
    y_hat: &ComplexPlane,
    c: &RealPlane,
    cfg: &SolverConfig,
    w0: RealPlane,
) -> Result<(RealPlane, ComplexPlane, ChannelTrace)> {
    let x_op = operator_spectrum(x)?;
    let dims = x.dims();
    let mut w = w0;
    let mut cw_hat = dft2(&w.hadamard(c)?)?;
    let mut state = AdmmState::new(1, dims, cfg.mu0);
    let mut trace = ChannelTrace::default();
    for _ in 0..cfg.iterations {
        let mu = state.mu;
        let t = update_t(&x_op, y_hat, &state.zeta_hat[0], mu, &cw_hat)?;
        w = update_w(&state.zeta_hat[0], &t, mu, c, cfg.lambda)?;
        cw_hat = dft2(&w.hadamard(c)?)?;
        state.t_hat[0] = t;
        let residual = state.t_hat[0].lincomb(1.0, &cw_hat, -1.0)?.norm() / cw_hat.norm().max(f64::MIN_POSITIVE);
        trace.mu.push(mu);
        trace.constraint_residual.push(residual);
        state = update_multiplier(state, std::slice::from_ref(&cw_hat), cfg.beta, cfg.mu_max)?;
        if matches!(cfg.early_exit_tol, Some(tol) if residual < tol) {
            break;
        }
    }
    Ok((w, cw_hat, trace))
}

fn check_train_inputs(x: &FeatureSample, y: &RealPlane, c: &SpatialMap, warm: Option<&FilterBank>) -> Result<()> {
    ensure_same_dims(x.dims(), y.dims())?;
    ensure_same_dims(x.dims(), c.dims())?;
    if let Some(w) = warm {
        if w.d() != x.d() {
            return Err(Error::invalid(format!("warm start has {} channels, sample has {}", w.d(), x.d())));
        }
        ensure_same_dims(x.dims(), w.dims())?;
    }
    Ok(())
}

/// Runs `cfg.iterations` sweeps of the three updates on every channel and
/// returns the trained filter. `t` and `zeta` start at zero; `w` starts at
/// `warm_start` when given, else at zero. Channels run in parallel.
pub fn train(
    x: &FeatureSample,
    y: &RealPlane,
    c: &SpatialMap,
    cfg: &SolverConfig,
    warm_start: Option<&FilterBank>,
) -> Result<FilterBank> {
    Ok(train_traced(x, y, c, cfg, warm_start)?.0)
}

/// As [`train`], also returning the per-channel penalty and residual history.
pub fn train_traced(
    x: &FeatureSample,
    y: &RealPlane,
    c: &SpatialMap,
    cfg: &SolverConfig,
    warm_start: Option<&FilterBank>,
) -> Result<(FilterBank, Vec<ChannelTrace>)> {
    cfg.validate().map_err(|e| Error::invalid(e.to_string()))?;
    check_train_inputs(x, y, c, warm_start)?;
    let y_hat = dft2(y)?;
    let (m, n) = x.dims();
    let results = x
        .channels()
        .par_iter()
        .enumerate()
        .map(|(l, xl)| {
            let w0 = warm_start.map(|f| f.w()[l].clone()).unwrap_or_else(|| RealPlane::zeros(m, n));
            train_channel(xl, &y_hat, c.plane(), cfg, w0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = Vec::with_capacity(results.len());
    let mut spectra = Vec::with_capacity(results.len());
    let mut traces = Vec::with_capacity(results.len());
    for (wl, sl, tl) in results {
        w.push(wl);
        spectra.push(sl);
        traces.push(tl);
    }
    Ok((FilterBank { w, effective_spectrum: spectra }, traces))
}
