//! Decay functions, F-functions and interaction norms on a finite chain window.
//!
//! All tables are kept as natural logarithms so that rapidly decaying functions
//! such as `e^{-r}` at `r = 1000` stay representable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, operator_norm, CMatrix};

/// Hermiticity tolerance for interaction terms.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest table size accepted by [`build_f_function`].
pub const R_MAX_GUARD: usize = 20_000;
/// Powers used to spot-check superpolynomial decay.
pub const DECAY_POWERS: [u32; 4] = [1, 2, 4, 8];
/// Largest relative change of `C_F` or `C'_F` between the half and the full window
/// for the constant to count as window-independent.
pub const WINDOW_STABILITY_TOL: f64 = 1e-6;

/// How the base term of the recursion is indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FRecursion {
    /// `F̃(r) = max[f(r), …]`.
    Literal,
    /// `F̃(r) = max[f(r−1), …]` with `f(0) := f(1)`.
    Shifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecayFunction {
    /// `e^{-a r}`
    Exponential { a: f64 },
    /// `e^{-a r^θ}`
    Stretched { a: f64, theta: f64 },
    /// Tabulated `f(1), f(2), …`; extended by its last value beyond the table.
    Table { values: Vec<f64> },
}

impl std::str::FromStr for DecayFunction {
    type Err = Error;

    /// `exp:A`, `stretched:A:THETA` or `sqrt:A` (stretched with θ = 1/2).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| Error::Validation(format!("bad number '{t}' in decay '{s}'")));
        match parts.as_slice() {
            ["exp", a] => Ok(DecayFunction::Exponential { a: num(a)? }),
            ["sqrt", a] => Ok(DecayFunction::Stretched { a: num(a)?, theta: 0.5 }),
            ["stretched", a, t] => Ok(DecayFunction::Stretched { a: num(a)?, theta: num(t)? }),
            _ => Err(Error::Validation(format!("unknown decay '{s}' (expected exp:A, sqrt:A or stretched:A:THETA)"))),
        }
    }
}

impl DecayFunction {
    /// `ln f(r)` for `r ≥ 1`.
    pub fn ln_at(&self, r: usize) -> f64 {
        let x = r as f64;
        match self {
            DecayFunction::Exponential { a } => -a * x,
            DecayFunction::Stretched { a, theta } => -a * x.powf(*theta),
            DecayFunction::Table { values } => {
                let k = r.clamp(1, values.len()) - 1;
                values[k].ln()
            }
        }
    }

    pub fn at(&self, r: usize) -> f64 {
        self.ln_at(r).exp()
    }

    /// Check positivity, monotonicity and superpolynomial decay on `1..=r_max`.
    ///
    /// Returns, for each power `p` in [`DECAY_POWERS`], the smallest `r₀` beyond which
    /// `r^p f(r)` is strictly decreasing.
    pub fn validate(&self, r_max: usize) -> Result<Vec<(u32, usize)>> {
        match self {
            DecayFunction::Exponential { a } | DecayFunction::Stretched { a, .. } if !(*a > 0.0) => {
                return Err(Error::Validation("decay rate must be positive".into()))
            }
            DecayFunction::Stretched { theta, .. } if !(*theta > 0.0) => {
                return Err(Error::Validation("stretch exponent must be positive".into()))
            }
            DecayFunction::Table { values } if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) => {
                return Err(Error::Validation("tabulated decay values must be positive and finite".into()))
            }
            _ => {}
        }
        if r_max < 2 {
            return Err(Error::Validation("r_max must be at least 2".into()));
        }
        let ln: Vec<f64> = (1..=r_max).map(|r| self.ln_at(r)).collect();
        if let Some(k) = ln.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Validation(format!("decay function increases between r = {} and r = {}", k + 1, k + 2)));
        }
        let mut r0s = Vec::new();
        for p in DECAY_POWERS {
            let weighted: Vec<f64> = ln.iter().enumerate().map(|(k, l)| l + p as f64 * ((k + 1) as f64).ln()).collect();
            // last index at which the sequence fails to decrease
            let last_bad = weighted.windows(2).rposition(|w| w[1] >= w[0]);
            let r0 = match last_bad {
                None => 1,
                Some(k) => k + 2,
            };
            if r0 >= r_max {
                return Err(Error::Validation(format!(
                    "r^{p} f(r) does not decrease within 1..={r_max}: decay is not superpolynomial on this window"
                )));
            }
            r0s.push((p, r0));
        }
        Ok(r0s)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FFunction {
    pub decay: DecayFunction,
    pub r_max: usize,
    /// `ln F(r)` for `r = 0..=r_max`.
    pub ln_values: Vec<f64>,
    /// `sup_{x,y} Σ_z F(d(x,z)) F(d(z,y)) / F(d(x,y))` over a window of `r_max + 1` sites.
    pub convolution_constant: f64,
    /// `sup_x Σ_y F(d(x,y))` over the same window.
    pub integrability_constant: f64,
    /// Set when some `F(r)` is not representable as an `f64` (only the logarithm is).
    pub beyond_f64_range: bool,
    /// `r₀` per power `p` from the superpolynomial-decay spot check.
    pub decay_onsets: Vec<(u32, usize)>,
    pub recursion: FRecursion,
}

/// Outcome of checking the F-function axioms on the truncated lattice.
///
/// Over a finite window every constant is finite, so integrability and the
/// convolution bound are judged by whether the constants stay put when the
/// window is halved.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FAxioms {
    pub non_increasing: bool,
    pub dominates_shifted_decay: bool,
    pub integrability_half_window: f64,
    pub integrability_full_window: f64,
    pub convolution_half_window: f64,
    pub convolution_full_window: f64,
    pub integrable: bool,
    pub convolution_bounded: bool,
}

impl FAxioms {
    pub fn all_hold(&self) -> bool {
        self.non_increasing && self.dominates_shifted_decay && self.integrable && self.convolution_bounded
    }
}

impl FFunction {
    pub fn ln_at(&self, r: usize) -> f64 {
        self.ln_values[r.min(self.r_max)]
    }

    pub fn at(&self, r: usize) -> f64 {
        self.ln_at(r).exp()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.ln_values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Whether `f(r) ≤ F(r+1)` for all `1 ≤ r < r_max`.
    pub fn dominates_shifted_decay(&self) -> bool {
        (1..self.r_max).all(|r| self.decay.ln_at(r) <= self.ln_values[r + 1] + 1e-12)
    }

    pub fn axioms(&self) -> FAxioms {
        let full = self.r_max + 1;
        let half = full / 2;
        let (ih, ifull) = (integrability_constant(self, half), self.integrability_constant);
        let (ch, cfull) = (convolution_constant(self, half), self.convolution_constant);
        let stable = |a: f64, b: f64| (b - a).abs() <= WINDOW_STABILITY_TOL * b.abs().max(f64::MIN_POSITIVE);
        FAxioms {
            non_increasing: self.is_non_increasing(),
            dominates_shifted_decay: self.dominates_shifted_decay(),
            integrability_half_window: ih,
            integrability_full_window: ifull,
            convolution_half_window: ch,
            convolution_full_window: cfull,
            integrable: stable(ih, ifull),
            convolution_bounded: stable(ch, cfull),
        }
    }
}

/// Build `F` by the convolution recursion, evaluated in log space.
///
/// `F̃(r) = max[f(r−1), (1/(f(1)+1)) Σ_{m=1}^{r−1} F(r−m) F(m)]` with `f(0) := f(1)`,
/// `F(r) = min_{1≤r'≤r} F̃(r')`, and `F(0) := F(1)`. The shift by one makes
/// `f(r) ≤ F(r+1)` hold, which the unshifted recursion does not guarantee.
///
/// Note that the convolution term outgrows any summable tail: for `f(r) = e^{-r}`
/// the table becomes constant from `r = 3` on, so the result is *not* uniformly
/// integrable; [`FFunction::axioms`] reports this.
pub fn build_f_function(f: &DecayFunction, r_max: usize) -> Result<FFunction> {
    build_f_function_with(f, r_max, FRecursion::Shifted)
}

pub fn build_f_function_with(f: &DecayFunction, r_max: usize, recursion: FRecursion) -> Result<FFunction> {
    if r_max > R_MAX_GUARD {
        return Err(Error::Guard(format!("r_max {r_max} exceeds {R_MAX_GUARD}")));
    }
    let decay_onsets = f.validate(r_max)?;
    let ln_f = |r: usize| f.ln_at(r.max(1));
    let ln_scale = -(f.at(1) + 1.0).ln();
    let mut ln_values = vec![0.0; r_max + 1];
    let mut running_min = f64::INFINITY;
    for r in 1..=r_max {
        let conv = if r >= 2 {
            ln_scale + log_sum_exp((1..r).map(|m| ln_values[r - m] + ln_values[m]))
        } else {
            f64::NEG_INFINITY
        };
        let base = match recursion {
            FRecursion::Literal => ln_f(r),
            FRecursion::Shifted => ln_f(r - 1),
        };
        let tilde = base.max(conv);
        running_min = running_min.min(tilde);
        ln_values[r] = running_min;
    }
    ln_values[0] = ln_values[1];
    let beyond_f64_range = ln_values.iter().any(|l| l.exp() == 0.0 || !l.exp().is_finite());
    let mut out = FFunction {
        decay: f.clone(),
        r_max,
        ln_values,
        convolution_constant: 0.0,
        integrability_constant: 0.0,
        beyond_f64_range,
        decay_onsets,
        recursion,
    };
    out.convolution_constant = convolution_constant(&out, r_max + 1);
    out.integrability_constant = integrability_constant(&out, r_max + 1);
    Ok(out)
}

/// Window of `w ≤ r_max + 1` sites; `O(w²)` via per-distance prefix sums.
fn convolution_constant(big_f: &FFunction, w: usize) -> f64 {
    let lf = &big_f.ln_values;
    let mut best: f64 = 0.0;
    for d in 0..w {
        // tails: Σ_{t=1}^{k} F(t) F(t+d) / F(d), for k = 0..=w-1-d
        let mut tail = vec![0.0; w - d];
        for t in 1..w - d {
            tail[t] = tail[t - 1] + (lf[t] + lf[t + d] - lf[d]).exp();
        }
        let middle: f64 = (0..=d).map(|s| (lf[s] + lf[d - s] - lf[d]).exp()).sum();
        let span = w - 1 - d;
        let outer = (0..=span).map(|x| tail[x] + tail[span - x]).fold(0.0, f64::max);
        best = best.max(middle + outer);
    }
    best
}

fn integrability_constant(big_f: &FFunction, w: usize) -> f64 {
    let mut prefix = vec![0.0; w];
    prefix[0] = big_f.at(0);
    for t in 1..w {
        prefix[t] = prefix[t - 1] + big_f.at(t);
    }
    (0..w).map(|x| prefix[x] + prefix[w - 1 - x] - big_f.at(0)).fold(0.0, f64::max)
}

/// Direct `O(W³)` evaluation of the convolution constant, for small windows.
pub fn convolution_constant_brute(big_f: &FFunction, window: usize) -> f64 {
    let mut best: f64 = 0.0;
    for x in 0..window {
        for y in 0..window {
            let dxy = x.abs_diff(y);
            let s: f64 = (0..window).map(|z| big_f.at(x.abs_diff(z)) * big_f.at(z.abs_diff(y))).sum();
            best = best.max(s / big_f.at(dxy));
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct Term {
    /// First and last site.
    pub support: (usize, usize),
    pub matrix: CMatrix,
}

/// A finite interaction on sites `0..sites`, piecewise constant over time slices.
#[derive(Clone, Debug)]
pub struct Interaction {
    pub sites: usize,
    pub slices: Vec<Vec<Term>>,
}

impl Interaction {
    pub fn new(sites: usize, slices: Vec<Vec<Term>>) -> Result<Self> {
        for (s, slice) in slices.iter().enumerate() {
            for t in slice {
                if t.support.0 > t.support.1 || t.support.1 >= sites {
                    return Err(Error::Validation(format!("term support {:?} in slice {s} is outside 0..{sites}", t.support)));
                }
                if hermiticity_defect(&t.matrix) > HERMITIAN_TOL {
                    return Err(Error::Validation(format!("term on {:?} in slice {s} is not Hermitian", t.support)));
                }
            }
        }
        Ok(Interaction { sites, slices })
    }

    /// Time-independent interaction.
    pub fn constant(sites: usize, terms: Vec<Term>) -> Result<Self> {
        Interaction::new(sites, vec![terms])
    }

    /// `‖H(S)‖` per support, with terms on the same support summed first.
    fn support_norms(slice: &[Term]) -> Vec<((usize, usize), f64)> {
        let mut merged: Vec<((usize, usize), CMatrix)> = Vec::new();
        for t in slice {
            match merged.iter_mut().find(|(s, m)| *s == t.support && m.shape() == t.matrix.shape()) {
                Some((_, m)) => *m += &t.matrix,
                None => merged.push((t.support, t.matrix.clone())),
            }
        }
        merged.into_iter().map(|(s, m)| (s, operator_norm(&m))).collect()
    }

    /// Sum of two interactions on the same window, slice by slice.
    pub fn sum(&self, other: &Interaction) -> Result<Interaction> {
        if self.sites != other.sites || self.slices.len() != other.slices.len() {
            return Err(Error::Validation("interactions have different windows or time slicing".into()));
        }
        let slices = self.slices.iter().zip(&other.slices).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect();
        Ok(Interaction { sites: self.sites, slices })
    }
}

/// `max_s sup_j Σ_{S∋j} ‖H(s,S)‖ / f(1 + diam S)`.
pub fn tdi_f_norm(h: &Interaction, f: &DecayFunction) -> f64 {
    let mut best: f64 = 0.0;
    for slice in &h.slices {
        let mut per_site = vec![0.0; h.sites];
        for ((a, b), norm) in Interaction::support_norms(slice) {
            let weight = norm * (-f.ln_at(1 + b - a)).exp();
            for v in &mut per_site[a..=b] {
                *v += weight;
            }
        }
        best = per_site.into_iter().fold(best, f64::max);
    }
    best
}

/// `‖H‖_f` if every term meets the anchor set, `f64::INFINITY` otherwise.
pub fn anchored_norm(h: &Interaction, anchor: &[usize], f: &DecayFunction) -> f64 {
    let meets = h.slices.iter().flatten().all(|t| anchor.iter().any(|&x| (t.support.0..=t.support.1).contains(&x)));
    if meets {
        tdi_f_norm(h, f)
    } else {
        f64::INFINITY
    }
}

/// `max_s sup_{x,y} Σ_{S∋x,y} ‖H(s,S)‖ / F(d(x,y))`.
pub fn pair_norm(h: &Interaction, big_f: &FFunction) -> f64 {
    let n = h.sites;
    let mut best: f64 = 0.0;
    for slice in &h.slices {
        let norms = Interaction::support_norms(slice);
        for x in 0..n {
            for y in x..n {
                let s: f64 = norms.iter().filter(|((a, b), _)| *a <= x && y <= *b).map(|(_, v)| v).sum();
                best = best.max(s / big_f.at(y - x));
            }
        }
    }
    best
}

/// `K = Σ_{d=0}^{sites-1} (d+1) F(d) / f(1+d)`, so that `‖H‖_f ≤ K·|||H|||_F` on the window.
pub fn norm_sandwich_constant(sites: usize, f: &DecayFunction, big_f: &FFunction) -> f64 {
    (0..sites).map(|d| (d + 1) as f64 * (big_f.ln_at(d) - f.ln_at(1 + d)).exp()).sum()
}
