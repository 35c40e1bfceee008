//! Contraction families on interval vertex spaces.
//!
//! Two families are built in: orientation-aware similarities
//! `x -> sign * ratio * x + offset`, and the continued-fraction maps
//! `x -> 1 / (e + x)` on `[0, 1]` indexed by positive integers `e`.
//!
//! Family-level functions take *map keys*: edge positions for similarity
//! families, integer digits for the continued-fraction family.

use num_traits::{FromPrimitive, Num};

use crate::error::{GdmsError, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexSpace {
    pub lo: f64,
    pub hi: f64,
}

impl VertexSpace {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(GdmsError::validation(
                None,
                format!("vertex space [{lo}, {hi}] must have lo < hi"),
            ));
        }
        Ok(VertexSpace { lo, hi })
    }

    pub fn unit() -> Self {
        VertexSpace { lo: 0.0, hi: 1.0 }
    }

    pub fn diameter(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub ratio: f64,
    pub offset: f64,
    /// +1 or -1.
    pub sign: i8,
}

impl Similarity {
    pub fn new(ratio: f64, offset: f64, sign: i8) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(GdmsError::validation(
                None,
                format!("similarity ratio {ratio} is not in (0, 1)"),
            ));
        }
        if !offset.is_finite() {
            return Err(GdmsError::validation(None, "similarity offset must be finite"));
        }
        if sign != 1 && sign != -1 {
            return Err(GdmsError::validation(
                None,
                format!("orientation sign {sign} is not +1 or -1"),
            ));
        }
        Ok(Similarity { ratio, offset, sign })
    }

    pub fn apply(&self, x: f64) -> f64 {
        f64::from(self.sign) * self.ratio * x + self.offset
    }

    /// Image of an interval.
    pub fn image(&self, space: &VertexSpace) -> (f64, f64) {
        let (a, b) = (self.apply(space.lo), self.apply(space.hi));
        (a.min(b), a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContractionFamily {
    /// One similarity per edge position.
    Similarity(Vec<Similarity>),
    /// `phi_e(x) = 1 / (e + x)` on `[0, 1]`, `e` the integer edge label.
    ContinuedFraction,
}

/// `||phi'_omega||` carried as a natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeNorm {
    pub ln_norm: f64,
    /// True when produced from exact integer continuants or an exact product
    /// of ratios, false for the log-space continuant recurrence.
    pub exact: bool,
}

impl DerivativeNorm {
    pub fn value(&self) -> f64 {
        self.ln_norm.exp()
    }
}

/// Words up to this length use exact integer continuants.
pub const EXACT_CONTINUANT_MAX_LEN: usize = 30;

/// Incremental `ln ||phi'_omega||` for words grown one letter at a time on
/// the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NormState {
    Similarity { ln: f64 },
    // q_{k-1}, q_k
    Continuant { q_prev: u128, q: u128, len: usize },
    // q_k / q_{k-1}, ln q_k
    LogContinuant { ratio: f64, ln_q: f64 },
}

impl NormState {
    pub(crate) fn ln_norm(&self) -> f64 {
        match *self {
            NormState::Similarity { ln } => ln,
            NormState::Continuant { q, .. } => -2.0 * (q as f64).ln(),
            NormState::LogContinuant { ln_q, .. } => -2.0 * ln_q,
        }
    }

    pub(crate) fn exact(&self) -> bool {
        !matches!(self, NormState::LogContinuant { .. })
    }
}

impl ContractionFamily {
    pub(crate) fn empty_state(&self) -> NormState {
        match self {
            ContractionFamily::Similarity(_) => NormState::Similarity { ln: 0.0 },
            ContractionFamily::ContinuedFraction => NormState::Continuant {
                q_prev: 0,
                q: 1,
                len: 0,
            },
        }
    }

    /// Appends `key` on the right of the word whose state is `state`.
    pub(crate) fn extend(&self, state: NormState, key: u64) -> NormState {
        match (self, state) {
            (ContractionFamily::Similarity(maps), NormState::Similarity { ln }) => NormState::Similarity {
                ln: ln + maps[key as usize].ratio.ln(),
            },
            (ContractionFamily::ContinuedFraction, NormState::Continuant { q_prev, q, len }) => {
                let next = (key as u128).checked_mul(q).and_then(|v| v.checked_add(q_prev));
                match next {
                    Some(q_next) if len < EXACT_CONTINUANT_MAX_LEN => NormState::Continuant {
                        q_prev: q,
                        q: q_next,
                        len: len + 1,
                    },
                    _ => {
                        let ratio = key as f64 + q_prev as f64 / q as f64;
                        NormState::LogContinuant {
                            ratio,
                            ln_q: (q as f64).ln() + ratio.ln(),
                        }
                    }
                }
            }
            (ContractionFamily::ContinuedFraction, NormState::LogContinuant { ratio, ln_q }) => {
                let ratio = key as f64 + 1.0 / ratio;
                NormState::LogContinuant {
                    ratio,
                    ln_q: ln_q + ratio.ln(),
                }
            }
            _ => unreachable!("norm state does not belong to this family"),
        }
    }

    /// `||phi'_omega||`: product of ratios for similarities, `1 / q_n^2` for
    /// continued fractions (the supremum of `1 / (q_n + x q_{n-1})^2` over
    /// `[0, 1]`, attained at `x = 0`).
    pub fn derivative_norm(&self, keys: &[u64]) -> DerivativeNorm {
        let state = keys.iter().fold(self.empty_state(), |s, &k| self.extend(s, k));
        DerivativeNorm {
            ln_norm: state.ln_norm(),
            exact: state.exact(),
        }
    }

    /// Distortion constant `K`: `sup |phi'_omega| <= K inf |phi'_omega|`.
    pub fn distortion_constant(&self) -> f64 {
        match self {
            ContractionFamily::Similarity(_) => 1.0,
            // ((q_n + q_{n-1}) / q_n)^2 with q_{n-1} <= q_n
            ContractionFamily::ContinuedFraction => 4.0,
        }
    }

    /// `phi_omega(x)` in any number type, without domain checks.
    ///
    /// Continued-fraction words use the continuant recurrence
    /// `phi_omega(x) = (p_n + x p_{n-1}) / (q_n + x q_{n-1})`.
    pub fn evaluate_in<T>(&self, keys: &[u64], x: T) -> T
    where
        T: Num + Clone + FromPrimitive + PartialOrd,
    {
        match self {
            ContractionFamily::Similarity(maps) => keys.iter().rev().fold(x, |y, &k| {
                let m = &maps[k as usize];
                let slope = T::from_f64(f64::from(m.sign) * m.ratio).expect("finite ratio");
                slope * y + T::from_f64(m.offset).expect("finite offset")
            }),
            ContractionFamily::ContinuedFraction => {
                let rescale_at = T::from_f64(1e100).expect("representable");
                let (mut p_prev, mut p) = (T::one(), T::zero());
                let (mut q_prev, mut q) = (T::zero(), T::one());
                for &a in keys {
                    let a = T::from_u64(a).expect("representable digit");
                    let p_next = a.clone() * p.clone() + p_prev;
                    let q_next = a * q.clone() + q_prev;
                    p_prev = p;
                    q_prev = q;
                    p = p_next;
                    q = q_next;
                    if q > rescale_at {
                        let s = q.clone();
                        p = p / s.clone();
                        p_prev = p_prev / s.clone();
                        q_prev = q_prev / s.clone();
                        q = q / s;
                    }
                }
                (p + x.clone() * p_prev) / (q + x * q_prev)
            }
        }
    }

    /// `phi_omega(x)` in `f64`.
    pub fn evaluate(&self, keys: &[u64], x: f64) -> f64 {
        self.evaluate_in(keys, x)
    }

    /// Image interval `phi_omega([lo, hi])` (every built-in map is monotone).
    pub fn image(&self, keys: &[u64], space: &VertexSpace) -> (f64, f64) {
        let a = self.evaluate(keys, space.lo);
        let b = self.evaluate(keys, space.hi);
        (a.min(b), a.max(b))
    }
}
