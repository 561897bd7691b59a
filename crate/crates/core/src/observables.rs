//! Per-instance observables and ensemble statistics.

use serde::{Deserialize, Serialize};

use crate::backend::Simulator;
use crate::error::{Error, Result};
use crate::subset::QubitSubset;

/// Observables measured on one circuit instance. Entropies are in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub instance_index: usize,
    pub n: usize,
    /// T count (t-doped ensembles) or `None`.
    pub n_t: Option<usize>,
    /// `(theta, p_m)` for brickwork ensembles or `None`.
    pub mipt: Option<(f64, f64)>,
    pub i2: f64,
    pub s2_a: f64,
    pub s2_b: f64,
    pub s2_ab: f64,
    pub s4_ab: f64,
    pub sz_a: f64,
    pub sz_b: f64,
    pub sz_ab: f64,
}

impl SampleRecord {
    /// `Tr rho_AB^2` recovered from the order-2 entropy.
    pub fn purity_ab(&self) -> f64 {
        (-self.s2_ab).exp2()
    }

    /// Finite fields and `I2 = S_A + S_B - S_AB` within `1e-9`.
    pub fn check(&self) -> Result<()> {
        let fields = [self.i2, self.s2_a, self.s2_b, self.s2_ab, self.s4_ab, self.sz_a, self.sz_b, self.sz_ab];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalState(format!("non-finite field in record {}", self.instance_index)));
        }
        let gap = (self.i2 - (self.s2_a + self.s2_b - self.s2_ab)).abs();
        if gap > 1e-9 {
            return Err(Error::NumericalState(format!("mutual information identity off by {gap:e}")));
        }
        Ok(())
    }
}

/// `S2(A) + S2(B) - S2(A u B)` for disjoint non-empty `a`, `b`.
pub fn mutual_info2<S: Simulator>(state: &S, a: &QubitSubset, b: &QubitSubset) -> Result<f64> {
    if !a.is_disjoint(b) {
        return Err(Error::InvalidSubset(format!("{:?} and {:?} overlap", a.indices(), b.indices())));
    }
    Ok(state.entropy2(a)? + state.entropy2(b)? - state.entropy2(&a.union(b))?)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn central_moment(xs: &[f64], mu: f64, k: i32) -> f64 {
    xs.iter().map(|x| (x - mu).powi(k)).sum::<f64>() / xs.len() as f64
}

/// Population standard deviation `(E[X^2] - E[X]^2)^(1/2)`.
pub fn fluctuation(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!("fluctuation needs >= 2 samples, got {}", xs.len())));
    }
    Ok(central_moment(xs, mean(xs), 2).sqrt())
}

/// Standard error of the sample mean.
pub fn std_error_mean(xs: &[f64]) -> Result<f64> {
    Ok(fluctuation(xs)? / ((xs.len() - 1) as f64).sqrt())
}

/// Delta-method standard error of [`fluctuation`]: `sqrt((m4 - m2^2) / (4 m2 n))`.
pub fn fluctuation_std_error(xs: &[f64]) -> Result<f64> {
    let sd = fluctuation(xs)?;
    if sd == 0.0 {
        return Ok(0.0);
    }
    let mu = mean(xs);
    let m2 = sd * sd;
    let m4 = central_moment(xs, mu, 4);
    Ok(((m4 - m2 * m2).max(0.0) / (4.0 * m2 * xs.len() as f64)).sqrt())
}

/// Standardized fourth moment `E[(X - mu)^4] / sigma^4` (not excess).
pub fn kurtosis(xs: &[f64]) -> Result<f64> {
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!("kurtosis needs >= 4 samples, got {}", xs.len())));
    }
    let mu = mean(xs);
    let m2 = central_moment(xs, mu, 2);
    if m2.sqrt() <= 1e-12 {
        return Err(Error::DegenerateSample("sample is constant".into()));
    }
    Ok(central_moment(xs, mu, 4) / (m2 * m2))
}

/// `Kurt_A + Kurt_B - Kurt_AB`.
pub fn kurt_combo(k_a: f64, k_b: f64, k_ab: f64) -> f64 {
    k_a + k_b - k_ab
}
