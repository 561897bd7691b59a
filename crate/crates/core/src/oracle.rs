//! Exact Clifford-average predictions and brute-force checks of the
//! permutation-operator identities behind them.
//!
//! Two closed forms are provided for the half-system purity of a state built
//! from random Clifford blocks interleaved with `N_T` T gates:
//!
//! * the mean purity `E Tr(rho_AB^2) = (2^(N - N_AB) + 2^N_AB) / (2^N + 1)`,
//!   independent of `N_T`;
//! * the leading-order second moment `E[Tr(rho_AB^2)^2] ~ (4 + (3/4)^N_T) 2^-N`
//!   for `N_AB = N / 2`.
//!
//! The testable decay statistic is `D(N_T) = 2^N E[Tr(rho_AB^2)^2] - 4`,
//! predicted to be `(3/4)^N_T + O(2^-N)`.
//!
//! The averaged entropy `-log2 E Tr(rho_AB^2)` evaluates to `N/2 - 1 + O(2^-N)`
//! at `N_AB = N/2`; the alternative `1 + N/2` form sometimes stated with the decay law does not
//! follow from the mean purity. Both are exposed ([`averaged_entropy`],
//! [`averaged_entropy_alt`]) and only the former is used in checks.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Decay ratio per T gate.
pub const LAMBDA: f64 = 0.75;

/// Largest operator dimension [`build_permutation_operator`] will allocate.
pub const MAX_OPERATOR_DIM: usize = 4096;

/// Exact `E Tr(rho_X^2)` over a Clifford 2-design for `|X| = n_ab` of `n` qubits:
/// `(2^n_ab 4^(n - n_ab) + 2^(n - n_ab) 4^n_ab) / (2^n (2^n + 1))`, evaluated
/// in the reduced form `(2^(n - n_ab) + 2^n_ab) / (2^n + 1)`.
pub fn mean_purity_exact(n: u32, n_ab: u32) -> f64 {
    assert!(n_ab <= n, "subsystem larger than system");
    let denom = (n as f64).exp2() + 1.0;
    ((n - n_ab) as f64).exp2() / denom + (n_ab as f64).exp2() / denom
}

/// Leading-order `E[Tr(rho_AB^2)^2] = (4 + (3/4)^N_T) 2^-N` at `N_AB = N/2`.
pub fn fourth_moment_prediction(n: u32, n_t: u32) -> f64 {
    (4.0 + LAMBDA.powi(n_t as i32)) * (-(n as f64)).exp2()
}

/// Predicted decay `(3/4)^N_T`.
pub fn tilde_delta_prediction(n_t: u32) -> f64 {
    LAMBDA.powi(n_t as i32)
}

/// `D = 2^N E[Tr(rho_AB^2)^2] - 4` from a measured second moment.
pub fn decay_statistic(n: u32, mean_purity_sq: f64) -> f64 {
    (n as f64).exp2() * mean_purity_sq - 4.0
}

/// `-log2 E Tr(rho_AB^2)` from the exact mean purity.
pub fn averaged_entropy(n: u32, n_ab: u32) -> f64 {
    -mean_purity_exact(n, n_ab).log2()
}

/// The `1 + N/2` form of the averaged entropy.
pub fn averaged_entropy_alt(n: u32) -> f64 {
    1.0 + n as f64 / 2.0
}

/// A permutation of `t` tensor copies; `images[i] = pi(i)`, zero based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(t: usize) -> Self {
        Self { images: (0..t).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Parse(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self { images })
    }

    /// Parses one-based cycle notation such as `e`, `(12)`, `(12)(34)` or `(234)`.
    pub fn from_cycles(s: &str, t: usize) -> Result<Self> {
        let s = s.trim();
        let mut images: Vec<usize> = (0..t).collect();
        if s == "e" || s.is_empty() {
            return Ok(Self { images });
        }
        let bad = || Error::Parse(format!("bad cycle notation {s:?} for {t} copies"));
        for cycle in s.split(')') {
            let cycle = cycle.trim();
            if cycle.is_empty() {
                continue;
            }
            let body = cycle.strip_prefix('(').ok_or_else(bad)?;
            let pts: Vec<usize> = body
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d >= 1 && d <= t).ok_or_else(bad))
                .collect::<Result<_>>()?;
            for (k, &p) in pts.iter().enumerate() {
                images[p - 1] = pts[(k + 1) % pts.len()] - 1;
            }
        }
        Self::from_images(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if !seen[start] {
                cycles += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = self.images[i];
                }
            }
        }
        cycles
    }

    /// All permutations of `t` copies in lexicographic order of images.
    pub fn all(t: usize) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<usize>, t: usize, out: &mut Vec<Perm>) {
            if prefix.len() == t {
                out.push(Perm { images: prefix.clone() });
                return;
            }
            for i in 0..t {
                if !prefix.contains(&i) {
                    prefix.push(i);
                    rec(prefix, t, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), t, &mut out);
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.len()];
        let mut any = false;
        for start in 0..self.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                write!(f, "{}", i + 1)?;
                i = self.images[i];
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "e")?;
        }
        Ok(())
    }
}

/// Label of a commutant element: a plain permutation, or `pi4 . perm` where
/// `perm` fixes the first copy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OperatorLabel {
    Plain(Perm),
    Pi4(Perm),
}

impl OperatorLabel {
    /// The six `pi4 . perm` labels with `perm` in the permutations of copies 2..4.
    pub fn pi4_family() -> Vec<OperatorLabel> {
        ["e", "(23)", "(34)", "(24)", "(234)", "(324)"]
            .iter()
            .map(|c| OperatorLabel::Pi4(Perm::from_cycles(c, 4).expect("static label")))
            .collect()
    }

    fn perm(&self) -> &Perm {
        match self {
            OperatorLabel::Plain(p) | OperatorLabel::Pi4(p) => p,
        }
    }
}

impl FromStr for OperatorLabel {
    type Err = Error;

    /// `(12)(34)` or `pi4`, `pi4.(23)`; copy count inferred as 4 for `pi4`
    /// labels and from the largest digit (at least 2) otherwise.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("pi4") {
            let rest = rest.trim_start_matches(['.', '*', '·', ' ']);
            return Ok(OperatorLabel::Pi4(Perm::from_cycles(rest, 4)?));
        }
        let t = s.chars().filter_map(|c| c.to_digit(10)).max().unwrap_or(2).max(2) as usize;
        Ok(OperatorLabel::Plain(Perm::from_cycles(s, t)?))
    }
}

impl fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorLabel::Plain(p) => write!(f, "{p}"),
            OperatorLabel::Pi4(p) if p.cycle_count() == p.len() => write!(f, "pi4"),
            OperatorLabel::Pi4(p) => write!(f, "pi4.{p}"),
        }
    }
}

/// Dense real operator on `t` copies of `n` qubits, row-major.
///
/// Basis bit `t * q + c` is copy `c` of qubit `q`; the operator is the
/// `n`-fold tensor power of its single-qubit factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationOperator {
    pub label: OperatorLabel,
    pub t: usize,
    pub n: usize,
    pub site: Vec<f64>,
    pub matrix: Vec<f64>,
}

impl PermutationOperator {
    pub fn dim(&self) -> usize {
        1 << (self.t * self.n)
    }

    pub fn site_dim(&self) -> usize {
        1 << self.t
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[i * self.dim() + i]).sum()
    }

    pub fn site_trace(&self) -> f64 {
        (0..self.site_dim()).map(|i| self.site[i * self.site_dim() + i]).sum()
    }

    /// Hilbert-Schmidt inner product `Tr(A^T B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.matrix.iter().zip(&other.matrix).map(|(a, b)| a * b).sum()
    }
}

/// Single-copy-block factor `r_pi` (`2^t x 2^t`).
pub fn site_permutation(perm: &Perm) -> Vec<f64> {
    let t = perm.len();
    let d = 1usize << t;
    let mut m = vec![0.0; d * d];
    for x in 0..d {
        let y = (0..t).fold(0usize, |acc, c| acc | ((x >> perm.images[c]) & 1) << c);
        m[y * d + x] = 1.0;
    }
    m
}

/// `pi4 = (I^4 + X^4 + Y^4 + Z^4) / 2` on four copies of one qubit (real).
pub fn site_pi4() -> Vec<f64> {
    let d = 16;
    let mut m = vec![0.0; d * d];
    for x in 0..d {
        let parity = if (x as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        // I and Z are diagonal, X and Y flip all four bits
        m[x * d + x] += 0.5 * (1.0 + parity);
        m[(x ^ 0xf) * d + x] += 0.5 * (1.0 + parity);
    }
    m
}

/// Largest entry of `pi4^2 - 2 pi4`.
pub fn pi4_square_error() -> f64 {
    let p = site_pi4();
    let sq = matmul(&p, &p, 16);
    sq.iter().zip(&p).map(|(a, b)| (a - 2.0 * b).abs()).fold(0.0, f64::max)
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let v = a[i * d + k];
            if v != 0.0 {
                for j in 0..d {
                    out[i * d + j] += v * b[k * d + j];
                }
            }
        }
    }
    out
}

fn tensor_power(site: &[f64], sd: usize, n: usize) -> Vec<f64> {
    let mut acc = vec![1.0];
    let mut dim = 1;
    for _ in 0..n {
        let nd = dim * sd;
        let mut next = vec![0.0; nd * nd];
        // new index = old | site << (bits of old)
        for (yi, xi) in (0..dim).flat_map(|y| (0..dim).map(move |x| (y, x))) {
            let a = acc[yi * dim + xi];
            if a == 0.0 {
                continue;
            }
            for ys in 0..sd {
                for xs in 0..sd {
                    let b = site[ys * sd + xs];
                    if b != 0.0 {
                        next[(yi + ys * dim) * nd + xi + xs * dim] = a * b;
                    }
                }
            }
        }
        acc = next;
        dim = nd;
    }
    acc
}

/// Explicit `R_pi = r_pi^(x n)` or `R_pi Pi4 = (r_pi pi4)^(x n)`.
pub fn build_permutation_operator(label: &OperatorLabel, t: usize, n: usize) -> Result<PermutationOperator> {
    if t != 2 && t != 4 {
        return Err(Error::InvalidConfig(format!("copy count must be 2 or 4, got {t}")));
    }
    if label.perm().len() != t {
        return Err(Error::InvalidConfig(format!("label {label} does not act on {t} copies")));
    }
    if n == 0 {
        return Err(Error::InvalidSize("operator needs at least one qubit".into()));
    }
    if t * n > MAX_OPERATOR_DIM.trailing_zeros() as usize {
        return Err(Error::Resource(format!("dimension 2^{} exceeds {MAX_OPERATOR_DIM}", t * n)));
    }
    let sd = 1usize << t;
    let site = match label {
        OperatorLabel::Plain(p) => site_permutation(p),
        OperatorLabel::Pi4(p) => {
            if t != 4 || p.images[0] != 0 {
                return Err(Error::InvalidConfig(format!("{label}: pi4 labels need t = 4 and fix copy 1")));
            }
            matmul(&site_permutation(p), &site_pi4(), sd)
        }
    };
    let matrix = tensor_power(&site, sd, n);
    Ok(PermutationOperator { label: label.clone(), t, n, site, matrix })
}

/// `6 x 6` matrix of `Tr((R_a Pi4)^T  T^(x4) (R_b Pi4) T^dag(x4))` over the
/// `pi4` family, with the T gate on the first qubit of `n` in `{1, 2}`.
pub fn t_contraction_matrix(n: usize) -> Result<Vec<Vec<Complex64>>> {
    if !(1..=2).contains(&n) {
        return Err(Error::Resource(format!("T contraction is limited to n <= 2, got {n}")));
    }
    let ops: Vec<PermutationOperator> = OperatorLabel::pi4_family()
        .iter()
        .map(|l| build_permutation_operator(l, 4, n))
        .collect::<Result<_>>()?;
    let dim = ops[0].dim();
    // T^(x4) on the four copies of qubit 0 is diagonal: phase e^{i pi/4 * popcount}
    let phase: Vec<Complex64> = (0..dim)
        .map(|i| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * ((i & 0xf) as u32).count_ones() as f64))
        .collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ops.len()]; ops.len()];
    for (a, oa) in ops.iter().enumerate() {
        for (b, ob) in ops.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..dim {
                for x in 0..dim {
                    let (u, v) = (oa.matrix[y * dim + x], ob.matrix[y * dim + x]);
                    if u != 0.0 && v != 0.0 {
                        acc += u * v * phase[y] * phase[x].conj();
                    }
                }
            }
            out[a][b] = acc;
        }
    }
    Ok(out)
}

/// T-contraction diagonal value `(2^4 - 4) 2^(4(n-1))`.
pub fn t_contraction_diagonal(n: usize) -> f64 {
    12.0 * 16f64.powi(n as i32 - 1)
}

/// T-contraction off-diagonal bound `(2^3 - 4) 2^(3(n-1))`.
pub fn t_contraction_offdiagonal_bound(n: usize) -> f64 {
    4.0 * 8f64.powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_purity_values() {
        assert!((mean_purity_exact(8, 4) - 8192.0 / 65792.0).abs() < 1e-15);
        assert!((mean_purity_exact(8, 4) - 0.1245136).abs() < 1e-7);
        assert_eq!(mean_purity_exact(6, 6), 1.0);
        assert!((mean_purity_exact(2, 1) - 0.8).abs() < 1e-15);
        // large-N form 2 * 2^(-N/2)
        assert!((mean_purity_exact(40, 20) / (2.0 * 2f64.powi(-20)) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn moment_predictions() {
        assert!((fourth_moment_prediction(10, 0) - 5.0 / 1024.0).abs() < 1e-18);
        assert!((fourth_moment_prediction(12, 4) - 4.31640625 / 4096.0).abs() < 1e-15);
        assert!((fourth_moment_prediction(12, 4) - 1.0538e-3).abs() < 1e-7);
        assert!((fourth_moment_prediction(8, 200) * 256.0 - 4.0).abs() < 1e-12);
        assert_eq!(tilde_delta_prediction(0), 1.0);
        assert_eq!(tilde_delta_prediction(4), 0.31640625);
        assert!((-tilde_delta_prediction(1).ln() - 0.28768).abs() < 1e-5);
        assert!((decay_statistic(12, fourth_moment_prediction(12, 3)) - 0.421875).abs() < 1e-12);
    }

    #[test]
    fn averaged_entropy_forms() {
        // the mean-purity form sits near N/2 - 1, two bits below the alternative form
        let exact = averaged_entropy(20, 10);
        assert!((exact - 9.0).abs() < 1e-2);
        assert_eq!(averaged_entropy_alt(20), 11.0);
    }

    #[test]
    fn cycle_notation() {
        let p = Perm::from_cycles("(234)", 4).unwrap();
        assert_eq!(p.images(), &[0, 2, 3, 1]);
        assert_eq!(p.to_string(), "(234)");
        assert_eq!(Perm::from_cycles("(12)(34)", 4).unwrap().cycle_count(), 2);
        assert_eq!(Perm::from_cycles("e", 4).unwrap().to_string(), "e");
        assert!(Perm::from_cycles("(15)", 4).is_err());
        assert_eq!(Perm::all(4).len(), 24);
        let l: OperatorLabel = "pi4.(324)".parse().unwrap();
        assert_eq!(l.to_string(), "pi4.(243)");
        assert_eq!("pi4".parse::<OperatorLabel>().unwrap(), OperatorLabel::pi4_family()[0]);
    }

    #[test]
    fn single_site_traces() {
        let swap = build_permutation_operator(&"(12)".parse().unwrap(), 2, 1).unwrap();
        assert_eq!(swap.trace(), 2.0);
        let e = build_permutation_operator(&OperatorLabel::Plain(Perm::identity(2)), 2, 1).unwrap();
        assert_eq!(e.trace(), 4.0);
    }

    #[test]
    fn tensor_power_traces() {
        for p in Perm::all(4) {
            let label = OperatorLabel::Plain(p.clone());
            let op = build_permutation_operator(&label, 4, 2).unwrap();
            // each cycle contributes a factor 2 per qubit
            let expected = 2f64.powi(p.cycle_count() as i32);
            assert_eq!(op.site_trace(), expected);
            assert_eq!(op.trace(), expected * expected);
            assert!(op.matrix.iter().all(|&v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn permutation_gram_is_symmetric_positive() {
        let ops: Vec<_> = Perm::all(4)
            .into_iter()
            .map(|p| build_permutation_operator(&OperatorLabel::Plain(p), 4, 2).unwrap())
            .collect();
        for a in &ops {
            for b in &ops {
                let g = a.inner(b);
                assert!(g >= 1.0 && g.fract() == 0.0);
                assert_eq!(g, b.inner(a));
            }
        }
    }

    #[test]
    fn pi4_squares_to_twice_itself() {
        let p = site_pi4();
        let sq = matmul(&p, &p, 16);
        for (a, b) in sq.iter().zip(&p) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn t_contraction_small_registers() {
        for n in 1..=2 {
            let m = t_contraction_matrix(n).unwrap();
            for (a, row) in m.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    if a == b {
                        assert!((v.re - t_contraction_diagonal(n)).abs() < 1e-9 && v.im.abs() < 1e-9);
                    } else {
                        assert!(v.norm() <= t_contraction_offdiagonal_bound(n) + 1e-9);
                    }
                }
            }
        }
        assert_eq!(t_contraction_diagonal(1), 12.0);
        assert_eq!(t_contraction_diagonal(2), 192.0);
        assert!(matches!(t_contraction_matrix(3), Err(Error::Resource(_))));
    }

    #[test]
    fn operator_caps() {
        let l = OperatorLabel::Plain(Perm::identity(4));
        assert!(matches!(build_permutation_operator(&l, 4, 4), Err(Error::Resource(_))));
        assert!(build_permutation_operator(&l, 3, 1).is_err());
        assert!(build_permutation_operator(&"pi4.(12)".parse().unwrap(), 4, 1).is_err());
    }
}
