//! Seeded generators for the two circuit ensembles.
//!
//! Random draws happen in a fixed order so a circuit is a pure function of
//! its parameters and stream state:
//!
//! * t-doped: per composite step, gate kind, then its qubit, then
//!   `(control, target)` for each CNOT; each T gate draws one qubit.
//! * monitored brickwork: per layer, the two-qubit Cliffords in pair order,
//!   then (for nonzero angle) one rotation axis per qubit in ascending order,
//!   then one measurement coin per qubit in ascending order.

use rand::Rng;

use crate::clifford2::Clifford2;
use crate::uniform_clifford::uniform_clifford;
use crate::error::{Error, Result};
use crate::gate::{Circuit, CircuitMeta, GateOp};

/// How the three CNOTs of a composite step pick their qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CnotPairing {
    /// Each CNOT draws its own ordered pair.
    #[default]
    Independent,
    /// One ordered pair drawn per step, shared by all three CNOTs.
    Shared,
}

/// Where the Clifford blocks sit relative to the T gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TDopedLayout {
    /// `C (T C)^n_t`: every T gate is followed by a fresh scrambling block.
    #[default]
    Interleaved,
    /// `(C T)^n_t`, or a single `C` when `n_t = 0`. The final T is a local
    /// unitary and leaves every entropy unchanged.
    TrailingT,
}

/// What fills each Clifford slot of a t-doped circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliffordBlock {
    /// `2n` composite steps of local Cliffords and CNOTs.
    #[default]
    Steps,
    /// A uniformly random `n`-qubit Clifford.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TDopedOptions {
    pub pairing: CnotPairing,
    pub layout: TDopedLayout,
    pub block: CliffordBlock,
}

const SINGLE_CLIFFORDS: usize = 6;

fn single_clifford(kind: usize, q: usize) -> GateOp {
    match kind {
        0 => GateOp::I(q),
        1 => GateOp::X(q),
        2 => GateOp::Y(q),
        3 => GateOp::Z(q),
        4 => GateOp::H(q),
        _ => GateOp::S(q),
    }
}

fn ordered_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let c = rng.gen_range(0..n);
    let t = rng.gen_range(0..n - 1);
    (c, if t >= c { t + 1 } else { t })
}

/// One scrambling block: `2n` composite steps of a random single-qubit
/// Clifford followed by three CNOTs.
pub fn clifford_block<R: Rng + ?Sized>(n: usize, pairing: CnotPairing, rng: &mut R, out: &mut Vec<GateOp>) {
    for _ in 0..2 * n {
        let kind = rng.gen_range(0..SINGLE_CLIFFORDS);
        let q = rng.gen_range(0..n);
        out.push(single_clifford(kind, q));
        let shared = match pairing {
            CnotPairing::Shared => Some(ordered_pair(n, rng)),
            CnotPairing::Independent => None,
        };
        for _ in 0..3 {
            let (control, target) = shared.unwrap_or_else(|| ordered_pair(n, rng));
            out.push(GateOp::Cnot { control, target });
        }
    }
}

/// Number of Clifford blocks a t-doped circuit contains.
pub fn tdoped_block_count(n_t: usize, layout: TDopedLayout) -> usize {
    match layout {
        TDopedLayout::Interleaved => n_t + 1,
        TDopedLayout::TrailingT => n_t.max(1),
    }
}

/// t-doped Clifford circuit with exactly `n_t` T gates on random qubits.
pub fn gen_tdoped<R: Rng + ?Sized>(n: usize, n_t: usize, opts: TDopedOptions, rng: &mut R) -> Result<Circuit> {
    if n < 4 || n % 4 != 0 {
        return Err(Error::InvalidConfig(format!("t-doped circuits need n >= 4 divisible by 4, got {n}")));
    }
    let blocks = tdoped_block_count(n_t, opts.layout);
    let mut ops = Vec::with_capacity(blocks * 8 * n + n_t);
    let mut t_left = n_t;
    for b in 0..blocks {
        if opts.layout == TDopedLayout::Interleaved && b > 0 {
            ops.push(GateOp::T(rng.gen_range(0..n)));
            t_left -= 1;
        }
        match opts.block {
            CliffordBlock::Steps => clifford_block(n, opts.pairing, rng, &mut ops),
            CliffordBlock::Uniform => uniform_clifford(n, rng, &mut ops),
        }
        if opts.layout == TDopedLayout::TrailingT && t_left > 0 {
            ops.push(GateOp::T(rng.gen_range(0..n)));
            t_left -= 1;
        }
    }
    debug_assert_eq!(t_left, 0);
    Ok(Circuit { n, ops, meta: CircuitMeta::TDoped { n_t }, seed: 0 })
}

/// Uniformly random two-qubit Clifford on `(a, b)`.
pub fn gen_2q_clifford<R: Rng + ?Sized>(a: usize, b: usize, rng: &mut R) -> GateOp {
    GateOp::Clifford2 { qubits: [a, b], element: Clifford2::sample(rng) }
}

fn check_mipt(n: usize, theta: f64, p_m: f64) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidConfig(format!("brickwork needs even n >= 4, got {n}")));
    }
    if !(0.0..=1.0).contains(&p_m) {
        return Err(Error::InvalidConfig(format!("measurement rate {p_m} outside [0, 1]")));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidConfig("rotation angle must be finite".into()));
    }
    Ok(())
}

fn mipt_layer<R: Rng + ?Sized>(n: usize, odd: bool, theta: f64, p_m: f64, rng: &mut R, out: &mut Vec<GateOp>) {
    let offset = usize::from(odd);
    for k in 0..n / 2 {
        let a = 2 * k + offset;
        out.push(gen_2q_clifford(a % n, (a + 1) % n, rng));
    }
    if theta != 0.0 {
        for qubit in 0..n {
            out.push(match rng.gen_range(0..3) {
                0 => GateOp::Rx { qubit, angle: theta },
                1 => GateOp::Ry { qubit, angle: theta },
                _ => GateOp::Rz { qubit, angle: theta },
            });
        }
    }
    for q in 0..n {
        if rng.gen::<f64>() < p_m {
            out.push(GateOp::MeasureZ(q));
        }
    }
}

/// One brickwork cycle: even layer, rotations, measurements, then the odd
/// layer (periodic, pairing `n-1` with `0`), rotations, measurements.
pub fn gen_mipt_cycle<R: Rng + ?Sized>(n: usize, theta: f64, p_m: f64, rng: &mut R) -> Result<Vec<GateOp>> {
    check_mipt(n, theta, p_m)?;
    let mut ops = Vec::with_capacity(4 * n);
    mipt_layer(n, false, theta, p_m, rng, &mut ops);
    mipt_layer(n, true, theta, p_m, rng, &mut ops);
    Ok(ops)
}

/// `cycles` brickwork cycles starting from `|0...0>`.
pub fn gen_mipt<R: Rng + ?Sized>(n: usize, theta: f64, p_m: f64, cycles: usize, rng: &mut R) -> Result<Circuit> {
    check_mipt(n, theta, p_m)?;
    let mut ops = Vec::with_capacity(cycles * 4 * n);
    for _ in 0..cycles {
        mipt_layer(n, false, theta, p_m, rng, &mut ops);
        mipt_layer(n, true, theta, p_m, rng, &mut ops);
    }
    Ok(Circuit { n, ops, meta: CircuitMeta::Mipt { theta, p_m, cycles }, seed: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn tdoped_zero_t_has_one_block() {
        let c = gen_tdoped(8, 0, TDopedOptions::default(), &mut rng(1)).unwrap();
        assert_eq!(c.ops.len(), 64);
        assert_eq!(c.count(|op| matches!(op, GateOp::Cnot { .. })), 48);
        assert_eq!(c.count(|op| op.qubits().len() == 1), 16);
        assert_eq!(c.count(|op| matches!(op, GateOp::T(_))), 0);
        c.validate().unwrap();
    }

    #[test]
    fn tdoped_counts_per_layout() {
        for (layout, blocks) in [(TDopedLayout::Interleaved, 3), (TDopedLayout::TrailingT, 2)] {
            let opts = TDopedOptions { layout, ..Default::default() };
            let c = gen_tdoped(8, 2, opts, &mut rng(2)).unwrap();
            assert_eq!(c.count(|op| matches!(op, GateOp::T(_))), 2);
            assert_eq!(c.ops.len() - 2, blocks * 64);
            c.validate().unwrap();
        }
        let trailing = gen_tdoped(8, 2, TDopedOptions { layout: TDopedLayout::TrailingT, ..Default::default() }, &mut rng(2))
            .unwrap();
        assert!(matches!(trailing.ops.last(), Some(GateOp::T(_))));
    }

    #[test]
    fn tdoped_is_deterministic() {
        let a = gen_tdoped(12, 5, TDopedOptions::default(), &mut rng(42)).unwrap();
        let b = gen_tdoped(12, 5, TDopedOptions::default(), &mut rng(42)).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        let c = gen_tdoped(12, 5, TDopedOptions::default(), &mut rng(43)).unwrap();
        assert_ne!(a.to_text(), c.to_text());
    }

    #[test]
    fn shared_pairing_repeats_pair() {
        let opts = TDopedOptions { pairing: CnotPairing::Shared, ..Default::default() };
        let c = gen_tdoped(4, 0, opts, &mut rng(3)).unwrap();
        for step in c.ops.chunks(4) {
            assert_eq!(step[1], step[2]);
            assert_eq!(step[2], step[3]);
        }
    }

    #[test]
    fn tdoped_rejects_bad_sizes() {
        assert!(matches!(gen_tdoped(6, 1, TDopedOptions::default(), &mut rng(0)), Err(Error::InvalidConfig(_))));
        assert!(gen_tdoped(0, 1, TDopedOptions::default(), &mut rng(0)).is_err());
    }

    #[test]
    fn mipt_measurement_counts() {
        let ops = gen_mipt_cycle(8, 0.3, 0.0, &mut rng(1)).unwrap();
        assert_eq!(ops.iter().filter(|o| matches!(o, GateOp::MeasureZ(_))).count(), 0);
        let ops = gen_mipt_cycle(8, 0.3, 1.0, &mut rng(1)).unwrap();
        assert_eq!(ops.iter().filter(|o| matches!(o, GateOp::MeasureZ(_))).count(), 16);
        assert_eq!(ops.iter().filter(|o| o.angle().is_some()).count(), 16);
    }

    #[test]
    fn mipt_zero_angle_is_clifford() {
        let ops = gen_mipt_cycle(6, 0.0, 0.5, &mut rng(4)).unwrap();
        assert!(ops.iter().all(|o| matches!(o, GateOp::Clifford2 { .. } | GateOp::MeasureZ(_))));
        let pairs: Vec<[usize; 2]> = ops
            .iter()
            .filter_map(|o| match o {
                GateOp::Clifford2 { qubits, .. } => Some(*qubits),
                _ => None,
            })
            .collect();
        assert_eq!(pairs, vec![[0, 1], [2, 3], [4, 5], [1, 2], [3, 4], [5, 0]]);
    }

    #[test]
    fn mipt_rejects_odd_sizes() {
        assert!(matches!(gen_mipt_cycle(7, 0.0, 0.1, &mut rng(0)), Err(Error::InvalidConfig(_))));
        assert!(gen_mipt_cycle(8, 0.0, 1.5, &mut rng(0)).is_err());
        let c = gen_mipt(8, 0.0, 0.2, 3, &mut rng(9)).unwrap();
        assert_eq!(c.meta, CircuitMeta::Mipt { theta: 0.0, p_m: 0.2, cycles: 3 });
        assert!(c.is_clifford());
    }
}
