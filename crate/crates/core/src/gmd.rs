//! Generalized-minimum-distance machinery for the row stage of the product
//! decoders: reliability weights, nested erasure sets, trial planning, and the
//! GMD (first accepted trial) and GD (best metric over all trials) row
//! decoders.
//!
//! Reliability weights are exact rationals `num / d` where `d` is the column
//! code distance, so the acceptance test `alpha . f(r, c) > n - d` is evaluated
//! without rounding.

use std::cmp::Ordering;

use crate::galois::Symbol;
use crate::rscode::RsCode;

/// Exact rational `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0);
        Ratio { num, den }
    }

    pub fn from_int(v: i64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

/// Per-column reliability weights `alpha_i = nums[i] / d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReliabilityVector {
    d: usize,
    nums: Vec<u32>,
}

impl ReliabilityVector {
    /// `d` is the distance of the code whose decoding produced the weights.
    pub fn new(d: usize, nums: Vec<u32>) -> Self {
        let t = (d - 1) / 2;
        debug_assert!(nums
            .iter()
            .all(|&a| a == 0 || (a as usize <= d && (d - a as usize).is_multiple_of(2) && (d - a as usize) / 2 <= t)));
        ReliabilityVector { d, nums }
    }

    /// All weights equal to one.
    pub fn all_reliable(d: usize, len: usize) -> Self {
        ReliabilityVector::new(d, vec![d as u32; len])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn numerators(&self) -> &[u32] {
        &self.nums
    }

    pub fn weight(&self, i: usize) -> Ratio {
        Ratio::new(self.nums[i] as i64, self.d as i64)
    }

    /// Number of reliability classes `J = floor((d-1)/2) + 2`.
    pub fn num_classes(&self) -> usize {
        (self.d - 1) / 2 + 2
    }

    /// Numerators of the class values `a_1 < ... < a_J`: `0`, then
    /// `d - 2w` for `w = t, t-1, ..., 0`.
    pub fn class_values(&self) -> Vec<u32> {
        let t = (self.d - 1) / 2;
        std::iter::once(0)
            .chain((0..=t).rev().map(|w| (self.d - 2 * w) as u32))
            .collect()
    }
}

/// Reliability of one column after bounded-distance decoding: `(d - 2w)/d`
/// when the decode succeeded with `w <= t` corrected errors, zero otherwise.
/// Returns the numerator over `d`.
pub fn column_reliability(code: &RsCode, err_weight: Option<usize>) -> u32 {
    match err_weight {
        Some(w) if w <= code.t() => (code.d() - 2 * w) as u32,
        _ => 0,
    }
}

/// `alpha . f(r, c)`: reliabilities of agreeing positions minus those of
/// disagreeing positions.
pub fn forney_metric(r: &[Symbol], c: &[Symbol], alpha: &ReliabilityVector) -> Ratio {
    Ratio::new(metric_num(r, c, alpha), alpha.d as i64)
}

#[inline]
fn metric_num(r: &[Symbol], c: &[Symbol], alpha: &ReliabilityVector) -> i64 {
    assert_eq!(r.len(), c.len());
    assert_eq!(r.len(), alpha.len());
    r.iter()
        .zip(c)
        .zip(&alpha.nums)
        .map(|((a, b), &w)| if a == b { w as i64 } else { -(w as i64) })
        .sum()
}

/// The strict GMD acceptance test `metric > n - d`.
pub fn gmd_accepts(metric: Ratio, n: usize, d: usize) -> bool {
    metric > Ratio::from_int(n as i64 - d as i64)
}

/// Nested erasure sets `E_0 = {} ⊆ E_1 ⊆ ... ⊆ E_J = [n']`,
/// `E_j = { i : alpha_i <= a_j }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureSchedule {
    class_values: Vec<u32>,
    sets: Vec<Vec<usize>>,
}

impl ErasureSchedule {
    /// Class numerators `a_1 .. a_J` (over the column distance).
    pub fn class_values(&self) -> &[u32] {
        &self.class_values
    }

    /// `E_j` as sorted positions, `j` in `0..=J`.
    pub fn set(&self, j: usize) -> &[usize] {
        &self.sets[j]
    }

    pub fn num_classes(&self) -> usize {
        self.class_values.len()
    }
}

/// Ordered trial indices `j` to run, after the skip rules and the trial cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialPlan {
    viable: Vec<usize>,
}

impl TrialPlan {
    pub fn viable(&self) -> &[usize] {
        &self.viable
    }

    pub fn len(&self) -> usize {
        self.viable.len()
    }

    pub fn is_empty(&self) -> bool {
        self.viable.is_empty()
    }
}

/// Maximum number of trials needed, `floor((min(d, d') + 1) / 2)`.
pub fn max_trials(d_col: usize, d_row: usize) -> usize {
    d_col.min(d_row).div_ceil(2)
}

/// Builds the erasure schedule and the viable trials for a row code of
/// distance `d_row`.
///
/// `j in 1..J` is viable when `j = 1`, or when class `j` is nonempty and it
/// is not the case that `d_row - |E_j|` is even with `|E_{j+1}| = |E_j| + 1`
/// (that trial would return the same word as trial `j + 1`). Only the first
/// `max_trials` viable trials are kept.
pub fn build_schedule(alpha: &ReliabilityVector, d_row: usize) -> (ErasureSchedule, TrialPlan) {
    let class_values = alpha.class_values();
    let big_j = class_values.len();
    let mut sets = Vec::with_capacity(big_j + 1);
    sets.push(Vec::new());
    for &a in &class_values {
        let set: Vec<usize> = alpha
            .nums
            .iter()
            .enumerate()
            .filter_map(|(i, &w)| (w <= a).then_some(i))
            .collect();
        sets.push(set);
    }
    let cap = max_trials(alpha.d, d_row);
    let mut viable = Vec::new();
    for j in 1..big_j {
        if viable.len() == cap {
            break;
        }
        let size = sets[j].len();
        let empty_class = size == sets[j - 1].len();
        let parity_skip = (d_row as i64 - size as i64) % 2 == 0 && sets[j + 1].len() == size + 1;
        if j == 1 || !(empty_class || parity_skip) {
            viable.push(j);
        }
    }
    (ErasureSchedule { class_values, sets }, TrialPlan { viable })
}

/// Outcome of one row decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowDecode {
    pub codeword: Vec<Symbol>,
    /// Trial index `j` that produced the codeword.
    pub used_j: usize,
    /// Position of `used_j` within the plan.
    pub plan_pos: usize,
}

/// Result of a row decode plus the number of component decoder calls spent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowAttempt {
    pub result: Option<RowDecode>,
    pub calls: usize,
}

/// GMD row decoding: runs the planned trials from plan position `start`
/// upward and returns the first decoded word that passes the acceptance
/// test.
pub fn gmd_row_decode(
    code: &RsCode,
    row: &[Symbol],
    alpha: &ReliabilityVector,
    schedule: &ErasureSchedule,
    plan: &TrialPlan,
    start: usize,
) -> RowAttempt {
    let n = code.n();
    let mut calls = 0;
    let mut buf = row.to_vec();
    let threshold = (n as i64 - code.d() as i64) * alpha.d as i64;
    for (pos, &j) in plan.viable.iter().enumerate().skip(start) {
        buf.copy_from_slice(row);
        calls += 1;
        if code.decode_in_place(&mut buf, schedule.set(j)).is_err() {
            continue;
        }
        if metric_num(row, &buf, alpha) > threshold {
            return RowAttempt {
                result: Some(RowDecode {
                    codeword: buf,
                    used_j: j,
                    plan_pos: pos,
                }),
                calls,
            };
        }
    }
    RowAttempt {
        result: None,
        calls,
    }
}

/// GD row decoding: runs every planned trial and returns the candidate with
/// the largest metric, ties going to the smallest `j`. No acceptance gate.
pub fn gd_row_decode(
    code: &RsCode,
    row: &[Symbol],
    alpha: &ReliabilityVector,
    schedule: &ErasureSchedule,
    plan: &TrialPlan,
) -> RowAttempt {
    let mut buf = row.to_vec();
    let mut best: Option<(i64, RowDecode)> = None;
    let mut calls = 0;
    for (pos, &j) in plan.viable.iter().enumerate() {
        buf.copy_from_slice(row);
        calls += 1;
        if code.decode_in_place(&mut buf, schedule.set(j)).is_err() {
            continue;
        }
        let m = metric_num(row, &buf, alpha);
        if best.as_ref().is_none_or(|(bm, _)| m > *bm) {
            best = Some((
                m,
                RowDecode {
                    codeword: buf.clone(),
                    used_j: j,
                    plan_pos: pos,
                },
            ));
        }
    }
    RowAttempt {
        result: best.map(|(_, r)| r),
        calls,
    }
}
