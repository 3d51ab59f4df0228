//! Brute-force oracle checks of the decoder's structural guarantees.
//!
//! Each property samples random instances, compares the library against an
//! independent exhaustive computation or a guarantee that must hold
//! unconditionally, and reports the number of violations.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decoders::{column_stage, decode_gmd};
use crate::galois::{GfTable, Symbol};
use crate::gmd::{self, forney_metric, gmd_accepts, ReliabilityVector};
use crate::product::{ProductCode, WordMatrix};
use crate::rscode::RsCode;

/// Deliberate defects used to confirm that each property can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Acceptance threshold lowered by two.
    RelaxedAcceptance,
    /// Skip rule applied when `d - |F1|` is odd.
    OddParitySkip,
    /// Row stage ignores the column reliabilities.
    IgnoreReliability,
    /// Weights computed with the last coordinate dropped.
    PuncturedWeight,
}

impl Fault {
    pub const ALL: [Fault; 4] = [
        Fault::RelaxedAcceptance,
        Fault::OddParitySkip,
        Fault::IgnoreReliability,
        Fault::PuncturedWeight,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Fault::RelaxedAcceptance => "relaxed-acceptance",
            Fault::OddParitySkip => "odd-parity-skip",
            Fault::IgnoreReliability => "ignore-reliability",
            Fault::PuncturedWeight => "punctured-weight",
        }
    }

    pub fn parse(s: &str) -> Option<Fault> {
        Fault::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Property that this fault is expected to break.
    pub fn target(&self) -> &'static str {
        match self {
            Fault::RelaxedAcceptance => UNIQUENESS,
            Fault::OddParitySkip => SKIP_SOUNDNESS,
            Fault::IgnoreReliability => WD_BOUND,
            Fault::PuncturedWeight => MDS_WEIGHTS,
        }
    }
}

pub const MDS_WEIGHTS: &str = "mds-weights";
pub const UNIQUENESS: &str = "acceptance-uniqueness";
pub const SKIP_SOUNDNESS: &str = "skip-soundness";
pub const WD_BOUND: &str = "wd-bound";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestOptions {
    pub quick: bool,
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            quick: false,
            seed: 1,
            fault: None,
        }
    }
}

impl SelftestOptions {
    fn cases(&self) -> usize {
        if self.quick {
            1_000
        } else {
            10_000
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    pub detail: String,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} cases={:<6} violations={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.violations
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

fn rs(q: usize, n: usize, k: usize) -> RsCode {
    let gf = Arc::new(GfTable::with_size(q).expect("supported field"));
    RsCode::new(gf, n, k).expect("valid code")
}

pub fn run_all(opts: &SelftestOptions) -> Vec<PropertyResult> {
    vec![
        check_mds_weights(opts.fault),
        check_uniqueness(opts.cases(), opts.seed, opts.fault),
        check_skip_soundness(opts.cases(), opts.seed, opts.fault),
        check_wd_bound(opts.cases(), opts.seed, opts.fault),
    ]
}

/// Minimum nonzero weight over every codeword spanned by `rows`, by full
/// enumeration of the `q^k` combinations.
pub fn min_weight_by_enumeration(gf: &GfTable, rows: &[Vec<Symbol>], drop_last: bool) -> usize {
    let q = gf.q();
    let k = rows.len();
    let n = rows[0].len();
    let len = if drop_last { n - 1 } else { n };
    let mut coeffs = vec![0usize; k];
    let mut best = usize::MAX;
    let mut word = vec![0 as Symbol; n];
    loop {
        // odometer increment; stops after wrapping back to all zero
        let mut i = 0;
        while i < k {
            coeffs[i] += 1;
            if coeffs[i] < q {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        word.iter_mut().for_each(|w| *w = 0);
        for (row, &c) in rows.iter().zip(&coeffs) {
            if c == 0 {
                continue;
            }
            for (w, &g) in word.iter_mut().zip(row) {
                *w ^= gf.mul(c as Symbol, g);
            }
        }
        let wt = word[..len].iter().filter(|&&s| s != 0).count();
        if wt > 0 {
            best = best.min(wt);
        }
    }
    best
}

/// Generator rows of `C x C'` as flattened column-major arrays.
fn product_generator(pc: &ProductCode) -> Vec<Vec<Symbol>> {
    let (k1, k2) = (pc.col_code().k(), pc.row_code().k());
    let mut rows = Vec::with_capacity(k1 * k2);
    for idx in 0..k1 * k2 {
        let mut msg = vec![0 as Symbol; k1 * k2];
        msg[idx] = 1;
        rows.push(pc.encode(&msg).symbols().to_vec());
    }
    rows
}

/// `[8,4]_16` has minimum weight 5 and `[4,2]_4 x [4,2]_4` minimum weight 9.
pub fn check_mds_weights(fault: Option<Fault>) -> PropertyResult {
    let punct = fault == Some(Fault::PuncturedWeight);
    let c = rs(16, 8, 4);
    let w1 = min_weight_by_enumeration(c.field(), c.gen_matrix(), punct);
    let small = rs(4, 4, 2);
    let pc = ProductCode::new(small.clone(), small.clone()).expect("same field");
    let w2 = min_weight_by_enumeration(small.field(), &product_generator(&pc), punct);
    let violations = usize::from(w1 != 5) + usize::from(w2 != 9);
    PropertyResult {
        name: MDS_WEIGHTS,
        cases: 2,
        violations,
        detail: format!("[8,4]_16 -> {w1}, [4,2]_4^2 -> {w2}"),
    }
}

/// At most one codeword of `[4,2,3]_4` passes the acceptance test for any
/// received word and reliability vector.
pub fn check_uniqueness(cases: usize, seed: u64, fault: Option<Fault>) -> PropertyResult {
    let code = rs(4, 4, 2);
    let (n, d) = (code.n(), code.d());
    let codewords: Vec<Vec<Symbol>> = (0..16u8)
        .map(|m| code.encode(&[m & 3, m >> 2]))
        .collect();
    let relax = if fault == Some(Fault::RelaxedAcceptance) { 2 } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0001);
    let mut violations = 0;
    let mut mismatches = 0;
    for _ in 0..cases {
        let r: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        // reliabilities as produced by column codes of various distances
        let den = [1usize, 2, 3, 5, 7, 9, 15][rng.gen_range(0..7)];
        let t = (den - 1) / 2;
        let nums: Vec<u32> = (0..n)
            .map(|_| match rng.gen_range(0..=t + 1) {
                0 => 0,
                w => (den - 2 * (w - 1)) as u32,
            })
            .collect();
        let alpha = ReliabilityVector::new(den, nums.clone());
        let threshold = (n as i64 - d as i64 - relax) * den as i64;
        let mut accepted = 0;
        for c in &codewords {
            let oracle: i64 = (0..n)
                .map(|i| if r[i] == c[i] { nums[i] as i64 } else { -(nums[i] as i64) })
                .sum();
            let lib = forney_metric(&r, c, &alpha);
            if relax == 0 && gmd_accepts(lib, n, d) != (oracle > threshold) {
                mismatches += 1;
            }
            if oracle > threshold {
                accepted += 1;
            }
        }
        if accepted > 1 {
            violations += 1;
        }
    }
    PropertyResult {
        name: UNIQUENESS,
        cases,
        violations: violations + mismatches,
        detail: if mismatches > 0 {
            format!("{mismatches} metric mismatches")
        } else {
            String::new()
        },
    }
}

/// When `d - |F1|` is even and decoding with erasures `F1` succeeds,
/// decoding with `F1` plus one more erasure gives the same codeword.
pub fn check_skip_soundness(cases: usize, seed: u64, fault: Option<Fault>) -> PropertyResult {
    let codes = [rs(16, 8, 4), rs(16, 8, 6), rs(16, 15, 6), rs(8, 7, 2), rs(4, 4, 2)];
    let odd = fault == Some(Fault::OddParitySkip);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0002);
    let mut violations = 0;
    let mut done = 0;
    let mut attempts = 0;
    while done < cases && attempts < cases * 50 {
        attempts += 1;
        let code = &codes[rng.gen_range(0..codes.len())];
        let (n, d, q) = (code.n(), code.d(), code.field().q());
        let sizes: Vec<usize> = (0..d)
            .filter(|s| ((d - s) % 2 == 0) != odd && s + 1 < n)
            .collect();
        let Some(&s) = sizes.choose(&mut rng) else {
            continue;
        };
        let msg: Vec<Symbol> = (0..code.k()).map(|_| rng.gen_range(0..q) as Symbol).collect();
        let mut r = code.encode(&msg);
        let nerr = rng.gen_range(0..=(d - s) / 2 + 1);
        let mut pos: Vec<usize> = (0..n).collect();
        pos.shuffle(&mut rng);
        for &i in pos.iter().take(nerr) {
            r[i] ^= rng.gen_range(1..q) as Symbol;
        }
        pos.shuffle(&mut rng);
        let mut f1: Vec<usize> = pos[..s].to_vec();
        let extra = pos[s];
        f1.sort_unstable();
        let mut a = r.clone();
        if code.decode_in_place(&mut a, &f1).is_err() {
            continue;
        }
        done += 1;
        let mut f2 = f1.clone();
        f2.push(extra);
        f2.sort_unstable();
        let mut b = r.clone();
        match code.decode_in_place(&mut b, &f2) {
            Ok(_) if a == b => {}
            _ => violations += 1,
        }
    }
    PropertyResult {
        name: SKIP_SOUNDNESS,
        cases: done,
        violations,
        detail: String::new(),
    }
}

/// Random error pattern of Hamming weight at most `max_w`.
pub fn random_weight_pattern<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    q: usize,
    max_w: usize,
) -> WordMatrix {
    let w = rng.gen_range(0..=max_w.min(rows * cols));
    let mut e = WordMatrix::zeros(rows, cols);
    for idx in rand::seq::index::sample(rng, rows * cols, w) {
        e.set(idx % rows, idx / rows, rng.gen_range(1..q) as Symbol);
    }
    e
}

/// Random error pattern whose column-clamped weight `sum_i min(w_i, d)`
/// is at most `budget`. Columns hit by many errors are favoured.
pub fn random_wd_pattern<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    q: usize,
    d_col: usize,
    budget: usize,
) -> WordMatrix {
    let mut e = WordMatrix::zeros(rows, cols);
    let mut left = budget;
    let mut order: Vec<usize> = (0..cols).collect();
    order.shuffle(rng);
    for c in order {
        if left == 0 {
            break;
        }
        let clamp = rng.gen_range(0..=left.min(d_col));
        let w = if clamp == d_col {
            rng.gen_range(d_col..=rows)
        } else {
            clamp
        };
        left -= clamp;
        for r in rand::seq::index::sample(rng, rows, w) {
            e.set(r, c, rng.gen_range(1..q) as Symbol);
        }
    }
    e
}

/// `gmd` with the row stage run as if every column were fully reliable.
fn gmd_without_reliability(pc: &ProductCode, r: &WordMatrix) -> WordMatrix {
    let (mut word, alpha) = column_stage(pc, r);
    let flat = ReliabilityVector::all_reliable(alpha.d(), alpha.len());
    let row_code = pc.row_code();
    let (schedule, plan) = gmd::build_schedule(&flat, row_code.d());
    for i in 0..pc.rows() {
        let row = word.row(i);
        match gmd::gmd_row_decode(row_code, &row, &flat, &schedule, &plan, 0).result {
            Some(res) => word.set_row(i, &res.codeword),
            None => break,
        }
    }
    word
}

/// On `[8,4,5]_16 x [8,6,3]_16`, `gmd` recovers every pattern with
/// `2 w_D(e) < 15` and every pattern of weight at most 7.
pub fn check_wd_bound(cases: usize, seed: u64, fault: Option<Fault>) -> PropertyResult {
    let pc = ProductCode::new(rs(16, 8, 4), rs(16, 8, 6)).expect("same field");
    let (rows, cols, q) = (pc.rows(), pc.cols(), pc.q());
    let dd = pc.col_code().d() * pc.row_code().d();
    let budget = (dd - 1) / 2;
    let ignore = fault == Some(Fault::IgnoreReliability);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0003);
    let mut violations = 0;
    let mut bad_wd = 0;
    for case in 0..2 * cases {
        let kk = pc.col_code().k() * pc.row_code().k();
        let msg: Vec<Symbol> = (0..kk).map(|_| rng.gen_range(0..q) as Symbol).collect();
        let x = pc.encode(&msg);
        let e = if case % 2 == 0 {
            random_wd_pattern(&mut rng, rows, cols, q, pc.col_code().d(), budget)
        } else {
            random_weight_pattern(&mut rng, rows, cols, q, budget)
        };
        if 2 * pc.weight_wd(&e) >= dd {
            bad_wd += 1;
            continue;
        }
        let mut r = x.clone();
        for c in 0..cols {
            for i in 0..rows {
                r.set(i, c, r.get(i, c) ^ e.get(i, c));
            }
        }
        let out = if ignore {
            gmd_without_reliability(&pc, &r)
        } else {
            let rep = decode_gmd(&pc, &r);
            if !rep.decoded {
                violations += 1;
                continue;
            }
            rep.word
        };
        if out != x {
            violations += 1;
        }
    }
    PropertyResult {
        name: WD_BOUND,
        cases: 2 * cases,
        violations: violations + bad_wd,
        detail: if bad_wd > 0 {
            format!("{bad_wd} generated patterns outside the bound")
        } else {
            String::new()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SelftestOptions {
        SelftestOptions {
            quick: true,
            seed: 11,
            fault: None,
        }
    }

    #[test]
    fn all_properties_pass() {
        for r in run_all(&quick()) {
            assert!(r.passed(), "{r}");
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn each_fault_breaks_its_property() {
        for f in Fault::ALL {
            let res = run_all(&SelftestOptions {
                fault: Some(f),
                ..quick()
            });
            for r in &res {
                assert_eq!(r.passed(), r.name != f.target(), "{} {r}", f.name());
            }
        }
    }

    #[test]
    fn fault_names_round_trip() {
        for f in Fault::ALL {
            assert_eq!(Fault::parse(f.name()), Some(f));
        }
        assert_eq!(Fault::parse("nope"), None);
    }

    #[test]
    fn pattern_generators_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pc = ProductCode::new(rs(16, 8, 4), rs(16, 8, 6)).unwrap();
        let mut heavy = 0;
        for _ in 0..2000 {
            let e = random_wd_pattern(&mut rng, 8, 8, 16, 5, 7);
            assert!(pc.weight_wd(&e) <= 7);
            if e.weight() > 7 {
                heavy += 1;
            }
            assert!(random_weight_pattern(&mut rng, 8, 8, 16, 7).weight() <= 7);
        }
        // clamped columns push the raw weight past 7 regularly
        assert!(heavy > 100, "{heavy}");
    }

    #[test]
    fn enumeration_matches_known_small_code() {
        let c = rs(8, 7, 5);
        assert_eq!(min_weight_by_enumeration(c.field(), c.gen_matrix(), false), 3);
    }
}
