//! Post-processing for stall patterns of the iterative decoder.
//!
//! Every technique starts from the word `u` on which the iterative decoder
//! stalled and from the line flags of its last round.

use std::fmt;

use crate::decoders::{self, DecodeReport, DecoderId, FailedLine, IterationTrace};
use crate::product::{ProductCode, WordMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    /// Erase the intersection of rows and columns that changed or failed in
    /// the last round, then rerun iterative decoding.
    Kreshchuk,
    /// Erase failed rows; iterate, erasing every line that fails.
    Emmadi,
    /// Erase the intersection of failed rows and failed columns, then rerun
    /// iterative decoding.
    CondoModified,
    /// Decode the stall word with `gd`.
    Proposed,
}

impl Technique {
    pub const ALL: [Technique; 4] = [
        Technique::Kreshchuk,
        Technique::Emmadi,
        Technique::CondoModified,
        Technique::Proposed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Technique::Kreshchuk => "kreshchuk",
            Technique::Emmadi => "emmadi",
            Technique::CondoModified => "condo",
            Technique::Proposed => "proposed",
        }
    }

    pub fn parse(s: &str) -> Option<Technique> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kreshchuk" => Some(Technique::Kreshchuk),
            "emmadi" => Some(Technique::Emmadi),
            "condo" | "condo-modified" | "mod-condo" => Some(Technique::CondoModified),
            "proposed" | "gd" => Some(Technique::Proposed),
            _ => None,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stall word and the line sets of the last iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StallContext {
    pub u: WordMatrix,
    pub rows_changed_or_failed: Vec<usize>,
    pub cols_changed_or_failed: Vec<usize>,
    pub rows_failed: Vec<usize>,
    pub cols_failed: Vec<usize>,
}

fn indices(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i))
        .collect()
}

fn either(a: &[bool], b: &[bool]) -> Vec<usize> {
    a.iter()
        .zip(b)
        .enumerate()
        .filter_map(|(i, (&x, &y))| (x || y).then_some(i))
        .collect()
}

impl StallContext {
    pub fn from_trace(u: WordMatrix, trace: &IterationTrace) -> Self {
        StallContext {
            u,
            rows_changed_or_failed: either(&trace.row_changed, &trace.row_failed),
            cols_changed_or_failed: either(&trace.col_changed, &trace.col_failed),
            rows_failed: indices(&trace.row_failed),
            cols_failed: indices(&trace.col_failed),
        }
    }

    /// Context of a failed iterative decode; `None` on success.
    pub fn from_report(report: &DecodeReport) -> Option<Self> {
        if report.decoded {
            return None;
        }
        report
            .trace
            .as_ref()
            .map(|t| StallContext::from_trace(report.word.clone(), t))
    }

    /// Positions erased by the Kreshchuk technique.
    pub fn kreshchuk_set(&self) -> Vec<(usize, usize)> {
        product_set(&self.rows_changed_or_failed, &self.cols_changed_or_failed)
    }

    /// Positions erased by the modified Condo technique.
    pub fn condo_set(&self) -> Vec<(usize, usize)> {
        product_set(&self.rows_failed, &self.cols_failed)
    }
}

fn product_set(rows: &[usize], cols: &[usize]) -> Vec<(usize, usize)> {
    rows.iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .collect()
}

fn rerun_with_erasures(
    pc: &ProductCode,
    ctx: &StallContext,
    positions: &[(usize, usize)],
    technique: Technique,
    max_iters: usize,
) -> DecodeReport {
    let mut word = ctx.u.clone();
    for &(r, c) in positions {
        word.erase(r, c);
    }
    let rep = decoders::decode_iterative(pc, &word, max_iters);
    DecodeReport {
        decoder: DecoderId::IterativePp(technique),
        pp_invoked: true,
        ..rep
    }
}

pub fn pp_kreshchuk(pc: &ProductCode, ctx: &StallContext, max_iters: usize) -> DecodeReport {
    rerun_with_erasures(pc, ctx, &ctx.kreshchuk_set(), Technique::Kreshchuk, max_iters)
}

pub fn pp_condo_modified(pc: &ProductCode, ctx: &StallContext, max_iters: usize) -> DecodeReport {
    rerun_with_erasures(pc, ctx, &ctx.condo_set(), Technique::CondoModified, max_iters)
}

/// Erases every failed row of `u`, then runs iterative decoding in which
/// each failing line is erased before the next pass.
pub fn pp_emmadi(pc: &ProductCode, ctx: &StallContext, max_iters: usize) -> DecodeReport {
    let mut word = ctx.u.clone();
    for &r in &ctx.rows_failed {
        word.erase_row(r);
    }
    let trace = decoders::iterate(pc, &mut word, max_iters, FailedLine::Erase);
    DecodeReport {
        decoder: DecoderId::IterativePp(Technique::Emmadi),
        decoded: !trace.stalled,
        word,
        pp_invoked: true,
        iterations: trace.iterations,
        row_decoder_calls: 0,
        trace: Some(trace),
    }
}

/// Runs `gd` on the stall word.
pub fn pp_proposed(pc: &ProductCode, ctx: &StallContext) -> DecodeReport {
    let rep = decoders::decode_gd(pc, &ctx.u);
    DecodeReport {
        decoder: DecoderId::IterativePp(Technique::Proposed),
        pp_invoked: true,
        ..rep
    }
}

pub fn apply(
    technique: Technique,
    pc: &ProductCode,
    ctx: &StallContext,
    max_iters: usize,
) -> DecodeReport {
    match technique {
        Technique::Kreshchuk => pp_kreshchuk(pc, ctx, max_iters),
        Technique::Emmadi => pp_emmadi(pc, ctx, max_iters),
        Technique::CondoModified => pp_condo_modified(pc, ctx, max_iters),
        Technique::Proposed => pp_proposed(pc, ctx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoders::{decode_gd, decode_iterative, DEFAULT_MAX_ITERS};
    use crate::galois::{GfTable, Symbol};
    use crate::rscode::RsCode;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn pc(m: u32, a: (usize, usize), b: (usize, usize)) -> ProductCode {
        let gf = Arc::new(GfTable::new(m).unwrap());
        ProductCode::new(
            RsCode::new(gf.clone(), a.0, a.1).unwrap(),
            RsCode::new(gf, b.0, b.1).unwrap(),
        )
        .unwrap()
    }

    fn codeword(rng: &mut impl Rng, pc: &ProductCode) -> WordMatrix {
        let len = pc.col_code().k() * pc.row_code().k();
        let msg: Vec<Symbol> = (0..len).map(|_| rng.gen_range(0..pc.q()) as Symbol).collect();
        pc.encode(&msg)
    }

    fn block(rng: &mut impl Rng, x: &WordMatrix, rows: &[usize], cols: &[usize]) -> WordMatrix {
        let mut r = x.clone();
        for &i in rows {
            for &j in cols {
                let v = r.get(i, j) ^ rng.gen_range(1..16) as Symbol;
                r.set(i, j, v);
            }
        }
        r
    }

    /// Stall contexts whose last round had only failures (no miscorrection).
    fn clean_stalls(seed: u64, count: usize) -> Vec<(WordMatrix, StallContext)> {
        let p = pc(4, (8, 4), (8, 6));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < count {
            let x = codeword(&mut rng, &p);
            let rows = rand::seq::index::sample(&mut rng, 8, 3).into_vec();
            let cols = rand::seq::index::sample(&mut rng, 8, 2).into_vec();
            let r = block(&mut rng, &x, &rows, &cols);
            let rep = decode_iterative(&p, &r, DEFAULT_MAX_ITERS);
            if let Some(ctx) = StallContext::from_report(&rep) {
                if ctx.rows_failed == ctx.rows_changed_or_failed
                    && ctx.cols_failed == ctx.cols_changed_or_failed
                {
                    out.push((x, ctx));
                }
            }
        }
        out
    }

    #[test]
    fn technique_names() {
        for t in Technique::ALL {
            assert_eq!(Technique::parse(t.name()), Some(t));
        }
        assert_eq!(Technique::parse("mod-condo"), Some(Technique::CondoModified));
        assert_eq!(Technique::parse("x"), None);
    }

    #[test]
    fn erasure_sets_nest() {
        for (_, ctx) in clean_stalls(1, 20) {
            let k = ctx.kreshchuk_set();
            assert!(ctx.condo_set().iter().all(|p| k.contains(p)));
        }
    }

    #[test]
    fn kreshchuk_corrects_block_stall() {
        // 3x2 block: erasing its rows x cols gives each column 3 erasures
        // (2*0 + 3 < 5) and decodes.
        let p = pc(4, (8, 4), (8, 6));
        for (x, ctx) in clean_stalls(2, 30) {
            let a = pp_kreshchuk(&p, &ctx, DEFAULT_MAX_ITERS);
            let b = pp_condo_modified(&p, &ctx, DEFAULT_MAX_ITERS);
            assert!(a.pp_invoked);
            assert_eq!(a.decoded, b.decoded);
            assert_eq!(a.word, b.word);
            if ctx.rows_failed.len() == 3 && ctx.cols_failed.len() == 2 {
                assert!(a.decoded);
                assert_eq!(a.word, x);
            }
        }
    }

    #[test]
    fn emmadi_corrects_block_stall() {
        let p = pc(4, (8, 4), (8, 6));
        for (x, ctx) in clean_stalls(3, 30) {
            if ctx.rows_failed.len() < 5 {
                // |R| < d row erasures, and no errors outside them
                let rep = pp_emmadi(&p, &ctx, DEFAULT_MAX_ITERS);
                assert!(rep.decoded);
                assert_eq!(rep.word, x);
            }
        }
    }

    #[test]
    fn emmadi_fails_on_wide_stall() {
        // 5 failed rows of errors in the same 2 columns: erasing 5 rows
        // leaves every column with |E| = 5 >= d.
        let p = pc(4, (8, 4), (8, 6));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = codeword(&mut rng, &p);
        let u = block(&mut rng, &x, &[0, 1, 2, 3, 4], &[1, 5]);
        let ctx = StallContext {
            u,
            rows_changed_or_failed: vec![0, 1, 2, 3, 4],
            cols_changed_or_failed: vec![1, 5],
            rows_failed: vec![0, 1, 2, 3, 4],
            cols_failed: vec![1, 5],
        };
        assert!(!pp_emmadi(&p, &ctx, DEFAULT_MAX_ITERS).decoded);
    }

    #[test]
    fn empty_sets_are_noop() {
        let p = pc(4, (8, 4), (8, 6));
        let (_, mut ctx) = clean_stalls(5, 1).pop().unwrap();
        ctx.rows_changed_or_failed.clear();
        ctx.rows_failed.clear();
        let before = decode_iterative(&p, &ctx.u, DEFAULT_MAX_ITERS);
        let a = pp_kreshchuk(&p, &ctx, DEFAULT_MAX_ITERS);
        let b = pp_condo_modified(&p, &ctx, DEFAULT_MAX_ITERS);
        assert_eq!(a.decoded, before.decoded);
        assert_eq!(a.word, before.word);
        assert_eq!(b.word, before.word);
        let e = pp_emmadi(&p, &ctx, DEFAULT_MAX_ITERS);
        assert!(e.iterations >= 1);
    }

    #[test]
    fn proposed_runs_gd_on_stall_word() {
        let p = pc(4, (8, 4), (8, 6));
        for (x, ctx) in clean_stalls(6, 20) {
            let before = ctx.clone();
            let rep = pp_proposed(&p, &ctx);
            assert_eq!(ctx, before);
            let gd = decode_gd(&p, &ctx.u);
            assert_eq!(rep.word, gd.word);
            assert_eq!(rep.decoded, gd.decoded);
            // stall weight 6 < 15/2
            if ctx.u.distance(&x) * 2 < 15 {
                assert!(rep.decoded);
                assert_eq!(rep.word, x);
            }
        }
    }
}
