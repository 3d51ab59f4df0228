//! Monte-Carlo estimation of frame and symbol error rates over the q-ary
//! symmetric channel.
//!
//! Every frame draws its message and channel realization from its own
//! ChaCha8 stream, keyed by `(seed, p)` and indexed by the frame number.
//! Frames are processed in fixed-size batches and the stopping rule is only
//! checked at batch boundaries, so results do not depend on the number of
//! worker threads. In paired mode all decoders see the same frames, and
//! shared sub-results (the iterative decode, the `gmd` decode, each
//! post-processing run) are computed once per frame.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codespec::CodeSpec;
use crate::decoders::{
    decode_gd, decode_gmd, decode_iterative, finish_with_pp, DecodeReport, DecoderId,
    Orientation, DEFAULT_MAX_ITERS,
};
use crate::error::{Error, Result};
use crate::galois::Symbol;
use crate::postproc::Technique;
use crate::product::{ProductCode, WordMatrix};

/// Frames per batch. Fixed so that the stopping point is reproducible.
pub const BATCH_FRAMES: u64 = 256;

pub const CSV_HEADER: &str =
    "decoder,code,orientation,p,frames,frame_errors,failures,miscorrections,pp_invocations,fer,ser,gamma,fer_ci95";

/// q-ary symmetric channel: each symbol is independently replaced, with
/// probability `p`, by one of the other `q-1` symbols chosen uniformly.
#[derive(Debug, Clone, Copy)]
pub struct QsymChannel {
    p: f64,
    q: usize,
}

impl QsymChannel {
    pub fn new(p: f64, q: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidParameters(format!("channel probability {p} not in [0,1]")));
        }
        if !(2..=256).contains(&q) {
            return Err(Error::InvalidParameters(format!("alphabet size {q}")));
        }
        Ok(QsymChannel { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn apply<R: Rng + ?Sized>(&self, x: &WordMatrix, rng: &mut R) -> WordMatrix {
        let mut y = x.clone();
        self.apply_in_place(&mut y, rng);
        y
    }

    pub fn apply_in_place<R: Rng + ?Sized>(&self, y: &mut WordMatrix, rng: &mut R) {
        for r in 0..y.rows() {
            for c in 0..y.cols() {
                if rng.gen::<f64>() < self.p {
                    let offset = rng.gen_range(1..self.q) as Symbol;
                    y.set(r, c, y.get(r, c) ^ offset);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    /// Stop a point once every decoder has at least this many frame errors.
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_frame_errors: 100,
            max_frames: 10_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub decoders: Vec<DecoderId>,
    pub p_values: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub orientation: Orientation,
    pub max_iters: usize,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    /// Share channel realizations across decoders.
    pub paired: bool,
}

impl SimConfig {
    pub fn new(code: CodeSpec, decoders: Vec<DecoderId>, p_values: Vec<f64>) -> Self {
        SimConfig {
            code,
            decoders,
            p_values,
            stop: StopRule::default(),
            seed: 1,
            orientation: Orientation::ColumnFirst,
            max_iters: DEFAULT_MAX_ITERS,
            threads: None,
            paired: true,
        }
    }
}

/// Accumulated counts for one (decoder, p) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub decoder: DecoderId,
    pub code: CodeSpec,
    pub orientation: Orientation,
    pub p: f64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Frames where the decoder reported failure.
    pub failures: u64,
    /// Frames where the decoder reported success with a wrong codeword.
    pub miscorrections: u64,
    pub pp_invocations: u64,
    /// Symbols of the final word that differ from the transmitted codeword,
    /// summed over all frames.
    pub symbol_errors: u64,
    pub symbols_per_frame: u64,
}

impl SimStats {
    fn empty(cfg: &SimConfig, decoder: DecoderId, p: f64, n: u64) -> Self {
        SimStats {
            decoder,
            code: cfg.code,
            orientation: cfg.orientation,
            p,
            frames: 0,
            frame_errors: 0,
            failures: 0,
            miscorrections: 0,
            pp_invocations: 0,
            symbol_errors: 0,
            symbols_per_frame: n,
        }
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors, self.frames)
    }

    pub fn ser(&self) -> f64 {
        ratio(self.symbol_errors, self.frames * self.symbols_per_frame)
    }

    /// Fraction of frames that needed post-processing.
    pub fn gamma(&self) -> f64 {
        ratio(self.pp_invocations, self.frames)
    }

    /// Half-width of the normal-approximation 95% interval for the FER.
    pub fn fer_ci95(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        let f = self.fer();
        1.96 * (f * (1.0 - f) / self.frames as f64).sqrt()
    }

    /// Wilson score 95% interval for the FER.
    pub fn fer_wilson95(&self) -> (f64, f64) {
        wilson95(self.frame_errors, self.frames)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},\"{}\",{},{},{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
            self.decoder.name(),
            self.code,
            self.orientation.name(),
            self.p,
            self.frames,
            self.frame_errors,
            self.failures,
            self.miscorrections,
            self.pp_invocations,
            self.fer(),
            self.ser(),
            self.gamma(),
            self.fer_ci95()
        )
    }

    fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        if o.failure {
            self.failures += 1;
        }
        if o.miscorrection {
            self.miscorrections += 1;
        }
        if o.failure || o.miscorrection {
            self.frame_errors += 1;
        }
        if o.pp_invoked {
            self.pp_invocations += 1;
        }
        self.symbol_errors += o.symbol_errors as u64;
    }

    fn merge(&mut self, o: &SimStats) {
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.failures += o.failures;
        self.miscorrections += o.miscorrections;
        self.pp_invocations += o.pp_invocations;
        self.symbol_errors += o.symbol_errors;
    }
}

impl fmt::Display for SimStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<20} p={:<8} frames={:<9} errors={:<6} fer={:.3e} ser={:.3e} gamma={:.3e}",
            self.decoder.name(),
            self.p,
            self.frames,
            self.frame_errors,
            self.fer(),
            self.ser(),
            self.gamma()
        )
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn wilson95(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = n as f64;
    let ph = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z / denom * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Per-frame, per-decoder result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub failure: bool,
    pub miscorrection: bool,
    pub pp_invoked: bool,
    pub symbol_errors: usize,
}

impl FrameOutcome {
    pub fn from_report(rep: &DecodeReport, x: &WordMatrix) -> Self {
        let symbol_errors = rep.word.distance(x);
        FrameOutcome {
            failure: !rep.decoded,
            miscorrection: rep.decoded && symbol_errors != 0,
            pp_invoked: rep.pp_invoked,
            symbol_errors,
        }
    }

    pub fn is_error(&self) -> bool {
        self.failure || self.miscorrection
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the frame streams for one simulation point. `lane` separates
/// decoders in unpaired mode.
fn point_key(seed: u64, p: f64, lane: u64) -> [u8; 32] {
    let mut st = seed ^ p.to_bits().rotate_left(17) ^ lane.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut st).to_le_bytes());
    }
    key
}

/// Generates the transmitted codeword and received word of frame `index`.
/// Both are in the code's natural (column-first) layout.
pub fn frame_words(
    pc: &ProductCode,
    channel: &QsymChannel,
    key: [u8; 32],
    index: u64,
) -> (WordMatrix, WordMatrix) {
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    let q = pc.q();
    let (k1, k2) = (pc.col_code().k(), pc.row_code().k());
    let msg: Vec<Symbol> = (0..k1 * k2).map(|_| rng.gen_range(0..q) as Symbol).collect();
    let x = pc.encode(&msg);
    let y = channel.apply(&x, &mut rng);
    (x, y)
}

/// Decodes one received word with every decoder in `decoders`, sharing
/// common sub-results. `pc` is the code in decoding orientation and `x`, `r`
/// are already laid out accordingly.
pub fn evaluate_frame(
    pc: &ProductCode,
    x: &WordMatrix,
    r: &WordMatrix,
    decoders: &[DecoderId],
    max_iters: usize,
) -> Vec<FrameOutcome> {
    let need_it = decoders.iter().any(|d| {
        matches!(d, DecoderId::Iterative | DecoderId::IterativePp(_))
    });
    let need_gmd = decoders
        .iter()
        .any(|d| matches!(d, DecoderId::Gmd | DecoderId::Combined(_)));
    let gmd = need_gmd.then(|| decode_gmd(pc, r));
    let gmd_ok = gmd.as_ref().is_some_and(|g| g.decoded);
    let need_it = need_it
        || (!gmd_ok && decoders.iter().any(|d| matches!(d, DecoderId::Combined(_))));
    let it = need_it.then(|| decode_iterative(pc, r, max_iters));

    let mut pp: HashMap<Technique, FrameOutcome> = HashMap::new();
    let mut pp_outcome = |t: Technique| -> FrameOutcome {
        *pp.entry(t).or_insert_with(|| {
            let it = it.clone().expect("iterative result available");
            FrameOutcome::from_report(&finish_with_pp(pc, it, t, max_iters), x)
        })
    };

    decoders
        .iter()
        .map(|&d| match d {
            DecoderId::Iterative => FrameOutcome::from_report(it.as_ref().unwrap(), x),
            DecoderId::Gmd => FrameOutcome::from_report(gmd.as_ref().unwrap(), x),
            DecoderId::Gd => FrameOutcome::from_report(&decode_gd(pc, r), x),
            DecoderId::IterativePp(t) => pp_outcome(t),
            DecoderId::Combined(t) => {
                if gmd_ok {
                    FrameOutcome::from_report(gmd.as_ref().unwrap(), x)
                } else {
                    pp_outcome(t)
                }
            }
        })
        .collect()
}

fn build_pool(threads: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    match threads {
        None => Ok(None),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(Some)
            .map_err(|e| Error::Config(format!("thread pool: {e}"))),
    }
}

/// Runs one `p` for the decoders in `decoders`, sharing frames among them.
fn run_lane(
    cfg: &SimConfig,
    pc: &ProductCode,
    decoders: &[DecoderId],
    p: f64,
    lane: u64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<SimStats>> {
    let channel = QsymChannel::new(p, pc.q())?;
    let key = point_key(cfg.seed, p, lane);
    let n = (pc.rows() * pc.cols()) as u64;
    let mut stats: Vec<SimStats> = decoders
        .iter()
        .map(|&d| SimStats::empty(cfg, d, p, n))
        .collect();
    let dec_pc = match cfg.orientation {
        Orientation::ColumnFirst => pc.clone(),
        Orientation::RowFirst => pc.swapped(),
    };
    let orient = cfg.orientation;
    let max_iters = cfg.max_iters;

    let one_frame = |i: u64| -> Vec<FrameOutcome> {
        let (x, r) = frame_words(pc, &channel, key, i);
        match orient {
            Orientation::ColumnFirst => evaluate_frame(&dec_pc, &x, &r, decoders, max_iters),
            Orientation::RowFirst => {
                evaluate_frame(&dec_pc, &x.transpose(), &r.transpose(), decoders, max_iters)
            }
        }
    };
    let batch = |start: u64, end: u64| -> Vec<SimStats> {
        (start..end)
            .into_par_iter()
            .map(|i| {
                let mut s: Vec<SimStats> = decoders
                    .iter()
                    .map(|&d| SimStats::empty(cfg, d, p, n))
                    .collect();
                for (st, o) in s.iter_mut().zip(one_frame(i)) {
                    st.add(&o);
                }
                s
            })
            .reduce(
                || decoders.iter().map(|&d| SimStats::empty(cfg, d, p, n)).collect(),
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        x.merge(y);
                    }
                    a
                },
            )
    };

    let mut next = 0u64;
    while next < cfg.stop.max_frames
        && stats
            .iter()
            .any(|s| s.frame_errors < cfg.stop.min_frame_errors)
    {
        let end = (next + BATCH_FRAMES).min(cfg.stop.max_frames);
        let part = match pool {
            Some(pool) => pool.install(|| batch(next, end)),
            None => batch(next, end),
        };
        for (s, b) in stats.iter_mut().zip(&part) {
            s.merge(b);
        }
        next = end;
    }
    Ok(stats)
}

/// Simulates a single channel probability for every configured decoder.
pub fn run_point(cfg: &SimConfig, p: f64) -> Result<Vec<SimStats>> {
    let pc = cfg.code.build()?;
    let pool = build_pool(cfg.threads)?;
    run_point_with(cfg, &pc, p, pool.as_ref())
}

fn run_point_with(
    cfg: &SimConfig,
    pc: &ProductCode,
    p: f64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<SimStats>> {
    if cfg.decoders.is_empty() {
        return Err(Error::Config("no decoders selected".into()));
    }
    if cfg.paired {
        run_lane(cfg, pc, &cfg.decoders, p, 0, pool)
    } else {
        let mut out = Vec::with_capacity(cfg.decoders.len());
        for (lane, d) in cfg.decoders.iter().enumerate() {
            out.extend(run_lane(cfg, pc, std::slice::from_ref(d), p, lane as u64 + 1, pool)?);
        }
        Ok(out)
    }
}

/// Simulates every `p` in descending order, passing each finished point to
/// `sink` as soon as it is available.
pub fn run_sweep<F>(cfg: &SimConfig, mut sink: F) -> Result<Vec<SimStats>>
where
    F: FnMut(&SimStats) -> Result<()>,
{
    let pc = cfg.code.build()?;
    let pool = build_pool(cfg.threads)?;
    let mut ps = cfg.p_values.clone();
    if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Config("channel probabilities must lie in [0,1]".into()));
    }
    ps.sort_by(|a, b| b.total_cmp(a));
    ps.dedup();
    let mut all = Vec::new();
    for p in ps {
        for s in run_point_with(cfg, &pc, p, pool.as_ref())? {
            sink(&s)?;
            all.push(s);
        }
    }
    Ok(all)
}
