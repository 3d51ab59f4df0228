//! Shortened Reed-Solomon codes with a bounded-distance error-and-erasure
//! decoder.
//!
//! Position `i` of a length-`n` word is the coefficient of `x^(n-1-i)`, so the
//! message occupies the first `k` positions and parity the last `n-k`. The
//! code is the narrow-sense RS code of length `q-1` with roots
//! `alpha^1 ..= alpha^(n-k)`, shortened by dropping its leading positions.
//! Length `n = q` selects the singly-extended code.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::{GfTable, Symbol};

/// Largest supported redundancy `n - k` (length is at most `q - 1 = 255`).
const MAX_POLY: usize = 256;

/// Sorted set of erased positions of one codeword.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErasureSet {
    positions: Vec<usize>,
}

impl ErasureSet {
    pub fn empty() -> Self {
        ErasureSet::default()
    }

    /// Builds an erasure set for a length-`n` word. Rejects duplicates and
    /// out-of-range indices.
    pub fn new(mut positions: Vec<usize>, n: usize) -> Result<Self> {
        positions.sort_unstable();
        if positions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameters("duplicate erasure position".into()));
        }
        if let Some(&p) = positions.last() {
            if p >= n {
                return Err(Error::InvalidParameters(format!(
                    "erasure position {p} out of range for length {n}"
                )));
            }
        }
        Ok(ErasureSet { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.positions.binary_search(&i).is_ok()
    }
}

/// The decoding-failure signal: no codeword lies within the decoding radius
/// (or the decoder could not find one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeFailure;

impl fmt::Display for DecodeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("decoding failure")
    }
}

impl std::error::Error for DecodeFailure {}

/// Summary of a successful in-place decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Correction {
    /// Non-erased positions whose value was changed.
    pub errors: usize,
    /// Number of erased positions that were filled in.
    pub erasures: usize,
}

/// A Reed-Solomon code `[n, k, n-k+1]` over GF(2^m).
///
/// For `n < q` this is the narrow-sense RS code shortened to length `n`. For
/// `n = q` it is the singly-extended code: a length `q-1` RS code with roots
/// `alpha^1 ..= alpha^(n-k-1)` followed by one overall-sum symbol.
#[derive(Debug, Clone)]
pub struct RsCode {
    field: Arc<GfTable>,
    n: usize,
    k: usize,
    extended: bool,
    /// Generator polynomial of the cyclic part, `gen_poly[i]` is the
    /// coefficient of `x^i`.
    gen_poly: Vec<Symbol>,
    gen_matrix: Vec<Vec<Symbol>>,
}

impl RsCode {
    pub fn new(field: Arc<GfTable>, n: usize, k: usize) -> Result<Self> {
        if k < 1 || k >= n || n > field.q() {
            return Err(Error::InvalidParameters(format!(
                "RS code [{n},{k}] over GF({}) requires 1 <= k < n <= {}",
                field.q(),
                field.q()
            )));
        }
        let extended = n == field.q();
        let nk = n - k - extended as usize;
        // g(x) = prod_{j=1}^{nk} (x - alpha^j)
        let mut gen_poly = vec![0 as Symbol; nk + 1];
        gen_poly[0] = 1;
        for j in 1..=nk {
            let root = field.alpha_pow(j as i64);
            for i in (0..=j).rev() {
                let shifted = if i > 0 { gen_poly[i - 1] } else { 0 };
                gen_poly[i] = shifted ^ field.mul(gen_poly[i], root);
            }
        }
        let mut code = RsCode {
            field,
            n,
            k,
            extended,
            gen_poly,
            gen_matrix: Vec::new(),
        };
        code.gen_matrix = (0..k)
            .map(|i| {
                let mut msg = vec![0 as Symbol; k];
                msg[i] = 1;
                code.encode(&msg)
            })
            .collect();
        Ok(code)
    }

    pub fn field(&self) -> &Arc<GfTable> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance, `n - k + 1`.
    pub fn d(&self) -> usize {
        self.n - self.k + 1
    }

    /// Errors-only correction radius `floor((d-1)/2)`.
    pub fn t(&self) -> usize {
        (self.d() - 1) / 2
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Length of the cyclic part (all positions except the extension symbol).
    fn base_len(&self) -> usize {
        self.n - self.extended as usize
    }

    pub fn gen_poly(&self) -> &[Symbol] {
        &self.gen_poly
    }

    /// Systematic `k x n` generator matrix.
    pub fn gen_matrix(&self) -> &[Vec<Symbol>] {
        &self.gen_matrix
    }

    pub fn encode(&self, msg: &[Symbol]) -> Vec<Symbol> {
        let mut out = vec![0; self.n];
        self.encode_into(msg, &mut out);
        out
    }

    /// Systematic encoding: `out[..k] = msg`, followed by the remainder of
    /// `msg(x) x^(n-k)` modulo the generator polynomial (and the overall sum
    /// for extended codes).
    pub fn encode_into(&self, msg: &[Symbol], out: &mut [Symbol]) {
        assert_eq!(msg.len(), self.k);
        assert_eq!(out.len(), self.n);
        let base = self.base_len();
        let nk = base - self.k;
        let gf = &*self.field;
        out[..self.k].copy_from_slice(msg);
        // parity register, parity[0] is the highest-degree coefficient
        let parity = &mut out[self.k..base];
        parity.fill(0);
        if nk > 0 {
            for &m in msg {
                let fb = m ^ parity[0];
                for i in 0..nk - 1 {
                    parity[i] = parity[i + 1] ^ gf.mul(fb, self.gen_poly[nk - 1 - i]);
                }
                parity[nk - 1] = gf.mul(fb, self.gen_poly[0]);
            }
        }
        if self.extended {
            out[base] = out[..base].iter().fold(0, |a, &b| a ^ b);
        }
    }

    /// Evaluates `S_j = r(alpha^(first_root + j))` into `out`; returns
    /// whether any syndrome is nonzero.
    fn syndromes(&self, word: &[Symbol], first_root: usize, out: &mut [Symbol]) -> bool {
        let gf = &*self.field;
        let exp = gf.exp_table();
        let log = gf.log_table();
        let mut nonzero = false;
        for (j, s) in out.iter_mut().enumerate() {
            let step = first_root + j;
            let mut acc: Symbol = 0;
            for &r in word {
                acc = if acc == 0 {
                    r
                } else {
                    exp[log[acc as usize] as usize + step] ^ r
                };
            }
            *s = acc;
            nonzero |= acc != 0;
        }
        nonzero
    }

    pub fn is_codeword(&self, word: &[Symbol]) -> bool {
        debug_assert_eq!(word.len(), self.n);
        let base = self.base_len();
        let mut synd = [0 as Symbol; MAX_POLY];
        if self.syndromes(&word[..base], 1, &mut synd[..base - self.k]) {
            return false;
        }
        !self.extended || word[..base].iter().fold(0, |a, &b| a ^ b) == word[base]
    }

    /// Bounded-distance error-and-erasure decoding.
    ///
    /// Returns the codeword `c` with `2 w_E(received - c) + |E| < d` when one
    /// exists. Any returned word is re-verified to be a codeword inside that
    /// radius; otherwise `DecodeFailure` is returned.
    pub fn decode(
        &self,
        received: &[Symbol],
        erasures: &ErasureSet,
    ) -> std::result::Result<Vec<Symbol>, DecodeFailure> {
        let mut word = received.to_vec();
        self.decode_in_place(&mut word, erasures.positions())?;
        Ok(word)
    }

    /// In-place variant of [`RsCode::decode`]. `erasures` must be sorted and
    /// free of duplicates. On failure `word` is left untouched.
    pub fn decode_in_place(
        &self,
        word: &mut [Symbol],
        erasures: &[usize],
    ) -> std::result::Result<Correction, DecodeFailure> {
        let n = self.n;
        let rho = erasures.len();
        debug_assert_eq!(word.len(), n);
        debug_assert!(erasures.windows(2).all(|w| w[0] < w[1]));
        if rho >= self.d() {
            return Err(DecodeFailure);
        }

        let mut work = [0 as Symbol; MAX_POLY];
        let work = &mut work[..n];
        work.copy_from_slice(word);
        for &e in erasures {
            work[e] = 0;
        }

        if !self.extended {
            self.solve(work, erasures, 1, n - self.k, 0)?;
            return self.commit_checked(word, work, erasures);
        }

        let ext = n - 1;
        let base_nk = n - 1 - self.k;
        if erasures.last() == Some(&ext) {
            let base_er = &erasures[..rho - 1];
            self.solve(&mut work[..ext], base_er, 1, base_nk, 0)?;
            work[ext] = work[..ext].iter().fold(0, |a, &b| a ^ b);
            return self.commit_checked(word, work, erasures);
        }
        // Extension symbol assumed correct: its check joins the cyclic
        // syndromes as the root alpha^0.
        let mut first = [0 as Symbol; MAX_POLY];
        let first = &mut first[..n];
        first.copy_from_slice(work);
        let r_ext = first[ext];
        if self.solve(&mut first[..ext], erasures, 0, base_nk + 1, r_ext).is_ok() {
            if let Ok(c) = self.commit_checked(word, first, erasures) {
                return Ok(c);
            }
        }
        // Otherwise treat the extension symbol as erased.
        if rho + 1 >= self.d() {
            return Err(DecodeFailure);
        }
        self.solve(&mut work[..ext], erasures, 1, base_nk, 0)?;
        work[ext] = work[..ext].iter().fold(0, |a, &b| a ^ b);
        self.commit_checked(word, work, erasures)
    }

    /// Errors-and-erasures solve on the cyclic positions `work` (erased
    /// positions already zeroed) for syndromes at `alpha^first_root ..`.
    /// `s0_extra` is folded into the syndrome at root `alpha^0`.
    fn solve(
        &self,
        work: &mut [Symbol],
        erasures: &[usize],
        first_root: usize,
        nsyn: usize,
        s0_extra: Symbol,
    ) -> std::result::Result<(), DecodeFailure> {
        let gf = &*self.field;
        let order = gf.order();
        let len = work.len();
        let rho = erasures.len();
        if rho > nsyn {
            return Err(DecodeFailure);
        }

        let mut synd = [0 as Symbol; MAX_POLY];
        let synd = &mut synd[..nsyn];
        let mut nonzero = self.syndromes(work, first_root, synd);
        if first_root == 0 && nsyn > 0 {
            synd[0] ^= s0_extra;
            nonzero = synd.iter().any(|&s| s != 0);
        }
        if !nonzero {
            return Ok(());
        }

        // erasure locator Gamma(x) = prod (1 + X_e x), X_e = alpha^(len-1-e)
        let mut gamma = [0 as Symbol; MAX_POLY];
        gamma[0] = 1;
        for (deg, &e) in erasures.iter().enumerate() {
            let x = gf.alpha_pow((len - 1 - e) as i64);
            for i in (1..=deg + 1).rev() {
                gamma[i] ^= gf.mul(gamma[i - 1], x);
            }
        }

        // Forney syndromes T = Gamma * S mod x^nsyn; T[rho..] obeys the
        // recurrence of the errors-only locator.
        let mut fsynd = [0 as Symbol; MAX_POLY];
        for i in 0..nsyn {
            let mut acc = 0;
            for j in 0..=i.min(rho) {
                acc ^= gf.mul(gamma[j], synd[i - j]);
            }
            fsynd[i] = acc;
        }
        let (sigma, errs) = berlekamp_massey(gf, &fsynd[rho..nsyn]);
        if 2 * errs + rho > nsyn {
            return Err(DecodeFailure);
        }

        // Lambda = sigma * Gamma
        let deg = errs + rho;
        let mut lambda = [0 as Symbol; MAX_POLY];
        for (i, &s) in sigma[..=errs].iter().enumerate() {
            if s == 0 {
                continue;
            }
            for j in 0..=rho {
                lambda[i + j] ^= gf.mul(s, gamma[j]);
            }
        }
        if lambda[deg] == 0 {
            return Err(DecodeFailure);
        }

        // Omega = S * Lambda mod x^nsyn
        let mut omega = [0 as Symbol; MAX_POLY];
        for i in 0..nsyn {
            let mut acc = 0;
            for j in 0..=i.min(deg) {
                acc ^= gf.mul(lambda[j], synd[i - j]);
            }
            omega[i] = acc;
        }

        // Chien search over the valid positions, Forney error values
        // e = X^(1-b) Omega(X^-1) / Lambda'(X^-1).
        let mut found = 0;
        for pos in 0..len {
            let x_log = (len - 1 - pos) % order;
            let xinv = gf.alpha_pow(-(x_log as i64));
            if eval_poly(gf, &lambda[..=deg], xinv) != 0 {
                continue;
            }
            found += 1;
            if found > deg {
                return Err(DecodeFailure);
            }
            let mut dlam = 0;
            let mut xp = 1;
            let x2 = gf.mul(xinv, xinv);
            let mut i = 1;
            while i <= deg {
                dlam ^= gf.mul(lambda[i], xp);
                xp = gf.mul(xp, x2);
                i += 2;
            }
            if dlam == 0 {
                return Err(DecodeFailure);
            }
            let mut val = gf.div(eval_poly(gf, &omega[..nsyn], xinv), dlam).map_err(|_| DecodeFailure)?;
            if first_root == 0 {
                val = gf.mul(val, gf.alpha_pow(x_log as i64));
            }
            work[pos] ^= val;
        }
        if found != deg {
            return Err(DecodeFailure);
        }
        Ok(())
    }

    /// Accepts `work` only if it is a codeword inside the decoding radius
    /// around `word`, then copies it over `word`.
    fn commit_checked(
        &self,
        word: &mut [Symbol],
        work: &[Symbol],
        erasures: &[usize],
    ) -> std::result::Result<Correction, DecodeFailure> {
        let mut errors = 0;
        let mut ei = 0;
        for (i, (&w, &c)) in word.iter().zip(work.iter()).enumerate() {
            if ei < erasures.len() && erasures[ei] == i {
                ei += 1;
                continue;
            }
            if w != c {
                errors += 1;
            }
        }
        if 2 * errors + erasures.len() >= self.d() || !self.is_codeword(work) {
            return Err(DecodeFailure);
        }
        word.copy_from_slice(work);
        Ok(Correction {
            errors,
            erasures: erasures.len(),
        })
    }
}

/// Horner evaluation of `poly` (index = degree) at `x`.
#[inline]
fn eval_poly(gf: &GfTable, poly: &[Symbol], x: Symbol) -> Symbol {
    let mut acc = 0;
    for &c in poly.iter().rev() {
        acc = gf.mul(acc, x) ^ c;
    }
    acc
}

/// Shortest LFSR generating `seq`. Returns the connection polynomial
/// (index = degree) and its length `L`.
fn berlekamp_massey(gf: &GfTable, seq: &[Symbol]) -> ([Symbol; MAX_POLY], usize) {
    let mut c = [0 as Symbol; MAX_POLY];
    let mut b = [0 as Symbol; MAX_POLY];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut b_disc: Symbol = 1;
    for step in 0..seq.len() {
        let mut disc = seq[step];
        for i in 1..=l {
            disc ^= gf.mul(c[i], seq[step - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = gf.div(disc, b_disc).expect("nonzero discrepancy base");
        if 2 * l <= step {
            let prev = c;
            for i in 0..MAX_POLY - shift {
                c[i + shift] ^= gf.mul(coef, b[i]);
            }
            l = step + 1 - l;
            b = prev;
            b_disc = disc;
            shift = 1;
        } else {
            for i in 0..MAX_POLY - shift {
                c[i + shift] ^= gf.mul(coef, b[i]);
            }
            shift += 1;
        }
    }
    (c, l)
}
