//! Product codes `C x C'` and the matrix word representation.
//!
//! A product codeword is an `n x n'` matrix whose columns are codewords of
//! the column code `C` (length `n`) and whose rows are codewords of the row
//! code `C'` (length `n'`).

use crate::error::{Error, Result};
use crate::galois::Symbol;
use crate::rscode::RsCode;

/// `n x n'` matrix of symbols with per-position erasure flags, stored
/// column-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMatrix {
    rows: usize,
    cols: usize,
    symbols: Vec<Symbol>,
    erased: Vec<bool>,
}

impl WordMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        WordMatrix {
            rows,
            cols,
            symbols: vec![0; rows * cols],
            erased: vec![false; rows * cols],
        }
    }

    /// Wraps column-major symbol data with no erasures.
    pub fn from_col_major(rows: usize, cols: usize, symbols: Vec<Symbol>) -> Self {
        assert_eq!(symbols.len(), rows * cols);
        WordMatrix {
            rows,
            cols,
            symbols,
            erased: vec![false; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        c * self.rows + r
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Symbol {
        self.symbols[self.idx(r, c)]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Symbol) {
        let i = self.idx(r, c);
        self.symbols[i] = v;
    }

    #[inline]
    pub fn is_erased(&self, r: usize, c: usize) -> bool {
        self.erased[self.idx(r, c)]
    }

    /// Marks `(r, c)` as erased. The stored symbol is zeroed; it carries no
    /// meaning while erased.
    pub fn erase(&mut self, r: usize, c: usize) {
        let i = self.idx(r, c);
        self.erased[i] = true;
        self.symbols[i] = 0;
    }

    pub fn erase_row(&mut self, r: usize) {
        for c in 0..self.cols {
            self.erase(r, c);
        }
    }

    pub fn erase_col(&mut self, c: usize) {
        for r in 0..self.rows {
            self.erase(r, c);
        }
    }

    pub fn num_erased(&self) -> usize {
        self.erased.iter().filter(|&&e| e).count()
    }

    pub fn has_erasures(&self) -> bool {
        self.erased.iter().any(|&e| e)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn column(&self, c: usize) -> &[Symbol] {
        &self.symbols[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_mut(&mut self, c: usize) -> &mut [Symbol] {
        &mut self.symbols[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_erased(&self, c: usize) -> &[bool] {
        &self.erased[c * self.rows..(c + 1) * self.rows]
    }

    /// Erased row indices of column `c`, ascending.
    pub fn column_erasures(&self, c: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend(
            self.column_erased(c)
                .iter()
                .enumerate()
                .filter_map(|(i, &e)| e.then_some(i)),
        );
    }

    /// Copies row `r` into `out`.
    pub fn row_into(&self, r: usize, out: &mut [Symbol]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.symbols[c * self.rows + r];
        }
    }

    pub fn row(&self, r: usize) -> Vec<Symbol> {
        let mut out = vec![0; self.cols];
        self.row_into(r, &mut out);
        out
    }

    /// Erased column indices of row `r`, ascending.
    pub fn row_erasures(&self, r: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend((0..self.cols).filter(|&c| self.erased[c * self.rows + r]));
    }

    /// Overwrites row `r` with `vals` and clears its erasure flags.
    pub fn set_row(&mut self, r: usize, vals: &[Symbol]) {
        debug_assert_eq!(vals.len(), self.cols);
        for (c, &v) in vals.iter().enumerate() {
            let i = c * self.rows + r;
            self.symbols[i] = v;
            self.erased[i] = false;
        }
    }

    /// Overwrites column `c` with `vals` and clears its erasure flags.
    pub fn set_column(&mut self, c: usize, vals: &[Symbol]) {
        debug_assert_eq!(vals.len(), self.rows);
        let range = c * self.rows..(c + 1) * self.rows;
        self.symbols[range.clone()].copy_from_slice(vals);
        self.erased[range].fill(false);
    }

    pub fn clear_erasures(&mut self) {
        self.erased.fill(false);
    }

    pub fn transpose(&self) -> WordMatrix {
        let mut out = WordMatrix::zeros(self.cols, self.rows);
        for c in 0..self.cols {
            for r in 0..self.rows {
                let src = self.idx(r, c);
                let dst = out.idx(c, r);
                out.symbols[dst] = self.symbols[src];
                out.erased[dst] = self.erased[src];
            }
        }
        out
    }

    /// Number of positions where the two words differ. Erased positions
    /// always count as differing from a non-erased one.
    pub fn distance(&self, other: &WordMatrix) -> usize {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        (0..self.symbols.len())
            .filter(|&i| {
                self.erased[i] != other.erased[i] || self.symbols[i] != other.symbols[i]
            })
            .count()
    }

    /// Hamming weight (number of nonzero, non-erased positions).
    pub fn weight(&self) -> usize {
        self.symbols
            .iter()
            .zip(&self.erased)
            .filter(|(&s, &e)| !e && s != 0)
            .count()
    }

    /// Symbol-wise difference `self - other` (XOR in characteristic 2).
    pub fn difference(&self, other: &WordMatrix) -> WordMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let symbols = self
            .symbols
            .iter()
            .zip(&other.symbols)
            .map(|(a, b)| a ^ b)
            .collect();
        WordMatrix::from_col_major(self.rows, self.cols, symbols)
    }
}

/// The product code `C x C'`: `col_code` is `C` (length `n`), `row_code` is
/// `C'` (length `n'`).
#[derive(Debug, Clone)]
pub struct ProductCode {
    col_code: RsCode,
    row_code: RsCode,
}

impl ProductCode {
    pub fn new(col_code: RsCode, row_code: RsCode) -> Result<Self> {
        let (a, b) = (col_code.field(), row_code.field());
        if a.q() != b.q() || a.prim_poly() != b.prim_poly() {
            return Err(Error::InvalidParameters(
                "component codes must share one field".into(),
            ));
        }
        Ok(ProductCode { col_code, row_code })
    }

    pub fn col_code(&self) -> &RsCode {
        &self.col_code
    }

    pub fn row_code(&self) -> &RsCode {
        &self.row_code
    }

    /// Number of rows, `n` (the column code length).
    pub fn rows(&self) -> usize {
        self.col_code.n()
    }

    /// Number of columns, `n'` (the row code length).
    pub fn cols(&self) -> usize {
        self.row_code.n()
    }

    pub fn q(&self) -> usize {
        self.col_code.field().q()
    }

    /// Composite parameters `[n n', k k', d d']`.
    pub fn params(&self) -> (usize, usize, usize) {
        (
            self.col_code.n() * self.row_code.n(),
            self.col_code.k() * self.row_code.k(),
            self.col_code.d() * self.row_code.d(),
        )
    }

    /// The same code with the component roles exchanged.
    pub fn swapped(&self) -> ProductCode {
        ProductCode {
            col_code: self.row_code.clone(),
            row_code: self.col_code.clone(),
        }
    }

    /// Encodes a `k x k'` message given column-major: every message row is
    /// encoded with `C'`, then every resulting column with `C`. With
    /// systematic generators this is `G^T X G'`.
    pub fn encode(&self, msg: &[Symbol]) -> WordMatrix {
        let (k, kp) = (self.col_code.k(), self.row_code.k());
        let (n, np) = (self.rows(), self.cols());
        assert_eq!(msg.len(), k * kp);
        let mut word = WordMatrix::zeros(n, np);
        let mut row_msg = vec![0; kp];
        let mut row_cw = vec![0; np];
        for i in 0..k {
            for (j, m) in row_msg.iter_mut().enumerate() {
                *m = msg[j * k + i];
            }
            self.row_code.encode_into(&row_msg, &mut row_cw);
            for (c, &v) in row_cw.iter().enumerate() {
                word.set(i, c, v);
            }
        }
        let mut col_msg = vec![0; k];
        for c in 0..np {
            col_msg.copy_from_slice(&word.column(c)[..k]);
            self.col_code.encode_into(&col_msg, word.column_mut(c));
        }
        word
    }

    /// True when the word has no erasures and every row and column is a
    /// component codeword.
    pub fn is_codeword(&self, word: &WordMatrix) -> bool {
        if word.has_erasures() {
            return false;
        }
        let cols_ok = (0..self.cols()).all(|c| self.col_code.is_codeword(word.column(c)));
        if !cols_ok {
            return false;
        }
        let mut buf = vec![0; self.cols()];
        (0..self.rows()).all(|r| {
            word.row_into(r, &mut buf);
            self.row_code.is_codeword(&buf)
        })
    }

    /// Column-clamped weight: `sum_c min(w(e_c), d)` with `d` the column-code
    /// distance.
    pub fn weight_wd(&self, e: &WordMatrix) -> usize {
        assert!(!e.has_erasures(), "w_D is defined for erasure-free patterns");
        let d = self.col_code.d();
        (0..e.cols())
            .map(|c| e.column(c).iter().filter(|&&s| s != 0).count().min(d))
            .sum()
    }

    /// Minimum nonzero codeword weight by enumerating all `q^(k k')`
    /// messages.
    pub fn min_distance_exhaustive(&self) -> Result<usize> {
        let q = self.q();
        let dim = self.col_code.k() * self.row_code.k();
        let bits = q.trailing_zeros() as usize * dim;
        if bits > 24 {
            return Err(Error::TooLargeToEnumerate { q, dim });
        }
        let total = 1usize << bits;
        let mut msg = vec![0 as Symbol; dim];
        let mut best = usize::MAX;
        for _ in 1..total {
            // base-q increment
            for s in msg.iter_mut() {
                *s += 1;
                if (*s as usize) < q {
                    break;
                }
                *s = 0;
            }
            best = best.min(self.encode(&msg).weight());
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::GfTable;
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

    fn random_msg(rng: &mut impl Rng, pc: &ProductCode) -> Vec<Symbol> {
        let len = pc.col_code().k() * pc.row_code().k();
        (0..len).map(|_| rng.gen_range(0..pc.q()) as Symbol).collect()
    }

    #[test]
    fn composite_parameters() {
        assert_eq!(pc(4, (8, 4), (8, 6)).params(), (64, 24, 15));
        assert_eq!(pc(4, (8, 4), (8, 4)).params(), (64, 16, 25));
        assert_eq!(pc(5, (16, 12), (16, 14)).params(), (256, 168, 15));
        assert_eq!(pc(8, (32, 28), (32, 30)).params(), (1024, 840, 15));
        assert_eq!(pc(8, (48, 44), (48, 46)).params(), (2304, 2024, 15));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let a = RsCode::new(Arc::new(GfTable::new(4).unwrap()), 8, 4).unwrap();
        let b = RsCode::new(Arc::new(GfTable::new(5).unwrap()), 8, 4).unwrap();
        assert!(ProductCode::new(a, b).is_err());
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let p = pc(4, (8, 4), (8, 6));
        let w = p.encode(&[0; 24]);
        assert_eq!(w.weight(), 0);
    }

    #[test]
    fn encoding_matches_generator_product() {
        let p = pc(4, (8, 4), (8, 6));
        let gf = p.col_code().field().clone();
        let g = p.col_code().gen_matrix();
        let gp = p.row_code().gen_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let msg = random_msg(&mut rng, &p);
            let word = p.encode(&msg);
            // (G^T X G')[r][c] = sum_{i,j} G[i][r] X[i][j] G'[j][c]
            for r in 0..8 {
                for c in 0..8 {
                    let mut acc = 0;
                    for i in 0..4 {
                        for j in 0..6 {
                            let x = msg[j * 4 + i];
                            acc ^= gf.mul(gf.mul(g[i][r], x), gp[j][c]);
                        }
                    }
                    assert_eq!(word.get(r, c), acc);
                }
            }
            assert!(p.is_codeword(&word));
        }
    }

    #[test]
    fn transpose_duality() {
        let p = pc(4, (8, 4), (8, 6));
        let s = p.swapped();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let msg = random_msg(&mut rng, &p);
        // message transposed: k x k' column-major -> k' x k column-major
        let mut msg_t = vec![0; msg.len()];
        for i in 0..4 {
            for j in 0..6 {
                msg_t[i * 6 + j] = msg[j * 4 + i];
            }
        }
        assert_eq!(p.encode(&msg).transpose(), s.encode(&msg_t));
        assert_eq!(s.swapped().params(), p.params());
    }

    #[test]
    fn wd_weight() {
        let p = pc(4, (8, 4), (8, 6));
        let mut e = WordMatrix::zeros(8, 8);
        assert_eq!(p.weight_wd(&e), 0);
        for r in 0..8 {
            e.set(r, 3, 1);
        }
        assert_eq!(p.weight_wd(&e), 5);
        let mut e = WordMatrix::zeros(8, 8);
        e.set(0, 0, 1);
        e.set(4, 0, 7);
        for r in 0..7 {
            e.set(r, 5, 2);
        }
        assert_eq!(p.weight_wd(&e), 2 + 5);
    }

    #[test]
    fn exhaustive_min_distance() {
        assert_eq!(pc(2, (4, 2), (4, 2)).min_distance_exhaustive().unwrap(), 9);
        assert_eq!(pc(2, (4, 3), (4, 3)).min_distance_exhaustive().unwrap(), 4);
        assert_eq!(pc(2, (3, 1), (3, 2)).min_distance_exhaustive().unwrap(), 6);
        assert!(matches!(
            pc(4, (8, 6), (8, 6)).min_distance_exhaustive(),
            Err(Error::TooLargeToEnumerate { .. })
        ));
    }

    #[test]
    fn erasure_flags_and_row_access() {
        let mut w = WordMatrix::zeros(3, 4);
        w.set(1, 2, 5);
        assert_eq!(w.row(1), vec![0, 0, 5, 0]);
        w.erase_row(1);
        assert_eq!(w.num_erased(), 4);
        let mut buf = Vec::new();
        w.column_erasures(2, &mut buf);
        assert_eq!(buf, vec![1]);
        w.set_row(1, &[1, 2, 3, 4]);
        assert!(!w.has_erasures());
        w.erase_col(0);
        w.row_erasures(2, &mut buf);
        assert_eq!(buf, vec![0]);
        let t = w.transpose();
        assert!(t.is_erased(0, 2));
        assert_eq!(t.get(3, 1), 4);
    }
}
