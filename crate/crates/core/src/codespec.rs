//! Textual product-code descriptions of the form `rs(q,n,k)xrs(q,n',k')`.
//! The first factor is the column code, the second the row code.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::GfTable;
use crate::product::ProductCode;
use crate::rscode::RsCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub q: usize,
    pub col: (usize, usize),
    pub row: (usize, usize),
}

fn parse_factor(spec: &str, s: &str) -> Result<(usize, usize, usize)> {
    let err = |reason: &str| Error::CodeSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let inner = s
        .trim()
        .strip_prefix("rs(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err("expected rs(q,n,k)"))?;
    let nums: Vec<usize> = inner
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err("parameters must be integers"))?;
    match nums[..] {
        [q, n, k] => Ok((q, n, k)),
        _ => Err(err("expected three parameters")),
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let err = |reason: String| Error::CodeSpec {
            spec: s.to_string(),
            reason,
        };
        let (a, b) = lower
            .split_once(")x")
            .map(|(a, b)| (format!("{a})"), b.to_string()))
            .ok_or_else(|| err("expected rs(q,n,k)xrs(q,n',k')".into()))?;
        let (q1, n1, k1) = parse_factor(s, &a)?;
        let (q2, n2, k2) = parse_factor(s, &b)?;
        if q1 != q2 {
            return Err(err(format!("field sizes differ ({q1} vs {q2})")));
        }
        let spec = CodeSpec {
            q: q1,
            col: (n1, k1),
            row: (n2, k2),
        };
        spec.build()?;
        Ok(spec)
    }
}

impl CodeSpec {
    pub fn build(&self) -> Result<ProductCode> {
        let wrap = |e: Error| Error::CodeSpec {
            spec: self.to_string(),
            reason: e.to_string(),
        };
        let gf = Arc::new(GfTable::with_size(self.q).map_err(wrap)?);
        let col = RsCode::new(gf.clone(), self.col.0, self.col.1).map_err(wrap)?;
        let row = RsCode::new(gf, self.row.0, self.row.1).map_err(wrap)?;
        ProductCode::new(col, row).map_err(wrap)
    }

    pub fn swapped(&self) -> CodeSpec {
        CodeSpec {
            q: self.q,
            col: self.row,
            row: self.col,
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rs({},{},{})xrs({},{},{})",
            self.q, self.col.0, self.col.1, self.q, self.row.0, self.row.1
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let s: CodeSpec = "rs(16,8,4)xrs(16,8,6)".parse().unwrap();
        assert_eq!(s.q, 16);
        assert_eq!(s.col, (8, 4));
        assert_eq!(s.row, (8, 6));
        assert_eq!(s.to_string(), "rs(16,8,4)xrs(16,8,6)");
        assert_eq!(s.build().unwrap().params(), (64, 24, 15));
        let t: CodeSpec = " RS(32, 16,12) x rs(32,16,14)".replace(' ', "").parse().unwrap();
        assert_eq!(t.swapped().col, (16, 14));
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            "rs(16,8,9)xrs(16,8,6)",
            "rs(16,8,4)xrs(32,8,6)",
            "rs(16,8,4)",
            "rs(12,8,4)xrs(12,8,6)",
            "rs(16,8)xrs(16,8,6)",
            "rs(16,a,4)xrs(16,8,6)",
            "rs(64,8,4)xrs(64,8,6)",
        ] {
            assert!(bad.parse::<CodeSpec>().is_err(), "{bad}");
        }
    }
}
