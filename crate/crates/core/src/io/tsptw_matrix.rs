//! Plain TSPTW files: the location count, an `n x n` travel matrix, then one
//! `r δ` line per location, optionally led by a 1-based location id.

use super::{parse_int, ParseError};
use crate::models::tsptw::TsptwInstance;

pub fn parse_tsptw_matrix(text: &str) -> Result<TsptwInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty());

    let (no, first) = lines.next().ok_or_else(|| ParseError::at(0, "empty file"))?;
    let n = parse_int(first[0], no)?;
    if n < 1 {
        return Err(ParseError::at(no, "location count must be positive"));
    }
    let n = n as usize;
    let mut values: Vec<i64> = Vec::with_capacity(n * n);
    for tok in &first[1..] {
        values.push(parse_int(tok, no)?);
    }
    let mut last = no;
    while values.len() < n * n {
        let (no, toks) = lines
            .next()
            .ok_or_else(|| ParseError::at(last, format!("matrix ended after {} of {} entries", values.len(), n * n)))?;
        for tok in toks {
            values.push(parse_int(tok, no)?);
        }
        last = no;
    }
    if values.len() != n * n {
        return Err(ParseError::at(last, "matrix row overruns the expected size"));
    }

    let mut windows = Vec::with_capacity(n);
    for k in 0..n {
        let (no, toks) = lines
            .next()
            .ok_or_else(|| ParseError::at(last, format!("expected {n} windows, found {k}")))?;
        let v: Vec<i64> = toks.iter().map(|t| parse_int(t, no)).collect::<Result<_, _>>()?;
        let (r, d) = match v.as_slice() {
            [r, d] => (*r, *d),
            [id, r, d] if *id == k as i64 + 1 => (*r, *d),
            [_, _, _] => return Err(ParseError::at(no, format!("expected location id {}", k + 1))),
            _ => return Err(ParseError::at(no, "expected `r deadline` or `id r deadline`")),
        };
        windows.push((r, d));
        last = no;
    }
    if let Some((no, _)) = lines.next() {
        return Err(ParseError::at(no, "unexpected trailing content"));
    }
    Ok(TsptwInstance {
        n,
        c: values.chunks(n).map(|row| row.iter().map(|&x| Some(x)).collect()).collect(),
        windows,
    })
}
