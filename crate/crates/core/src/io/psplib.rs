//! PSPLIB single-mode (`.sm`) files. Zero-duration jobs (the source and
//! sink dummies) are dropped and precedences through them are contracted.

use super::{parse_int, ParseError};
use crate::models::rcpsp::{RcpspInstance, RcpspTask};

fn ints(line: &str, no: usize) -> Result<Vec<i64>, ParseError> {
    line.split_whitespace().map(|t| parse_int(t, no)).collect()
}

fn index(v: i64, jobs: usize, no: usize) -> Result<usize, ParseError> {
    if v < 1 || v as usize > jobs {
        return Err(ParseError::at(no, format!("job number {v} outside 1..={jobs}")));
    }
    Ok(v as usize - 1)
}

pub fn parse_psplib(text: &str) -> Result<RcpspInstance, ParseError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let find = |prefix: &str| lines.iter().position(|(_, l)| l.to_ascii_lowercase().starts_with(prefix));
    let data_after = |start: usize| {
        lines[start + 1..]
            .iter()
            .take_while(|(_, l)| !l.starts_with('*'))
            .filter(|(_, l)| !l.is_empty() && l.chars().next().is_some_and(|c| c.is_ascii_digit()))
            .copied()
            .collect::<Vec<_>>()
    };

    let jobs_at = find("jobs").ok_or_else(|| ParseError::at(0, "missing `jobs` line"))?;
    let (no, jobs_line) = lines[jobs_at];
    let jobs = jobs_line
        .rsplit(':')
        .next()
        .and_then(|t| t.trim().parse::<usize>().ok())
        .ok_or_else(|| ParseError::at(no, "cannot read the job count"))?;

    let prec_at = find("precedence relations").ok_or_else(|| ParseError::at(0, "missing precedence section"))?;
    let mut succs = vec![Vec::new(); jobs];
    let mut seen = vec![false; jobs];
    for (no, line) in data_after(prec_at) {
        let v = ints(line, no)?;
        if v.len() < 3 {
            return Err(ParseError::at(no, "expected job, modes, successor count"));
        }
        let j = index(v[0], jobs, no)?;
        let count = usize::try_from(v[2]).map_err(|_| ParseError::at(no, "negative successor count"))?;
        if v.len() != 3 + count {
            return Err(ParseError::at(no, format!("expected {count} successors")));
        }
        for &s in &v[3..] {
            succs[j].push(index(s, jobs, no)?);
        }
        seen[j] = true;
    }

    let req_at = find("requests/durations").ok_or_else(|| ParseError::at(0, "missing requests section"))?;
    let mut durations = vec![None; jobs];
    let mut usages = vec![Vec::new(); jobs];
    let mut resources = None;
    for (no, line) in data_after(req_at) {
        let v = ints(line, no)?;
        if v.len() < 3 {
            return Err(ParseError::at(no, "expected job, mode, duration, requests"));
        }
        let j = index(v[0], jobs, no)?;
        if v[1] != 1 {
            return Err(ParseError::at(no, "only single-mode files are supported"));
        }
        let k = *resources.get_or_insert(v.len() - 3);
        if v.len() - 3 != k {
            return Err(ParseError::at(no, format!("expected {k} resource requests")));
        }
        durations[j] = Some(v[2]);
        usages[j] = v[3..].to_vec();
    }

    let cap_at = find("resourceavailabilities").ok_or_else(|| ParseError::at(0, "missing availabilities"))?;
    let (no, cap_line) = *data_after(cap_at)
        .first()
        .ok_or_else(|| ParseError::at(lines[cap_at].0, "missing availability values"))?;
    let capacities = ints(cap_line, no)?;
    if resources.is_some_and(|k| k != capacities.len()) {
        return Err(ParseError::at(no, "availability count does not match requests"));
    }
    if let Some(j) = (0..jobs).find(|&j| durations[j].is_none() || !seen[j]) {
        return Err(ParseError::at(0, format!("job {} is missing a section entry", j + 1)));
    }

    let durations: Vec<i64> = durations.into_iter().map(|d| d.unwrap_or(0)).collect();
    let keep: Vec<usize> = (0..jobs).filter(|&j| durations[j] > 0).collect();
    let mut new_index = vec![usize::MAX; jobs];
    for (k, &j) in keep.iter().enumerate() {
        new_index[j] = k;
    }
    // real successors reached directly or through zero-duration jobs
    let mut precedences = Vec::new();
    for &j in &keep {
        let mut stack = succs[j].clone();
        let mut visited = vec![false; jobs];
        let mut reached = Vec::new();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut visited[s], true) {
                continue;
            }
            if durations[s] > 0 {
                reached.push(new_index[s]);
            } else {
                stack.extend(&succs[s]);
            }
        }
        reached.sort_unstable();
        precedences.extend(reached.into_iter().map(|s| (new_index[j], s)));
    }
    Ok(RcpspInstance {
        tasks: keep
            .iter()
            .map(|&j| RcpspTask {
                p: durations[j],
                u: usages[j].clone(),
            })
            .collect(),
        capacities,
        precedences,
    })
}
