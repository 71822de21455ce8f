//! Energy-based earliest completion time of a task set.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeTask {
    pub lb_start: i64,
    pub duration: i64,
    pub usage: i64,
}

/// Maximum over non-empty task subsets Ω of
/// `⌈(C · min_{Ω} lb + Σ_{Ω} u·p) / C⌉`.
///
/// Only the sets `{i : lb_i >= θ}` are evaluated: shrinking any Ω to the
/// suffix set of its minimum lower bound keeps `min lb` and can only add
/// energy, so these sets attain the maximum. Returns 0 for no tasks.
pub fn ect_envelope(tasks: &[EnvelopeTask], capacity: i64) -> i64 {
    assert!(capacity >= 1, "capacity must be positive");
    let mut sorted: Vec<&EnvelopeTask> = tasks.iter().collect();
    sorted.sort_by_key(|t| std::cmp::Reverse(t.lb_start));
    let mut best: Option<i64> = None;
    let mut energy = 0i64;
    let mut idx = 0;
    while idx < sorted.len() {
        let theta = sorted[idx].lb_start;
        while idx < sorted.len() && sorted[idx].lb_start == theta {
            energy += sorted[idx].usage * sorted[idx].duration;
            idx += 1;
        }
        // θ is an integer, so the ceiling only applies to the energy term
        let value = theta + energy.div_euclid(capacity) + i64::from(energy.rem_euclid(capacity) != 0);
        best = Some(best.map_or(value, |b| b.max(value)));
    }
    best.unwrap_or(0)
}
