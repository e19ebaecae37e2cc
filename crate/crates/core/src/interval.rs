use std::fmt;

/// Tolerance for every comparison between times.
pub const TIME_EPS: f64 = 1e-9;

/// Time window `[start, end]`; `end` may be `f64::INFINITY`.
///
/// Collision intervals are read as closed and safe intervals as their
/// open complements. Arriving exactly on a boundary is allowed either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub const ALL: TimeInterval = TimeInterval {
        start: 0.0,
        end: f64::INFINITY,
    };

    pub fn new(start: f64, end: f64) -> Self {
        debug_assert!(start <= end, "interval [{start}, {end}] is reversed");
        Self { start, end }
    }

    pub fn is_unbounded(&self) -> bool {
        self.end == f64::INFINITY
    }

    /// Strictly inside, up to the time tolerance.
    pub fn contains_strictly(&self, t: f64) -> bool {
        t > self.start + TIME_EPS && t < self.end - TIME_EPS
    }

    /// Inside or on the boundary, up to the time tolerance.
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start - TIME_EPS && t <= self.end + TIME_EPS
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// Sorts by start and fuses intervals that overlap or touch.
pub fn merge_intervals(mut intervals: Vec<TimeInterval>) -> Vec<TimeInterval> {
    intervals.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.end.total_cmp(&b.end)));
    let mut out: Vec<TimeInterval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match out.last_mut() {
            Some(last) if iv.start <= last.end + TIME_EPS => last.end = last.end.max(iv.end),
            _ => out.push(iv),
        }
    }
    out
}

/// Complement of merged, sorted `busy` intervals within `[0, inf)`.
/// Slivers shorter than the tolerance are dropped.
pub fn complement(busy: &[TimeInterval]) -> Vec<TimeInterval> {
    let mut out = Vec::with_capacity(busy.len() + 1);
    let mut cursor = 0.0;
    for iv in busy {
        if iv.start > cursor + TIME_EPS {
            out.push(TimeInterval::new(cursor, iv.start));
        }
        cursor = f64::max(cursor, iv.end);
        if cursor == f64::INFINITY {
            return out;
        }
    }
    out.push(TimeInterval::new(cursor, f64::INFINITY));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: f64, b: f64) -> TimeInterval {
        TimeInterval::new(a, b)
    }

    #[test]
    fn merges_overlapping_and_touching() {
        assert_eq!(
            merge_intervals(vec![iv(8.0, 12.0), iv(5.0, 9.0)]),
            vec![iv(5.0, 12.0)]
        );
        assert_eq!(
            merge_intervals(vec![iv(6.0, 8.0), iv(4.0, 6.0)]),
            vec![iv(4.0, 8.0)]
        );
        assert_eq!(
            merge_intervals(vec![iv(1.0, 2.0), iv(3.0, f64::INFINITY), iv(5.0, 6.0)]),
            vec![iv(1.0, 2.0), iv(3.0, f64::INFINITY)]
        );
    }

    #[test]
    fn complement_within_half_line() {
        assert_eq!(complement(&[]), vec![TimeInterval::ALL]);
        assert_eq!(
            complement(&[iv(4.0, 6.0)]),
            vec![iv(0.0, 4.0), iv(6.0, f64::INFINITY)]
        );
        assert_eq!(complement(&[iv(0.0, 3.0)]), vec![iv(3.0, f64::INFINITY)]);
        assert_eq!(complement(&[iv(2.0, f64::INFINITY)]), vec![iv(0.0, 2.0)]);
    }
}
