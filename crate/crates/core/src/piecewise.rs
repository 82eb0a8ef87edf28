//! Piecewise-affine functions on `[0, 1]` with explicit values at breakpoints.
//!
//! Jumps are allowed: each breakpoint stores its left limit, right limit and
//! the value actually taken there, so one-sided closedness is represented
//! exactly instead of being inferred from float probes.

use crate::model::Line;
use crate::scalar::Scalar;

/// Affine piece on the open interval `(start, end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<S> {
    pub start: S,
    pub end: S,
    pub line: Line<S>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakpoint<S> {
    pub at: S,
    pub value: S,
    pub left_limit: S,
    pub right_limit: S,
}

impl<S: Scalar> Breakpoint<S> {
    pub fn is_jump(&self) -> bool {
        !self.left_limit.approx_eq(self.right_limit)
    }

    /// Value is at least both one-sided limits.
    pub fn is_upper_semicontinuous(&self) -> bool {
        !self.left_limit.definitely_gt(self.value) && !self.right_limit.definitely_gt(self.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear<S> {
    segments: Vec<Segment<S>>,
    breakpoints: Vec<Breakpoint<S>>,
}

impl<S: Scalar> PiecewiseLinear<S> {
    /// Builds the function from candidate knots (need not be sorted or
    /// unique; `0` and `1` are added), the affine piece in force on each open
    /// gap (queried at the gap midpoint), and the exact value at each knot.
    /// Knots where the function is affine across are dropped.
    pub fn from_knots(
        knots: impl IntoIterator<Item = S>,
        mut piece_at: impl FnMut(S) -> Line<S>,
        mut value_at: impl FnMut(S) -> S,
    ) -> Self {
        let mut xs: Vec<S> = knots
            .into_iter()
            .filter(|x| *x >= S::zero() && *x <= S::one())
            .chain([S::zero(), S::one()])
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).expect("knots are finite"));
        xs.dedup_by(|a, b| a.approx_eq(*b));
        // Dedup may have kept a near-duplicate of 0 or 1 instead of the exact end.
        if let Some(first) = xs.first_mut() {
            *first = S::zero();
        }
        if let Some(last) = xs.last_mut() {
            *last = S::one();
        }

        let mut raw_segments = Vec::with_capacity(xs.len());
        for w in xs.windows(2) {
            let mid = (w[0] + w[1]) / S::two();
            raw_segments.push(Segment {
                start: w[0],
                end: w[1],
                line: piece_at(mid),
            });
        }

        let mut segments: Vec<Segment<S>> = Vec::with_capacity(raw_segments.len());
        let mut breakpoints = Vec::with_capacity(xs.len());
        for (i, &x) in xs.iter().enumerate() {
            let value = value_at(x);
            let left = if i == 0 {
                value
            } else {
                raw_segments[i - 1].line.eval(x)
            };
            let right = if i + 1 == xs.len() {
                value
            } else {
                raw_segments[i].line.eval(x)
            };
            let interior = i > 0 && i + 1 < xs.len();
            let smooth = interior
                && raw_segments[i - 1].line.approx_eq(&raw_segments[i].line)
                && value.approx_eq(left)
                && value.approx_eq(right);
            if !smooth {
                breakpoints.push(Breakpoint {
                    at: x,
                    value,
                    left_limit: left,
                    right_limit: right,
                });
            }
            if i + 1 < xs.len() {
                let seg = raw_segments[i];
                match segments.last_mut() {
                    Some(prev) if smooth => prev.end = seg.end,
                    _ => segments.push(seg),
                }
            }
        }
        PiecewiseLinear {
            segments,
            breakpoints,
        }
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    /// Breakpoints including the domain ends `0` and `1`.
    pub fn breakpoints(&self) -> &[Breakpoint<S>] {
        &self.breakpoints
    }

    pub fn jumps(&self) -> impl Iterator<Item = &Breakpoint<S>> {
        self.breakpoints.iter().filter(|b| b.is_jump())
    }

    pub fn breakpoint_near(&self, x: S) -> Option<&Breakpoint<S>> {
        let i = self.breakpoints.partition_point(|b| b.at.definitely_lt(x));
        self.breakpoints.get(i).filter(|b| b.at.approx_eq(x))
    }

    pub fn eval(&self, x: S) -> S {
        if let Some(b) = self.breakpoint_near(x) {
            return b.value;
        }
        let i = self.segments.partition_point(|s| s.end <= x);
        let seg = self.segments.get(i).unwrap_or_else(|| {
            self.segments
                .last()
                .expect("at least one segment on [0, 1]")
        });
        seg.line.eval(x)
    }

    /// Limit from the left at `x` (the value itself at `x = 0`).
    pub fn left_limit(&self, x: S) -> S {
        if let Some(b) = self.breakpoint_near(x) {
            return b.left_limit;
        }
        self.eval(x)
    }

    pub fn right_limit(&self, x: S) -> S {
        if let Some(b) = self.breakpoint_near(x) {
            return b.right_limit;
        }
        self.eval(x)
    }
}
