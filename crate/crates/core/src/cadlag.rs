//! Piecewise-constant càdlàg functions on `[0, 1]`.
//!
//! A [`StepFunction`] stores the value on `[0, t_1)` and the value taken at
//! each jump time. Jump times lie in `(0, 1]`, so a jump exactly at `t = 1`
//! is representable. Jumps that do not change the value are removed on
//! construction; two step functions are equal iff their representations are.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// One jump: from time `t` onwards (until the next jump) the function equals `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub t: f64,
    pub value: f64,
}

#[derive(Deserialize)]
struct RawStepFunction {
    initial: f64,
    #[serde(default)]
    jumps: Vec<Jump>,
}

/// A right-continuous step function on `[0, 1]` with finitely many jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    initial: f64,
    jumps: Vec<Jump>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::from_jumps(raw.initial, raw.jumps)
    }
}

impl StepFunction {
    /// Builds a step function from `(t, value)` pairs.
    pub fn new(initial: f64, jumps: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::from_jumps(
            initial,
            jumps.into_iter().map(|(t, value)| Jump { t, value }).collect(),
        )
    }

    pub fn from_jumps(initial: f64, jumps: Vec<Jump>) -> Result<Self> {
        if !initial.is_finite() {
            return domain(format!("initial value {initial} is not finite"));
        }
        let mut last_t = 0.0;
        let mut last_v = initial;
        let mut kept = Vec::with_capacity(jumps.len());
        for j in jumps {
            if !j.value.is_finite() {
                return domain(format!("jump value {} at t = {} is not finite", j.value, j.t));
            }
            if !(j.t > last_t && j.t <= 1.0) {
                return domain(format!(
                    "jump times must be strictly increasing in (0, 1]; got {} after {}",
                    j.t, last_t
                ));
            }
            last_t = j.t;
            if j.value != last_v {
                kept.push(j);
                last_v = j.value;
            }
        }
        Ok(Self {
            initial,
            jumps: kept,
        })
    }

    /// Builds a step function from jump data already known to be valid
    /// (strictly increasing times in `(0, 1]`, finite values). Zero jumps are dropped.
    pub(crate) fn from_sorted_unchecked(initial: f64, jumps: impl IntoIterator<Item = Jump>) -> Self {
        let mut last_v = initial;
        let kept = jumps
            .into_iter()
            .filter(|j| {
                let keep = j.value != last_v;
                if keep {
                    last_v = j.value;
                }
                keep
            })
            .collect();
        Self {
            initial,
            jumps: kept,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            initial: c,
            jumps: Vec::new(),
        }
    }

    /// `low` on `[0, at)` and `high` on `[at, 1]`.
    pub fn step(at: f64, low: f64, high: f64) -> Result<Self> {
        Self::new(low, [(at, high)])
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn num_jumps(&self) -> usize {
        self.jumps.len()
    }

    /// Value at `t = 1`.
    pub fn terminal(&self) -> f64 {
        self.jumps.last().map_or(self.initial, |j| j.value)
    }

    /// `(x(t), x(t-))`, with `x(0-) = x(0)`.
    pub fn evaluate(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&t) {
            return domain(format!("evaluation time {t} outside [0, 1]"));
        }
        let k = self.jumps.partition_point(|j| j.t <= t);
        let value = if k == 0 { self.initial } else { self.jumps[k - 1].value };
        let left = if k > 0 && self.jumps[k - 1].t == t {
            if k >= 2 {
                self.jumps[k - 2].value
            } else {
                self.initial
            }
        } else {
            value
        };
        Ok((value, left))
    }

    /// `x(t)` for `t` in `[0, 1]`; times outside are clamped.
    pub fn value_at(&self, t: f64) -> f64 {
        let k = self.jumps.partition_point(|j| j.t <= t);
        if k == 0 {
            self.initial
        } else {
            self.jumps[k - 1].value
        }
    }

    /// Values on consecutive constancy intervals, starting with `x(0)`.
    pub fn levels(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.initial).chain(self.jumps.iter().map(|j| j.value))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.first_decrease().is_none()
    }

    /// Fails with [`Error::NotMonotone`] naming the first decreasing jump.
    pub fn check_nondecreasing(&self) -> Result<()> {
        match self.first_decrease() {
            None => Ok(()),
            Some((t, from, to)) => Err(Error::NotMonotone { t, from, to }),
        }
    }

    fn first_decrease(&self) -> Option<(f64, f64, f64)> {
        let mut prev = self.initial;
        for j in &self.jumps {
            if j.value < prev {
                return Some((j.t, prev, j.value));
            }
            prev = j.value;
        }
        None
    }

    /// `t ↦ sup_{s ≤ t} x(s)`.
    pub fn running_max(&self) -> Self {
        let mut best = self.initial;
        let jumps: Vec<Jump> = self
            .jumps
            .iter()
            .filter(|j| {
                let keep = j.value > best;
                if keep {
                    best = j.value;
                }
                keep
            })
            .copied()
            .collect();
        Self {
            initial: self.initial,
            jumps,
        }
    }

    /// Multiplies every value by `c`.
    pub fn scale(&self, c: f64) -> Self {
        Self::from_sorted_unchecked(
            self.initial * c,
            self.jumps.iter().map(|j| Jump {
                t: j.t,
                value: j.value * c,
            }),
        )
    }

    /// `t ↦ x(t) ∨ y(t)`.
    pub fn pointwise_max(&self, other: &Self) -> Self {
        self.combine(other, f64::max)
    }

    /// Applies `op` pointwise over the merged jump partition.
    pub fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let initial = op(self.initial, other.initial);
        let jumps = merged_partition(self, other).map(|(t, a, b)| Jump { t, value: op(a, b) });
        Self::from_sorted_unchecked(initial, jumps)
    }

    /// Vertices of the completed (thin) graph.
    pub fn completed_graph(&self) -> CompletedGraph {
        let mut vertices = Vec::with_capacity(2 * self.jumps.len() + 2);
        vertices.push((0.0, self.initial));
        let mut prev = self.initial;
        for j in &self.jumps {
            vertices.push((j.t, prev));
            vertices.push((j.t, j.value));
            prev = j.value;
        }
        vertices.push((1.0, prev));
        vertices.dedup();
        CompletedGraph { vertices }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step functions always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// `t,value` rows: the initial value at `t = 0` followed by one row per jump.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in std::iter::once((0.0, self.initial)).chain(self.jumps.iter().map(|j| (j.t, j.value))) {
            out.push_str(&format!("{t:?},{v:?}\n"));
        }
        out
    }
}

/// Iterates `(t, x(t), y(t))` over the union of jump times of `x` and `y`, in order.
pub(crate) fn merged_partition<'a>(
    x: &'a StepFunction,
    y: &'a StepFunction,
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let (mut i, mut k) = (0usize, 0usize);
    let (mut vx, mut vy) = (x.initial, y.initial);
    std::iter::from_fn(move || {
        let tx = x.jumps.get(i).map(|j| j.t);
        let ty = y.jumps.get(k).map(|j| j.t);
        let t = match (tx, ty) {
            (None, None) => return None,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if tx == Some(t) {
            vx = x.jumps[i].value;
            i += 1;
        }
        if ty == Some(t) {
            vy = y.jumps[k].value;
            k += 1;
        }
        Some((t, vx, vy))
    })
}

/// The completed graph as an orthogonal polyline in `[0, 1] × ℝ`,
/// ordered along the graph from `(0, x(0))` to `(1, x(1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedGraph {
    vertices: Vec<(f64, f64)>,
}

/// An axis-aligned segment of a completed graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: (f64, f64),
    pub end: (f64, f64),
}

impl CompletedGraph {
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Segments between consecutive vertices. A graph with a single vertex
    /// (never produced from a step function) would yield a degenerate segment.
    pub fn segments(&self) -> Vec<Segment> {
        if self.vertices.len() == 1 {
            let v = self.vertices[0];
            return vec![Segment { start: v, end: v }];
        }
        self.vertices
            .windows(2)
            .map(|w| Segment {
                start: w[0],
                end: w[1],
            })
            .collect()
    }

    /// Points spaced at most `pitch` apart along the polyline (L∞ arc length), vertices included.
    pub fn sample(&self, pitch: f64) -> Vec<(f64, f64)> {
        let mut pts = vec![self.vertices[0]];
        for s in self.segments() {
            let len = (s.end.0 - s.start.0).abs().max((s.end.1 - s.start.1).abs());
            let steps = (len / pitch).ceil().max(1.0) as usize;
            for k in 1..=steps {
                let u = k as f64 / steps as f64;
                pts.push((
                    s.start.0 + u * (s.end.0 - s.start.0),
                    s.start.1 + u * (s.end.1 - s.start.1),
                ));
            }
        }
        pts
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half() -> StepFunction {
        StepFunction::step(0.5, 0.0, 1.0).unwrap()
    }

    #[test]
    fn evaluate_at_jump_and_continuity_points() {
        assert_eq!(half().evaluate(0.5).unwrap(), (1.0, 0.0));
        assert_eq!(half().evaluate(0.25).unwrap(), (0.0, 0.0));
        assert_eq!(StepFunction::constant(2.5).evaluate(1.0).unwrap(), (2.5, 2.5));
        assert_eq!(half().evaluate(0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn evaluate_rejects_outside_unit_interval() {
        assert!(matches!(half().evaluate(1.5), Err(Error::Domain(_))));
        assert!(half().evaluate(-0.1).is_err());
    }

    #[test]
    fn construction_validates_and_normalizes() {
        assert!(StepFunction::new(0.0, [(0.0, 1.0)]).is_err());
        assert!(StepFunction::new(0.0, [(0.5, 1.0), (0.5, 2.0)]).is_err());
        assert!(StepFunction::new(0.0, [(1.2, 1.0)]).is_err());
        assert!(StepFunction::new(f64::NAN, []).is_err());
        let f = StepFunction::new(1.0, [(0.2, 1.0), (0.4, 2.0), (0.6, 2.0)]).unwrap();
        assert_eq!(f.jumps(), &[Jump { t: 0.4, value: 2.0 }]);
        let g = StepFunction::new(0.0, [(1.0, 3.0)]).unwrap();
        assert_eq!(g.evaluate(1.0).unwrap(), (3.0, 0.0));
    }

    #[test]
    fn running_max_examples() {
        let f = StepFunction::new(3.0, [(1.0 / 3.0, 1.0), (2.0 / 3.0, 5.0)]).unwrap();
        let expect = StepFunction::new(3.0, [(2.0 / 3.0, 5.0)]).unwrap();
        assert_eq!(f.running_max(), expect);
        let mono = StepFunction::new(0.0, [(0.1, 1.0), (0.7, 4.0)]).unwrap();
        assert_eq!(mono.running_max(), mono);
        assert_eq!(StepFunction::constant(2.0).running_max(), StepFunction::constant(2.0));
    }

    #[test]
    fn pointwise_max_examples() {
        let one = StepFunction::constant(1.0);
        let two = StepFunction::constant(2.0);
        assert_eq!(one.pointwise_max(&two), two);
        assert_eq!(half().pointwise_max(&half()), half());
        let g = StepFunction::step(0.25, 0.0, 2.0).unwrap();
        assert_eq!(half().pointwise_max(&g), g);
    }

    #[test]
    fn completed_graph_examples() {
        assert_eq!(
            half().completed_graph().vertices(),
            &[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (1.0, 1.0)]
        );
        assert_eq!(
            StepFunction::constant(4.0).completed_graph().vertices(),
            &[(0.0, 4.0), (1.0, 4.0)]
        );
        let f = StepFunction::new(0.0, [(1.0 / 3.0, 1.0), (2.0 / 3.0, 3.0)]).unwrap();
        assert_eq!(
            f.completed_graph().vertices(),
            &[
                (0.0, 0.0),
                (1.0 / 3.0, 0.0),
                (1.0 / 3.0, 1.0),
                (2.0 / 3.0, 1.0),
                (2.0 / 3.0, 3.0),
                (1.0, 3.0)
            ]
        );
        let end = StepFunction::new(0.0, [(1.0, 2.0)]).unwrap();
        assert_eq!(
            end.completed_graph().vertices(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 2.0)]
        );
    }

    #[test]
    fn json_shape() {
        let json = half().to_json();
        assert_eq!(json, r#"{"initial":0.0,"jumps":[{"t":0.5,"value":1.0}]}"#);
        assert!(StepFunction::from_json(r#"{"initial":0,"jumps":[{"t":0.7,"value":1},{"t":0.2,"value":2}]}"#).is_err());
        assert_eq!(StepFunction::from_json(r#"{"initial":3}"#).unwrap(), StepFunction::constant(3.0));
    }

    #[test]
    fn csv_rows() {
        assert_eq!(half().to_csv(), "t,value\n0.0,0.0\n0.5,1.0\n");
    }

    pub(crate) fn arb_step(max_jumps: usize) -> impl Strategy<Value = StepFunction> {
        (
            -2.0f64..2.0,
            prop::collection::vec((0.0f64..1.0, -2.0f64..2.0), 0..=max_jumps),
        )
            .prop_map(|(init, mut js)| {
                js.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                js.dedup_by(|a, b| a.0 == b.0);
                js.retain(|j| j.0 > 0.0);
                StepFunction::new(init, js).unwrap()
            })
    }

    proptest! {
        #[test]
        fn json_round_trip_preserves_evaluation(f in arb_step(12), ts in prop::collection::vec(0.0f64..=1.0, 1000)) {
            let g = StepFunction::from_json(&f.to_json()).unwrap();
            prop_assert_eq!(&g, &f);
            for t in ts {
                prop_assert_eq!(g.evaluate(t).unwrap(), f.evaluate(t).unwrap());
            }
        }

        #[test]
        fn graph_is_orthogonal_and_matches_jumps(f in arb_step(10)) {
            let g = f.completed_graph();
            let v = g.vertices();
            prop_assert_eq!(v[0], (0.0, f.initial()));
            prop_assert_eq!(*v.last().unwrap(), (1.0, f.terminal()));
            for w in v.windows(2) {
                prop_assert!(w[0].0 == w[1].0 || w[0].1 == w[1].1);
                prop_assert!(w[0].0 <= w[1].0);
            }
            for j in f.jumps() {
                let (val, left) = f.evaluate(j.t).unwrap();
                let bottom = v.iter().position(|&p| p == (j.t, left));
                let top = v.iter().position(|&p| p == (j.t, val));
                prop_assert!(matches!((bottom, top), (Some(a), Some(b)) if b == a + 1));
            }
        }

        #[test]
        fn pointwise_max_is_a_semilattice(f in arb_step(8), g in arb_step(8), h in arb_step(8)) {
            prop_assert_eq!(f.pointwise_max(&g), g.pointwise_max(&f));
            prop_assert_eq!(f.pointwise_max(&f), f.clone());
            prop_assert_eq!(
                f.pointwise_max(&g).pointwise_max(&h),
                f.pointwise_max(&g.pointwise_max(&h))
            );
        }

        #[test]
        fn running_max_is_monotone_upper_envelope(f in arb_step(10), ts in prop::collection::vec(0.0f64..=1.0, 50)) {
            let m = f.running_max();
            prop_assert!(m.is_nondecreasing());
            for t in ts {
                prop_assert!(m.value_at(t) >= f.value_at(t));
            }
            prop_assert_eq!(m.running_max(), m);
        }
    }
}
