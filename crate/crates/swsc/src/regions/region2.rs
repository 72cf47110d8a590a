//! Two-dimensional regions as unions of conjunctions of half-planes.

use serde::{Deserialize, Serialize};

/// a R1 + b R2 <= c with nonnegative integer coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: u32,
    pub b: u32,
    pub c: f64,
}

impl HalfPlane {
    /// The right-hand side is clamped at 0 so that the origin stays feasible; mutual
    /// informations can come out at -1e-16 from rounding.
    pub fn new(a: u32, b: u32, c: f64) -> Self {
        Self { a, b, c: c.max(0.0) }
    }

    pub fn r1(c: f64) -> Self {
        Self::new(1, 0, c)
    }

    pub fn r2(c: f64) -> Self {
        Self::new(0, 1, c)
    }

    pub fn sum(c: f64) -> Self {
        Self::new(1, 1, c)
    }

    fn holds(&self, r1: f64, r2: f64, tol: f64) -> bool {
        self.a as f64 * r1 + self.b as f64 * r2 <= self.c + tol
    }
}

/// Intersection of half-planes within the nonnegative quadrant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjunction {
    pub label: String,
    pub constraints: Vec<HalfPlane>,
}

impl Conjunction {
    pub fn new(label: impl Into<String>, constraints: Vec<HalfPlane>) -> Self {
        Self { label: label.into(), constraints }
    }

    /// Rectangle R1 <= r1, R2 <= r2 (infinite sides are omitted).
    pub fn rect(label: impl Into<String>, r1: f64, r2: f64) -> Self {
        let mut c = Vec::new();
        if r1.is_finite() {
            c.push(HalfPlane::r1(r1));
        }
        if r2.is_finite() {
            c.push(HalfPlane::r2(r2));
        }
        Self::new(label, c)
    }

    pub fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        r1 >= -tol && r2 >= -tol && self.constraints.iter().all(|h| h.holds(r1, r2, tol))
    }

    /// Largest R1 with (R1, 0) inside.
    pub fn r1_max(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|h| h.a > 0)
            .map(|h| h.c / h.a as f64)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn r2_max(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|h| h.b > 0)
            .map(|h| h.c / h.b as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest R2 at a given R1, or None when R1 is outside [0, r1_max].
    pub fn max_r2(&self, r1: f64) -> Option<f64> {
        if r1 < 0.0 || r1 > self.r1_max() {
            return None;
        }
        let v = self
            .constraints
            .iter()
            .filter(|h| h.b > 0)
            .map(|h| (h.c - h.a as f64 * r1) / h.b as f64)
            .fold(f64::INFINITY, f64::min);
        Some(v.max(0.0))
    }

    /// The rectangle bounds when the conjunction is a pure rectangle.
    pub fn as_rect(&self) -> Option<(f64, f64)> {
        if self.constraints.iter().all(|h| h.a == 0 || h.b == 0) {
            Some((self.r1_max(), self.r2_max()))
        } else {
            None
        }
    }

    pub fn intersect(&self, other: &Conjunction) -> Conjunction {
        let label = match (self.label.is_empty(), other.label.is_empty()) {
            (true, _) => other.label.clone(),
            (_, true) => self.label.clone(),
            _ => format!("{}&{}", self.label, other.label),
        };
        let mut constraints = self.constraints.clone();
        constraints.extend_from_slice(&other.constraints);
        Conjunction::new(label, constraints).simplified()
    }

    /// Keeps the tightest constraint per coefficient pair.
    pub fn simplified(mut self) -> Self {
        let mut out: Vec<HalfPlane> = Vec::new();
        for h in self.constraints.drain(..) {
            if h.a == 0 && h.b == 0 {
                continue;
            }
            match out.iter_mut().find(|g| g.a == h.a && g.b == h.b) {
                Some(g) => g.c = g.c.min(h.c),
                None => out.push(h),
            }
        }
        self.constraints = out;
        self
    }

    /// R1 values where the upper boundary can bend.
    fn breakpoints(&self) -> Vec<f64> {
        let mut xs = vec![0.0];
        let r1max = self.r1_max();
        if r1max.is_finite() {
            xs.push(r1max);
        }
        let upper: Vec<&HalfPlane> = self.constraints.iter().filter(|h| h.b > 0).collect();
        for (i, p) in upper.iter().enumerate() {
            if p.a > 0 {
                xs.push(p.c / p.a as f64);
            }
            for q in &upper[i + 1..] {
                let det = p.a as f64 * q.b as f64 - q.a as f64 * p.b as f64;
                if det != 0.0 {
                    xs.push((p.c * q.b as f64 - q.c * p.b as f64) / det);
                }
            }
        }
        xs.retain(|x| x.is_finite() && *x >= 0.0 && *x <= r1max);
        xs
    }

    /// Vertices of the conjunction (counterclockwise from the origin).
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        let mut xs = self.breakpoints();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut v = vec![(0.0, 0.0)];
        if let Some(&last) = xs.last() {
            v.push((last, 0.0));
        }
        for &x in xs.iter().rev() {
            if let Some(y) = self.max_r2(x) {
                v.push((x, y));
            }
        }
        v.dedup();
        v
    }
}

/// A point on a region boundary with the conjunction that attains it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub r1: f64,
    pub r2: f64,
    pub label: String,
}

/// Union of conjunctions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateRegion2 {
    pub conjunctions: Vec<Conjunction>,
}

impl RateRegion2 {
    pub fn new(conjunctions: Vec<Conjunction>) -> Self {
        Self { conjunctions }
    }

    pub fn single(c: Conjunction) -> Self {
        Self::new(vec![c])
    }

    pub fn rect(label: impl Into<String>, r1: f64, r2: f64) -> Self {
        Self::single(Conjunction::rect(label, r1, r2))
    }

    pub fn is_empty(&self) -> bool {
        self.conjunctions.is_empty()
    }

    pub fn contains(&self, r1: f64, r2: f64, tol: f64) -> bool {
        self.conjunctions.iter().any(|c| c.contains(r1, r2, tol))
    }

    /// Intersection, distributed over the unions.
    pub fn intersect(&self, other: &RateRegion2) -> RateRegion2 {
        let mut out = Vec::with_capacity(self.conjunctions.len() * other.conjunctions.len());
        for a in &self.conjunctions {
            for b in &other.conjunctions {
                out.push(a.intersect(b));
            }
        }
        RateRegion2::new(out)
    }

    pub fn union(&self, other: &RateRegion2) -> RateRegion2 {
        let mut c = self.conjunctions.clone();
        c.extend_from_slice(&other.conjunctions);
        RateRegion2::new(c)
    }

    /// Drops rectangles dominated by another rectangle; other conjunctions are kept.
    pub fn prune_rectangles(&mut self) {
        let (mut rects, others): (Vec<Conjunction>, Vec<Conjunction>) =
            self.conjunctions.drain(..).partition(|c| c.as_rect().is_some());
        // Sort by R1 descending (then R2 descending); keep strictly increasing R2.
        rects.sort_by(|a, b| {
            let (a1, a2) = a.as_rect().unwrap();
            let (b1, b2) = b.as_rect().unwrap();
            b1.total_cmp(&a1).then(b2.total_cmp(&a2))
        });
        let mut best = f64::NEG_INFINITY;
        let mut kept = Vec::new();
        for r in rects {
            let (_, r2) = r.as_rect().unwrap();
            if r2 > best {
                best = r2;
                kept.push(r);
            }
        }
        self.conjunctions = others;
        self.conjunctions.extend(kept);
    }

    pub fn r1_max(&self) -> f64 {
        self.conjunctions.iter().map(Conjunction::r1_max).fold(0.0, f64::max)
    }

    pub fn r2_max(&self) -> f64 {
        self.conjunctions.iter().map(Conjunction::r2_max).fold(0.0, f64::max)
    }

    /// Upper envelope at R1, with the attaining label.
    pub fn max_r2_labeled(&self, r1: f64) -> Option<(f64, &str)> {
        let mut best: Option<(f64, &str)> = None;
        for c in &self.conjunctions {
            if let Some(v) = c.max_r2(r1) {
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, &c.label));
                }
            }
        }
        best
    }

    pub fn max_r2(&self, r1: f64) -> Option<f64> {
        self.max_r2_labeled(r1).map(|(v, _)| v)
    }

    /// Largest R with (R, R) in the region.
    pub fn max_symmetric(&self) -> f64 {
        self.conjunctions
            .iter()
            .map(|c| {
                c.constraints
                    .iter()
                    .map(|h| h.c / (h.a + h.b) as f64)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Largest R1 at a given R2.
    pub fn max_r1(&self, r2: f64) -> Option<f64> {
        self.conjunctions
            .iter()
            .filter_map(|c| {
                if r2 < 0.0 || r2 > c.r2_max() {
                    return None;
                }
                let v = c
                    .constraints
                    .iter()
                    .filter(|h| h.a > 0)
                    .map(|h| (h.c - h.b as f64 * r2) / h.a as f64)
                    .fold(f64::INFINITY, f64::min);
                Some(v.max(0.0))
            })
            .reduce(f64::max)
    }

    /// Right limit of the envelope at `x`: only conjunctions extending past `x` count.
    fn right_limit(&self, x: f64) -> Option<(f64, &str)> {
        let mut best: Option<(f64, &str)> = None;
        for c in &self.conjunctions {
            if c.r1_max() > x {
                if let Some(v) = c.max_r2(x) {
                    if best.is_none_or(|(b, _)| v > b) {
                        best = Some((v, &c.label));
                    }
                }
            }
        }
        best
    }

    /// Upper-boundary staircase: all exact breakpoints plus `samples` evenly spaced R1
    /// values. R2 is nonincreasing along the output; jumps appear as two points at the
    /// same R1. The polyline starts on the R2 axis and ends on the R1 axis.
    pub fn boundary(&self, samples: usize) -> Vec<BoundaryPoint> {
        let r1max = self.r1_max();
        if self.is_empty() || !r1max.is_finite() {
            return Vec::new();
        }
        let mut xs: Vec<f64> = self.conjunctions.iter().flat_map(|c| c.breakpoints()).collect();
        if samples > 1 {
            xs.extend((0..samples).map(|i| r1max * i as f64 / (samples - 1) as f64));
        }
        xs.push(0.0);
        xs.push(r1max);
        xs.retain(|x| *x >= 0.0 && *x <= r1max);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut out: Vec<BoundaryPoint> = Vec::new();
        let mut push = |r1: f64, r2: f64, label: &str| {
            if out.last().is_none_or(|p: &BoundaryPoint| p.r1 != r1 || p.r2 != r2) {
                out.push(BoundaryPoint { r1, r2, label: label.to_string() });
            }
        };
        for &x in &xs {
            if let Some((v, l)) = self.max_r2_labeled(x) {
                push(x, v, l);
                match self.right_limit(x) {
                    Some((w, l2)) if w < v => push(x, w, l2),
                    None => push(x, 0.0, l),
                    _ => {}
                }
            }
        }
        out
    }

    /// Vertices of every conjunction.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        self.conjunctions.iter().flat_map(Conjunction::vertices).collect()
    }

    /// Whether `self` is contained in `other` up to `tol`: all vertices of `self` plus a
    /// `grid` x `grid` sample of its bounding box that lie in `self` must lie in `other`.
    pub fn is_subset_of(&self, other: &RateRegion2, grid: usize, tol: f64) -> bool {
        if !self.vertices().iter().all(|&(a, b)| other.contains(a, b, tol)) {
            return false;
        }
        let (m1, m2) = (self.r1_max(), self.r2_max());
        if grid < 2 || !m1.is_finite() || !m2.is_finite() {
            return true;
        }
        for i in 0..grid {
            for j in 0..grid {
                let r1 = m1 * i as f64 / (grid - 1) as f64;
                let r2 = m2 * j as f64 / (grid - 1) as f64;
                if self.contains(r1, r2, 0.0) && !other.contains(r1, r2, tol) {
                    return false;
                }
            }
        }
        true
    }

    /// Boundary as CSV with header `R1_bits,R2_bits,source_label`.
    pub fn boundary_csv(&self, samples: usize) -> String {
        let mut s = String::from("R1_bits,R2_bits,source_label\n");
        for p in self.boundary(samples) {
            s.push_str(&format!("{:.12},{:.12},{}\n", p.r1, p.r2, p.label));
        }
        s
    }

    /// Constraint export: one object per conjunction with `{coeffs, rhs}` entries.
    pub fn constraints_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.conjunctions
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "label": c.label,
                        "constraints": c.constraints.iter().map(|h| serde_json::json!({
                            "coeffs": [h.a, h.b],
                            "rhs": h.c,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pentagon() -> Conjunction {
        Conjunction::new("sd", vec![HalfPlane::r1(0.6), HalfPlane::r2(0.5), HalfPlane::sum(0.8)])
    }

    #[test]
    fn pentagon_vertices() {
        let v = pentagon().vertices();
        let expect = [(0.0, 0.0), (0.6, 0.0), (0.6, 0.2), (0.3, 0.5), (0.0, 0.5)];
        assert_eq!(v.len(), expect.len());
        for (a, b) in v.iter().zip(&expect) {
            assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15, "{v:?}");
        }
    }

    #[test]
    fn negative_rhs_clamped() {
        assert_eq!(HalfPlane::r1(-1e-17).c, 0.0);
    }

    #[test]
    fn union_staircase_has_jump() {
        let r = RateRegion2::rect("a", 0.4, 0.9).union(&RateRegion2::rect("b", 0.8, 0.3));
        let b = r.boundary(0);
        let pts: Vec<(f64, f64)> = b.iter().map(|p| (p.r1, p.r2)).collect();
        assert_eq!(pts, vec![(0.0, 0.9), (0.4, 0.9), (0.4, 0.3), (0.8, 0.3), (0.8, 0.0)]);
        assert!(b.windows(2).all(|w| w[1].r2 <= w[0].r2 && w[1].r1 >= w[0].r1));
    }

    #[test]
    fn intersect_distributes() {
        let a = RateRegion2::rect("a", 0.4, 0.9).union(&RateRegion2::rect("b", 0.8, 0.3));
        let c = RateRegion2::single(pentagon());
        let i = a.intersect(&c);
        for &(x, y) in &[(0.3, 0.5), (0.35, 0.45), (0.6, 0.2), (0.7, 0.1), (0.5, 0.35)] {
            assert_eq!(i.contains(x, y, 0.0), a.contains(x, y, 0.0) && c.contains(x, y, 0.0));
        }
    }

    #[test]
    fn prune_keeps_pareto_front() {
        let mut r = RateRegion2::new(vec![
            Conjunction::rect("a", 0.4, 0.9),
            Conjunction::rect("b", 0.3, 0.5),
            Conjunction::rect("c", 0.8, 0.3),
        ]);
        r.prune_rectangles();
        assert_eq!(r.conjunctions.len(), 2);
    }

    #[test]
    fn max_r1_of_pentagon() {
        let r = RateRegion2::single(pentagon());
        assert!((r.max_r1(0.5).unwrap() - 0.3).abs() < 1e-15);
        assert!(r.max_r1(0.6).is_none());
    }

    #[test]
    fn subset_check() {
        let big = RateRegion2::single(pentagon());
        assert!(RateRegion2::rect("r", 0.3, 0.5).is_subset_of(&big, 20, 1e-9));
        assert!(!RateRegion2::rect("r", 0.4, 0.5).is_subset_of(&big, 20, 1e-9));
    }
}
