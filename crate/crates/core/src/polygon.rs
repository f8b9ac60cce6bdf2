//! Convex polygons in the bid-ask plane, cut down by half-planes.

use serde::Serialize;

/// `{ (b, a) : nb * b + na * a <= c }`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub nb: f64,
    pub na: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(nb: f64, na: f64, c: f64) -> Self {
        HalfPlane { nb, na, c }
    }

    /// `c - n . p`; non-negative inside.
    fn margin(&self, p: [f64; 2]) -> f64 {
        self.c - (self.nb * p[0] + self.na * p[1])
    }
}

/// Vertices in order (either orientation); empty when the region is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    pub vertices: Vec<[f64; 2]>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Self {
        ConvexPolygon { vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Sutherland-Hodgman step against one half-plane.
    pub fn clip(&self, h: &HalfPlane) -> ConvexPolygon {
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let (mp, mq) = (h.margin(p), h.margin(q));
            if mp >= 0.0 {
                out.push(p);
            }
            if (mp >= 0.0) != (mq >= 0.0) {
                let t = mp / (mp - mq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        ConvexPolygon::new(out)
    }

    pub fn clip_all<'a>(&self, planes: impl IntoIterator<Item = &'a HalfPlane>) -> ConvexPolygon {
        planes.into_iter().fold(self.clone(), |poly, h| poly.clip(h))
    }

    /// `max f - min f` over the vertices; `None` when empty.
    pub fn range_of(&self, f: impl Fn([f64; 2]) -> f64) -> Option<f64> {
        let mut values = self.vertices.iter().map(|&v| f(v));
        let first = values.next()?;
        let (lo, hi) = values.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
        Some(hi - lo)
    }

    /// Spread range `sup (a - b) - inf (a - b)`.
    pub fn range_s(&self) -> Option<f64> {
        self.range_of(|[b, a]| a - b)
    }

    /// Mid-price range `sup (a + b)/2 - inf (a + b)/2`.
    pub fn range_m(&self) -> Option<f64> {
        self.range_of(|[b, a]| (a + b) / 2.0)
    }

    /// Whether every vertex satisfies `h` up to `tol`.
    pub fn satisfies(&self, h: &HalfPlane, tol: f64) -> bool {
        self.vertices.iter().all(|&v| h.margin(v) >= -tol)
    }

    /// Twice the signed area; zero for degenerate polygons.
    pub fn signed_area2(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let p = self.vertices[i];
                let q = self.vertices[(i + 1) % n];
                p[0] * q[1] - q[0] * p[1]
            })
            .sum()
    }

    /// No reflex vertex: all turns share one orientation (collinear allowed).
    pub fn is_convex(&self, tol: f64) -> bool {
        let n = self.vertices.len();
        if n < 3 {
            return true;
        }
        let mut sign = 0.0f64;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let r = self.vertices[(i + 2) % n];
            let cross = (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]);
            if cross.abs() <= tol {
                continue;
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    #[test]
    fn clip_keeps_inside_half() {
        let half = unit_square().clip(&HalfPlane::new(1.0, 0.0, 0.5));
        assert_eq!(half.vertices.len(), 4);
        assert!((half.signed_area2() - 1.0).abs() < 1e-12);
        assert!(half.is_convex(1e-12));
    }

    #[test]
    fn clip_everything_away() {
        let none = unit_square().clip(&HalfPlane::new(1.0, 0.0, -1.0));
        assert!(none.is_empty());
        assert_eq!(none.range_s(), None);
    }

    #[test]
    fn ranges_over_vertices() {
        let sq = unit_square();
        assert_eq!(sq.range_s(), Some(2.0));
        assert_eq!(sq.range_m(), Some(1.0));
    }
}
