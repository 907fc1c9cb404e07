//! Convex polygons in the `(beta, gamma)` plane with exact vertices.

use crate::quadfield::QuadExt;

pub type Point = (QuadExt, QuadExt);

/// Closed half-plane `beta_coef*beta + gamma_coef*gamma + offset >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfPlane {
    pub beta_coef: QuadExt,
    pub gamma_coef: QuadExt,
    pub offset: QuadExt,
}

impl HalfPlane {
    pub fn new(beta_coef: QuadExt, gamma_coef: QuadExt, offset: QuadExt) -> Self {
        debug_assert!(
            !(beta_coef.is_zero() && gamma_coef.is_zero()),
            "half-plane needs a non-zero normal"
        );
        HalfPlane {
            beta_coef,
            gamma_coef,
            offset,
        }
    }

    pub fn value_at(&self, (beta, gamma): &Point) -> QuadExt {
        &(&(&self.beta_coef * beta) + &(&self.gamma_coef * gamma)) + &self.offset
    }

    /// Sign of the defining affine form at `p`: `>= 0` inside the closed half-plane.
    pub fn side(&self, p: &Point) -> i32 {
        self.value_at(p).sign()
    }
}

/// Convex polygon, vertices counter-clockwise without repeats. May be empty or
/// degenerate (a point or a segment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasRegion {
    vertices: Vec<Point>,
}

impl FeasRegion {
    /// The closed unit square `[0, 1]^2`.
    pub fn unit_square() -> Self {
        let z = QuadExt::zero;
        let o = QuadExt::one;
        FeasRegion {
            vertices: vec![(z(), z()), (o(), z()), (o(), o()), (z(), o())],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Twice the signed area (shoelace), exact.
    pub fn double_area(&self) -> QuadExt {
        let n = self.vertices.len();
        if n < 3 {
            return QuadExt::zero();
        }
        let mut acc = QuadExt::zero();
        for i in 0..n {
            let (x0, y0) = &self.vertices[i];
            let (x1, y1) = &self.vertices[(i + 1) % n];
            acc = &acc + &(&(x0 * y1) - &(x1 * y0));
        }
        acc
    }

    pub fn area(&self) -> QuadExt {
        &self.double_area() * &QuadExt::rational(crate::quadfield::ratio(1, 2))
    }

    pub fn has_positive_area(&self) -> bool {
        self.vertices.len() >= 3 && self.double_area().sign() > 0
    }

    /// Intersection with a closed half-plane (Sutherland-Hodgman on one edge).
    pub fn intersect(&self, h: &HalfPlane) -> FeasRegion {
        let n = self.vertices.len();
        if n == 0 {
            return self.clone();
        }
        let values: Vec<QuadExt> = self.vertices.iter().map(|v| h.value_at(v)).collect();
        let signs: Vec<i32> = values.iter().map(QuadExt::sign).collect();
        if signs.iter().all(|&s| s >= 0) {
            return self.clone();
        }
        let mut out: Vec<Point> = Vec::with_capacity(n + 1);
        for i in 0..n {
            let j = (i + 1) % n;
            if signs[i] >= 0 {
                push_unique(&mut out, self.vertices[i].clone());
            }
            if signs[i] * signs[j] < 0 {
                // crossing point p + (q - p) * f_p / (f_p - f_q)
                let t = values[i]
                    .checked_div(&(&values[i] - &values[j]))
                    .expect("crossing edge has distinct end values");
                let (px, py) = &self.vertices[i];
                let (qx, qy) = &self.vertices[j];
                let x = px + &(&(qx - px) * &t);
                let y = py + &(&(qy - py) * &t);
                push_unique(&mut out, (x, y));
            }
        }
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        FeasRegion { vertices: out }
    }

    /// Average of the vertices; an interior point whenever the area is positive.
    pub fn vertex_centroid(&self) -> Option<Point> {
        if self.vertices.is_empty() {
            return None;
        }
        let inv = QuadExt::integer(self.vertices.len() as u64)
            .inv()
            .expect("non-empty");
        let (mut sx, mut sy) = (QuadExt::zero(), QuadExt::zero());
        for (x, y) in &self.vertices {
            sx = &sx + x;
            sy = &sy + y;
        }
        Some((&sx * &inv, &sy * &inv))
    }

    pub fn contains(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        match n {
            0 => false,
            1 => &self.vertices[0] == p,
            _ => (0..n).all(|i| {
                let (ax, ay) = &self.vertices[i];
                let (bx, by) = &self.vertices[(i + 1) % n];
                let cross = &(&(bx - ax) * &(&p.1 - ay)) - &(&(by - ay) * &(&p.0 - ax));
                cross.sign() >= 0
            }),
        }
    }
}

fn push_unique(out: &mut Vec<Point>, p: Point) {
    if out.last() != Some(&p) {
        out.push(p);
    }
}
