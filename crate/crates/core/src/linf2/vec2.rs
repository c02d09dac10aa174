use core::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn linf_norm(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        Vec2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn midpoint(self, o: Vec2) -> Vec2 {
        Vec2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Distance in the maximum norm.
pub fn linf_dist(p: Vec2, q: Vec2) -> f64 {
    (p.x - q.x).abs().max((p.y - q.y).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linf_examples() {
        assert_eq!(linf_dist(Vec2::new(1.5, -2.0), Vec2::new(1.5, -2.0)), 0.0);
        assert_eq!(linf_dist(Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0)), 2.0);
        // centers (0, 1 - a) and (0, -b - 1) at a = 0, b = 1
        let (a, b) = (0.0, 1.0);
        assert_eq!(linf_dist(Vec2::new(0.0, 1.0 - a), Vec2::new(0.0, -b - 1.0)), 3.0);
    }
}
