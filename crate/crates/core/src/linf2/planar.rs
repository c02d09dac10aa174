use super::polygon::{ConvexPolygon, HalfPlane, Window};
use super::vec2::Vec2;
use crate::tolerance::Tolerance;

/// The plane with the maximum norm, or a closed half-plane of it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarSpace {
    pub region: Option<HalfPlane>,
    pub window: Window,
}

impl PlanarSpace {
    pub fn plane() -> Self {
        PlanarSpace::default()
    }

    pub fn half_plane(h: HalfPlane) -> Self {
        PlanarSpace { region: Some(h), window: Window::default() }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn contains(&self, p: Vec2, tol: &Tolerance) -> bool {
        p.is_finite() && self.region.is_none_or(|h| h.contains(p, tol.eps_feas))
    }

    /// The space as a polygon, clipped to the window.
    pub fn polygon(&self, tol: &Tolerance) -> ConvexPolygon {
        let w = self.window.polygon();
        match &self.region {
            None => w,
            Some(h) => w.clip(h, tol),
        }
    }

    /// Restricts `poly` to the space.
    pub fn restrict(&self, poly: &ConvexPolygon, tol: &Tolerance) -> ConvexPolygon {
        let mut out = poly.intersect(&self.window.polygon(), tol);
        if let Some(h) = &self.region {
            out = out.clip(h, tol);
        }
        out
    }
}
