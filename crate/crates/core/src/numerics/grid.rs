use crate::algebra::Point;
use crate::error::{Error, Result};

/// Smallest admissible number of points per axis.
pub const MIN_POINTS: usize = 8;

/// Uniform grid on `[min, max]` with `n` points, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy min < max, got [{min}, {max}]"
            )));
        }
        if n < MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_POINTS} points, got {n}"
            )));
        }
        Ok(Self { min, max, n })
    }

    /// Symmetric box `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        // Endpoint pinned exactly so that refinement chains share the box.
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.h()
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.n];
        w[0] = 0.5 * h;
        w[self.n - 1] = 0.5 * h;
        w
    }

    /// Halve the spacing: `n -> 2n - 1` on the same box.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    T,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::T => "t",
        }
    }

    fn set(self, p: &mut Point, v: f64) {
        match self {
            Axis::X => p.x = v,
            Axis::Y => p.y = v,
            Axis::T => p.t = v,
        }
    }
}

/// Tensor grid over one or two coordinate axes. Coordinates not on an axis
/// are taken from `base`. Points are ordered row-major: the last axis
/// varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<(Axis, Grid1D)>,
    base: Point,
}

impl Grid {
    pub fn line(axis: Axis, g: Grid1D) -> Self {
        Self {
            axes: vec![(axis, g)],
            base: Point::default(),
        }
    }

    pub fn plane(first: (Axis, Grid1D), second: (Axis, Grid1D)) -> Result<Self> {
        if first.0 == second.0 {
            return Err(Error::InvalidParameter(format!(
                "both grid axes are {}",
                first.0.name()
            )));
        }
        Ok(Self {
            axes: vec![first, second],
            base: Point::default(),
        })
    }

    pub fn with_base(mut self, base: Point) -> Self {
        self.base = base;
        self
    }

    pub fn axes(&self) -> &[(Axis, Grid1D)] {
        &self.axes
    }

    pub fn base(&self) -> Point {
        self.base
    }

    pub fn axis_grid(&self, axis: Axis) -> Option<(usize, Grid1D)> {
        self.axes
            .iter()
            .enumerate()
            .find(|(_, (a, _))| *a == axis)
            .map(|(k, (_, g))| (k, *g))
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|(_, g)| g.n).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|(_, g)| g.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of flat index `k`.
    pub fn index(&self, k: usize) -> [usize; 2] {
        match self.axes.len() {
            1 => [k, 0],
            _ => {
                let n2 = self.axes[1].1.n;
                [k / n2, k % n2]
            }
        }
    }

    /// Stride of the given axis position in the flat ordering.
    pub fn stride(&self, axis_pos: usize) -> usize {
        if axis_pos + 1 == self.axes.len() {
            1
        } else {
            self.axes[1].1.n
        }
    }

    pub fn point(&self, k: usize) -> Point {
        let idx = self.index(k);
        let mut p = self.base;
        for (pos, (axis, g)) in self.axes.iter().enumerate() {
            axis.set(&mut p, g.coord(idx[pos]));
        }
        p
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Tensor-product trapezoid weights in flat order.
    pub fn weights(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = self.axes.iter().map(|(_, g)| g.weights()).collect();
        (0..self.len())
            .map(|k| {
                let idx = self.index(k);
                per_axis.iter().enumerate().map(|(pos, w)| w[idx[pos]]).product()
            })
            .collect()
    }

    /// Refine every axis once.
    pub fn refined(&self) -> Self {
        Self {
            axes: self.axes.iter().map(|(a, g)| (*a, g.refined())).collect(),
            base: self.base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_or_inverted() {
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 8).is_ok());
    }

    #[test]
    fn endpoints_exact() {
        let g = Grid1D::new(-0.3, 0.7, 11).unwrap();
        assert_eq!(g.coord(0), -0.3);
        assert_eq!(g.coord(10), 0.7);
        assert_eq!(g.refined().coord(20), 0.7);
    }

    #[test]
    fn plane_ordering_is_row_major() {
        let gx = Grid1D::new(0.0, 7.0, 8).unwrap();
        let gy = Grid1D::new(0.0, 9.0, 10).unwrap();
        let g = Grid::plane((Axis::X, gx), (Axis::Y, gy)).unwrap();
        assert_eq!(g.len(), 80);
        let p = g.point(13);
        assert_eq!((p.x, p.y), (1.0, 3.0));
        assert_eq!(g.stride(0), 10);
        assert_eq!(g.stride(1), 1);
    }

    #[test]
    fn weights_sum_to_area() {
        let gx = Grid1D::new(0.0, 2.0, 9).unwrap();
        let gt = Grid1D::new(-1.0, 2.0, 13).unwrap();
        let g = Grid::plane((Axis::T, gt), (Axis::X, gx)).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 6.0).abs() < 1e-13);
    }
}
