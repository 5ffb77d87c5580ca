use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Point,
    Circle,
    Torus2,
}

/// Flat base: a point, a circle, or a rectangular 2-torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseModel {
    pub kind: BaseKind,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub circumferences: Vec<f64>,
}

fn default_resolution() -> usize {
    32
}

impl BaseModel {
    pub fn point() -> Self {
        BaseModel {
            kind: BaseKind::Point,
            resolution: 1,
            circumferences: Vec::new(),
        }
    }

    pub fn circle(resolution: usize, length: f64) -> Self {
        BaseModel {
            kind: BaseKind::Circle,
            resolution,
            circumferences: vec![length],
        }
    }

    pub fn torus2(resolution: usize, lx: f64, ly: f64) -> Self {
        BaseModel {
            kind: BaseKind::Torus2,
            resolution,
            circumferences: vec![lx, ly],
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BaseKind::Point => 0,
            BaseKind::Circle => 1,
            BaseKind::Torus2 => 2,
        }
    }

    /// Number of loops generating the fundamental group.
    pub fn generators(&self) -> usize {
        self.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == BaseKind::Point {
            return Ok(());
        }
        if self.resolution < 8 {
            return Err(Error::InvalidInput(format!(
                "resolution must be at least 8, got {}",
                self.resolution
            )));
        }
        if self.circumferences.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "{:?} base needs {} circumferences, got {}",
                self.kind,
                self.dim(),
                self.circumferences.len()
            )));
        }
        if self
            .circumferences
            .iter()
            .any(|&l| !(l > 0.0) || !l.is_finite())
        {
            return Err(Error::InvalidInput(
                "circumferences must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        match self.kind {
            BaseKind::Point => Grid::point(),
            BaseKind::Circle => Grid::new(1, [self.resolution, 1], [self.circumferences[0], 1.0]),
            BaseKind::Torus2 => Grid::new(
                2,
                [self.resolution; 2],
                [self.circumferences[0], self.circumferences[1]],
            ),
        }
    }

    /// One cell per direction spanning the whole base: the smallest CW model.
    pub fn minimal_grid(&self) -> Grid {
        match self.kind {
            BaseKind::Point => Grid::point(),
            BaseKind::Circle => Grid::new(1, [1, 1], [self.circumferences[0], 1.0]),
            BaseKind::Torus2 => {
                Grid::new(2, [1, 1], [self.circumferences[0], self.circumferences[1]])
            }
        }
    }

    /// `H^a` dimensions of the base with trivial coefficients.
    pub fn betti(&self) -> Vec<usize> {
        match self.kind {
            BaseKind::Point => vec![1],
            BaseKind::Circle => vec![1, 1],
            BaseKind::Torus2 => vec![1, 2, 1],
        }
    }
}

/// Uniform periodic cell complex: vertices, edges (x then y), faces.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub n: [usize; 2],
    /// Cell widths.
    pub h: [f64; 2],
    /// Total lengths.
    pub length: [f64; 2],
}

impl Grid {
    pub fn point() -> Self {
        Grid {
            dim: 0,
            n: [1, 1],
            h: [1.0, 1.0],
            length: [1.0, 1.0],
        }
    }

    pub fn new(dim: usize, n: [usize; 2], length: [f64; 2]) -> Self {
        Grid {
            dim,
            n,
            h: [length[0] / n[0] as f64, length[1] / n[1] as f64],
            length,
        }
    }

    /// Grid with given cell counts and cell widths (total length = n·h).
    pub fn with_cells(dim: usize, n: [usize; 2], h: [f64; 2]) -> Self {
        Grid {
            dim,
            n,
            h,
            length: [n[0] as f64 * h[0], n[1] as f64 * h[1]],
        }
    }

    pub fn vertices(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn cells(&self, a: usize) -> usize {
        match (self.dim, a) {
            (0, 0) => 1,
            (1, 0) | (1, 1) => self.n[0],
            (2, 0) | (2, 2) => self.vertices(),
            (2, 1) => 2 * self.vertices(),
            _ => 0,
        }
    }

    /// Hodge-star weight of an `a`-cell (dual measure over primal measure).
    pub fn weight(&self, a: usize, cell: usize) -> f64 {
        let [hx, hy] = self.h;
        match (self.dim, a) {
            (0, _) => 1.0,
            (1, 0) => hx,
            (1, 1) => 1.0 / hx,
            (2, 0) => hx * hy,
            (2, 1) if cell < self.vertices() => hy / hx,
            (2, 1) => hx / hy,
            (2, 2) => 1.0 / (hx * hy),
            _ => unreachable!("no {a}-cells on a {}-dimensional grid", self.dim),
        }
    }

    /// Position of a cell's center in units of the circumferences.
    pub fn location(&self, a: usize, cell: usize) -> (f64, f64) {
        let [nx, ny] = self.n;
        let (fx, fy) = (nx as f64, ny as f64);
        match (self.dim, a) {
            (0, _) => (0.0, 0.0),
            (1, 0) => (cell as f64 / fx, 0.0),
            (1, 1) => ((cell as f64 + 0.5) / fx, 0.0),
            (2, 0) => ((cell % nx) as f64 / fx, (cell / nx) as f64 / fy),
            (2, 1) if cell < self.vertices() => {
                (((cell % nx) as f64 + 0.5) / fx, (cell / nx) as f64 / fy)
            }
            (2, 1) => {
                let c = cell - self.vertices();
                ((c % nx) as f64 / fx, ((c / nx) as f64 + 0.5) / fy)
            }
            (2, 2) => (
                ((cell % nx) as f64 + 0.5) / fx,
                ((cell / nx) as f64 + 0.5) / fy,
            ),
            _ => unreachable!(),
        }
    }

    pub fn cell_area(&self) -> f64 {
        self.h[0] * self.h[1]
    }
}
