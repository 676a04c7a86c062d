//! 2D occupancy grid used for base collision checks and navigation.

use crate::geom::Rect;
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub resolution: f64,
    /// World xy of the (0, 0) cell's lower corner.
    pub origin: [f64; 2],
    pub width: usize,
    pub height: usize,
    cells: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new_free(bounds: &Rect, resolution: f64) -> Option<Self> {
        let width = (bounds.width() / resolution).ceil() as usize;
        let height = (bounds.height() / resolution).ceil() as usize;
        if width < 2 || height < 2 {
            return None;
        }
        Some(Self {
            resolution,
            origin: bounds.min,
            width,
            height,
            cells: vec![false; width * height],
        })
    }

    pub fn in_bounds(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height
    }

    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[iy * self.width + ix]
    }

    pub fn set_occupied(&mut self, ix: usize, iy: usize, v: bool) {
        self.cells[iy * self.width + ix] = v;
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.origin[0] + (ix as f64 + 0.5) * self.resolution,
            self.origin[1] + (iy as f64 + 0.5) * self.resolution,
        ]
    }

    /// Cell indices containing a world point, or None when outside the grid.
    pub fn cell_of(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let ix = ((p[0] - self.origin[0]) / self.resolution).floor() as i64;
        let iy = ((p[1] - self.origin[1]) / self.resolution).floor() as i64;
        if self.in_bounds(ix, iy) {
            Some((ix as usize, iy as usize))
        } else {
            None
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Binary PGM (P5), one byte per cell: 0 = occupied, 255 = free.
    /// Rows are written top-down (max y first) so images match floor plans.
    pub fn write_pgm(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "P5")?;
        writeln!(w, "# resolution {} origin {} {}", self.resolution, self.origin[0], self.origin[1])?;
        writeln!(w, "{} {}", self.width, self.height)?;
        writeln!(w, "255")?;
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                w.write_all(&[if self.is_occupied(ix, iy) { 0u8 } else { 255u8 }])?;
            }
        }
        Ok(())
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "ix,iy,x,y,occupied")?;
        for iy in 0..self.height {
            for ix in 0..self.width {
                let c = self.cell_center(ix, iy);
                writeln!(w, "{},{},{},{},{}", ix, iy, c[0], c[1], u8::from(self.is_occupied(ix, iy)))?;
            }
        }
        Ok(())
    }
}
