use super::RasterError;

/// Dense row-major `height x width` raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    height: usize,
    width: usize,
    cells: Vec<T>,
}

/// Binary label grid (`true` = foreground).
pub type BinaryGrid = Grid<bool>;

impl<T: Copy> Grid<T> {
    /// Grid filled with `fill`.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn new(height: usize, width: usize, fill: T) -> Self {
        assert!(height >= 1 && width >= 1, "grid dimensions must be >= 1");
        Self {
            height,
            width,
            cells: vec![fill; height * width],
        }
    }

    pub fn from_vec(height: usize, width: usize, cells: Vec<T>) -> Result<Self, RasterError> {
        if height == 0 || width == 0 || cells.len() != height * width {
            return Err(RasterError::BadDimensions {
                height,
                width,
                len: cells.len(),
            });
        }
        Ok(Self {
            height,
            width,
            cells,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.cells[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        self.cells[row * self.width + col] = v;
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [T] {
        &mut self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            height: self.height,
            width: self.width,
            cells: self.cells.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub(crate) fn check_dims<U>(&self, other: &Grid<U>) -> Result<(), RasterError> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(RasterError::DimensionMismatch {
                expected: self.dims(),
                found: (other.height, other.width),
            })
        }
    }
}

impl BinaryGrid {
    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn union_with(&mut self, other: &BinaryGrid) -> Result<(), RasterError> {
        self.check_dims(other)?;
        self.cells
            .iter_mut()
            .zip(&other.cells)
            .for_each(|(a, &b)| *a |= b);
        Ok(())
    }

    /// Pixel IoU of two equally sized binary grids (1.0 when both are empty).
    pub fn iou(&self, other: &BinaryGrid) -> Result<f64, RasterError> {
        self.check_dims(other)?;
        let (mut inter, mut union) = (0usize, 0usize);
        for (&a, &b) in self.cells.iter().zip(&other.cells) {
            inter += (a && b) as usize;
            union += (a || b) as usize;
        }
        Ok(if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        })
    }
}

/// Probability grid with every cell in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftGrid(Grid<f64>);

impl SoftGrid {
    pub fn new(height: usize, width: usize, fill: f64) -> Result<Self, RasterError> {
        Self::from_grid(Grid::new(height, width, fill))
    }

    pub fn from_vec(height: usize, width: usize, cells: Vec<f64>) -> Result<Self, RasterError> {
        Self::from_grid(Grid::from_vec(height, width, cells)?)
    }

    pub fn from_grid(grid: Grid<f64>) -> Result<Self, RasterError> {
        if let Some((i, &v)) = grid
            .cells()
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(RasterError::ValueOutOfRange { index: i, value: v });
        }
        Ok(Self(grid))
    }

    pub fn from_binary(grid: &BinaryGrid) -> Self {
        Self(grid.map(|b| if b { 1.0 } else { 0.0 }))
    }

    pub fn threshold(&self, t: f64) -> BinaryGrid {
        self.0.map(|v| v >= t)
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn into_grid(self) -> Grid<f64> {
        self.0
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0.get(row, col)
    }

    pub fn cells(&self) -> &[f64] {
        self.0.cells()
    }
}
