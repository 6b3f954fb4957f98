use super::BinaryGrid;

/// Inclusive cell bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub min_row: usize,
    pub min_col: usize,
    pub max_row: usize,
    pub max_col: usize,
}

impl CellBox {
    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }
}

/// An 8-connected set of foreground cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// 1-based label, in component order.
    pub label: usize,
    /// `(row, col)` cells in raster order.
    pub pixels: Vec<(usize, usize)>,
    pub bbox: CellBox,
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

/// Horizontal run of foreground cells `[start, end)` in one row.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Run {
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct RunComponent {
    pub runs: Vec<Run>,
    pub bbox: CellBox,
    pub area: usize,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Run-based 8-connected labeling.
///
/// `row_runs(row, out)` must append the foreground runs of `row` in
/// increasing column order. Components come back ordered by
/// `(min_row, min_col)`, with runs in raster order.
pub(crate) fn label_runs(
    height: usize,
    mut row_runs: impl FnMut(usize, &mut Vec<(usize, usize)>),
) -> Vec<RunComponent> {
    let mut runs: Vec<Run> = Vec::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut buf: Vec<(usize, usize)> = Vec::new();
    let mut prev = 0..0;
    for row in 0..height {
        buf.clear();
        row_runs(row, &mut buf);
        let cur_start = runs.len();
        let mut j = prev.start;
        for &(start, end) in &buf {
            let idx = runs.len();
            runs.push(Run { row, start, end });
            parent.push(idx);
            // Previous-row runs touching columns [start - 1, end] are 8-adjacent.
            while j < prev.end && runs[j].end < start {
                j += 1;
            }
            let mut k = j;
            while k < prev.end && runs[k].start <= end {
                let a = find(&mut parent, idx);
                let b = find(&mut parent, k);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                }
                k += 1;
            }
        }
        prev = cur_start..runs.len();
    }

    let mut slot: Vec<usize> = vec![usize::MAX; runs.len()];
    let mut comps: Vec<RunComponent> = Vec::new();
    for i in 0..runs.len() {
        let root = find(&mut parent, i);
        let r = runs[i];
        if slot[root] == usize::MAX {
            slot[root] = comps.len();
            comps.push(RunComponent {
                runs: Vec::new(),
                bbox: CellBox {
                    min_row: r.row,
                    min_col: r.start,
                    max_row: r.row,
                    max_col: r.end - 1,
                },
                area: 0,
            });
        }
        let c = &mut comps[slot[root]];
        c.runs.push(r);
        c.area += r.end - r.start;
        c.bbox.min_col = c.bbox.min_col.min(r.start);
        c.bbox.max_col = c.bbox.max_col.max(r.end - 1);
        c.bbox.max_row = r.row;
    }
    comps.sort_by_key(|c| (c.bbox.min_row, c.bbox.min_col));
    comps
}

pub(crate) fn binary_row_runs(grid: &BinaryGrid, row: usize, out: &mut Vec<(usize, usize)>) {
    let w = grid.width();
    let cells = &grid.cells()[row * w..(row + 1) * w];
    let mut c = 0;
    while c < w {
        if cells[c] {
            let s = c;
            while c < w && cells[c] {
                c += 1;
            }
            out.push((s, c));
        } else {
            c += 1;
        }
    }
}

/// 8-connected components of the foreground, ordered by `(min_row, min_col)`.
pub fn connected_components(grid: &BinaryGrid) -> Vec<Component> {
    label_runs(grid.height(), |row, out| binary_row_runs(grid, row, out))
        .into_iter()
        .enumerate()
        .map(|(i, rc)| Component {
            label: i + 1,
            pixels: rc
                .runs
                .iter()
                .flat_map(|r| (r.start..r.end).map(move |c| (r.row, c)))
                .collect(),
            bbox: rc.bbox,
        })
        .collect()
}
