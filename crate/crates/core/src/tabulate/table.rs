use crate::error::{Error, Result};
use crate::stratify::{Stratification, Stratum};

use super::tree::{Window, WindowGrid};

/// A `2 × 2 × T` count table. Each stratum holds `[a, b, c, d]` for the
/// quadrants (I_left, J_left), (I_left, J_right), (I_right, J_left),
/// (I_right, J_right).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WindowTable {
    cells: Vec<[u32; 4]>,
}

impl WindowTable {
    pub fn from_cells(cells: Vec<[u32; 4]>) -> WindowTable {
        WindowTable { cells }
    }

    pub fn cells(&self) -> &[[u32; 4]] {
        &self.cells
    }

    pub fn strata_count(&self) -> usize {
        self.cells.len()
    }

    /// `n(I_left, J, S_t)`.
    pub fn row_margin(&self, t: usize) -> u32 {
        let [a, b, _, _] = self.cells[t];
        a + b
    }

    /// `n(I, J_left, S_t)`.
    pub fn col_margin(&self, t: usize) -> u32 {
        let [a, _, c, _] = self.cells[t];
        a + c
    }

    pub fn stratum_total(&self, t: usize) -> u32 {
        self.cells[t].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.cells
            .iter()
            .flat_map(|c| c.iter())
            .map(|&v| u64::from(v))
            .sum()
    }

    /// Quadrant counts summed over strata.
    pub fn collapsed(&self) -> [u64; 4] {
        let mut out = [0u64; 4];
        for c in &self.cells {
            for q in 0..4 {
                out[q] += u64::from(c[q]);
            }
        }
        out
    }

    /// Swaps the two columns (J_left and J_right) of every stratum.
    pub fn swap_columns(&self) -> WindowTable {
        WindowTable {
            cells: self
                .cells
                .iter()
                .map(|&[a, b, c, d]| [b, a, d, c])
                .collect(),
        }
    }
}

/// Counts the window's samples by stratum and quadrant. Fails unless the
/// stratification's index sets partition exactly the samples of `window`.
pub fn tabulate_window(
    grid: &WindowGrid,
    window: &Window,
    strat: &Stratification,
) -> Result<WindowTable> {
    let (k1, k2) = grid.depths();
    if window.l1 >= k1 || window.l2 >= k2 {
        return Err(Error::InvalidArgument(format!(
            "window at levels ({}, {}) has no children in trees of depth ({k1}, {k2})",
            window.l1, window.l2
        )));
    }
    let n = grid.sample_count();
    let mut seen = vec![false; n];
    let mut count = 0usize;
    for stratum in &strat.strata {
        for &i in &stratum.indices {
            let i = i as usize;
            if i >= n || !grid.contains(window, i) {
                return Err(Error::StratificationMismatch(format!(
                    "sample {i} is not in the window"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::StratificationMismatch(format!(
                    "sample {i} appears twice"
                )));
            }
            count += 1;
        }
    }
    let expected = grid.window_indices(window).len();
    if count != expected {
        return Err(Error::StratificationMismatch(format!(
            "{count} samples stratified, window holds {expected}"
        )));
    }
    Ok(tabulate_unchecked(grid, window, &strat.strata))
}

pub(crate) fn tabulate_unchecked(
    grid: &WindowGrid,
    window: &Window,
    strata: &[Stratum],
) -> WindowTable {
    let cells = strata
        .iter()
        .map(|s| {
            let mut cell = [0u32; 4];
            for &i in &s.indices {
                cell[grid.quadrant(window, i as usize)] += 1;
            }
            cell
        })
        .collect();
    WindowTable { cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stratify::Stratum;
    use crate::tabulate::build_dyadic_tree;

    fn root() -> Window {
        Window {
            l1: 0,
            pos_i: 0,
            l2: 0,
            pos_j: 0,
        }
    }

    fn strat_of(groups: Vec<Vec<u32>>, n: usize) -> Stratification {
        Stratification::from_strata(groups.into_iter().map(Stratum::unbounded).collect(), n, 1)
    }

    #[test]
    fn one_sample_per_quadrant() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        let grid = WindowGrid::from_trees(build_dyadic_tree(&x, 1), build_dyadic_tree(&y, 1));
        let t = tabulate_window(&grid, &root(), &strat_of(vec![vec![0, 1, 2, 3]], 4)).unwrap();
        assert_eq!(t.cells(), &[[1, 1, 1, 1]]);
    }

    #[test]
    fn two_strata_of_four() {
        // x ranks 0..8, y alternates low/high within each x-half
        let x: Vec<f64> = (0..8).map(f64::from).collect();
        let y = [0.0, 5.0, 1.0, 6.0, 7.0, 2.0, 3.0, 4.0];
        let grid = WindowGrid::from_trees(build_dyadic_tree(&x, 1), build_dyadic_tree(&y, 1));
        let strat = strat_of(vec![vec![0, 1, 4, 5], vec![2, 3, 6, 7]], 8);
        let t = tabulate_window(&grid, &root(), &strat).unwrap();
        // y ranks: [0,5,1,6,7,2,3,4] → left half is ranks < 4
        // stratum 0: i0 (xL,yL) i1 (xL,yR) i4 (xR,yR) i5 (xR,yL)
        // stratum 1: i2 (xL,yL) i3 (xL,yR) i6 (xR,yL) i7 (xR,yR)
        assert_eq!(t.cells(), &[[1, 1, 1, 1], [1, 1, 1, 1]]);
        assert_eq!(t.stratum_total(0), 4);
        assert_eq!(t.stratum_total(1), 4);
        assert_eq!(t.total(), 8);
        for s in 0..2 {
            assert_eq!(t.row_margin(s), 2);
            assert_eq!(t.col_margin(s), 2);
        }
    }

    #[test]
    fn empty_stratum_gives_zero_row() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let grid = WindowGrid::from_trees(build_dyadic_tree(&x, 1), build_dyadic_tree(&x, 1));
        let strat = strat_of(vec![vec![0, 1, 2, 3], vec![]], 4);
        let t = tabulate_window(&grid, &root(), &strat).unwrap();
        assert_eq!(t.cells()[1], [0, 0, 0, 0]);
        assert_eq!(t.cells()[0], [2, 0, 0, 2]);
    }

    #[test]
    fn mismatched_index_set_is_rejected() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let grid = WindowGrid::from_trees(build_dyadic_tree(&x, 1), build_dyadic_tree(&x, 1));
        let missing = strat_of(vec![vec![0, 1, 2]], 4);
        assert!(matches!(
            tabulate_window(&grid, &root(), &missing),
            Err(Error::StratificationMismatch(_))
        ));
        let dup = strat_of(vec![vec![0, 1], vec![1, 2, 3]], 4);
        assert!(tabulate_window(&grid, &root(), &dup).is_err());
        // window (1,1)/(0,0) holds samples 0 and 1 only
        let w = Window {
            l1: 1,
            pos_i: 0,
            l2: 1,
            pos_j: 0,
        };
        let grid2 = WindowGrid::from_trees(build_dyadic_tree(&x, 2), build_dyadic_tree(&x, 2));
        assert!(tabulate_window(&grid2, &w, &strat_of(vec![vec![0, 2]], 4)).is_err());
        assert!(tabulate_window(&grid2, &w, &strat_of(vec![vec![0, 1]], 4)).is_ok());
    }
}
