//! Compressed sparse row matrices.
//!
//! FE matrices are built on a fixed pattern derived from the DOF
//! connectivity, then filled by adding element blocks in cell order, so the
//! floating-point summation order is the same on every run.

use std::collections::BTreeSet;

use crate::basis::FESpace;
use crate::error::{FemError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries after sorting by (row, column).
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triplets.to_vec();
        if let Some(&(r, c, _)) = t.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(FemError::InvalidArgument(format!(
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            )));
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Zero matrix with the given sorted column sets per row.
    pub fn from_rows(ncols: usize, rows: &[Vec<usize>]) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for r in rows {
            debug_assert!(r.windows(2).all(|w| w[0] < w[1]));
            col_idx.extend_from_slice(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        CsrMatrix {
            nrows: rows.len(),
            ncols,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Zero matrix coupling every DOF of `rows` with every DOF of `cols`
    /// that shares a cell. Both spaces must live on the same mesh.
    pub fn pattern(rows: &FESpace, cols: &FESpace) -> Self {
        let (mr, mc) = (rows.components(), cols.components());
        let mut node_cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); rows.num_nodes()];
        for c in 0..rows.mesh().num_cells() {
            let cn = cols.cell_nodes(c);
            for &r in rows.cell_nodes(c) {
                node_cols[r].extend(cn.iter().copied());
            }
        }
        let mut row_ptr = Vec::with_capacity(rows.num_dofs() + 1);
        row_ptr.push(0);
        let total: usize = node_cols.iter().map(|s| s.len()).sum::<usize>() * mr * mc;
        let mut col_idx = Vec::with_capacity(total);
        for set in &node_cols {
            for _ in 0..mr {
                for &n in set {
                    col_idx.extend((0..mc).map(|k| n * mc + k));
                }
                row_ptr.push(col_idx.len());
            }
        }
        let nnz = col_idx.len();
        CsrMatrix {
            nrows: rows.num_dofs(),
            ncols: cols.num_dofs(),
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_ptr[i];
        self.col_idx[start..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|p| start + p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Adds to an existing pattern entry; panics if (i, j) is not stored.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.values[p] += v;
    }

    /// Scatters a dense element block (row-major, `rows.len() x cols.len()`).
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &[f64]) {
        let nc = cols.len();
        for (a, &i) in rows.iter().enumerate() {
            let start = self.row_ptr[i];
            let row_cols = &self.col_idx[start..self.row_ptr[i + 1]];
            for (b, &j) in cols.iter().enumerate() {
                let v = block[a * nc + b];
                if v != 0.0 {
                    let p = row_cols
                        .binary_search(&j)
                        .unwrap_or_else(|_| panic!("entry ({i}, {j}) outside sparsity pattern"));
                    self.values[start + p] += v;
                }
            }
        }
    }

    pub fn clear_values(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut count = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            count[c + 1] += 1;
        }
        for j in 0..self.ncols {
            count[j + 1] += count[j];
        }
        let row_ptr = count.clone();
        let mut next = count;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                col_idx[next[j]] = i;
                values[next[j]] = self.values[p];
                next[j] += 1;
            }
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |a_ij - a_ji| over stored entries.
    pub fn symmetry_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                err = err.max((v - self.get(j, i)).abs());
            }
        }
        err
    }

    /// `alpha * self + beta * other`, pattern union.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(col_idx.capacity());
        for i in 0..self.nrows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let ja = ca.get(p).copied().unwrap_or(usize::MAX);
                let jb = cb.get(q).copied().unwrap_or(usize::MAX);
                if ja == jb {
                    col_idx.push(ja);
                    values.push(alpha * va[p] + beta * vb[q]);
                    p += 1;
                    q += 1;
                } else if ja < jb {
                    col_idx.push(ja);
                    values.push(alpha * va[p]);
                    p += 1;
                } else {
                    col_idx.push(jb);
                    values.push(beta * vb[q]);
                    q += 1;
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles a block matrix; `None` blocks are zero. Block sizes are taken
    /// from the first present block in each block row/column.
    pub fn block(blocks: &[Vec<Option<&CsrMatrix>>]) -> Result<CsrMatrix> {
        let nbr = blocks.len();
        let nbc = blocks.first().map_or(0, Vec::len);
        let mut heights = vec![None; nbr];
        let mut widths = vec![None; nbc];
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != nbc {
                return Err(FemError::InvalidArgument("ragged block layout".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if let Some(m) = b {
                    for (slot, n) in [(&mut heights[bi], m.nrows), (&mut widths[bj], m.ncols)] {
                        match slot {
                            Some(prev) if *prev != n => {
                                return Err(FemError::InvalidArgument("block size mismatch".into()))
                            }
                            _ => *slot = Some(n),
                        }
                    }
                }
            }
        }
        let heights: Vec<usize> = heights.into_iter().map(|h| h.unwrap_or(0)).collect();
        let widths: Vec<usize> = widths.into_iter().map(|w| w.unwrap_or(0)).collect();
        let col_off: Vec<usize> = widths.iter().scan(0, |s, w| {
            let o = *s;
            *s += w;
            Some(o)
        }).collect();
        let ncols = widths.iter().sum();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (bi, row) in blocks.iter().enumerate() {
            for i in 0..heights[bi] {
                for (bj, b) in row.iter().enumerate() {
                    if let Some(m) = b {
                        let (c, v) = m.row(i);
                        col_idx.extend(c.iter().map(|j| j + col_off[bj]));
                        values.extend_from_slice(v);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Ok(CsrMatrix {
            nrows: heights.iter().sum(),
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Symmetric elimination of prescribed values `(dof, g)`: free rows move
    /// `A_ij g_j` to the right-hand side, constrained rows and columns are
    /// zeroed with a unit diagonal and `rhs_i = g_i`.
    pub fn eliminate(&mut self, rhs: &mut [f64], constraints: &[(usize, f64)]) -> Result<()> {
        if self.nrows != self.ncols || rhs.len() != self.nrows {
            return Err(FemError::InvalidArgument("elimination needs a square system".into()));
        }
        let mut fixed: Vec<Option<f64>> = vec![None; self.nrows];
        for &(d, g) in constraints {
            fixed[d] = Some(g);
        }
        for i in 0..self.nrows {
            let mut has_diag = false;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                match (fixed[i], fixed[j]) {
                    (None, None) => {}
                    (None, Some(g)) => {
                        rhs[i] -= self.values[p] * g;
                        self.values[p] = 0.0;
                    }
                    (Some(_), _) => {
                        if i == j {
                            has_diag = true;
                            self.values[p] = 1.0;
                        } else {
                            self.values[p] = 0.0;
                        }
                    }
                }
            }
            if let Some(g) = fixed[i] {
                if !has_diag {
                    return Err(FemError::InvalidArgument(format!("row {i} has no stored diagonal")));
                }
                rhs[i] = g;
            }
        }
        Ok(())
    }

    /// Dense copy, row-major (tests and tiny systems).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                row[j] += x;
            }
        }
        d
    }

    /// Triplets of the stored entries, optionally restricted to the lower triangle.
    pub(crate) fn triplets(&self, lower_only: bool) -> Vec<faer::sparse::Triplet<usize, usize, f64>> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if !lower_only || j <= i {
                    out.push(faer::sparse::Triplet::new(i, j, x));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(2, 3, &[(1, 2, 1.0), (0, 0, 2.0), (1, 2, 3.0), (0, 1, -1.0)]).unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(1, 2), 4.0);
        assert_eq!(m.to_dense(), vec![vec![2.0, -1.0, 0.0], vec![0.0, 0.0, 4.0]]);
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn block_layout() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_triplets(1, 2, &[(0, 0, 3.0), (0, 1, 4.0)]).unwrap();
        let bt = b.transpose();
        let k = CsrMatrix::block(&[vec![Some(&a), Some(&bt)], vec![Some(&b), None]]).unwrap();
        assert_eq!(
            k.to_dense(),
            vec![vec![1.0, 0.0, 3.0], vec![0.0, 1.0, 4.0], vec![3.0, 4.0, 0.0]]
        );
        assert_eq!(k.symmetry_error(), 0.0);
    }

    #[test]
    fn linear_combination_merges_patterns() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        let b = CsrMatrix::from_triplets(2, 2, &[(0, 1, 5.0), (1, 0, 1.0)]).unwrap();
        let c = a.linear_combination(2.0, &b, -1.0);
        assert_eq!(c.to_dense(), vec![vec![2.0, -5.0], vec![3.0, 0.0]]);
    }

    #[test]
    fn elimination_keeps_symmetry_and_free_equations() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0), (1, 2, -1.0), (2, 1, -1.0), (2, 2, 2.0)],
        )
        .unwrap();
        let mut k = a.clone();
        let mut rhs = vec![0.0, 1.0, 0.0];
        k.eliminate(&mut rhs, &[(0, 1.0), (2, 3.0)]).unwrap();
        assert_eq!(k.symmetry_error(), 0.0);
        assert_eq!(rhs, vec![1.0, 5.0, 3.0]);
        // x1 = 5 / 2 satisfies the original middle row with x0 = 1, x2 = 3
        assert_eq!(k.to_dense()[1], vec![0.0, 2.0, 0.0]);
    }

    proptest! {
        #[test]
        fn transpose_and_matvec_agree_with_dense(
            entries in prop::collection::vec((0usize..6, 0usize..5, -10.0f64..10.0), 0..40),
            x in prop::collection::vec(-1.0f64..1.0, 5),
        ) {
            let m = CsrMatrix::from_triplets(6, 5, &entries).unwrap();
            let d = m.to_dense();
            let y = m.matvec(&x);
            for i in 0..6 {
                let want: f64 = (0..5).map(|j| d[i][j] * x[j]).sum();
                prop_assert!((y[i] - want).abs() < 1e-12);
            }
            let t = m.transpose();
            for i in 0..6 {
                for j in 0..5 {
                    prop_assert_eq!(t.get(j, i), d[i][j]);
                }
            }
        }
    }
}
