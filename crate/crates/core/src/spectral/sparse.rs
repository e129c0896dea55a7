/// Compressed-row nonnegative matrix. Column indices within a row are sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    size: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; zero values are dropped and
    /// duplicates are summed.
    pub fn from_triplets(size: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.retain(|&(_, _, v)| v != 0.0);
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_start = vec![0; size + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < size && c < size, "entry ({r},{c}) outside {size}x{size}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_start[r + 1] += 1;
            cols.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for r in 0..size {
            row_start[r + 1] += row_start[r];
        }
        Self { size, row_start, cols, values }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let size = rows.len();
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)))
            .collect();
        Self::from_triplets(size, entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzero entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_start[r]..self.row_start[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_start[r]..self.row_start[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(i) => self.values[span.start + i],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.size).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.size, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.size]; self.size];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }

    /// `M x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// `xᵀ M`
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (r, c, v) in self.triplets() {
            out[c] += x[r] * v;
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.triplets().all(|(r, c, v)| (self.get(c, r) - v).abs() <= tol)
    }

    /// Dense matrix power, for small verification work.
    pub fn dense_pow(&self, k: u32) -> Vec<Vec<f64>> {
        let n = self.size;
        let base = self.to_dense();
        let mut acc: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..k {
            acc = dense_mul(&acc, &base);
        }
        acc
    }
}

pub(crate) fn dense_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}
