use std::collections::VecDeque;

use super::sparse::SparseMatrix;
use super::SpectralError;

/// Transfer matrix of a one-dimensional model: nonnegative weights over a
/// finite symbol set, irreducible as a directed graph.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    matrix: SparseMatrix,
    labels: Vec<String>,
}

/// Vertex and edge potentials. `f64::INFINITY` forbids the vertex/edge.
#[derive(Clone, Debug)]
pub struct Potentials {
    pub vertex: Vec<f64>,
    pub edge: Vec<Vec<f64>>,
}

impl WeightedGraph {
    /// Wraps an already-built matrix after validating it.
    pub fn new(labels: Vec<String>, matrix: SparseMatrix) -> Result<Self, SpectralError> {
        if labels.len() != matrix.size() {
            return Err(SpectralError::NotSquare);
        }
        if matrix.nnz() == 0 {
            return Err(SpectralError::AllZero);
        }
        for (_, _, v) in matrix.triplets() {
            if !v.is_finite() || v < 0.0 {
                return Err(SpectralError::InvalidWeight(v));
            }
        }
        let components = strongly_connected_components(&matrix);
        if components.len() > 1 {
            return Err(SpectralError::ReducibleGraph { components });
        }
        Ok(Self { matrix, labels })
    }

    /// 0/1 transfer matrix from a table of allowed successions.
    pub fn from_constraints(labels: Vec<String>, allowed: &[Vec<bool>]) -> Result<Self, SpectralError> {
        let rows: Vec<Vec<f64>> = allowed
            .iter()
            .map(|row| row.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_weights(labels, &rows)
    }

    pub fn from_weights(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self, SpectralError> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(SpectralError::NotSquare);
        }
        Self::new(labels, SparseMatrix::from_dense(rows))
    }

    /// Weights `exp(-(V(i)/2 + V'(i,j) + V(j)/2))`, infinite potentials give 0.
    pub fn from_potentials(potentials: &Potentials) -> Result<Self, SpectralError> {
        let n = potentials.vertex.len();
        if potentials.edge.len() != n || potentials.edge.iter().any(|r| r.len() != n) {
            return Err(SpectralError::NotSquare);
        }
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let energy = 0.5 * potentials.vertex[i] + potentials.edge[i][j] + 0.5 * potentials.vertex[j];
                if energy.is_nan() {
                    return Err(SpectralError::InvalidWeight(energy));
                }
                rows[i][j] = if energy == f64::INFINITY { 0.0 } else { (-energy).exp() };
            }
        }
        Self::from_weights(index_labels(n), &rows)
    }

    /// Groups `range` consecutive symbols into one state. `window_ok` decides
    /// whether a window of `range + 1` consecutive symbols is consistent with
    /// the constraints; two states `v`, `w` are joined iff they overlap on
    /// `range - 1` symbols and `v₁…v_l w_l` passes `window_ok`.
    pub fn block_symbols<F>(alphabet: usize, range: usize, window_ok: F) -> Result<Self, SpectralError>
    where
        F: Fn(&[usize]) -> bool,
    {
        assert!(range >= 1, "constraint range must be at least 1");
        assert!(alphabet >= 1, "alphabet must be nonempty");
        let windows: Vec<Vec<usize>> = all_words(alphabet, range + 1).filter(|w| window_ok(w)).collect();
        if windows.is_empty() {
            return Err(SpectralError::EmptyModel);
        }
        // a state must be both enterable and leavable
        let mut states: Vec<Vec<usize>> = all_words(alphabet, range)
            .filter(|s| windows.iter().any(|w| &w[..range] == s.as_slice()))
            .filter(|s| windows.iter().any(|w| &w[1..] == s.as_slice()))
            .collect();
        states.sort();
        let index_of = |s: &[usize]| states.binary_search_by(|p| p.as_slice().cmp(s)).ok();
        let mut entries = Vec::new();
        for w in &windows {
            if let (Some(a), Some(b)) = (index_of(&w[..range]), index_of(&w[1..])) {
                entries.push((a, b, 1.0));
            }
        }
        if entries.is_empty() {
            return Err(SpectralError::EmptyModel);
        }
        let labels = states
            .iter()
            .map(|s| s.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(if alphabet > 10 { "," } else { "" }))
            .collect();
        Self::new(labels, SparseMatrix::from_triplets(states.len(), entries))
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.matrix.get(a, b)
    }

    /// True when every weight is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.matrix.triplets().all(|(_, _, v)| v == 1.0)
    }

    /// Parses the plain-text matrix format: first line `n`, then `n` rows of
    /// `n` whitespace-separated nonnegative decimal weights.
    pub fn from_text(text: &str) -> Result<Self, SpectralError> {
        let rows = parse_matrix(text)?;
        Self::from_weights(index_labels(rows.len()), &rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.size());
        for row in self.matrix.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn all_words(alphabet: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = alphabet.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut word = vec![0; len];
        for slot in word.iter_mut().rev() {
            *slot = code % alphabet;
            code /= alphabet;
        }
        word
    })
}

pub(crate) fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, SpectralError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, first) = lines.next().ok_or(SpectralError::Parse { line: 1, msg: "empty input".into() })?;
    let n: usize = first
        .parse()
        .map_err(|_| SpectralError::Parse { line: line_no, msg: format!("expected size, got {first:?}") })?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let (line_no, line) =
            lines.next().ok_or(SpectralError::Parse { line: line_no + 1, msg: "missing matrix row".into() })?;
        let row = line
            .split_whitespace()
            .map(|tok| {
                let v: f64 = tok.parse().map_err(|_| SpectralError::Parse {
                    line: line_no,
                    msg: format!("bad weight {tok:?}"),
                })?;
                if !v.is_finite() || v < 0.0 {
                    return Err(SpectralError::Parse {
                        line: line_no,
                        msg: format!("weight {tok:?} must be finite and nonnegative"),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != n {
            return Err(SpectralError::Parse { line: line_no, msg: format!("expected {n} weights, got {}", row.len()) });
        }
        rows.push(row);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(SpectralError::Parse { line: line_no, msg: "trailing data".into() });
    }
    Ok(rows)
}

/// Strongly connected components of the support graph, each sorted, in order
/// of their smallest vertex.
pub fn strongly_connected_components(matrix: &SparseMatrix) -> Vec<Vec<usize>> {
    let n = matrix.size();
    let transpose = matrix.transpose();
    let mut component = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let fwd = reachable(matrix, start);
        let bwd = reachable(&transpose, start);
        let members: Vec<usize> = (0..n).filter(|&v| fwd[v] && bwd[v]).collect();
        for &v in &members {
            component[v] = out.len();
        }
        out.push(members);
    }
    out
}

fn reachable(matrix: &SparseMatrix, start: usize) -> Vec<bool> {
    let mut seen = vec![false; matrix.size()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for (w, _) in matrix.row(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Restricts `matrix` to each of its strongly connected components that
/// carries at least one edge, so a reducible input can be analysed piecewise.
pub fn decompose(labels: &[String], matrix: &SparseMatrix) -> Vec<WeightedGraph> {
    strongly_connected_components(matrix)
        .into_iter()
        .filter_map(|members| {
            let local = |v: usize| members.binary_search(&v).ok();
            let entries: Vec<_> = members
                .iter()
                .enumerate()
                .flat_map(|(i, &v)| matrix.row(v).filter_map(move |(w, x)| local(w).map(|j| (i, j, x))))
                .collect();
            let sub_labels = members.iter().map(|&v| labels[v].clone()).collect();
            WeightedGraph::new(sub_labels, SparseMatrix::from_triplets(members.len(), entries)).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        index_labels(n)
    }

    #[test]
    fn rejects_all_zero_and_reducible() {
        let zero = WeightedGraph::from_constraints(labels(2), &[vec![false, false], vec![false, false]]);
        assert!(matches!(zero, Err(SpectralError::AllZero)));
        let reducible = WeightedGraph::from_constraints(labels(2), &[vec![true, true], vec![false, true]]);
        match reducible {
            Err(SpectralError::ReducibleGraph { components }) => assert_eq!(components, vec![vec![0], vec![1]]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decomposition_keeps_cyclic_parts() {
        let m = SparseMatrix::from_dense(&[
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let parts = decompose(&labels(3), &m);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].labels(), &["1".to_string(), "2".to_string()]);
    }

    #[test]
    fn fibonacci_and_alternating_are_valid() {
        let fib = WeightedGraph::from_constraints(labels(2), &[vec![true, true], vec![true, false]]).unwrap();
        assert!(fib.is_binary());
        let alt = WeightedGraph::from_constraints(labels(2), &[vec![false, true], vec![true, false]]).unwrap();
        assert_eq!(alt.weight(0, 1), 1.0);
        let single = WeightedGraph::from_constraints(labels(1), &[vec![true]]).unwrap();
        assert_eq!(single.size(), 1);
    }

    #[test]
    fn blocking_unconstrained_binary() {
        let g = WeightedGraph::block_symbols(2, 1, |_| true).unwrap();
        assert_eq!(g.matrix().to_dense(), vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn blocking_no_111_has_four_states() {
        let g = WeightedGraph::block_symbols(2, 2, |w| w.iter().any(|&s| s == 0)).unwrap();
        assert_eq!(g.labels(), &["00", "01", "10", "11"]);
        assert_eq!(g.weight(3, 3), 0.0);
        assert_eq!(g.weight(3, 2), 1.0);
    }

    #[test]
    fn blocking_rejects_empty_model() {
        assert!(matches!(WeightedGraph::block_symbols(2, 1, |_| false), Err(SpectralError::EmptyModel)));
    }

    #[test]
    fn potentials_map_to_weights() {
        let flat = Potentials { vertex: vec![0.0; 2], edge: vec![vec![0.0; 2]; 2] };
        let g = WeightedGraph::from_potentials(&flat).unwrap();
        assert_eq!(g.matrix().to_dense(), vec![vec![1.0; 2]; 2]);

        let forbid = Potentials { vertex: vec![0.0, 1.0], edge: vec![vec![0.0, 0.5], vec![0.5, f64::INFINITY]] };
        let g = WeightedGraph::from_potentials(&forbid).unwrap();
        assert_eq!(g.weight(1, 1), 0.0);
        assert!((g.weight(0, 1) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn text_format() {
        let g = WeightedGraph::from_text("2\n1 1\n1 0\n").unwrap();
        assert_eq!(g.weight(1, 1), 0.0);
        assert_eq!(WeightedGraph::from_text(&g.to_text()).unwrap().matrix(), g.matrix());
        assert!(matches!(WeightedGraph::from_text("2\n1 inf\n1 0\n"), Err(SpectralError::Parse { line: 2, .. })));
        assert!(matches!(WeightedGraph::from_text("2\n1 1\n"), Err(SpectralError::Parse { .. })));
        assert!(matches!(WeightedGraph::from_text("2\n1 -1\n1 0\n"), Err(SpectralError::Parse { .. })));
    }
}
