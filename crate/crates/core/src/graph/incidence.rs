use crate::error::{Error, Result};

use super::Graph;

/// Node-by-edge incidence matrix with entries in {-1, 0, +1}.
///
/// Column `e` has -1 at the edge's source and +1 at its target. Undirected
/// edges use the stored (lower id first) orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, node: usize, edge: usize) -> i8 {
        self.data[node * self.cols + edge]
    }

    pub fn row(&self, node: usize) -> &[i8] {
        &self.data[node * self.cols..(node + 1) * self.cols]
    }

    /// Elementwise absolute value.
    pub fn abs_view(&self) -> IncidenceMatrix {
        IncidenceMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn column_sum(&self, edge: usize) -> i32 {
        (0..self.rows).map(|r| self.get(r, edge) as i32).sum()
    }
}

pub fn incidence(g: &Graph) -> Result<IncidenceMatrix> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let rows = g.node_count();
    let cols = g.edge_count();
    let mut data = vec![0i8; rows * cols];
    for (id, e) in g.edges().iter().enumerate() {
        data[e.source * cols + id] = -1;
        data[e.target * cols + id] = 1;
    }
    Ok(IncidenceMatrix { rows, cols, data })
}
