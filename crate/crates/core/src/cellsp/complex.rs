use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// A finite abstract simplicial complex on vertices `0..m`.
///
/// Cells are stored sorted by dimension, then lexicographically, so vertices
/// come first and vertex `v` has cell index `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    vertex_count: usize,
    cells: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    faces: Vec<Vec<(usize, i64)>>,
    cofaces: Vec<Vec<(usize, i64)>>,
}

/// Validates and builds a complex. Each input tuple is a set of vertices;
/// tuples are sorted on entry.
pub fn build_complex(vertex_count: usize, cells: &[Vec<usize>]) -> Result<CellComplex> {
    let mut seen = BTreeSet::new();
    let mut sorted = Vec::with_capacity(cells.len());
    for c in cells {
        if c.is_empty() {
            return Err(Error::InvalidCell(c.clone(), "empty cell".into()));
        }
        let mut s = c.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidCell(c.clone(), "repeated vertex".into()));
        }
        if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
            return Err(Error::InvalidCell(c.clone(), format!("vertex {v} out of range 0..{vertex_count}")));
        }
        if !seen.insert(s.clone()) {
            return Err(Error::DuplicateCell(s));
        }
        sorted.push(s);
    }
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let index: HashMap<Vec<usize>, usize> = sorted.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut faces = vec![Vec::new(); sorted.len()];
    let mut cofaces = vec![Vec::new(); sorted.len()];
    for (t, cell) in sorted.iter().enumerate() {
        if cell.len() < 2 {
            continue;
        }
        for i in 0..cell.len() {
            let mut face = cell.clone();
            face.remove(i);
            let s = *index.get(&face).ok_or_else(|| Error::MissingFace { cell: cell.clone(), face: face.clone() })?;
            let sign = if i % 2 == 0 { 1 } else { -1 };
            faces[t].push((s, sign));
            cofaces[s].push((t, sign));
        }
    }
    for v in 0..vertex_count {
        if !index.contains_key(&vec![v]) {
            return Err(Error::InvalidCell(vec![v], "vertex has no cell".into()));
        }
    }
    for f in faces.iter_mut().chain(cofaces.iter_mut()) {
        f.sort_unstable();
    }
    let x = CellComplex { vertex_count, cells: sorted, index, faces, cofaces };
    x.check_boundary_squares()?;
    Ok(x)
}

impl CellComplex {
    fn check_boundary_squares(&self) -> Result<()> {
        for u in 0..self.cells.len() {
            let mut sums: HashMap<usize, i64> = HashMap::new();
            for &(t, a) in &self.faces[u] {
                for &(s, b) in &self.faces[t] {
                    *sums.entry(s).or_default() += a * b;
                }
            }
            if sums.values().any(|&v| v != 0) {
                return Err(Error::InvalidCell(self.cells[u].clone(), "incidence numbers do not square to zero".into()));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &[usize] {
        &self.cells[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.cells[i].len() - 1
    }

    pub fn dimension(&self) -> Option<usize> {
        self.cells.last().map(|c| c.len() - 1)
    }

    pub fn index_of(&self, cell: &[usize]) -> Option<usize> {
        let mut s = cell.to_vec();
        s.sort_unstable();
        self.index.get(&s).copied()
    }

    /// Codimension-1 faces of cell `i` with incidence numbers `[face : i]`.
    pub fn faces(&self, i: usize) -> &[(usize, i64)] {
        &self.faces[i]
    }

    /// Codimension-1 cofaces of cell `i` with incidence numbers `[i : coface]`.
    pub fn cofaces(&self, i: usize) -> &[(usize, i64)] {
        &self.cofaces[i]
    }

    /// `[s : t]` when `s` is a codimension-1 face of `t`.
    pub fn incidence(&self, s: usize, t: usize) -> Option<i64> {
        self.faces[t].iter().find(|&&(f, _)| f == s).map(|&(_, sign)| sign)
    }

    /// Whether cell `s` is a (not necessarily proper) face of cell `t`.
    pub fn is_face(&self, s: usize, t: usize) -> bool {
        let (a, b) = (&self.cells[s], &self.cells[t]);
        a.len() <= b.len() && a.iter().all(|v| b.binary_search(v).is_ok())
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.cells.len()).filter(move |&i| self.cells[i].len() == d + 1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| if c.len() % 2 == 1 { 1 } else { -1 }).sum()
    }
}

/// The boundary of the 3-simplex on vertices 0..4.
pub fn tetrahedron_boundary() -> CellComplex {
    let mut cells = Vec::new();
    for mask in 1u32..16 {
        if mask.count_ones() <= 3 {
            cells.push((0..4).filter(|v| mask & (1 << v) != 0).collect());
        }
    }
    build_complex(4, &cells).expect("tetrahedron boundary is a complex")
}

/// A circle with `n >= 3` vertices and edges `(i, i + 1 mod n)`.
pub fn circle(n: usize) -> Result<CellComplex> {
    if n < 3 {
        return Err(Error::InvalidParameters(format!("a simplicial circle needs 3 vertices, got {n}")));
    }
    let mut cells: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    cells.extend((0..n).map(|i| vec![i, (i + 1) % n]));
    build_complex(n, &cells)
}

/// Disjoint circles with the given vertex counts, numbered consecutively.
pub fn disjoint_circles(sizes: &[usize]) -> Result<CellComplex> {
    let mut cells = Vec::new();
    let mut base = 0;
    for &n in sizes {
        if n < 3 {
            return Err(Error::InvalidParameters(format!("a simplicial circle needs 3 vertices, got {n}")));
        }
        cells.extend((0..n).map(|v| vec![base + v]));
        cells.extend((0..n).map(|i| vec![base + i, base + (i + 1) % n]));
        base += n;
    }
    build_complex(base, &cells)
}
