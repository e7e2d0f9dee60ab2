use serde::{Deserialize, Serialize};

/// Address of a cell inside a [`CellComplex`]: dimension plus a dense index
/// within that dimension. Indices are the matrix addresses used by the
/// homology engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub dim: usize,
    pub idx: usize,
}

impl CellId {
    pub fn new(dim: usize, idx: usize) -> Self {
        CellId { dim, idx }
    }
}

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.dim, self.idx)
    }
}

/// A borrowed view of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell<'a> {
    pub id: CellId,
    pub label: Option<&'a str>,
}

/// Boundary data of one dimension, stored CSR-style: the boundary chain of
/// cell `i` occupies `faces[offsets[i]..offsets[i+1]]` (face indices into the
/// dimension below) with matching `coeffs`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct DimData {
    count: usize,
    offsets: Vec<usize>,
    faces: Vec<u32>,
    coeffs: Vec<i64>,
    /// Empty when no cell of this dimension is labeled.
    labels: Vec<Option<String>>,
}

impl DimData {
    fn new() -> Self {
        DimData {
            count: 0,
            offsets: vec![0],
            faces: Vec::new(),
            coeffs: Vec::new(),
            labels: Vec::new(),
        }
    }
}

/// A finite graded CW complex with integer incidence coefficients.
///
/// Immutable after construction; all operations produce new complexes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellComplex {
    dims: Vec<DimData>,
}

impl CellComplex {
    /// The empty complex.
    pub fn empty() -> Self {
        CellComplex::default()
    }

    /// A single unlabeled vertex.
    pub fn point() -> Self {
        let mut b = ComplexBuilder::new();
        b.add_cell(0, &[], None);
        b.build()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.iter().all(|d| d.count == 0)
    }

    /// Top dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        (0..self.dims.len()).rev().find(|&d| self.dims[d].count > 0)
    }

    /// Number of cells of dimension `d`.
    pub fn cell_count(&self, d: usize) -> usize {
        self.dims.get(d).map_or(0, |dd| dd.count)
    }

    /// Cell counts for dimensions `0..=dim`.
    pub fn cell_counts(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.count).collect()
    }

    /// Total number of cells.
    pub fn total_cells(&self) -> usize {
        self.dims.iter().map(|d| d.count).sum()
    }

    /// Boundary chain of a cell, iterating `(face index, coefficient)`.
    /// Vertices (and out-of-range ids) yield nothing.
    pub fn boundary_of(&self, id: CellId) -> impl Iterator<Item = (usize, i64)> + '_ {
        let (dd, lo, hi) = match self.dims.get(id.dim) {
            Some(dd) if id.dim > 0 && id.idx < dd.count => {
                (dd, dd.offsets[id.idx], dd.offsets[id.idx + 1])
            }
            Some(dd) => (dd, 0, 0),
            None => (&EMPTY_DIM, 0, 0),
        };
        dd.faces[lo..hi]
            .iter()
            .zip(&dd.coeffs[lo..hi])
            .map(|(&f, &c)| (f as usize, c))
    }

    pub fn label(&self, id: CellId) -> Option<&str> {
        self.dims
            .get(id.dim)?
            .labels
            .get(id.idx)
            .and_then(|l| l.as_deref())
    }

    /// Iterate the cells of dimension `d`.
    pub fn cells(&self, d: usize) -> impl Iterator<Item = Cell<'_>> + '_ {
        let count = self.cell_count(d);
        (0..count).map(move |idx| Cell {
            id: CellId::new(d, idx),
            label: self.label(CellId::new(d, idx)),
        })
    }

    /// Alternating sum of cell counts by dimension.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(d, dd)| if d % 2 == 0 { dd.count as i64 } else { -(dd.count as i64) })
            .sum()
    }

    /// Checks the chain-complex invariants and reports every violation.
    ///
    /// Hard violations (`is_valid` turns false): a boundary entry pointing at
    /// a nonexistent cell of the dimension below, and a cell whose composed
    /// boundary is nonzero. An empty dimension strictly below a populated one
    /// is reported as informational only — CW models like the one-vertex,
    /// one-2-cell sphere are legitimate.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let mut dangling = false;
        for d in 1..self.dims.len() {
            let below = self.cell_count(d - 1);
            for idx in 0..self.cell_count(d) {
                let id = CellId::new(d, idx);
                for (face, _) in self.boundary_of(id) {
                    if face >= below {
                        issues.push(ValidationIssue::DanglingFace { cell: id, face });
                        dangling = true;
                    }
                }
            }
        }
        if !dangling {
            for d in 2..self.dims.len() {
                let below2 = self.cell_count(d - 2);
                let mut acc: Vec<i64> = vec![0; below2];
                for idx in 0..self.cell_count(d) {
                    let id = CellId::new(d, idx);
                    let mut touched = Vec::new();
                    for (face, c) in self.boundary_of(id) {
                        for (f2, c2) in self.boundary_of(CellId::new(d - 1, face)) {
                            if acc[f2] == 0 {
                                touched.push(f2);
                            }
                            acc[f2] += c * c2;
                        }
                    }
                    for f2 in touched {
                        if acc[f2] != 0 {
                            issues.push(ValidationIssue::BoundaryNotSquareZero {
                                cell: id,
                                face: CellId::new(d - 2, f2),
                                coefficient: acc[f2],
                            });
                        }
                        acc[f2] = 0;
                    }
                }
            }
        }
        if let Some(top) = self.dim() {
            for d in 0..top {
                if self.cell_count(d) == 0 {
                    issues.push(ValidationIssue::DimensionGap { dim: d });
                }
            }
        }
        ValidationReport { issues }
    }
}

static EMPTY_DIM: DimData = DimData {
    count: 0,
    offsets: Vec::new(),
    faces: Vec::new(),
    coeffs: Vec::new(),
    labels: Vec::new(),
};

/// One violated (or notable) invariant found by [`CellComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ValidationIssue {
    /// A boundary entry references a cell index that does not exist.
    DanglingFace { cell: CellId, face: usize },
    /// The composed boundary of `cell` has a nonzero coefficient on `face`.
    BoundaryNotSquareZero {
        cell: CellId,
        face: CellId,
        coefficient: i64,
    },
    /// A dimension strictly below the top dimension holds no cells.
    /// Informational: legal for CW incidence data, impossible for simplicial.
    DimensionGap { dim: usize },
}

impl ValidationIssue {
    pub fn is_error(&self) -> bool {
        !matches!(self, ValidationIssue::DimensionGap { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    /// True when no hard invariant is violated.
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(|i| !i.is_error())
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for issue in &self.issues {
            match issue {
                ValidationIssue::DanglingFace { cell, face } => {
                    writeln!(f, "dangling face: cell {cell} references missing face index {face}")?
                }
                ValidationIssue::BoundaryNotSquareZero { cell, face, coefficient } => writeln!(
                    f,
                    "boundary squared nonzero: cell {cell} hits {face} with coefficient {coefficient}"
                )?,
                ValidationIssue::DimensionGap { dim } => {
                    writeln!(f, "dimension gap: no cells of dimension {dim}")?
                }
            }
        }
        Ok(())
    }
}

/// Incremental builder for [`CellComplex`].
///
/// Cells may be added in any dimension order; faces are referenced by their
/// dense index within the dimension below. The builder does not check face
/// references — `validate` on the built complex does.
#[derive(Debug, Default, Clone)]
pub struct ComplexBuilder {
    dims: Vec<DimData>,
}

impl ComplexBuilder {
    pub fn new() -> Self {
        ComplexBuilder::default()
    }

    fn dim_mut(&mut self, d: usize) -> &mut DimData {
        while self.dims.len() <= d {
            self.dims.push(DimData::new());
        }
        &mut self.dims[d]
    }

    /// Adds a cell of dimension `d` with the given boundary chain and returns
    /// its index within that dimension.
    pub fn add_cell(
        &mut self,
        d: usize,
        boundary: &[(usize, i64)],
        label: Option<String>,
    ) -> usize {
        let dd = self.dim_mut(d);
        let idx = dd.count;
        for &(face, coeff) in boundary {
            dd.faces.push(face as u32);
            dd.coeffs.push(coeff);
        }
        dd.offsets.push(dd.faces.len());
        dd.labels.push(label);
        dd.count += 1;
        idx
    }

    /// Number of cells of dimension `d` added so far.
    pub fn cell_count(&self, d: usize) -> usize {
        self.dims.get(d).map_or(0, |dd| dd.count)
    }

    pub fn build(self) -> CellComplex {
        let mut dims = self.dims;
        while dims.last().is_some_and(|dd| dd.count == 0) {
            dims.pop();
        }
        for dd in &mut dims {
            if dd.labels.iter().all(|l| l.is_none()) {
                dd.labels.clear();
            }
        }
        CellComplex { dims }
    }
}
