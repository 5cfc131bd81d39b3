/// A prefix `(y^(0), ..., y^(d))` of an `M`-dimensional process.
///
/// Stages are stored contiguously. They can be appended and, inside the
/// estimators, popped again when a recursive branch finishes; a stored stage is
/// never rewritten.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    data: Vec<f64>,
}

impl Trajectory {
    /// Empty trajectory for a process with stage dimension `dim`.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "stage dimension must be positive");
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, stages: usize) -> Self {
        assert!(dim > 0, "stage dimension must be positive");
        Self {
            dim,
            data: Vec::with_capacity(dim * stages),
        }
    }

    /// Builds a trajectory from a list of stages, all of length `dim`.
    pub fn from_stages<S: AsRef<[f64]>>(dim: usize, stages: &[S]) -> Self {
        let mut t = Self::with_capacity(dim, stages.len());
        for s in stages {
            t.push_stage(s.as_ref());
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stages.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn stage(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last(&self) -> Option<&[f64]> {
        if self.is_empty() {
            None
        } else {
            Some(self.stage(self.len() - 1))
        }
    }

    pub fn stages(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn push_stage(&mut self, stage: &[f64]) {
        assert_eq!(stage.len(), self.dim, "stage dimension mismatch");
        self.data.extend_from_slice(stage);
    }

    /// Drops every stage after the first `len`.
    pub(crate) fn truncate(&mut self, len: usize) {
        self.data.truncate(len * self.dim);
    }
}
