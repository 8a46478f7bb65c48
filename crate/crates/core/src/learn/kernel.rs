use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::LearnError;

/// `|x ∧ y| / |x ∨ y|`, with two all-zero vectors counting as identical.
pub fn tanimoto(x: &FixedBitSet, y: &FixedBitSet) -> Result<f64, LearnError> {
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch(x.len(), y.len()));
    }
    Ok(tanimoto_unchecked(x, y))
}

fn tanimoto_unchecked(x: &FixedBitSet, y: &FixedBitSet) -> f64 {
    let union = x.union_count(y);
    if union == 0 {
        1.0
    } else {
        x.intersection_count(y) as f64 / union as f64
    }
}

/// Dense row-major kernel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    /// Builds from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, LearnError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(LearnError::LengthMismatch(bad.len(), cols));
        }
        Ok(KernelMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Tanimoto Gram matrix of `fps`.
    pub fn gram(fps: &[FixedBitSet]) -> Result<Self, LearnError> {
        Self::cross(fps, fps)
    }

    /// Tanimoto values between every row of `a` and every row of `b`.
    pub fn cross(a: &[FixedBitSet], b: &[FixedBitSet]) -> Result<Self, LearnError> {
        let width = a.first().or(b.first()).map_or(0, FixedBitSet::len);
        if let Some(bad) = a.iter().chain(b).find(|x| x.len() != width) {
            return Err(LearnError::LengthMismatch(bad.len(), width));
        }
        let data: Vec<f64> = a
            .par_iter()
            .flat_map_iter(|x| b.iter().map(move |y| tanimoto_unchecked(x, y)))
            .collect();
        Ok(KernelMatrix {
            rows: a.len(),
            cols: b.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}
