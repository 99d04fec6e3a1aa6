//! Symmetric profile (skyline) matrix with in-place LDLᵀ factorization.
//!
//! Column j stores rows `first[j]..=j` contiguously, the diagonal last.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Skyline {
    first: Vec<usize>,
    /// Start of each column in `values`; `ptr[n]` is the total length.
    ptr: Vec<usize>,
    values: Vec<f64>,
    factored: bool,
}

impl Skyline {
    /// `first[j]` is the smallest row coupled to column j (≤ j).
    pub fn new(first: Vec<usize>) -> Self {
        let mut ptr = Vec::with_capacity(first.len() + 1);
        let mut total = 0;
        for (j, f) in first.iter().enumerate() {
            assert!(*f <= j, "profile row {f} exceeds column {j}");
            ptr.push(total);
            total += j - f + 1;
        }
        ptr.push(total);
        Self { first, ptr, values: vec![0.0; total], factored: false }
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn profile_len(&self) -> usize {
        self.values.len()
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
        self.factored = false;
    }

    /// Overwrites the values with those of a matrix sharing the profile.
    pub fn copy_values_from(&mut self, other: &Skyline) {
        debug_assert_eq!(self.ptr, other.ptr);
        self.values.copy_from_slice(&other.values);
        self.factored = other.factored;
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        debug_assert!(r >= self.first[c], "entry ({r}, {c}) outside the profile");
        self.ptr[c] + r - self.first[c]
    }

    /// Adds `v` to entry (i, j) and, implicitly, (j, i).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        if r < self.first[c] {
            0.0
        } else {
            self.values[self.index(r, c)]
        }
    }

    /// y = A·x for the unfactored matrix.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert!(!self.factored);
        let n = self.dim();
        let mut y = vec![0.0; n];
        for j in 0..n {
            let col = &self.values[self.ptr[j]..self.ptr[j + 1]];
            let f = self.first[j];
            let (off, diag) = col.split_at(col.len() - 1);
            y[j] += diag[0] * x[j];
            for (k, a) in off.iter().enumerate() {
                y[f + k] += a * x[j];
                y[j] += a * x[f + k];
            }
        }
        y
    }

    /// Replaces the matrix by its LDLᵀ factors. Fails on a non-positive pivot.
    pub fn factor(&mut self) -> Result<()> {
        let n = self.dim();
        for j in 0..n {
            let fj = self.first[j];
            let pj = self.ptr[j];
            let orig = self.values[pj + j - fj];
            // Reduce the off-diagonal entries of column j.
            for i in (fj + 1)..j {
                let fi = self.first[i];
                let m = fi.max(fj);
                if m >= i {
                    continue;
                }
                let pi = self.ptr[i];
                let (head, tail) = self.values.split_at_mut(pj);
                let li = &head[pi + m - fi..pi + i - fi];
                let gj = &tail[m - fj..i - fj];
                let s: f64 = li.iter().zip(gj).map(|(a, b)| a * b).sum();
                tail[i - fj] -= s;
            }
            let mut d = orig;
            for i in fj..j {
                let di = self.values[self.ptr[i + 1] - 1];
                let g = self.values[pj + i - fj];
                let l = g / di;
                d -= l * g;
                self.values[pj + i - fj] = l;
            }
            if !(d > 1e-13 * orig.abs()) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite(j));
            }
            self.values[pj + j - fj] = d;
        }
        self.factored = true;
        Ok(())
    }

    /// Solves A·x = b in place using the factors.
    pub fn solve(&self, b: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        let n = self.dim();
        for j in 0..n {
            let f = self.first[j];
            let col = &self.values[self.ptr[j]..self.ptr[j + 1] - 1];
            let s: f64 = col.iter().zip(&b[f..j]).map(|(l, x)| l * x).sum();
            b[j] -= s;
        }
        for j in 0..n {
            b[j] /= self.values[self.ptr[j + 1] - 1];
        }
        for j in (0..n).rev() {
            let f = self.first[j];
            let xj = b[j];
            let col = &self.values[self.ptr[j]..self.ptr[j + 1] - 1];
            for (l, x) in col.iter().zip(&mut b[f..j]) {
                *x -= l * xj;
            }
        }
    }
}
