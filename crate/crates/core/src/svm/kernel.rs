use std::collections::HashMap;
use std::sync::Arc;

use crate::features::FeatureVector;

/// `(x·y + 1)^d`; for binary vectors `x·y` is the intersection size.
pub fn polynomial_kernel(x: &FeatureVector, y: &FeatureVector, degree: u32) -> f64 {
    ((x.dot(y) + 1) as f64).powi(degree as i32)
}

/// Kernel rows over a fixed training set, computed on demand and kept in a
/// bounded least-recently-used cache keyed by example index.
pub(crate) struct KernelCache<'a> {
    vectors: &'a [&'a FeatureVector],
    degree: u32,
    capacity: usize,
    rows: HashMap<usize, (u64, Arc<[f64]>)>,
    clock: u64,
    /// Scratch marker over feature ids, sized to the largest id present.
    marker: Vec<bool>,
    diagonal: Vec<f64>,
}

impl<'a> KernelCache<'a> {
    pub fn new(vectors: &'a [&'a FeatureVector], degree: u32, cache_bytes: usize) -> Self {
        let l = vectors.len().max(1);
        let capacity = (cache_bytes / (l * std::mem::size_of::<f64>())).max(2);
        let dims = vectors
            .iter()
            .flat_map(|v| v.ids().last())
            .max()
            .map_or(0, |&m| m as usize + 1);
        let diagonal = vectors
            .iter()
            .map(|v| ((v.len() + 1) as f64).powi(degree as i32))
            .collect();
        Self {
            vectors,
            degree,
            capacity,
            rows: HashMap::new(),
            clock: 0,
            marker: vec![false; dims],
            diagonal,
        }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn row(&mut self, i: usize) -> Arc<[f64]> {
        self.clock += 1;
        let clock = self.clock;
        if let Some((stamp, row)) = self.rows.get_mut(&i) {
            *stamp = clock;
            return Arc::clone(row);
        }
        let row = self.compute_row(i);
        if self.rows.len() >= self.capacity {
            let oldest = self
                .rows
                .iter()
                .min_by_key(|(_, (stamp, _))| *stamp)
                .map(|(&k, _)| k)
                .expect("cache is non-empty");
            self.rows.remove(&oldest);
        }
        self.rows.insert(i, (clock, Arc::clone(&row)));
        row
    }

    fn compute_row(&mut self, i: usize) -> Arc<[f64]> {
        let xi = self.vectors[i];
        for &f in xi.ids() {
            self.marker[f as usize] = true;
        }
        let degree = self.degree as i32;
        let row: Arc<[f64]> = self
            .vectors
            .iter()
            .map(|xk| {
                let shared = xk.ids().iter().filter(|&&f| self.marker[f as usize]).count();
                ((shared + 1) as f64).powi(degree)
            })
            .collect();
        for &f in xi.ids() {
            self.marker[f as usize] = false;
        }
        row
    }

    #[cfg(test)]
    pub fn cached_rows(&self) -> usize {
        self.rows.len()
    }
}
