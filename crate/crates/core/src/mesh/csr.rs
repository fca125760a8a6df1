/// Compressed row storage of integer adjacency lists.
#[derive(Clone, Debug)]
pub struct Csr {
    offsets: Vec<usize>,
    data: Vec<usize>,
}

impl Default for Csr {
    fn default() -> Self {
        Csr {
            offsets: vec![0],
            data: Vec::new(),
        }
    }
}

impl Csr {
    pub fn identity(n: usize) -> Self {
        Csr {
            offsets: (0..=n).collect(),
            data: (0..n).collect(),
        }
    }

    pub fn push_row(&mut self, row: &[usize]) {
        self.data.extend_from_slice(row);
        self.offsets.push(self.data.len());
    }

    pub fn from_rows<I, R>(rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[usize]>,
    {
        let mut out = Csr::default();
        for r in rows {
            out.push_row(r.as_ref());
        }
        out
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.data[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Position of row `i` in the flattened data.
    #[inline]
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Rows of the result come out sorted because rows are scanned in order.
    pub fn transpose(&self, ncols: usize) -> Csr {
        let mut counts = vec![0usize; ncols + 1];
        for &j in &self.data {
            counts[j + 1] += 1;
        }
        for j in 0..ncols {
            counts[j + 1] += counts[j];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut data = vec![0usize; self.data.len()];
        for i in 0..self.len() {
            for &j in self.row(i) {
                data[fill[j]] = i;
                fill[j] += 1;
            }
        }
        Csr { offsets, data }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.len()).map(move |i| self.row(i))
    }
}
