/// Connection coefficients `Γ^b_ac`, stored with the upper index first.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, upper: usize, a: usize, c: usize) -> usize {
        (upper * self.dim + a) * self.dim + c
    }

    /// `Γ^upper_{a c}`
    #[inline]
    pub fn get(&self, upper: usize, a: usize, c: usize) -> f64 {
        self.data[self.idx(upper, a, c)]
    }

    #[inline]
    pub fn set(&mut self, upper: usize, a: usize, c: usize, value: f64) {
        let i = self.idx(upper, a, c);
        self.data[i] = value;
    }

    /// `Γ^b_{ac} u^a v^c`
    pub fn contract(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for (b, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..n {
                if u[a] == 0.0 {
                    continue;
                }
                for c in 0..n {
                    acc += self.get(b, a, c) * u[a] * v[c];
                }
            }
            *o = acc;
        }
        out
    }

    /// Largest `|Γ^b_ac - Γ^b_ca|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for b in 0..n {
            for a in 0..n {
                for c in 0..n {
                    worst = worst.max((self.get(b, a, c) - self.get(b, c, a)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// A dense rank-4 array indexed `(a, b, c, d)`.
///
/// Used both for `R_abc^d` and for the fully lowered `R_abcd`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank4 {
    dim: usize,
    data: Vec<f64>,
}

impl Rank4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.dim + b) * self.dim + c) * self.dim + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.idx(a, b, c, d)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, value: f64) {
        let i = self.idx(a, b, c, d);
        self.data[i] = value;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
