use nalgebra::DVector;

use crate::error::{Error, Result};

/// Which one-sided limit a jet is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Value and first two τ-derivatives of a transverse field at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: DVector<f64>,
    pub d1: DVector<f64>,
    pub d2: DVector<f64>,
}

impl Jet {
    pub fn new(value: Vec<f64>, d1: Vec<f64>, d2: Vec<f64>) -> Self {
        Self {
            value: DVector::from_vec(value),
            d1: DVector::from_vec(d1),
            d2: DVector::from_vec(d2),
        }
    }

    pub fn scalar(value: f64, d1: f64, d2: f64) -> Self {
        Self::new(vec![value], vec![d1], vec![d2])
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            value: DVector::zeros(dim),
            d1: DVector::zeros(dim),
            d2: DVector::zeros(dim),
        }
    }

    fn dim(&self) -> usize {
        self.value.len()
    }

    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            value: &self.value * a + &other.value * b,
            d1: &self.d1 * a + &other.d1 * b,
            d2: &self.d2 * a + &other.d2 * b,
        }
    }
}

/// Derivative data supplied for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeData {
    pub value: Vec<f64>,
    /// `(V', V'')` from the left, required at breaks and at `τ = T`.
    pub left: Option<(Vec<f64>, Vec<f64>)>,
    /// `(V', V'')` from the right, required at breaks and at `τ = 0`.
    pub right: Option<(Vec<f64>, Vec<f64>)>,
}

/// A piecewise-smooth transverse field `V^i(τ)` on a uniform grid over
/// `[0, T]`, vanishing at both ends. Breaks sit on grid nodes and carry
/// separate left and right derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationField {
    taus: Vec<f64>,
    left: Vec<Jet>,
    right: Vec<Jet>,
    breaks: Vec<usize>,
}

/// Relative tolerance for endpoint vanishing and continuity at breaks.
pub const FIELD_RTOL: f64 = 1e-8;

fn grid(t_end: f64, n_intervals: usize) -> Result<Vec<f64>> {
    if !(t_end > 0.0) || n_intervals < 2 {
        return Err(Error::InvalidArgument(format!(
            "variation field needs T > 0 and at least 2 intervals, got T = {t_end}, N = {n_intervals}"
        )));
    }
    Ok((0..=n_intervals).map(|k| t_end * k as f64 / n_intervals as f64).collect())
}

/// Node indices of `breaks`, which must be interior grid nodes.
pub(crate) fn break_nodes(taus: &[f64], breaks: &[f64]) -> Result<Vec<usize>> {
    let h = taus[1] - taus[0];
    let last = taus.len() - 1;
    let mut out = Vec::with_capacity(breaks.len());
    for &b in breaks {
        let u = (b - taus[0]) / h;
        let k = u.round();
        if (u - k).abs() > 1e-9 || k <= 0.0 || k as usize >= last {
            return Err(Error::BreakOffGrid { tau: b });
        }
        out.push(k as usize);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl VariationField {
    /// Samples jets `f(τ, side)` on `n_intervals + 1` nodes over `[0, T]`.
    /// `f` is asked for both sides only at breaks.
    pub fn from_jets<F>(t_end: f64, n_intervals: usize, dim: usize, breaks: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64, Side) -> Jet,
    {
        let taus = grid(t_end, n_intervals)?;
        let nodes = break_nodes(&taus, breaks)?;
        let mut left = Vec::with_capacity(taus.len());
        let mut right = Vec::with_capacity(taus.len());
        for (k, &t) in taus.iter().enumerate() {
            let r = f(t, Side::Right);
            let l = if nodes.contains(&k) { f(t, Side::Left) } else { r.clone() };
            for jet in [&l, &r] {
                if jet.dim() != dim || jet.d1.len() != dim || jet.d2.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: jet.dim(),
                    });
                }
            }
            left.push(l);
            right.push(r);
        }
        Self::assemble(taus, left, right, nodes)
    }

    /// Scalar (one transverse direction) version of [`Self::from_jets`]; `f`
    /// returns `(V, V', V'')`.
    pub fn scalar_from_fn<F>(t_end: f64, n_intervals: usize, breaks: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64, Side) -> (f64, f64, f64),
    {
        Self::from_jets(t_end, n_intervals, 1, breaks, |t, s| {
            let (v, d1, d2) = f(t, s);
            Jet::scalar(v, d1, d2)
        })
    }

    /// Builds a field from per-node data on the uniform grid `taus`.
    pub fn from_node_data(taus: Vec<f64>, data: Vec<NodeData>, breaks: &[f64]) -> Result<Self> {
        if taus.len() < 3 || data.len() != taus.len() {
            return Err(Error::GridMismatch("one node record per τ sample (at least 3) is required".into()));
        }
        crate::manifold::check_uniform_grid(&taus)?;
        let nodes = break_nodes(&taus, breaks)?;
        let last = taus.len() - 1;
        let mut left = Vec::with_capacity(taus.len());
        let mut right = Vec::with_capacity(taus.len());
        for (k, d) in data.into_iter().enumerate() {
            let is_break = nodes.contains(&k);
            let needs_left = is_break || k == last;
            let needs_right = is_break || k == 0;
            let (l, r) = match (d.left, d.right) {
                (Some(l), Some(r)) => (l, r),
                (Some(l), None) if !needs_right => (l.clone(), l),
                (None, Some(r)) if !needs_left => (r.clone(), r),
                _ => return Err(Error::MissingBreakData { tau: taus[k] }),
            };
            left.push(Jet::new(d.value.clone(), l.0, l.1));
            right.push(Jet::new(d.value, r.0, r.1));
        }
        let dim = left[0].dim();
        if left.iter().chain(&right).any(|j| j.dim() != dim || j.d1.len() != dim || j.d2.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: left.iter().chain(&right).map(|j| j.d1.len()).find(|l| *l != dim).unwrap_or(0),
            });
        }
        Self::assemble(taus, left, right, nodes)
    }

    fn assemble(taus: Vec<f64>, left: Vec<Jet>, right: Vec<Jet>, breaks: Vec<usize>) -> Result<Self> {
        let scale = left
            .iter()
            .chain(&right)
            .map(|j| j.value.amax())
            .fold(0.0, f64::max)
            .max(1e-300);
        for (k, (l, r)) in left.iter().zip(&right).enumerate() {
            let jump = (&l.value - &r.value).amax();
            if jump > FIELD_RTOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "variation field is discontinuous at tau = {} (jump {jump:e})",
                    taus[k]
                )));
            }
        }
        let last = taus.len() - 1;
        let ends = right[0].value.amax().max(left[last].value.amax());
        if ends > FIELD_RTOL * scale {
            return Err(Error::EndpointNonzero { magnitude: ends });
        }
        Ok(Self {
            taus,
            left,
            right,
            breaks,
        })
    }

    /// The zero field of dimension `dim`.
    pub fn zero(t_end: f64, n_intervals: usize, dim: usize) -> Result<Self> {
        Self::from_jets(t_end, n_intervals, dim, &[], |_, _| Jet::zeros(dim))
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn t_end(&self) -> f64 {
        self.taus[self.taus.len() - 1]
    }

    pub fn step(&self) -> f64 {
        self.taus[1] - self.taus[0]
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.left[0].dim()
    }

    /// Node indices of the breaks.
    pub fn break_indices(&self) -> &[usize] {
        &self.breaks
    }

    pub fn break_taus(&self) -> Vec<f64> {
        self.breaks.iter().map(|&k| self.taus[k]).collect()
    }

    pub fn value(&self, k: usize) -> &DVector<f64> {
        &self.right[k].value
    }

    pub fn jet(&self, k: usize, side: Side) -> &Jet {
        match side {
            Side::Left => &self.left[k],
            Side::Right => &self.right[k],
        }
    }

    /// `V'(τ_k⁺) − V'(τ_k⁻)`
    pub fn derivative_jump(&self, k: usize) -> DVector<f64> {
        &self.right[k].d1 - &self.left[k].d1
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.taus.len() == other.taus.len()
            && self
                .taus
                .iter()
                .zip(&other.taus)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("variation fields live on different τ grids".into()));
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `a·self + b·other`; the breaks are merged.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let left = self.left.iter().zip(&other.left).map(|(x, y)| x.combine(a, y, b)).collect();
        let right = self.right.iter().zip(&other.right).map(|(x, y)| x.combine(a, y, b)).collect();
        let mut breaks: Vec<usize> = self.breaks.iter().chain(&other.breaks).copied().collect();
        breaks.sort_unstable();
        breaks.dedup();
        Ok(Self {
            taus: self.taus.clone(),
            left,
            right,
            breaks,
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let s = |j: &Jet| j.combine(a, j, 0.0);
        Self {
            taus: self.taus.clone(),
            left: self.left.iter().map(s).collect(),
            right: self.right.iter().map(s).collect(),
            breaks: self.breaks.clone(),
        }
    }

    /// Segments `[start, end]` (node indices) between consecutive breaks.
    pub(crate) fn segments(&self) -> Vec<(usize, usize)> {
        let mut cuts = vec![0];
        cuts.extend(&self.breaks);
        cuts.push(self.taus.len() - 1);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Jet at node `k` as seen from inside the segment `[start, end]`.
    pub(crate) fn segment_jet(&self, k: usize, start: usize) -> &Jet {
        if k == start {
            &self.right[k]
        } else {
            &self.left[k]
        }
    }
}
