//! Training-set construction: Sobol collocation points with Monte-Carlo
//! weights, and the Cartesian space-time grids used for nonlocal interiors.
//!
//! Point layout is `(x, t, extra params...)` throughout. Spatial-boundary
//! sets store the left-face block first, then the right-face block, with the
//! same Sobol times (and parameter draws) in both blocks, so residuals that
//! couple the two faces can pair entry `n` with entry `n + n_sb`.

use crate::sobol::sobol_points;
use crate::DispinnError;

/// Space-time rectangle `(x_left, x_right) x (0, t_final)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_left: f64,
    pub x_right: f64,
    pub t_final: f64,
}

impl Domain {
    pub fn new(x_left: f64, x_right: f64, t_final: f64) -> Self {
        assert!(x_left < x_right && t_final > 0.0, "degenerate domain");
        Domain { x_left, x_right, t_final }
    }

    pub fn width(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn measure(&self) -> f64 {
        self.width() * self.t_final
    }
}

/// Axis-aligned box for extra sampled inputs beyond `(x, t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ParamBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "inverted box side");
        ParamBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Volume of the box. Zero-width sides contribute factor 1 so that a
    /// degenerate (pinned-parameter) box still yields usable weights.
    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| if b > a { b - a } else { 1.0 })
            .product()
    }

    /// Affine map from the unit cube, appending the image to `out`.
    pub fn map(&self, u: &[f64], out: &mut Vec<f64>) {
        for k in 0..self.dim() {
            out.push(self.lo[k] + (self.hi[k] - self.lo[k]) * u[k]);
        }
    }
}

/// A weighted point cloud with fixed dimension, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub dim: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SampleSet {
    pub fn with_capacity(dim: usize, n: usize) -> Self {
        SampleSet { dim, points: Vec::with_capacity(dim * n), weights: Vec::with_capacity(n) }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn push(&mut self, point: &[f64], weight: f64) {
        debug_assert_eq!(point.len(), self.dim);
        self.points.extend_from_slice(point);
        self.weights.push(weight);
    }

    /// Quadrature sum `sum_n w_n g(z_n)`.
    pub fn integrate(&self, mut g: impl FnMut(&[f64]) -> f64) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * g(self.point(i))).sum()
    }
}

/// Layout of a Cartesian interior: `n_space` nodes per time level (both
/// spatial endpoints present), `n_time` levels at `t_k = k dt`, stored
/// slice-major (all nodes of level 1, then level 2, ...).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceLayout {
    pub n_space: usize,
    pub n_time: usize,
    pub dx: f64,
    pub dt: f64,
}

/// Collocation points for one experiment, split by loss term.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub domain: Domain,
    pub interior: SampleSet,
    pub spatial_boundary: SampleSet,
    pub temporal_boundary: SampleSet,
    pub n_int: usize,
    /// Number of boundary *times*; the boundary set holds `2 * n_sb` points.
    pub n_sb: usize,
    pub n_tb: usize,
    /// Present when the interior is a Cartesian space-time grid.
    pub slices: Option<SliceLayout>,
}

impl TrainingSet {
    /// Shared boundary times, taken from the left-face block.
    pub fn boundary_time(&self, n: usize) -> f64 {
        self.spatial_boundary.point(n)[1]
    }

    /// CSV dump with one row per collocation point.
    pub fn to_csv(&self) -> String {
        let extras = self.interior.dim - 2;
        let mut s = String::from("kind,x,t");
        for k in 0..extras {
            s.push_str(&format!(",p{k}"));
        }
        s.push_str(",weight\n");
        let mut dump = |kind: &str, set: &SampleSet| {
            for i in 0..set.len() {
                s.push_str(kind);
                for v in set.point(i) {
                    s.push_str(&format!(",{v:.17e}"));
                }
                s.push_str(&format!(",{:.17e}\n", set.weight(i)));
            }
        };
        dump("interior", &self.interior);
        dump("spatial_boundary", &self.spatial_boundary);
        dump("temporal_boundary", &self.temporal_boundary);
        s
    }
}

fn sobol_boundary_sets(
    domain: &Domain,
    pbox: &ParamBox,
    n_sb: usize,
    n_tb: usize,
) -> (SampleSet, SampleSet) {
    let np = pbox.dim();
    let dim = 2 + np;
    let vol = pbox.volume();

    // Shared times (and parameter draws) for both faces.
    let mut sb = SampleSet::with_capacity(dim, 2 * n_sb);
    let draws = sobol_points(n_sb, 1 + np);
    let w_sb = domain.t_final * vol / n_sb as f64;
    let mut point = Vec::with_capacity(dim);
    for face in [domain.x_left, domain.x_right] {
        for u in &draws {
            point.clear();
            point.push(face);
            point.push(u[0] * domain.t_final);
            pbox.map(&u[1..], &mut point);
            sb.push(&point, w_sb);
        }
    }

    let mut tb = SampleSet::with_capacity(dim, n_tb);
    let draws = sobol_points(n_tb, 1 + np);
    let w_tb = domain.width() * vol / n_tb as f64;
    for u in &draws {
        point.clear();
        point.push(domain.x_left + u[0] * domain.width());
        point.push(0.0);
        pbox.map(&u[1..], &mut point);
        tb.push(&point, w_tb);
    }

    (sb, tb)
}

/// Sobol training set over `(x, t)` and an optional parameter box, with
/// equal Monte-Carlo weights (sub-domain measure / point count).
pub fn build_training_set_parametric(
    domain: Domain,
    pbox: &ParamBox,
    n_int: usize,
    n_sb: usize,
    n_tb: usize,
) -> TrainingSet {
    assert!(n_int > 0 && n_sb > 0 && n_tb > 0, "counts must be positive");
    let np = pbox.dim();
    let dim = 2 + np;
    let vol = pbox.volume();

    let mut interior = SampleSet::with_capacity(dim, n_int);
    let w_int = domain.measure() * vol / n_int as f64;
    let mut point = Vec::with_capacity(dim);
    for u in &sobol_points(n_int, dim) {
        point.clear();
        point.push(domain.x_left + u[0] * domain.width());
        point.push(u[1] * domain.t_final);
        pbox.map(&u[2..], &mut point);
        interior.push(&point, w_int);
    }

    let (spatial_boundary, temporal_boundary) = sobol_boundary_sets(&domain, pbox, n_sb, n_tb);
    TrainingSet {
        domain,
        interior,
        spatial_boundary,
        temporal_boundary,
        n_int,
        n_sb,
        n_tb,
        slices: None,
    }
}

/// Sobol training set in plain `(x, t)`.
pub fn build_training_set(domain: Domain, n_int: usize, n_sb: usize, n_tb: usize) -> TrainingSet {
    build_training_set_parametric(domain, &ParamBox::default(), n_int, n_sb, n_tb)
}

/// Uniform space-time grid: `2 n_half + 1` spatial nodes including both
/// endpoints (and x = 0 when the domain is symmetric), time levels on
/// `(0, T]` with `dt = ratio * dx`, trapezoid-in-space by
/// rectangle-in-time weights.
pub fn cartesian_interior(
    domain: Domain,
    n_half: usize,
    ratio: f64,
) -> Result<(SampleSet, SliceLayout), DispinnError> {
    if n_half < 1 || ratio <= 0.0 {
        return Err(DispinnError::Param(format!(
            "cartesian interior needs n_half >= 1 and ratio > 0, got {n_half}, {ratio}"
        )));
    }
    let n_space = 2 * n_half + 1;
    let dx = domain.width() / (2 * n_half) as f64;
    let dt = ratio * dx;
    if dt > domain.t_final {
        return Err(DispinnError::Param(format!(
            "time step {dt} exceeds the horizon {}",
            domain.t_final
        )));
    }
    let n_time = (domain.t_final / dt).round() as usize;
    if ((n_time as f64 * dt) - domain.t_final).abs() > 1e-9 * domain.t_final {
        return Err(DispinnError::Param(format!(
            "horizon {} is not an integer number of time steps dt = {dt}",
            domain.t_final
        )));
    }

    let mid = 0.5 * (domain.x_left + domain.x_right);
    let mut set = SampleSet::with_capacity(2, n_space * n_time);
    for k in 1..=n_time {
        let t = k as f64 * dt;
        for i in 0..n_space {
            // Evaluate symmetric grids around the midpoint so x = mid is hit
            // exactly (i - n_half is 0 there).
            let x = mid + (i as i64 - n_half as i64) as f64 * dx;
            let trap = if i == 0 || i == n_space - 1 { 0.5 } else { 1.0 };
            set.push(&[x, t], trap * dx * dt);
        }
    }
    Ok((set, SliceLayout { n_space, n_time, dx, dt }))
}

/// Training set with a Cartesian interior and Sobol boundary sets.
pub fn build_training_set_cartesian(
    domain: Domain,
    n_half: usize,
    ratio: f64,
    n_sb: usize,
    n_tb: usize,
) -> Result<TrainingSet, DispinnError> {
    assert!(n_sb > 0 && n_tb > 0, "counts must be positive");
    let (interior, layout) = cartesian_interior(domain, n_half, ratio)?;
    let (spatial_boundary, temporal_boundary) =
        sobol_boundary_sets(&domain, &ParamBox::default(), n_sb, n_tb);
    let n_int = interior.len();
    Ok(TrainingSet {
        domain,
        interior,
        spatial_boundary,
        temporal_boundary,
        n_int,
        n_sb,
        n_tb,
        slices: Some(layout),
    })
}
