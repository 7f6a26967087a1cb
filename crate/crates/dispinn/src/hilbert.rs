//! Discrete Hilbert transforms for the Benjamin-Ono interior residual.
//!
//! Grid functions live on the uniform nodes x_i = i·L/N, i = −N..N (2N+1
//! values with the two endpoints one period apart in the periodic case). Both
//! transforms are alternating-point quadratures of their principal-value
//! integrals: only odd node offsets carry weight. That choice is what makes
//! the operators spectrally accurate — the all-offsets Riemann sum of the
//! same kernels damps the k-th Fourier mode by exactly |k|/N, which is far
//! too lossy near a soliton crest (the operator tests below pin this down).
//!
//! Periodic kernel: (1/N)·cot(π·j/(2N)) at odd offsets j.
//! Real-line kernel: 2/(π·j) at odd offsets j, the input extended by zero
//! outside [−L, L]; since outputs are only read inside the window, any
//! extension of at least one window width is equivalent.
//!
//! Both kernels are odd, so the transform matrices satisfy Aᵀ = −A exactly;
//! the loss gradient uses that to pull residual cotangents back through the
//! transform.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GridFunction {
    pub values: Vec<f64>,
    pub half_period: f64,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, half_period: f64) -> Self {
        assert!(values.len() >= 3 && values.len() % 2 == 1, "grid needs 2N+1 nodes");
        GridFunction { values, half_period }
    }

    /// N in the 2N+1 node count.
    pub fn n(&self) -> usize {
        (self.values.len() - 1) / 2
    }
}

/// Kernel value at a signed node offset, built from the positive half so the
/// oddness K(−j) = −K(j) holds bitwise.
fn kernel_at(periodic: bool, n: usize, j: i64) -> f64 {
    if j == 0 || j % 2 == 0 {
        return 0.0;
    }
    let mag = if periodic {
        let a = std::f64::consts::PI * j.unsigned_abs() as f64 / (2 * n) as f64;
        (1.0 / n as f64) / a.tan()
    } else {
        2.0 / (std::f64::consts::PI * j.unsigned_abs() as f64)
    };
    if j < 0 {
        -mag
    } else {
        mag
    }
}

/// Precomputed transform for one grid size; reused across every time slice
/// and training iteration.
pub struct HilbertOp {
    periodic: bool,
    nodes: usize,
    fft_len: usize,
    kernel_fft: Vec<Complex<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

impl HilbertOp {
    /// Periodic transform on 2N+1 nodes spanning one period.
    pub fn periodic(n: usize) -> Self {
        let m = 2 * n; // unique circular samples
        let fft_len = next_pow2(2 * m - 1);
        Self::build(
            true,
            2 * n + 1,
            fft_len,
            |d| {
                // linear-convolution layout for circular offsets 0..m-1
                let j = d as i64;
                let j = if j > m as i64 / 2 { j - m as i64 } else { j };
                kernel_at(true, n, j)
            },
            m,
        )
    }

    /// Real-line transform on the 2N+1 nodes of [−L, L].
    pub fn line(n: usize) -> Self {
        let nodes = 2 * n + 1;
        let fft_len = next_pow2(3 * nodes - 2);
        Self::build(
            false,
            nodes,
            fft_len,
            |d| kernel_at(false, n, d as i64 - (nodes as i64 - 1)),
            2 * nodes - 1,
        )
    }

    fn build(
        periodic: bool,
        nodes: usize,
        fft_len: usize,
        kernel: impl Fn(usize) -> f64,
        kernel_len: usize,
    ) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(fft_len);
        let inv = planner.plan_fft_inverse(fft_len);
        let mut kbuf = vec![Complex::new(0.0, 0.0); fft_len];
        for (d, kv) in kbuf.iter_mut().enumerate().take(kernel_len) {
            *kv = Complex::new(kernel(d), 0.0);
        }
        fwd.process(&mut kbuf);
        HilbertOp {
            periodic,
            nodes,
            fft_len,
            kernel_fft: kbuf,
            fwd,
            inv,
            buf: vec![Complex::new(0.0, 0.0); fft_len],
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Applies the transform to the 2N+1 node values.
    ///
    /// Periodic: the last node duplicates the first one period later, so only
    /// the first 2N samples enter and the output repeats the same way.
    pub fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        assert_eq!(u.len(), self.nodes);
        assert_eq!(out.len(), self.nodes);
        let m = if self.periodic { self.nodes - 1 } else { self.nodes };
        for b in self.buf.iter_mut() {
            *b = Complex::new(0.0, 0.0);
        }
        for i in 0..m {
            self.buf[i].re = u[i];
        }
        self.fwd.process(&mut self.buf);
        for (b, k) in self.buf.iter_mut().zip(&self.kernel_fft) {
            *b *= *k;
        }
        self.inv.process(&mut self.buf);
        let scale = 1.0 / self.fft_len as f64;
        if self.periodic {
            // fold the linear convolution back onto the circle
            for i in 0..m {
                out[i] = (self.buf[i].re + self.buf[i + m].re) * scale;
            }
            out[self.nodes - 1] = out[0];
        } else {
            for i in 0..self.nodes {
                out[i] = self.buf[i + self.nodes - 1].re * scale;
            }
        }
    }

    /// Adjoint of `apply` under the standard inner product: −apply, by the
    /// exact oddness of both kernels.
    pub fn apply_adjoint(&mut self, u: &[f64], out: &mut [f64]) {
        self.apply(u, out);
        for v in out.iter_mut() {
            *v = -*v;
        }
    }
}

/// Direct O(n²) reference, periodic.
pub fn hilbert_periodic_direct(u: &GridFunction) -> GridFunction {
    let n = u.n();
    let m = 2 * n;
    let mut out = vec![0.0; 2 * n + 1];
    for i in 0..m {
        let mut s = 0.0;
        for j in 0..m {
            let mut d = i as i64 - j as i64;
            if d > m as i64 / 2 {
                d -= m as i64;
            } else if d < -(m as i64) / 2 {
                d += m as i64;
            }
            s += kernel_at(true, n, d) * u.values[j];
        }
        out[i] = s;
    }
    out[m] = out[0];
    GridFunction::new(out, u.half_period)
}

/// Direct O(n²) reference, real line.
pub fn hilbert_line_direct(u: &GridFunction) -> GridFunction {
    let n = u.n();
    let nodes = 2 * n + 1;
    let mut out = vec![0.0; nodes];
    for i in 0..nodes {
        let mut s = 0.0;
        for j in 0..nodes {
            s += kernel_at(false, n, i as i64 - j as i64) * u.values[j];
        }
        out[i] = s;
    }
    GridFunction::new(out, u.half_period)
}

/// FFT-accelerated periodic transform.
pub fn hilbert_periodic(u: &GridFunction) -> GridFunction {
    let mut op = HilbertOp::periodic(u.n());
    let mut out = vec![0.0; u.values.len()];
    op.apply(&u.values, &mut out);
    GridFunction::new(out, u.half_period)
}

/// FFT-accelerated real-line transform (zero extension outside [−L, L]).
pub fn hilbert_line(u: &GridFunction) -> GridFunction {
    let mut op = HilbertOp::line(u.n());
    let mut out = vec![0.0; u.values.len()];
    op.apply(&u.values, &mut out);
    GridFunction::new(out, u.half_period)
}

/// Circular convolution of two equal-length sequences, FFT-accelerated with
/// power-of-two padding (linear convolution folded back onto the circle).
pub fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "fft_convolve needs equal lengths");
    let n = a.len();
    let fft_len = next_pow2(2 * n - 1);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(fft_len);
    let inv = planner.plan_fft_inverse(fft_len);
    let mut fa = vec![Complex::new(0.0, 0.0); fft_len];
    let mut fb = vec![Complex::new(0.0, 0.0); fft_len];
    for i in 0..n {
        fa[i].re = a[i];
        fb[i].re = b[i];
    }
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / fft_len as f64;
    (0..n)
        .map(|i| {
            let wrap = if i + n < fft_len { fa[i + n].re } else { 0.0 };
            (fa[i].re + wrap) * scale
        })
        .collect()
}
