//! Fully connected tanh networks over jet inputs.
//!
//! Parameters live in one flat vector, layer-major, each layer as a row-major
//! weight block followed by its bias block. The jet forward pass pushes
//! `Jet<L>` values through the layers and so computes the network and all the
//! derivatives the residuals need in one sweep; the backward pass pulls a jet
//! cotangent of the output back to a gradient w.r.t. every parameter. A plain
//! scalar path serves evaluation grids where no derivatives are needed.

use crate::jet::Jet;
use crate::DispinnError;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct Mlp {
    pub widths: Vec<usize>,
    pub theta: Vec<f64>,
}

/// Total parameter count for a layer layout: Σ (fan_in + 1)·fan_out.
pub fn param_count(widths: &[usize]) -> usize {
    widths.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random mantissa bits -> uniform in [0, 1)
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Mlp {
    /// Xavier-uniform weights, zero biases, reproducible from the seed.
    pub fn init(widths: &[usize], seed: u64) -> Self {
        assert!(widths.len() >= 2 && *widths.last().unwrap() == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut theta = Vec::with_capacity(param_count(widths));
        for w in widths.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                theta.push(limit * (2.0 * unit_f64(&mut rng) - 1.0));
            }
            theta.extend(std::iter::repeat(0.0).take(fan_out));
        }
        Mlp { widths: widths.to_vec(), theta }
    }

    pub fn zeroed(widths: &[usize]) -> Self {
        Mlp { widths: widths.to_vec(), theta: vec![0.0; param_count(widths)] }
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    /// Indices of weight (non-bias) entries, for the ‖θ_W‖ regularizer.
    pub fn weight_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut off = 0;
        for w in self.widths.windows(2) {
            out.push(off..off + w[0] * w[1]);
            off += (w[0] + 1) * w[1];
        }
        out
    }

    /// Scalar forward pass.
    pub fn eval(&self, input: &[f64], scratch: &mut Vec<f64>, next: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(input.len(), self.widths[0]);
        scratch.clear();
        scratch.extend_from_slice(input);
        let mut off = 0;
        let layers = self.widths.len() - 1;
        for k in 0..layers {
            let (n_in, n_out) = (self.widths[k], self.widths[k + 1]);
            next.clear();
            for r in 0..n_out {
                let wrow = &self.theta[off + r * n_in..off + (r + 1) * n_in];
                let mut a = self.theta[off + n_in * n_out + r];
                for c in 0..n_in {
                    a += wrow[c] * scratch[c];
                }
                next.push(if k + 1 < layers { a.tanh() } else { a });
            }
            std::mem::swap(scratch, next);
            off += (n_in + 1) * n_out;
        }
        scratch[0]
    }

    pub fn save(&self, path: &Path) -> Result<(), DispinnError> {
        let mut s = String::from("dispinn-mlp-v1\nwidths:");
        for w in &self.widths {
            write!(s, " {w}").unwrap();
        }
        s.push('\n');
        for v in &self.theta {
            writeln!(s, "{v:.17e}").unwrap();
        }
        std::fs::write(path, s).map_err(|e| DispinnError::Io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self, DispinnError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DispinnError::Io(path.display().to_string(), e))?;
        let mut lines = text.lines();
        let bad = |m: &str| DispinnError::Checkpoint(path.display().to_string(), m.to_string());
        if lines.next() != Some("dispinn-mlp-v1") {
            return Err(bad("missing dispinn-mlp-v1 header"));
        }
        let widths_line = lines.next().ok_or_else(|| bad("missing widths line"))?;
        let widths: Vec<usize> = widths_line
            .strip_prefix("widths:")
            .ok_or_else(|| bad("malformed widths line"))?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad("non-integer width")))
            .collect::<Result<_, _>>()?;
        let theta: Vec<f64> = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<f64>().map_err(|_| bad("non-numeric parameter")))
            .collect::<Result<_, _>>()?;
        if theta.len() != param_count(&widths) {
            return Err(bad("parameter count does not match widths"));
        }
        Ok(Mlp { widths, theta })
    }
}

/// Saved activations of one jet forward pass, plus scratch for the pullback.
pub struct JetTape<const L: usize> {
    input: Vec<Jet<L>>,
    s: Vec<Vec<Jet<L>>>,
    g: Vec<Vec<Jet<L>>>,
    bar: Vec<Jet<L>>,
    bar_next: Vec<Jet<L>>,
}

impl<const L: usize> JetTape<L> {
    pub fn new(widths: &[usize]) -> Self {
        let hidden = &widths[1..widths.len() - 1];
        JetTape {
            input: vec![Jet::zero(); widths[0]],
            s: hidden.iter().map(|&w| vec![Jet::zero(); w]).collect(),
            g: hidden.iter().map(|&w| vec![Jet::zero(); w]).collect(),
            bar: Vec::new(),
            bar_next: Vec::new(),
        }
    }

    /// Jet forward pass; records activations for a later `backward` call.
    pub fn forward(&mut self, net: &Mlp, input: &[Jet<L>]) -> Jet<L> {
        debug_assert_eq!(input.len(), net.widths[0]);
        self.input.clear();
        self.input.extend_from_slice(input);
        let layers = net.widths.len() - 1;
        let mut off = 0;
        for k in 0..layers - 1 {
            let (n_in, n_out) = (net.widths[k], net.widths[k + 1]);
            let bias = off + n_in * n_out;
            let z = if k == 0 {
                std::mem::take(&mut self.input)
            } else {
                std::mem::take(&mut self.s[k - 1])
            };
            for r in 0..n_out {
                let mut a = Jet::<L>::constant(net.theta[bias + r]);
                let wrow = &net.theta[off + r * n_in..off + (r + 1) * n_in];
                for c in 0..n_in {
                    let w = wrow[c];
                    for l in 0..L {
                        a.c[l] += w * z[c].c[l];
                    }
                }
                let (s, g) = a.tanh();
                self.s[k][r] = s;
                self.g[k][r] = g;
            }
            if k == 0 {
                self.input = z;
            } else {
                self.s[k - 1] = z;
            }
            off += (n_in + 1) * n_out;
        }
        let k = layers - 1;
        let n_in = net.widths[k];
        debug_assert_eq!(net.widths[k + 1], 1);
        let bias = off + n_in;
        let z: &[Jet<L>] = if k == 0 { &self.input } else { &self.s[k - 1] };
        let mut a = Jet::<L>::constant(net.theta[bias]);
        let wrow = &net.theta[off..off + n_in];
        for c in 0..n_in {
            let w = wrow[c];
            for l in 0..L {
                a.c[l] += w * z[c].c[l];
            }
        }
        a
    }

    /// Pulls a jet cotangent of the output back through the recorded pass,
    /// accumulating parameter gradients into `grad`.
    pub fn backward(&mut self, net: &Mlp, out_bar: &Jet<L>, grad: &mut [f64]) {
        debug_assert_eq!(grad.len(), net.theta.len());
        let layers = net.widths.len() - 1;
        let mut offsets = Vec::with_capacity(layers);
        let mut off = 0;
        for k in 0..layers {
            offsets.push(off);
            off += (net.widths[k] + 1) * net.widths[k + 1];
        }
        self.bar.clear();
        self.bar.push(*out_bar);
        for k in (0..layers).rev() {
            let (n_in, n_out) = (net.widths[k], net.widths[k + 1]);
            let off = offsets[k];
            let bias = off + n_in * n_out;
            let z: &[Jet<L>] = if k == 0 { &self.input } else { &self.s[k - 1] };
            for r in 0..n_out {
                let abar = self.bar[r];
                let grow = &mut grad[off + r * n_in..off + (r + 1) * n_in];
                for c in 0..n_in {
                    grow[c] += abar.dot(&z[c]);
                }
                grad[bias + r] += abar.c[0];
            }
            if k == 0 {
                break;
            }
            // z̄ = Wᵀ ā, then pull through tanh via the saved g
            self.bar_next.clear();
            self.bar_next.resize(n_in, Jet::zero());
            for r in 0..n_out {
                let abar = self.bar[r];
                let wrow = &net.theta[off + r * n_in..off + (r + 1) * n_in];
                for c in 0..n_in {
                    let w = wrow[c];
                    let zb = &mut self.bar_next[c];
                    for l in 0..L {
                        zb.c[l] += w * abar.c[l];
                    }
                }
            }
            self.bar.clear();
            self.bar.resize(n_in, Jet::zero());
            for c in 0..n_in {
                let mut abar_prev = Jet::zero();
                Jet::tanh_vjp(&self.bar_next[c], &self.g[k - 1][c], &mut abar_prev);
                self.bar[c] = abar_prev;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count_example() {
        assert_eq!(param_count(&[2, 20, 20, 20, 20, 1]), 1341);
        assert_eq!(param_count(&[2, 8, 1]), 33);
    }

    #[test]
    fn init_is_deterministic_and_seed_sensitive() {
        let a = Mlp::init(&[2, 8, 8, 1], 7);
        let b = Mlp::init(&[2, 8, 8, 1], 7);
        let c = Mlp::init(&[2, 8, 8, 1], 8);
        assert_eq!(a.theta, b.theta);
        assert_ne!(a.theta, c.theta);
        // first weight block is 2x8, followed by 8 zero biases
        let wr = a.weight_ranges();
        assert_eq!(wr[0], 0..16);
        assert!(a.theta[16..24].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn checkpoint_round_trip() {
        let net = Mlp::init(&[2, 8, 8, 1], 3);
        let dir = std::env::temp_dir().join("dispinn-net-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ckpt.txt");
        net.save(&path).unwrap();
        let back = Mlp::load(&path).unwrap();
        assert_eq!(net.widths, back.widths);
        assert_eq!(net.theta, back.theta);
    }

    #[test]
    fn jet_forward_matches_scalar_eval() {
        let net = Mlp::init(&[2, 10, 10, 1], 5);
        let mut tape = JetTape::<8>::new(&net.widths);
        let (mut b1, mut b2) = (Vec::new(), Vec::new());
        for &(x, t) in &[(0.3, 0.2), (-0.9, 0.8), (1.4, 0.0)] {
            let out = tape.forward(&net, &[Jet::seed_x(x), Jet::seed_t(t)]);
            let scalar = net.eval(&[x, t], &mut b1, &mut b2);
            assert!((out.c[0] - scalar).abs() < 1e-14);
        }
    }

    #[test]
    fn jet_derivatives_of_network_match_fd() {
        use crate::stencil::diff2d;
        let net = Mlp::init(&[2, 12, 12, 1], 11);
        let mut tape = JetTape::<12>::new(&net.widths);
        let f = |x: f64, t: f64| net.eval(&[x, t], &mut Vec::new(), &mut Vec::new());
        for &(x, t) in &[(0.25, 0.5), (-0.7, 0.1)] {
            let out = tape.forward(&net, &[Jet::seed_x(x), Jet::seed_t(t)]);
            for i in 0..2 {
                for j in 0..6 {
                    // Step balances h^8 truncation against h^-5 rounding on
                    // the deepest lane; tanh networks have large high-order
                    // derivatives, so too coarse a step loses the comparison.
                    let fd = diff2d(&f, x, t, i, j, 0.04, 0.04);
                    let jd = out.deriv(i, j);
                    let scale = fd.abs().max(1e-3);
                    assert!(
                        (jd - fd).abs() / scale < 1e-5,
                        "deriv ({i},{j}) at ({x},{t}): jet {jd} vs fd {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn backward_matches_directional_fd() {
        // F(θ) = Σ_pts (u + 0.5 u_x + 0.2 u_t + 0.1 u_xx)² exercises several lanes
        let net = Mlp::init(&[2, 10, 10, 1], 17);
        let pts = [(0.3, 0.4), (-0.5, 0.9), (1.1, 0.2), (0.0, 0.0)];
        let f_and_grad = |theta: &[f64]| {
            let net = Mlp { widths: net.widths.clone(), theta: theta.to_vec() };
            let mut tape = JetTape::<8>::new(&net.widths);
            let mut grad = vec![0.0; net.theta.len()];
            let mut f = 0.0;
            for &(x, t) in &pts {
                let out = tape.forward(&net, &[Jet::seed_x(x), Jet::seed_t(t)]);
                let val = out.deriv(0, 0) + 0.5 * out.deriv(0, 1) + 0.2 * out.deriv(1, 0)
                    + 0.1 * out.deriv(0, 2);
                f += val * val;
                let mut bar = Jet::<8>::zero();
                bar.add_deriv_cotangent(0, 0, 2.0 * val);
                bar.add_deriv_cotangent(0, 1, 2.0 * val * 0.5);
                bar.add_deriv_cotangent(1, 0, 2.0 * val * 0.2);
                bar.add_deriv_cotangent(0, 2, 2.0 * val * 0.1);
                tape.backward(&net, &bar, &mut grad);
            }
            (f, grad)
        };
        let (_, grad) = f_and_grad(&net.theta);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let dir: Vec<f64> =
                (0..net.theta.len()).map(|_| 2.0 * unit_f64(&mut rng) - 1.0).collect();
            let h = 1e-6;
            let mut tp = net.theta.clone();
            for (p, d) in tp.iter_mut().zip(&dir) {
                *p += h * d;
            }
            let (fp, _) = f_and_grad(&tp);
            let mut tm = net.theta.clone();
            for (p, d) in tm.iter_mut().zip(&dir) {
                *p -= h * d;
            }
            let (fm, _) = f_and_grad(&tm);
            let fd = (fp - fm) / (2.0 * h);
            let an: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            assert!(
                (fd - an).abs() / fd.abs().max(1e-8) < 1e-5,
                "directional derivative: fd {fd} vs analytic {an}"
            );
        }
    }
}
