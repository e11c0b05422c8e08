//! Japanese brackets, multi-order weights and weight-convolution bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::report::{CheckReport, Verdict};

/// Order vector `s = (s_1, ..., s_j)` attached to a block partition of the axes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiOrder {
    s: Vec<f64>,
    blocks: Vec<usize>,
}

impl MultiOrder {
    pub fn new(s: Vec<f64>, blocks: Vec<usize>) -> Result<Self> {
        if s.len() != blocks.len() {
            return Err(Error::InvalidParameter(format!(
                "{} orders for {} blocks",
                s.len(),
                blocks.len()
            )));
        }
        if blocks.contains(&0) || s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("orders must be finite and blocks nonempty".into()));
        }
        Ok(MultiOrder { s, blocks })
    }

    /// The same order `s` on every block of `blocks`.
    pub fn uniform(s: f64, blocks: &[usize]) -> Self {
        MultiOrder { s: vec![s; blocks.len()], blocks: blocks.to_vec() }
    }

    pub fn zero(blocks: &[usize]) -> Self {
        Self::uniform(0.0, blocks)
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// `|s|_1 = sum |s_l|`.
    pub fn l1(&self) -> f64 {
        self.s.iter().map(|v| v.abs()).sum()
    }

    /// `|s| = (|s_1|, ..., |s_j|)`.
    pub fn abs(&self) -> MultiOrder {
        MultiOrder { s: self.s.iter().map(|v| v.abs()).collect(), blocks: self.blocks.clone() }
    }

    pub fn neg(&self) -> MultiOrder {
        MultiOrder { s: self.s.iter().map(|v| -v).collect(), blocks: self.blocks.clone() }
    }

    pub fn scale(&self, c: f64) -> MultiOrder {
        MultiOrder { s: self.s.iter().map(|v| c * v).collect(), blocks: self.blocks.clone() }
    }

    pub fn add(&self, other: &MultiOrder) -> Result<MultiOrder> {
        self.check_blocks(&other.blocks)?;
        Ok(MultiOrder {
            s: self.s.iter().zip(&other.s).map(|(a, b)| a + b).collect(),
            blocks: self.blocks.clone(),
        })
    }

    /// `s - delta_l`.
    pub fn minus_delta(&self, l: usize) -> Result<MultiOrder> {
        if l >= self.s.len() {
            return Err(Error::InvalidParameter(format!("block {l} out of range")));
        }
        let mut s = self.s.clone();
        s[l] -= 1.0;
        Ok(MultiOrder { s, blocks: self.blocks.clone() })
    }

    /// `m_s = ceil(|s|_1 + (n+1)/2) + 1`.
    pub fn m_s(&self) -> usize {
        (self.l1() + (self.dim() as f64 + 1.0) / 2.0).ceil() as usize + 1
    }

    /// `k_s = ceil(|s|_1) + n + 2`.
    pub fn k_s(&self) -> usize {
        self.l1().ceil() as usize + self.dim() + 2
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiOrder) -> bool {
        self.blocks == other.blocks && self.s.iter().zip(&other.s).all(|(a, b)| a <= b)
    }

    pub fn check_blocks(&self, blocks: &[usize]) -> Result<()> {
        if self.blocks == blocks {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "order blocks {:?} vs {:?}",
                self.blocks, blocks
            )))
        }
    }

    /// `<<xi>>^s` without a length check; `xi` must have `dim()` entries.
    pub fn weight(&self, xi: &[f64]) -> f64 {
        let mut w = 1.0;
        let mut start = 0;
        for (&b, &s) in self.blocks.iter().zip(&self.s) {
            if s != 0.0 {
                let r2: f64 = xi[start..start + b].iter().map(|v| v * v).sum();
                w *= (1.0 + r2).powf(0.5 * s);
            }
            start += b;
        }
        w
    }
}

/// `<xi> = (1 + |xi|^2)^{1/2}`.
pub fn bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// `<<xi>>^s = prod_l <xi_(l)>^{s_l}`.
pub fn multi_weight(xi: &[f64], order: &MultiOrder) -> Result<f64> {
    if xi.len() != order.dim() {
        return Err(Error::ShapeMismatch(format!(
            "frequency of length {} for an order on {} axes",
            xi.len(),
            order.dim()
        )));
    }
    Ok(order.weight(xi))
}

/// Random-sweep check of `<<xi+eta>>^s <= 2^{|s|_1/2} <<xi>>^s <<eta>>^{|s|}`.
pub fn peetre_check(samples: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut violations = 0usize;
    for _ in 0..samples {
        let n = rng.random_range(1..=4usize);
        let mut blocks = Vec::new();
        let mut left = n;
        while left > 0 {
            let b = rng.random_range(1..=left);
            blocks.push(b);
            left -= b;
        }
        let s: Vec<f64> = blocks.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let order = MultiOrder::new(s, blocks).expect("valid by construction");
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let scale = 10f64.powf(rng.random_range(-1.0..2.5));
            (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect()
        };
        let xi = draw(&mut rng);
        let eta = draw(&mut rng);
        let sum: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a + b).collect();
        let lhs = order.weight(&sum);
        let rhs = 2f64.powf(order.l1() / 2.0) * order.weight(&xi) * order.abs().weight(&eta);
        let ratio = lhs / rhs;
        if ratio > 1.0 + 1e-12 {
            violations += 1;
        }
        worst = worst.max(ratio);
    }
    CheckReport::new("peetre", "<<xi+eta>>^s <= 2^{|s|_1/2} <<xi>>^s <<eta>>^{|s|}")
        .value("samples", samples as f64)
        .value("max_ratio", worst)
        .value("violations", violations as f64)
        .verdict(Verdict::from_bool(violations == 0))
}

/// `||<.>^{-2a}||_{L^1(R^m)} = pi^{m/2} Gamma(a - m/2) / Gamma(a)`, for `a > m/2`.
pub fn bracket_l1_norm(a: f64, m: usize) -> Result<f64> {
    let half = m as f64 / 2.0;
    if a <= half {
        return Err(Error::InvalidParameter(format!(
            "<.>^(-2a) is not integrable on R^{m} for a = {a}"
        )));
    }
    Ok(match m {
        2 => std::f64::consts::PI / (a - 1.0),
        _ => (half * std::f64::consts::PI.ln() + ln_gamma(a - half) - ln_gamma(a)).exp(),
    })
}

/// `<.>^{-2 l1} * <.>^{-2 l2} <= ||<.>^{-2(l1+l2)}||_{L^1}` on `R^m`, `l1, l2 >= 0`.
pub fn pair_convolution_bound(lambda1: f64, lambda2: f64, m: usize) -> Result<f64> {
    if lambda1 < 0.0 || lambda2 < 0.0 {
        return Err(Error::InvalidParameter("exponents must be nonnegative".into()));
    }
    bracket_l1_norm(lambda1 + lambda2, m)
}

/// Orders `s, t`, slack `eps` and the derived `sigma(eps)`, blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaParams {
    pub s: MultiOrder,
    pub t: MultiOrder,
    pub eps: Vec<f64>,
    pub sigma: MultiOrder,
}

impl SigmaParams {
    /// `sigma_l = min{s_l, t_l, s_l + t_l - n_l/2 - eps_l}`, requiring
    /// `0 < eps_l < s_l + t_l - n_l/2`.
    pub fn new(s: MultiOrder, t: MultiOrder, eps: Vec<f64>) -> Result<Self> {
        s.check_blocks(t.blocks())?;
        if eps.len() != s.s().len() {
            return Err(Error::InvalidParameter("eps must have one entry per block".into()));
        }
        let mut sigma = Vec::with_capacity(eps.len());
        for (l, &nl) in s.blocks().iter().enumerate() {
            let (sl, tl, el) = (s.s()[l], t.s()[l], eps[l]);
            let gap = sl + tl - nl as f64 / 2.0;
            if gap <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "block {l}: s + t = {} must exceed n_l/2 = {}",
                    sl + tl,
                    nl as f64 / 2.0
                )));
            }
            if !(el > 0.0 && el < gap) {
                return Err(Error::InvalidParameter(format!(
                    "block {l}: eps = {el} must lie in (0, {gap})"
                )));
            }
            sigma.push(sl.min(tl).min(gap - el));
        }
        let sigma = MultiOrder::new(sigma, s.blocks().to_vec())?;
        Ok(SigmaParams { s, t, eps, sigma })
    }

    pub fn uniform(s: f64, t: f64, eps: f64, blocks: &[usize]) -> Result<Self> {
        Self::new(
            MultiOrder::uniform(s, blocks),
            MultiOrder::uniform(t, blocks),
            vec![eps; blocks.len()],
        )
    }
}

/// Per-block constant: `2^{2 sigma + 1} ||<.>^{-2(s+t-sigma)}||_{L^1}` when
/// `s, t >= 0`, else `2^{|sigma|} ||<.>^{-2(s+t)}||_{L^1}`.
pub fn block_conv_constant(s: f64, t: f64, sigma: f64, n: usize) -> Result<f64> {
    if s >= 0.0 && t >= 0.0 {
        Ok(2f64.powf(2.0 * sigma + 1.0) * bracket_l1_norm(s + t - sigma, n)?)
    } else {
        Ok(2f64.powf(sigma.abs()) * bracket_l1_norm(s + t, n)?)
    }
}

/// `C(s, t, eps, n)`: product of the per-block constants.
pub fn weight_conv_constant(params: &SigmaParams) -> Result<f64> {
    let mut c = 1.0;
    for (l, &nl) in params.s.blocks().iter().enumerate() {
        c *= block_conv_constant(params.s.s()[l], params.t.s()[l], params.sigma.s()[l], nl)?;
    }
    Ok(c)
}

/// Truncated frequency box for the numerical convolution of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvBox {
    pub radius: f64,
    pub step: f64,
}

impl ConvBox {
    /// Default box for a block of dimension `n`.
    pub fn for_dim(n: usize) -> Self {
        match n {
            1 => ConvBox { radius: 40.0, step: 0.05 },
            _ => ConvBox { radius: 24.0, step: 0.25 },
        }
    }
}

/// Result of the numerical convolution on one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockConvolution {
    /// Evaluation points (block vectors) and `(<.>^{-2s} * <.>^{-2t})(xi)` there.
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Relative truncation error estimate.
    pub tail: f64,
}

fn box_nodes(n: usize, radius: f64, step: f64) -> Vec<Vec<f64>> {
    let m = (radius / step).round() as i64;
    let axis: Vec<f64> = (-m..=m).map(|i| i as f64 * step).collect();
    let mut nodes = vec![Vec::new()];
    for _ in 0..n {
        nodes = nodes
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    nodes
}

fn convolve_at(xi: &[f64], s: f64, t: f64, nodes: &[Vec<f64>], weight: f64) -> f64 {
    let mut acc = 0.0;
    let mut diff = vec![0.0; xi.len()];
    for eta in nodes {
        for (d, (a, b)) in diff.iter_mut().zip(xi.iter().zip(eta)) {
            *d = a - b;
        }
        let w1 = 1.0 + diff.iter().map(|v| v * v).sum::<f64>();
        let w2 = 1.0 + eta.iter().map(|v| v * v).sum::<f64>();
        acc += w1.powf(-s) * w2.powf(-t);
    }
    acc * weight
}

/// Trapezoid-rule convolution `(<.>^{-2s} * <.>^{-2t})` on a box in `R^n`,
/// evaluated at frequencies with `|xi_i| <= radius/2` on a grid of spacing
/// `eval_step`.
pub fn block_convolution(s: f64, t: f64, n: usize, bx: ConvBox, eval_step: f64) -> Result<BlockConvolution> {
    use rayon::prelude::*;
    let nodes = box_nodes(n, bx.radius, bx.step);
    let weight = bx.step.powi(n as i32);
    let points = box_nodes(n, bx.radius / 2.0, eval_step);
    let values: Vec<f64> = points.par_iter().map(|xi| convolve_at(xi, s, t, &nodes, weight)).collect();

    // Truncation estimate: at xi = 0 against the closed form, and at the
    // farthest evaluation point against a doubled box.
    let exact0 = bracket_l1_norm(s + t, n)?;
    let num0 = convolve_at(&vec![0.0; n], s, t, &nodes, weight);
    let mut tail = (exact0 - num0).abs() / exact0;
    let far = vec![bx.radius / 2.0; n];
    if n == 1 {
        let wide = box_nodes(n, 2.0 * bx.radius, bx.step);
        let a = convolve_at(&far, s, t, &nodes, weight);
        let b = convolve_at(&far, s, t, &wide, weight);
        tail = tail.max((b - a).abs() / b);
    }
    Ok(BlockConvolution { points, values, tail })
}

/// Numerical check of `<<.>>^{-2s} * <<.>>^{-2t} <= C(s,t,eps,n) <<.>>^{-2 sigma}`.
///
/// Both sides factor over blocks, so the maximal ratio is the product of the
/// per-block maxima.
pub fn weight_conv_check(params: &SigmaParams, boxes: &[ConvBox], tol: f64) -> Result<CheckReport> {
    let blocks = params.s.blocks();
    if boxes.len() != blocks.len() {
        return Err(Error::InvalidParameter("one box per block required".into()));
    }
    let mut report = CheckReport::new(
        "weight-convolution",
        "<<.>>^{-2s} * <<.>>^{-2t} <= C(s,t,eps,n) <<.>>^{-2 sigma(eps)}",
    );
    let mut ratio = 1.0;
    let mut best = 1.0;
    let mut tail: f64 = 0.0;
    for (l, &nl) in blocks.iter().enumerate() {
        let (s, t, sigma) = (params.s.s()[l], params.t.s()[l], params.sigma.s()[l]);
        let c = block_conv_constant(s, t, sigma, nl)?;
        let eval_step = if nl == 1 { boxes[l].step } else { 4.0 * boxes[l].step };
        let conv = block_convolution(s, t, nl, boxes[l], eval_step)?;
        let mut block_best: f64 = 0.0;
        for (xi, v) in conv.points.iter().zip(&conv.values) {
            let rhs = (1.0 + xi.iter().map(|a| a * a).sum::<f64>()).powf(-sigma);
            block_best = block_best.max(v / rhs);
        }
        report.set(&format!("block{l}_constant"), c);
        report.set(&format!("block{l}_max_ratio"), block_best / c);
        report.set(&format!("block{l}_empirical_constant"), block_best);
        report.set(&format!("block{l}_tail"), conv.tail);
        ratio *= block_best / c;
        best *= block_best;
        tail = tail.max(conv.tail);
    }
    report.set("constant", weight_conv_constant(params)?);
    report.set("empirical_constant", best);
    report.set("max_ratio", ratio);
    report.set("tail", tail);
    report.set("tolerance", tol);
    report.verdict = if tail > 0.01 {
        report.note = Some("truncation box too small: discarded tail above 1%".into());
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(ratio <= 1.0 + tol)
    };
    Ok(report)
}
