//! β-contents of meta-caps `C⁺(v,s) = [-1,1]^m ∩ {y·v ≥ s}` and meta-sections
//! `C(v,s) = [-1,1]^m ∩ {y·v = s}` under the product density
//! `∏ c_{β_i} (1 - y_i²)^{β_i}`.
//!
//! Two evaluation paths:
//! * general: nested adaptive quadrature over all coordinates but the one
//!   with the largest weight, which is done in closed form (caps) or read off
//!   the hyperplane (sections);
//! * corner: when `‖v‖₁ - s < min v_i` the cap is the simplex
//!   `y_i = 1 - (gap/v_i) u_i`, `Σ u_i ≤ 1`, and the power of `gap` factors
//!   out exactly, so tiny caps keep full relative accuracy.

use super::quadrature::{integrate, QuadratureSpec};
use super::special::{beta_line_const, incomplete_beta};
use crate::error::{Error, Result};

/// Deterministic quadrature is limited to this many meta-coordinates.
pub const MAX_META_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct MetaCap {
    v: Vec<f64>,
    s: f64,
}

impl MetaCap {
    /// `v` must have non-negative entries and unit Euclidean norm.
    pub fn new(v: Vec<f64>, s: f64) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Domain("meta-normal must be non-empty".into()));
        }
        if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) || !s.is_finite() {
            return Err(Error::Domain(format!("meta-normal {v:?} must be finite and non-negative")));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("meta-normal has norm {norm}, expected 1")));
        }
        Ok(Self { v, s })
    }

    /// Normalises `v` first.
    pub fn from_direction(v: &[f64], s: f64) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("meta-normal must be non-zero".into()));
        }
        Self::new(v.iter().map(|x| x / norm).collect(), s)
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn with_offset(&self, s: f64) -> Self {
        Self { v: self.v.clone(), s }
    }

    pub fn one_norm(&self) -> f64 {
        self.v.iter().sum()
    }

    /// `‖v‖₁ - 2 min v_i`, and `-1` for `m = 1`.
    pub fn s1(&self) -> f64 {
        if self.v.len() == 1 {
            return -1.0;
        }
        self.one_norm() - 2.0 * self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn gap(&self) -> f64 {
        self.one_norm() - self.s
    }

    pub fn is_nonempty(&self) -> bool {
        self.s <= self.one_norm()
    }
}

/// Integration problem restricted to the coordinates with `v_i > 0`; the
/// others integrate to one.
struct Problem {
    v: Vec<f64>,
    betas: Vec<f64>,
    consts: Vec<f64>,
    s: f64,
    /// Index of the largest weight.
    top: usize,
}

impl Problem {
    fn new(cap: &MetaCap, betas: &[f64]) -> Result<Self> {
        if betas.len() != cap.m() {
            return Err(Error::DimensionMismatch { expected: cap.m(), actual: betas.len() });
        }
        if let Some(b) = betas.iter().find(|b| !(**b > -1.0) || !b.is_finite()) {
            return Err(Error::InvalidBetas(format!("beta = {b} must be > -1")));
        }
        if cap.m() > MAX_META_DIM {
            return Err(Error::Unsupported(format!("meta-dimension {} > {MAX_META_DIM}", cap.m())));
        }
        let keep: Vec<usize> = (0..cap.m()).filter(|&i| cap.v[i] > 0.0).collect();
        let v: Vec<f64> = keep.iter().map(|&i| cap.v[i]).collect();
        let betas: Vec<f64> = keep.iter().map(|&i| betas[i]).collect();
        let consts = betas.iter().map(|&b| beta_line_const(b)).collect();
        let top = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
        Ok(Self { v, betas, consts, s: cap.s, top })
    }

    fn m(&self) -> usize {
        self.v.len()
    }

    fn one_norm(&self) -> f64 {
        self.v.iter().sum()
    }

    fn min_v(&self) -> f64 {
        self.v.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn density(&self, i: usize, y: f64) -> f64 {
        let w = 1.0 - y * y;
        // refinement can round a node onto a singular endpoint
        if w <= 0.0 {
            return 0.0;
        }
        self.consts[i] * w.powf(self.betas[i])
    }

    /// `P(Y_i ≥ t)` for the one-dimensional law of coordinate `i`.
    fn tail(&self, i: usize, t: f64) -> Result<f64> {
        tail_probability(self.betas[i], self.consts[i], t)
    }

    fn others(&self) -> Vec<usize> {
        (0..self.m()).filter(|&i| i != self.top).collect()
    }

    /// Values of `y_j` where the remaining sum over `rest ∪ {top}` can hit a
    /// vertex of its box, i.e. where the inner integrand has kinks.
    fn kinks(&self, j: usize, rest: &[usize], t: f64) -> Vec<f64> {
        let mut others: Vec<f64> = rest.iter().map(|&r| self.v[r]).collect();
        others.push(self.v[self.top]);
        let mut out = Vec::with_capacity(1 << others.len());
        for mask in 0..1usize << others.len() {
            let sum: f64 = others.iter().enumerate().map(|(b, &x)| if mask >> b & 1 == 1 { x } else { -x }).sum();
            out.push((t - sum) / self.v[j]);
        }
        out
    }

    fn span(&self, rest: &[usize]) -> f64 {
        rest.iter().map(|&r| self.v[r]).sum::<f64>() + self.v[self.top]
    }

    fn cap_general(&self, rest: &[usize], partial: f64, q: &QuadratureSpec) -> Result<f64> {
        let t = self.s - partial;
        let span = self.span(rest);
        if t <= -span {
            return Ok(1.0);
        }
        if t >= span {
            return Ok(0.0);
        }
        let Some((&j, inner)) = rest.split_first() else {
            return self.tail(self.top, t / self.v[self.top]);
        };
        let inner_span = span - self.v[j];
        let lo = (t - inner_span) / self.v[j];
        let hi = (t + inner_span) / self.v[j];
        // above `hi` the remaining coordinates always satisfy the constraint
        let mut total = self.tail(j, hi)?;
        let (a, b) = (lo.max(-1.0), hi.min(1.0));
        if a < b {
            let kinks = self.kinks(j, inner, t);
            let inner_q = q.inner();
            total += self.weighted_integral(
                j,
                |y| self.cap_general(inner, partial + self.v[j] * y, &inner_q),
                a,
                b,
                &kinks,
                q,
            )?;
        }
        Ok(total)
    }

    fn section_general(&self, rest: &[usize], partial: f64, q: &QuadratureSpec) -> Result<f64> {
        let t = self.s - partial;
        let span = self.span(rest);
        if t.abs() >= span {
            return Ok(0.0);
        }
        let Some((&j, inner)) = rest.split_first() else {
            return Ok(self.density(self.top, t / self.v[self.top]));
        };
        let inner_span = span - self.v[j];
        let a = ((t - inner_span) / self.v[j]).max(-1.0);
        let b = ((t + inner_span) / self.v[j]).min(1.0);
        if a >= b {
            return Ok(0.0);
        }
        let kinks = self.kinks(j, inner, t);
        let inner_q = q.inner();
        self.weighted_integral(j, |y| self.section_general(inner, partial + self.v[j] * y, &inner_q), a, b, &kinks, q)
    }

    /// `∫_a^b c_j (1-y²)^{β_j} g(y) dy`. For `β_j < 0` the pieces touching
    /// `±1` are mapped by `y = ±(1 - w²)`, which removes the endpoint
    /// singularity and evaluates `1 - y²` without cancellation.
    fn weighted_integral<G>(&self, j: usize, g: G, a: f64, b: f64, kinks: &[f64], q: &QuadratureSpec) -> Result<f64>
    where
        G: Fn(f64) -> Result<f64>,
    {
        let beta = self.betas[j];
        if beta >= 0.0 || (a > -1.0 && b < 1.0) {
            return Ok(integrate(|y| Ok(self.density(j, y) * g(y)?), a, b, kinks, q)?.value);
        }
        let c = self.consts[j];
        let mid = if a <= -1.0 && b >= 1.0 {
            0.0
        } else if a <= -1.0 {
            b
        } else {
            a
        };
        let mut total = 0.0;
        if b >= 1.0 {
            let (lo, hi) = (mid.max(a), 1.0);
            if lo < hi {
                let w_kinks: Vec<f64> =
                    kinks.iter().filter(|&&k| k > lo && k < hi).map(|&k| (1.0 - k).sqrt()).collect();
                total += integrate(
                    |w| {
                        let base = w * w * (2.0 - w * w);
                        if base <= 0.0 {
                            return Ok(0.0);
                        }
                        Ok(c * base.powf(beta) * 2.0 * w * g(1.0 - w * w)?)
                    },
                    0.0,
                    (1.0 - lo).sqrt(),
                    &w_kinks,
                    q,
                )?
                .value;
            }
        }
        if a <= -1.0 {
            let (lo, hi) = (-1.0, mid.min(b));
            if lo < hi {
                let w_kinks: Vec<f64> =
                    kinks.iter().filter(|&&k| k > lo && k < hi).map(|&k| (1.0 + k).sqrt()).collect();
                total += integrate(
                    |w| {
                        let base = w * w * (2.0 - w * w);
                        if base <= 0.0 {
                            return Ok(0.0);
                        }
                        Ok(c * base.powf(beta) * 2.0 * w * g(w * w - 1.0)?)
                    },
                    0.0,
                    (1.0 + hi).sqrt(),
                    &w_kinks,
                    q,
                )?
                .value;
            }
        }
        Ok(total)
    }

    fn kappa(&self, gap: f64) -> Vec<f64> {
        self.v.iter().map(|&x| gap / x).collect()
    }

    /// `gap^{β+m-1-extra} ∏ v_i^{-β_i-1} ∏ c_{β_i}` with `extra = 0` for caps,
    /// `1` for sections.
    fn corner_prefactor(&self, gap: f64, section: bool) -> f64 {
        let beta: f64 = self.betas.iter().sum();
        let power = beta + self.m() as f64 - if section { 1.0 } else { 0.0 };
        let mut log = power * gap.ln();
        for i in 0..self.m() {
            log += -(self.betas[i] + 1.0) * self.v[i].ln() + self.consts[i].ln();
        }
        log.exp()
    }

    fn corner_weight(&self, kappa: &[f64], i: usize, u: f64) -> f64 {
        let w = u * (2.0 - kappa[i] * u);
        if w <= 0.0 {
            return 0.0;
        }
        w.powf(self.betas[i])
    }

    /// `∫_{Σu ≤ U} ∏ u_i^{β_i}(2 - κ_i u_i)^{β_i} du` over `rest ∪ {top}`.
    fn corner_cap_integral(&self, kappa: &[f64], rest: &[usize], budget: f64, q: &QuadratureSpec) -> Result<f64> {
        let Some((&j, inner)) = rest.split_first() else {
            let (b, k) = (self.betas[self.top], kappa[self.top]);
            // ∫₀^U u^β (2-κu)^β du = (2/κ)^{β+1} 2^β B(β+1, β+1; κU/2)
            let x = (k * budget / 2.0).min(1.0);
            return Ok((2.0 / k).powf(b + 1.0) * 2f64.powf(b) * incomplete_beta(b + 1.0, b + 1.0, x)?);
        };
        if budget <= 0.0 {
            return Ok(0.0);
        }
        let inner_q = q.inner();
        Ok(integrate(
            |u| Ok(self.corner_weight(kappa, j, u) * self.corner_cap_integral(kappa, inner, budget - u, &inner_q)?),
            0.0,
            budget,
            &[],
            q,
        )?
        .value)
    }

    /// Same integrand over the face `Σu = U`, parametrised by `rest`.
    fn corner_section_integral(&self, kappa: &[f64], rest: &[usize], budget: f64, q: &QuadratureSpec) -> Result<f64> {
        let Some((&j, inner)) = rest.split_first() else {
            return Ok(self.corner_weight(kappa, self.top, budget.max(0.0)));
        };
        if budget <= 0.0 {
            return Ok(0.0);
        }
        let inner_q = q.inner();
        Ok(integrate(
            |u| Ok(self.corner_weight(kappa, j, u) * self.corner_section_integral(kappa, inner, budget - u, &inner_q)?),
            0.0,
            budget,
            &[],
            q,
        )?
        .value)
    }

    fn in_corner(&self) -> bool {
        self.m() >= 2 && self.one_norm() - self.s < self.min_v()
    }
}

/// `P(Y ≥ t)` for `Y` with density `c (1 - y²)^β` on `[-1, 1]`.
fn tail_probability(beta: f64, c: f64, t: f64) -> Result<f64> {
    if t <= -1.0 {
        return Ok(1.0);
    }
    if t >= 1.0 {
        return Ok(0.0);
    }
    // y = 1 - 2z turns the tail into c 2^{2β+1} B(β+1, β+1; (1-t)/2)
    let scale = c * 2f64.powf(2.0 * beta + 1.0);
    if t < 0.0 {
        Ok(1.0 - scale * incomplete_beta(beta + 1.0, beta + 1.0, (1.0 + t) / 2.0)?)
    } else {
        Ok(scale * incomplete_beta(beta + 1.0, beta + 1.0, (1.0 - t) / 2.0)?)
    }
}

/// `P_m(C⁺(v,s); β)`.
pub fn cap_content_meta(cap: &MetaCap, betas: &[f64], q: &QuadratureSpec) -> Result<f64> {
    let p = Problem::new(cap, betas)?;
    let norm1 = p.one_norm();
    if p.s >= norm1 {
        return Ok(0.0);
    }
    if p.s <= -norm1 {
        return Ok(1.0);
    }
    if p.m() == 1 {
        return p.tail(0, p.s / p.v[0]);
    }
    if p.in_corner() {
        return cap_corner(&p, q);
    }
    Ok(p.cap_general(&p.others(), 0.0, q)?.clamp(0.0, 1.0))
}

fn cap_corner(p: &Problem, q: &QuadratureSpec) -> Result<f64> {
    let gap = p.one_norm() - p.s;
    let kappa = p.kappa(gap);
    Ok(p.corner_prefactor(gap, false) * p.corner_cap_integral(&kappa, &p.others(), 1.0, q)?)
}

/// `Vol_{m-1}(C(v,s); β)`; for `m = 1` this is `c_β (1 - s²)^β 1{|s| ≤ 1}`.
pub fn section_content_meta(cap: &MetaCap, betas: &[f64], q: &QuadratureSpec) -> Result<f64> {
    let p = Problem::new(cap, betas)?;
    let norm1 = p.one_norm();
    if p.m() == 1 {
        let y = p.s / p.v[0];
        return Ok(if y.abs() <= 1.0 { p.consts[0] * (1.0 - y * y).powf(p.betas[0]) } else { 0.0 });
    }
    if p.s.abs() >= norm1 {
        return Ok(0.0);
    }
    if p.in_corner() {
        return section_corner(&p, q);
    }
    // the (m-1)-volume element on the hyperplane is dy_{-top} / v_top
    Ok(p.section_general(&p.others(), 0.0, q)? / p.v[p.top])
}

fn section_corner(p: &Problem, q: &QuadratureSpec) -> Result<f64> {
    let gap = p.one_norm() - p.s;
    let kappa = p.kappa(gap);
    Ok(p.corner_prefactor(gap, true) * p.corner_section_integral(&kappa, &p.others(), 1.0, q)?)
}

/// Forces the general nested path, bypassing the corner substitution. Used
/// to cross-check the two paths.
pub fn cap_content_meta_general(cap: &MetaCap, betas: &[f64], q: &QuadratureSpec) -> Result<f64> {
    let p = Problem::new(cap, betas)?;
    if p.m() == 1 {
        return cap_content_meta(cap, betas, q);
    }
    p.cap_general(&p.others(), 0.0, q)
}

pub fn section_content_meta_general(cap: &MetaCap, betas: &[f64], q: &QuadratureSpec) -> Result<f64> {
    let p = Problem::new(cap, betas)?;
    if p.m() == 1 || p.s.abs() >= p.one_norm() {
        return section_content_meta(cap, betas, q);
    }
    Ok(p.section_general(&p.others(), 0.0, q)? / p.v[p.top])
}
