//! Orientation predicates for hyperplanes through `d` points in `R^d`.
//!
//! The float path expands the normal by cofactors (Leibniz sums) and keeps
//! the sum of absolute term values next to every component. That gives a
//! rigorous forward bound on the rounding error of `N·(p - v₀)`; signs inside
//! the bound are recomputed exactly with big integers.

use num_bigint::BigInt;
use num_traits::{Float, Signed, Zero};

/// All permutations of `0..k` with their signs.
#[derive(Debug, Clone)]
pub struct Permutations {
    k: usize,
    perms: Vec<(Vec<usize>, f64)>,
}

impl Permutations {
    pub fn new(k: usize) -> Self {
        let mut perms = Vec::new();
        let mut current = Vec::with_capacity(k);
        let mut used = vec![false; k];
        extend_perms(k, &mut current, &mut used, &mut perms);
        Self { k, perms }
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }
}

fn extend_perms(k: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
    if current.len() == k {
        out.push((current.clone(), perm_sign(current)));
        return;
    }
    for i in 0..k {
        if !used[i] {
            used[i] = true;
            current.push(i);
            extend_perms(k, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

fn perm_sign(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalised hyperplane through `d` points with per-component error
/// weights.
#[derive(Debug, Clone)]
pub struct RawHyperplane {
    /// `N_j` such that `N·(p - v₀) = det[v₁-v₀; …; v_{d-1}-v₀; p-v₀]`.
    pub normal: Vec<f64>,
    /// Sum of absolute Leibniz terms behind each `N_j`.
    pub weight: Vec<f64>,
    /// Relative rounding constant for this dimension.
    pub gamma: f64,
}

impl RawHyperplane {
    pub fn through(vertices: &[&[f64]], perms: &Permutations) -> Self {
        let d = vertices.len();
        debug_assert!(d >= 2 && perms.k == d - 1);
        let k = d - 1;
        let origin = vertices[0];
        let rows: Vec<Vec<f64>> =
            vertices[1..].iter().map(|v| v.iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
        let mut normal = vec![0.0; d];
        let mut weight = vec![0.0; d];
        let mut cols = Vec::with_capacity(k);
        for j in 0..d {
            cols.clear();
            cols.extend((0..d).filter(|&c| c != j));
            let (mut sum, mut abs) = (0.0, 0.0);
            for (perm, sign) in &perms.perms {
                let mut term = *sign;
                for (r, &pc) in perm.iter().enumerate() {
                    term *= rows[r][cols[pc]];
                }
                sum += term;
                abs += term.abs();
            }
            let cofactor_sign = if (k + j) % 2 == 0 { 1.0 } else { -1.0 };
            normal[j] = cofactor_sign * sum;
            weight[j] = abs;
        }
        let chain = (2 * d + perms.len() + 8) as f64;
        Self { normal, weight, gamma: chain * f64::EPSILON * 1.01 }
    }

    /// `(N·(p - v₀), error bound)`.
    pub fn eval(&self, origin: &[f64], p: &[f64]) -> (f64, f64) {
        let (mut val, mut bound) = (0.0, 0.0);
        for j in 0..p.len() {
            let delta = p[j] - origin[j];
            val += self.normal[j] * delta;
            bound += self.weight[j] * delta.abs();
        }
        (val, self.gamma * bound)
    }
}

/// Sign of `det[v₁-v₀; …; v_{d-1}-v₀; p-v₀]` computed exactly.
pub fn exact_orientation(vertices: &[&[f64]], p: &[f64]) -> i32 {
    let d = vertices.len();
    let mut min_exp = i32::MAX;
    let decoded: Vec<Vec<(BigInt, i32)>> = vertices
        .iter()
        .copied()
        .chain(std::iter::once(p))
        .map(|pt| {
            pt.iter()
                .map(|&x| {
                    let (mant, exp, sign) = Float::integer_decode(x);
                    let mut m = BigInt::from(mant);
                    if sign < 0 {
                        m = -m;
                    }
                    if !m.is_zero() {
                        min_exp = min_exp.min(exp as i32);
                    }
                    (m, exp as i32)
                })
                .collect()
        })
        .collect();
    if min_exp == i32::MAX {
        return 0;
    }
    let scaled: Vec<Vec<BigInt>> = decoded
        .into_iter()
        .map(|pt| pt.into_iter().map(|(m, e)| if m.is_zero() { m } else { m << ((e - min_exp) as usize) }).collect())
        .collect();
    let origin = &scaled[0];
    let mut rows: Vec<Vec<BigInt>> =
        scaled[1..].iter().map(|pt| pt.iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
    debug_assert_eq!(rows.len(), d);
    bareiss_sign(&mut rows)
}

/// Sign of the determinant of a square integer matrix (fraction-free
/// elimination).
pub fn bareiss_sign(m: &mut [Vec<BigInt>]) -> i32 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let last = &m[n - 1][n - 1];
    if last.is_zero() {
        0
    } else if last.is_positive() {
        sign
    } else {
        -sign
    }
}

/// Sign of `det[v₁-v₀; …; p-v₀]` using the float filter when decisive.
pub fn orientation(vertices: &[&[f64]], p: &[f64], perms: &Permutations) -> i32 {
    let h = RawHyperplane::through(vertices, perms);
    let (val, bound) = h.eval(vertices[0], p);
    if val > bound {
        1
    } else if val < -bound {
        -1
    } else {
        exact_orientation(vertices, p)
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k + 1..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}
