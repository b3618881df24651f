//! Convex hulls in general dimension with simplicial facet output.
//!
//! Inputs in general position (the almost sure case for sampled clouds) get
//! their exact face lattice. Otherwise non-simplicial faces come back
//! triangulated, possibly through boundary points that are not extreme.

mod brute;
mod incremental;
pub mod io;
pub mod predicates;

use std::collections::{HashMap, HashSet};

pub use brute::{brute_force_facets, BRUTE_FORCE_LIMIT};
pub use incremental::{convex_hull, convex_hull_with, HullOptions};

use brute::next_combination;
use predicates::determinant;

/// Facet tolerance for membership tests.
pub const CONTAINS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Sorted indices into the input cloud.
    pub vertex_ids: Vec<usize>,
    /// Unit outward normal.
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct HullResult {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    /// Representative input index of every input point after merging
    /// near-duplicates.
    pub merged: Vec<usize>,
    pub vertex_ids: Vec<usize>,
    pub facets: Vec<Facet>,
    pub f_vector: Vec<usize>,
    pub volume: f64,
}

impl HullResult {
    pub fn f_vector(&self) -> &[usize] {
        &self.f_vector
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        contains_point(self, x)
    }

    pub fn facet_sets(&self) -> Vec<Vec<usize>> {
        self.facets.iter().map(|f| f.vertex_ids.clone()).collect()
    }

    /// Checks Euler, ridge regularity, Hinman, vertex incidence and
    /// containment of every input point. Returns the first violation.
    pub fn validate(&self) -> Result<(), String> {
        let d = self.dim;
        if self.f_vector.len() != d {
            return Err(format!("f-vector has length {} in dimension {d}", self.f_vector.len()));
        }
        if self.f_vector[0] != self.vertex_ids.len() || self.f_vector[d - 1] != self.facets.len() {
            return Err("f-vector ends disagree with vertex/facet lists".into());
        }
        if !euler_relation_holds(&self.f_vector) {
            return Err(format!("Euler relation fails for {:?}", self.f_vector));
        }
        if !ridges_are_regular(&self.facets, d) {
            return Err("a ridge is not shared by exactly two facets".into());
        }
        if let Some(j) = hinman_violation(&self.f_vector) {
            return Err(format!("Hinman inequality fails at j = {j} for {:?}", self.f_vector));
        }
        for f in &self.facets {
            for &v in &f.vertex_ids {
                let h: f64 = dot(&f.normal, &self.points[v]);
                if (h - f.offset).abs() > 1e-9 {
                    return Err(format!("vertex {v} is {:e} off its facet plane", h - f.offset));
                }
            }
        }
        if let Some(i) = self.points.iter().position(|p| !self.contains_point(p)) {
            return Err(format!("input point {i} lies outside the hull"));
        }
        if !(self.volume >= 0.0) {
            return Err(format!("negative volume {}", self.volume));
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn contains_point(hull: &HullResult, x: &[f64]) -> bool {
    hull.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + CONTAINS_TOLERANCE)
}

pub fn f_vector(hull: &HullResult) -> Vec<usize> {
    f_vector_of(&hull.facets, hull.dim)
}

pub fn volume(hull: &HullResult) -> f64 {
    hull.volume
}

/// `f_j` counts distinct `(j+1)`-subsets of facet vertex sets.
pub(crate) fn f_vector_of(facets: &[Facet], d: usize) -> Vec<usize> {
    let mut f = vec![0; d];
    if facets.is_empty() {
        return f;
    }
    f[d - 1] = facets.len();
    for j in 0..d - 1 {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut pick: Vec<usize> = (0..=j).collect();
        for facet in facets {
            pick.iter_mut().enumerate().for_each(|(i, p)| *p = i);
            loop {
                seen.insert(pick.iter().map(|&i| facet.vertex_ids[i]).collect());
                if !next_combination(&mut pick, d) {
                    break;
                }
            }
        }
        f[j] = seen.len();
    }
    f
}

/// Sum of simplex volumes coned from the vertex centroid.
pub(crate) fn volume_of(points: &[Vec<f64>], facets: &[Facet], vertex_ids: &[usize], d: usize) -> f64 {
    if vertex_ids.is_empty() {
        return 0.0;
    }
    let mut center = vec![0.0; d];
    for &v in vertex_ids {
        center.iter_mut().zip(&points[v]).for_each(|(c, x)| *c += x);
    }
    center.iter_mut().for_each(|c| *c /= vertex_ids.len() as f64);
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    facets
        .iter()
        .map(|f| {
            let rows =
                f.vertex_ids.iter().map(|&v| points[v].iter().zip(&center).map(|(a, b)| a - b).collect()).collect();
            determinant(rows).abs()
        })
        .sum::<f64>()
        / factorial
}

/// `Σ (-1)^j f_j = 1 - (-1)^d`.
pub fn euler_relation_holds(f: &[usize]) -> bool {
    let d = f.len();
    let alt: i64 = f.iter().enumerate().map(|(j, &x)| if j % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
    alt == if d % 2 == 0 { 0 } else { 2 }
}

pub fn ridges_are_regular(facets: &[Facet], d: usize) -> bool {
    let mut count: HashMap<Vec<usize>, u32> = HashMap::new();
    for f in facets {
        for skip in 0..d {
            let ridge: Vec<usize> =
                f.vertex_ids.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            *count.entry(ridge).or_insert(0) += 1;
        }
    }
    count.values().all(|&c| c == 2)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ρ(d, j) = ½ [C(⌈d/2⌉, d-j-1) + C(⌊d/2⌋, d-j-1)]`.
pub fn hinman_rho(d: usize, j: usize) -> f64 {
    let r = d - j - 1;
    0.5 * (binomial(d.div_ceil(2), r) + binomial(d / 2, r))
}

/// First `j ≥ ⌊d/2⌋ - 1` with `f_j < ρ(d,j) f_{d-1}`, if any.
pub fn hinman_violation(f: &[usize]) -> Option<usize> {
    let d = f.len();
    let facets = f[d - 1] as f64;
    ((d / 2).saturating_sub(1)..d).find(|&j| (f[j] as f64) < hinman_rho(d, j) * facets - 1e-9)
}
