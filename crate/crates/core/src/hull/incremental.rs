//! Randomised incremental convex hull with conflict tracking.
//!
//! Every point that is still outside the current hull remembers one facet it
//! sees. Inserting a point walks the visible region from that facet, cones
//! the horizon to the new point, and hands the orphaned outside points to
//! the new facets.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::predicates::{exact_orientation, Permutations, RawHyperplane};
use super::{f_vector_of, volume_of, Facet, HullResult};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
pub struct HullOptions {
    /// Seed for the insertion order.
    pub seed: u64,
    /// Points closer than this are merged.
    pub merge_tol: f64,
}

impl Default for HullOptions {
    fn default() -> Self {
        Self { seed: 0x5eed_b10c, merge_tol: 1e-12 }
    }
}

struct FacetRec {
    verts: Vec<u32>,
    nbrs: Vec<u32>,
    plane: RawHyperplane,
    flip: i32,
    outside: Vec<u32>,
    alive: bool,
    mark: u32,
    visible: bool,
}

struct Builder<'a> {
    pts: Vec<&'a [f64]>,
    d: usize,
    perms: Permutations,
    center: Vec<f64>,
    facets: Vec<FacetRec>,
    free: Vec<u32>,
    conflict: Vec<u32>,
    stamp: u32,
}

impl<'a> Builder<'a> {
    fn vertex_refs(&self, verts: &[u32]) -> Vec<&'a [f64]> {
        verts.iter().map(|&v| self.pts[v as usize]).collect()
    }

    fn sees(&self, f: u32, q: u32) -> bool {
        let rec = &self.facets[f as usize];
        let origin = self.pts[rec.verts[0] as usize];
        let (val, bound) = rec.plane.eval(origin, self.pts[q as usize]);
        if val > bound && bound > 1e-280 {
            true
        } else if val < -bound && bound > 1e-280 {
            false
        } else {
            exact_orientation(&self.vertex_refs(&rec.verts), self.pts[q as usize]) * rec.flip > 0
        }
    }

    fn make_facet(&mut self, verts: Vec<u32>, nbrs: Vec<u32>) -> Result<u32> {
        let refs = self.vertex_refs(&verts);
        let mut plane = RawHyperplane::through(&refs, &self.perms);
        let (val, bound) = plane.eval(refs[0], &self.center);
        let side = if val > bound && bound > 1e-280 {
            1
        } else if val < -bound && bound > 1e-280 {
            -1
        } else {
            exact_orientation(&refs, &self.center)
        };
        if side == 0 {
            return Err(Error::DegenerateInput { rank: self.d - 1, dim: self.d });
        }
        // the interior point must end up on the negative side
        let flip = -side;
        if flip < 0 {
            plane.normal.iter_mut().for_each(|x| *x = -*x);
        }
        let rec = FacetRec { verts, nbrs, plane, flip, outside: Vec::new(), alive: true, mark: 0, visible: false };
        Ok(match self.free.pop() {
            Some(id) => {
                self.facets[id as usize] = rec;
                id
            }
            None => {
                self.facets.push(rec);
                (self.facets.len() - 1) as u32
            }
        })
    }

    fn insert(&mut self, p: u32) -> Result<()> {
        let d = self.d;
        self.stamp += 1;
        let stamp = self.stamp;
        let start = self.conflict[p as usize];
        let mut visible = vec![start];
        {
            let f = &mut self.facets[start as usize];
            f.mark = stamp;
            f.visible = true;
        }
        let mut head = 0;
        while head < visible.len() {
            let f = visible[head];
            head += 1;
            for k in 0..d {
                let g = self.facets[f as usize].nbrs[k];
                if self.facets[g as usize].mark != stamp {
                    let vis = self.sees(g, p);
                    let rec = &mut self.facets[g as usize];
                    rec.mark = stamp;
                    rec.visible = vis;
                    if vis {
                        visible.push(g);
                    }
                }
            }
        }

        let mut created = Vec::new();
        for &f in &visible {
            for k in 0..d {
                let g = self.facets[f as usize].nbrs[k];
                if self.facets[g as usize].visible && self.facets[g as usize].mark == stamp {
                    continue;
                }
                let mut verts = self.facets[f as usize].verts.clone();
                verts[k] = p;
                let mut nbrs = vec![NONE; d];
                nbrs[k] = g;
                let id = self.make_facet(verts, nbrs)?;
                let slot = self.facets[g as usize].nbrs.iter().position(|&x| x == f).expect("adjacency is symmetric");
                self.facets[g as usize].nbrs[slot] = id;
                created.push((id, k));
            }
        }

        let mut ridges: HashMap<Vec<u32>, (u32, usize)> = HashMap::with_capacity(created.len() * d);
        for &(id, k) in &created {
            for r in 0..d {
                if r == k {
                    continue;
                }
                let mut key: Vec<u32> = self.facets[id as usize]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != r)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                match ridges.remove(&key) {
                    Some((other, slot)) => {
                        self.facets[id as usize].nbrs[r] = other;
                        self.facets[other as usize].nbrs[slot] = id;
                    }
                    None => {
                        ridges.insert(key, (id, r));
                    }
                }
            }
        }
        debug_assert!(ridges.is_empty(), "horizon cone left unmatched ridges");

        let mut orphans = Vec::new();
        for &f in &visible {
            let rec = &mut self.facets[f as usize];
            rec.alive = false;
            orphans.append(&mut rec.outside);
            self.free.push(f);
        }
        for q in orphans {
            if q == p {
                continue;
            }
            self.conflict[q as usize] = NONE;
            for &(id, _) in &created {
                if self.sees(id, q) {
                    self.conflict[q as usize] = id;
                    self.facets[id as usize].outside.push(q);
                    break;
                }
            }
        }
        self.conflict[p as usize] = NONE;
        Ok(())
    }
}

/// Merges points closer than `tol`. Returns the representative of every
/// input index and the list of representatives.
fn merge_duplicates(points: &[Vec<f64>], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    let mut rep: Vec<usize> = (0..n).collect();
    for (pos, &i) in order.iter().enumerate() {
        if rep[i] != i {
            continue;
        }
        for &j in &order[pos + 1..] {
            if points[j][0] - points[i][0] > tol {
                break;
            }
            if rep[j] == j {
                let dist2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                if dist2 <= tol * tol {
                    rep[j] = i;
                }
            }
        }
    }
    // representatives are the smallest index in their group
    let mut remap = rep.clone();
    for i in 0..n {
        let r = rep[i];
        if r != i && i < remap[r] {
            remap[r] = i;
        }
    }
    for i in 0..n {
        remap[i] = remap[rep[i]];
    }
    let unique = (0..n).filter(|&i| remap[i] == i).collect();
    (remap, unique)
}

/// Picks `d+1` affinely independent points greedily, each maximising the
/// distance to the affine hull of the previous ones.
fn initial_simplex(pts: &[&[f64]], d: usize) -> Result<Vec<usize>> {
    let scale = pts.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let first = (0..pts.len()).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let residual = |p: &[f64], basis: &[Vec<f64>]| -> Vec<f64> {
        let mut r: Vec<f64> = p.iter().zip(pts[first]).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for b in basis {
                let dot: f64 = r.iter().zip(b).map(|(x, y)| x * y).sum();
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
        }
        r
    };
    for rank in 0..d {
        let mut best = (0.0, usize::MAX);
        for (i, p) in pts.iter().enumerate() {
            let r = residual(p, &basis);
            let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > best.0 {
                best = (len, i);
            }
        }
        if best.1 == usize::MAX || best.0 <= 1e-12 * scale {
            return Err(Error::DegenerateInput { rank, dim: d });
        }
        let r = residual(pts[best.1], &basis);
        let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(r.into_iter().map(|x| x / len).collect());
        chosen.push(best.1);
    }
    let refs: Vec<&[f64]> = chosen[..d].iter().map(|&i| pts[i]).collect();
    if exact_orientation(&refs, pts[chosen[d]]) == 0 {
        return Err(Error::DegenerateInput { rank: d - 1, dim: d });
    }
    Ok(chosen)
}

pub fn convex_hull(points: &[Vec<f64>]) -> Result<HullResult> {
    convex_hull_with(points, &HullOptions::default())
}

pub fn convex_hull_with(points: &[Vec<f64>], opts: &HullOptions) -> Result<HullResult> {
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    if d < 2 {
        return Err(Error::Unsupported("hulls need dimension >= 2".into()));
    }
    if d > 8 {
        return Err(Error::Unsupported(format!("dimension {d} > 8")));
    }
    if let Some(bad) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, actual: bad.len() });
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite coordinate".into()));
    }
    if points.len() < d + 1 {
        return Err(Error::TooFewPoints { needed: d + 1, dim: d, actual: points.len() });
    }
    if points.len() >= NONE as usize {
        return Err(Error::Unsupported("too many points".into()));
    }
    let (merged, unique) = merge_duplicates(points, opts.merge_tol);
    let pts: Vec<&[f64]> = unique.iter().map(|&i| points[i].as_slice()).collect();
    if pts.len() < d + 1 {
        return Err(Error::DegenerateInput { rank: pts.len().saturating_sub(1), dim: d });
    }
    let simplex = initial_simplex(&pts, d)?;
    let mut center = vec![0.0; d];
    for &i in &simplex {
        center.iter_mut().zip(pts[i]).for_each(|(c, x)| *c += x / (d + 1) as f64);
    }

    let n = pts.len();
    let mut b = Builder {
        pts,
        d,
        perms: Permutations::new(d - 1),
        center,
        facets: Vec::new(),
        free: Vec::new(),
        conflict: vec![NONE; n],
        stamp: 0,
    };
    // facet i omits simplex vertex i; its neighbour across slot j is facet
    // (index of the vertex in slot j)
    for i in 0..=d {
        let members: Vec<usize> = (0..=d).filter(|&j| j != i).collect();
        let verts = members.iter().map(|&j| simplex[j] as u32).collect();
        let nbrs = members.iter().map(|&j| j as u32).collect();
        b.make_facet(verts, nbrs)?;
    }
    let mut in_simplex = vec![false; n];
    simplex.iter().for_each(|&i| in_simplex[i] = true);
    for q in 0..n as u32 {
        if in_simplex[q as usize] {
            continue;
        }
        for f in 0..=d as u32 {
            if b.sees(f, q) {
                b.conflict[q as usize] = f;
                b.facets[f as usize].outside.push(q);
                break;
            }
        }
    }

    let mut order: Vec<u32> = (0..n as u32).filter(|&q| !in_simplex[q as usize]).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(opts.seed));
    for q in order {
        if b.conflict[q as usize] != NONE {
            b.insert(q)?;
        }
    }

    let mut facets = Vec::new();
    for rec in b.facets.iter().filter(|r| r.alive) {
        let mut ids: Vec<usize> = rec.verts.iter().map(|&v| unique[v as usize]).collect();
        ids.sort_unstable();
        let norm = rec.plane.normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        let normal: Vec<f64> = rec.plane.normal.iter().map(|x| x / norm).collect();
        let offset = normal.iter().zip(b.pts[rec.verts[0] as usize]).map(|(a, x)| a * x).sum();
        facets.push(Facet { vertex_ids: ids, normal, offset });
    }
    facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
    let mut vertex_ids: Vec<usize> = facets.iter().flat_map(|f| f.vertex_ids.iter().copied()).collect();
    vertex_ids.sort_unstable();
    vertex_ids.dedup();
    let f_vector = f_vector_of(&facets, d);
    let volume = volume_of(points, &facets, &vertex_ids, d);
    Ok(HullResult { dim: d, points: points.to_vec(), merged, vertex_ids, facets, f_vector, volume })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_merged_to_lowest_index() {
        let pts = vec![vec![0.5, 0.0], vec![0.0, 0.0], vec![0.5, 1e-14], vec![1.0, 0.0]];
        let (rep, unique) = merge_duplicates(&pts, 1e-12);
        assert_eq!(rep, vec![0, 1, 0, 3]);
        assert_eq!(unique, vec![0, 1, 3]);
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert!(matches!(convex_hull(&pts), Err(Error::DegenerateInput { rank: 1, dim: 2 })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0]]), Err(Error::TooFewPoints { .. })));
        let ragged = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0]];
        assert!(matches!(convex_hull(&ragged), Err(Error::DimensionMismatch { .. })));
        let nan = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, f64::NAN]];
        assert!(convex_hull(&nan).is_err());
    }

    #[test]
    fn insertion_order_does_not_change_the_facets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        use rand::Rng;
        let pts: Vec<Vec<f64>> = (0..60).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let a = convex_hull_with(&pts, &HullOptions { seed: 1, ..Default::default() }).unwrap();
        let b = convex_hull_with(&pts, &HullOptions { seed: 2, ..Default::default() }).unwrap();
        let ids = |h: &HullResult| h.facets.iter().map(|f| f.vertex_ids.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
        assert!((a.volume - b.volume).abs() < 1e-12);
    }
}
