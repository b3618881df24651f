use std::collections::BTreeSet;

use super::predicates::{orientation, Permutations};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Every `d`-subset whose hyperplane leaves all other points strictly on one
/// side. Exponential; validation only.
pub fn brute_force_facets(points: &[Vec<f64>]) -> Result<BTreeSet<Vec<usize>>> {
    let n = points.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyPoints { limit: BRUTE_FORCE_LIMIT, actual: n });
    }
    let d = points.first().map(|p| p.len()).unwrap_or(0);
    if d < 2 {
        return Err(Error::Unsupported("hulls need dimension >= 2".into()));
    }
    if let Some(bad) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, actual: bad.len() });
    }
    if n < d + 1 {
        return Err(Error::TooFewPoints { needed: d + 1, dim: d, actual: n });
    }
    let perms = Permutations::new(d - 1);
    let mut out = BTreeSet::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let verts: Vec<&[f64]> = subset.iter().map(|&i| points[i].as_slice()).collect();
        let mut side = 0;
        let mut is_facet = true;
        for (q, p) in points.iter().enumerate() {
            if subset.contains(&q) {
                continue;
            }
            let o = orientation(&verts, p, &perms);
            if o == 0 || (side != 0 && o != side) {
                is_facet = false;
                break;
            }
            side = o;
        }
        if is_facet {
            out.insert(subset.clone());
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    Ok(out)
}

pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
