//! Branch labelling across neighbouring grid points by maximal overlap of
//! the Floquet functions at `t = 0`.

use log::info;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::floquet::FloquetSolution;
use crate::scalar::Real;

/// Below this per-state overlap a greedy match is re-done exhaustively and,
/// failing that, declared ambiguous.
const MIN_OVERLAP: f64 = 0.5;
const EXHAUSTIVE_MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct BranchMatch {
    /// Branch `m` of the previous point continues as state `permutation[m]`.
    pub permutation: Vec<usize>,
    /// `|<u_m^prev(0)|u_perm(m)^next(0)>|^2` per branch.
    pub overlaps: Vec<f64>,
    /// Set when no assignment reached the overlap threshold and the labels
    /// were assigned by quasienergy rank instead.
    pub fallback: bool,
}

pub fn overlap_matrix<T: Real>(
    prev: &FloquetSolution<T>,
    next: &FloquetSolution<T>,
) -> DMatrix<f64> {
    let a = &prev.samples[0];
    let b = &next.samples[0];
    (a.adjoint() * b).map(|z| z.norm_sqr().as_f64())
}

pub fn track_branches<T: Real>(
    prev: &FloquetSolution<T>,
    next: &FloquetSolution<T>,
) -> Result<BranchMatch> {
    if prev.dim() != next.dim() {
        return Err(Error::DimensionMismatch {
            expected: prev.dim(),
            found: next.dim(),
        });
    }
    let o = overlap_matrix(prev, next);
    let n = prev.dim();

    let mut perm = greedy_assignment(&o);
    if quality(&o, &perm) < MIN_OVERLAP && n <= EXHAUSTIVE_MAX_DIM {
        perm = exhaustive_assignment(&o);
    }
    if quality(&o, &perm) >= MIN_OVERLAP {
        let overlaps = (0..n).map(|m| o[(m, perm[m])]).collect();
        return Ok(BranchMatch {
            permutation: perm,
            overlaps,
            fallback: false,
        });
    }

    info!(
        "ambiguous branch assignment (overlap below {MIN_OVERLAP}); labelling by quasienergy order"
    );
    let perm = rank_assignment(&prev.quasienergies, &next.quasienergies);
    let overlaps = (0..n).map(|m| o[(m, perm[m])]).collect();
    Ok(BranchMatch {
        permutation: perm,
        overlaps,
        fallback: true,
    })
}

fn quality(o: &DMatrix<f64>, perm: &[usize]) -> f64 {
    perm.iter()
        .enumerate()
        .map(|(m, &p)| o[(m, p)])
        .fold(f64::INFINITY, f64::min)
}

/// Repeatedly take the largest remaining overlap.
pub fn greedy_assignment(o: &DMatrix<f64>) -> Vec<usize> {
    let n = o.nrows();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|&(a, b), &(c, d)| {
        o[(c, d)]
            .partial_cmp(&o[(a, b)])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then((a, b).cmp(&(c, d)))
    });
    for (i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    perm
}

/// Permutation maximizing the total overlap, by exhaustive search.
pub fn exhaustive_assignment(o: &DMatrix<f64>) -> Vec<usize> {
    fn go(
        o: &DMatrix<f64>,
        row: usize,
        used: &mut [bool],
        current: &mut Vec<usize>,
        score: f64,
        best: &mut (f64, Vec<usize>),
    ) {
        let n = o.nrows();
        if row == n {
            if score > best.0 {
                *best = (score, current.clone());
            }
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                current.push(j);
                go(o, row + 1, used, current, score + o[(row, j)], best);
                current.pop();
                used[j] = false;
            }
        }
    }
    let n = o.nrows();
    let mut best = (f64::NEG_INFINITY, (0..n).collect());
    go(
        o,
        0,
        &mut vec![false; n],
        &mut Vec::with_capacity(n),
        0.0,
        &mut best,
    );
    best.1
}

fn rank_assignment<T: Real>(prev: &[T], next: &[T]) -> Vec<usize> {
    let order = |v: &[T]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal));
        idx
    };
    let p = order(prev);
    let q = order(next);
    let mut perm = vec![0; prev.len()];
    for (rank, &m) in p.iter().enumerate() {
        perm[m] = q[rank];
    }
    perm
}
