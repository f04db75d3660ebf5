//! Minimisation of `‖f - λ g‖` over the unit circle.

use std::f64::consts::TAU;

use crate::funcspace::C64;

/// Coarse grid resolution before local refinement.
pub const COARSE_GRID: usize = 1024;

/// Candidates refined per call; the rest lie above the best by more than the
/// grid can hide.
const MAX_REFINED: usize = 64;

/// Distinct value pairs `(v, w)` of a common refinement.
pub(crate) fn cells(pairs: &[(C64, C64)]) -> Vec<(C64, C64)> {
    let mut uniq: Vec<(C64, C64)> = pairs.to_vec();
    let key = |p: &(C64, C64)| [p.0.re.to_bits(), p.0.im.to_bits(), p.1.re.to_bits(), p.1.im.to_bits()];
    uniq.sort_by_key(key);
    uniq.dedup_by_key(|p| key(p));
    uniq
}

fn dist_at(cells: &[(C64, C64)], theta: f64) -> f64 {
    let lambda = C64::from_polar(1.0, theta);
    cells
        .iter()
        .map(|&(v, w)| (v - lambda * w).norm_sqr())
        .fold(0.0, f64::max)
        .sqrt()
}

/// Golden-section search on `[lo, hi]`, stopping once the bracket is narrower
/// than `width`. Returns the smallest value seen.
fn golden(cells: &[(C64, C64)], mut lo: f64, mut hi: f64, width: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (dist_at(cells, x1), dist_at(cells, x2));
    let mut best = f1.min(f2);
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = dist_at(cells, x1);
            best = best.min(f1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = dist_at(cells, x2);
            best = best.min(f2);
        }
    }
    best
}

/// `min_θ max_i |v_i - e^{iθ} w_i|` to within `tol`.
///
/// The objective is `L`-Lipschitz in `θ` with `L = max |w_i|`, so the grid
/// point nearest the minimiser lies within `L Δ / 2` of the minimum and every
/// grid point that close to the grid minimum gets a bracket of width `2Δ`.
pub(crate) fn min_over_circle(cells: &[(C64, C64)], tol: f64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let lip = cells.iter().map(|c| c.1.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let step = TAU / COARSE_GRID as f64;
    let grid: Vec<f64> = (0..COARSE_GRID).map(|k| dist_at(cells, k as f64 * step)).collect();
    let best = grid.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = grid.iter().copied().fold(0.0, f64::max) - best;
    if spread <= tol {
        return best;
    }
    let margin = lip * step;
    let mut cand: Vec<usize> = (0..COARSE_GRID).filter(|&k| grid[k] <= best + margin).collect();
    cand.sort_by(|&i, &j| grid[i].total_cmp(&grid[j]));
    cand.truncate(MAX_REFINED);
    // Bracket widths below a few ulps of TAU cannot shrink further.
    let width = (tol / lip).max(1e-15);
    cand.into_iter()
        .map(|k| {
            let mid = k as f64 * step;
            golden(cells, mid - step, mid + step, width)
        })
        .fold(best, f64::min)
}
