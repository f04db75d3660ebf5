//! Oracles for the acceptance suite, written against coefficient arrays
//! rather than the library's ordinal and layout code.

use std::collections::HashMap;
use std::f64::consts::TAU;

use sprlab::{Ordinal, StepFun, C64};

/// A point below `w^5`: index `i` holds the coefficient of `w^i`.
pub type Pt = [u64; 5];

pub const ONE: Pt = [1, 0, 0, 0, 0];

pub fn omega_pow(k: usize) -> Pt {
    let mut p = [0; 5];
    p[k] = 1;
    p
}

pub fn scaled(mut p: Pt, c: u64) -> Pt {
    p.iter_mut().for_each(|x| *x *= c);
    p
}

fn leading(p: &Pt) -> Option<usize> {
    (0..5).rev().find(|&i| p[i] != 0)
}

fn trailing(p: &Pt) -> Option<usize> {
    (0..5).find(|&i| p[i] != 0)
}

/// Ordinal sum `a + b`: terms of `a` below the leading exponent of `b` vanish.
pub fn add(a: Pt, b: Pt) -> Pt {
    let Some(e) = leading(&b) else { return a };
    let mut out = [0; 5];
    out[e + 1..].copy_from_slice(&a[e + 1..]);
    out[e] = a[e] + b[e];
    out[..e].copy_from_slice(&b[..e]);
    out
}

pub fn to_ordinal(p: &Pt) -> Ordinal {
    let terms = (0..5)
        .rev()
        .filter(|&i| p[i] != 0)
        .map(|i| (Ordinal::nat(i as u64), p[i]))
        .collect();
    Ordinal::from_terms(terms).expect("decreasing exponents")
}

/// `r` in `(w^k (j-1), w^k j]` as `(j, p)` with `r = w^k (j-1) + p`, `p` in `[1, w^k]`.
fn block(r: Pt, k: usize) -> (u64, Pt) {
    assert!(r[k + 1..].iter().all(|&x| x == 0), "{r:?} is past w^{}", k + 1);
    let q = r[k];
    let mut rest = [0; 5];
    rest[..k].copy_from_slice(&r[..k]);
    if leading(&rest).is_none() {
        (q, omega_pow(k))
    } else {
        (q + 1, rest)
    }
}

type F<'a> = &'a dyn Fn(Pt) -> C64;

/// `U_{a,b}(f, g)(r)` for `a, b <= 2`, straight from the defining block
/// formulas: the diagonal and successor-successor splittings into
/// alternating blocks of size `w^k`, the top point, and the swap for `a > b`.
pub fn overlap_direct(a: usize, b: usize, f: F, g: F, r: Pt) -> C64 {
    let half = 0.5;
    if a == 0 {
        return half * (f(ONE) + g(r));
    }
    if b == 0 || a > b {
        return overlap_direct(b, a, g, f, r);
    }
    if r == omega_pow(a + b) {
        return half * (f(omega_pow(a)) + g(omega_pow(b)));
    }
    // Blocks have size w^(al ⊕ be + 1) with al = a - 1, be = b - 1.
    let (al, be) = (a - 1, b - 1);
    let (j, p) = block(r, al + be + 1);
    let n = j.div_ceil(2);
    let f_lo = scaled(omega_pow(al), n - 1);
    let g_lo = scaled(omega_pow(be), n - 1);
    if j % 2 == 1 {
        // f on (w^al (n-1), w^a], g on (w^be (n-1), w^be n].
        let fr = move |x: Pt| f(add(f_lo, x));
        let gr = move |x: Pt| g(add(g_lo, x));
        overlap_direct(a, be, &fr, &gr, p)
    } else {
        // f on (w^al (n-1), w^al n], g on (w^be n, w^b].
        let g_mid = scaled(omega_pow(be), n);
        let fr = move |x: Pt| f(add(f_lo, x));
        let gr = move |x: Pt| g(add(g_mid, x));
        overlap_direct(al, b, &fr, &gr, p)
    }
}

pub fn eval_at(f: &StepFun) -> impl Fn(Pt) -> C64 + '_ {
    move |p| f.eval(&to_ordinal(&p)).expect("point in the domain")
}

/// Points `w*j + k` and `w*j` for `j, k <= 32`, a coarser lattice through the
/// higher blocks, and the top `w^top_exp`.
pub fn overlap_grid(top_exp: usize) -> Vec<Pt> {
    let mut out = Vec::new();
    for j in 0..=32 {
        for k in 0..=32 {
            if j + k > 0 {
                out.push([k, j, 0, 0, 0]);
            }
        }
    }
    for h in 0..4 {
        for i in 0..5 {
            for j in 0..4 {
                for k in 0..4 {
                    let p = [k, j, i, h, 0];
                    if leading(&p).is_some_and(|e| e < top_exp) && (i > 0 || h > 0) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out.push(omega_pow(top_exp));
    out
}

/// Iterated derivatives of `[1, w^3*4]` from the definition: `x` survives
/// the `(k+1)`-st derivative iff it survived the `k`-th and every left
/// neighbourhood `(x[n], x)` still meets the `k`-th derived set. The probes
/// `x[n] + w^i` and `x[n+1]` lie in that neighbourhood for every `i` below
/// the trailing exponent.
pub struct DerivativeOracle {
    memo: HashMap<(Pt, usize), bool>,
}

impl DerivativeOracle {
    /// Left neighbourhoods checked per point.
    const DEPTH: u64 = 4;

    pub fn new() -> Self {
        DerivativeOracle { memo: HashMap::new() }
    }

    pub fn in_derived(&mut self, x: Pt, k: usize) -> bool {
        if k == 0 {
            return leading(&x).is_some();
        }
        if let Some(&v) = self.memo.get(&(x, k)) {
            return v;
        }
        let v = self.in_derived(x, k - 1) && self.limit_of_derived(x, k - 1);
        self.memo.insert((x, k), v);
        v
    }

    fn limit_of_derived(&mut self, x: Pt, k: usize) -> bool {
        let Some(e) = trailing(&x) else { return false };
        if e == 0 {
            return false;
        }
        let base = |n: u64| {
            let mut y = x;
            y[e] -= 1;
            y[e - 1] += n;
            y
        };
        (1..=Self::DEPTH).all(|n| {
            let y = base(n);
            let mut probes: Vec<Pt> = (0..e).map(|i| add(y, omega_pow(i))).collect();
            probes.push(base(n + 1));
            probes.into_iter().any(|p| self.in_derived(p, k))
        })
    }

    /// The largest `k <= 4` with `x` in the `k`-th derived set.
    pub fn rank(&mut self, x: Pt) -> usize {
        (0..=4).rev().find(|&k| self.in_derived(x, k)).expect("x is nonzero")
    }
}

/// Nonzero points up to `w^3*4` with coefficients at most `c`.
pub fn points_up_to_w3_times_4(c: u64) -> Vec<Pt> {
    let mut out = Vec::new();
    for h in 0..=4 {
        for i in 0..=c {
            for j in 0..=c {
                for k in 0..=c {
                    let p = [k, j, i, h, 0];
                    if (h < 4 || p[..3].iter().all(|&x| x == 0)) && leading(&p).is_some() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn sup_at(pairs: &[(C64, C64)], lambda: C64) -> f64 {
    pairs.iter().map(|&(v, w)| (v - lambda * w).norm_sqr()).fold(0.0, f64::max).sqrt()
}

/// Distinct value pairs over the common refinement.
pub fn value_cells(f: &StepFun, g: &StepFun) -> Vec<(C64, C64)> {
    let mut cells = f.value_pairs(g).expect("same domain");
    cells.sort_by(|a, b| {
        (a.0.re, a.0.im, a.1.re, a.1.im)
            .partial_cmp(&(b.0.re, b.0.im, b.1.re, b.1.im))
            .expect("finite values")
    });
    cells.dedup();
    cells
}

/// Minimum over `2^log2` equally spaced phases. The phase advances by a
/// rotation recurrence and is re-synchronised every 4096 steps.
pub fn dense_grid_min(cells: &[(C64, C64)], log2: u32) -> f64 {
    let n = 1usize << log2;
    let step = C64::from_polar(1.0, TAU / n as f64);
    let mut best = f64::INFINITY;
    let mut lambda = C64::new(1.0, 0.0);
    for k in 0..n {
        if k % 4096 == 0 {
            lambda = C64::from_polar(1.0, TAU * k as f64 / n as f64);
        }
        best = best.min(sup_at(cells, lambda));
        lambda *= step;
    }
    best
}

/// Exact minimum of `θ ↦ max_i |v_i - e^{iθ} w_i|`. Each squared term is
/// `a_i - 2 ρ_i cos(θ + ψ_i)`, so the minimum of their maximum is attained
/// at the bottom of one term or where two terms cross.
pub fn candidate_min(cells: &[(C64, C64)]) -> f64 {
    let terms: Vec<(f64, f64, f64)> = cells
        .iter()
        .map(|&(v, w)| {
            let z = v.conj() * w;
            (v.norm_sqr() + w.norm_sqr(), z.norm(), z.arg())
        })
        .collect();
    let mut thetas: Vec<f64> = terms.iter().map(|t| -t.2).collect();
    for (i, &(a1, r1, p1)) in terms.iter().enumerate() {
        for &(a2, r2, p2) in &terms[i + 1..] {
            let p = 2.0 * (r1 * p1.cos() - r2 * p2.cos());
            let q = -2.0 * (r1 * p1.sin() - r2 * p2.sin());
            let m = p.hypot(q);
            if m == 0.0 || (a1 - a2).abs() > m {
                continue;
            }
            let (phi, d) = (q.atan2(p), ((a1 - a2) / m).acos());
            thetas.extend([phi + d, phi - d]);
        }
    }
    thetas
        .into_iter()
        .map(|t| sup_at(cells, C64::from_polar(1.0, t)))
        .fold(f64::INFINITY, f64::min)
}

/// Lipschitz constant of the phase objective: `max |w_i|`.
pub fn phase_lipschitz(cells: &[(C64, C64)]) -> f64 {
    cells.iter().map(|c| c.1.norm()).fold(0.0, f64::max)
}
