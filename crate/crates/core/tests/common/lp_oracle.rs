//! Brute-force LP reference: enumerate every basic solution (intersection of `d`
//! constraint boundaries) and keep the best feasible one. Only for tiny problems.

use affsel_core::lp::{Halfspace, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FEAS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Case {
    pub rows: Vec<Halfspace<f64>>,
    pub objective: Vec<f64>,
    pub sense: Sense,
}

#[allow(clippy::needless_range_loop)]
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

pub fn feasible(rows: &[Halfspace<f64>], v: &[f64], eps: f64) -> bool {
    rows.iter().all(|h| {
        let lhs: f64 = h.normal().iter().zip(v).map(|(a, b)| a * b).sum();
        lhs <= h.offset() + eps
    })
}

/// Best objective over basic feasible solutions; `None` when there is none. Assumes
/// the region, if nonempty, has a vertex (true for the boxed cases below).
pub fn brute_force(case: &Case) -> Option<f64> {
    let d = case.objective.len();
    let mut best: Option<f64> = None;
    for s in subsets(case.rows.len(), d) {
        let a = s.iter().map(|&i| case.rows[i].normal().to_vec()).collect();
        let b = s.iter().map(|&i| case.rows[i].offset()).collect();
        let Some(v) = solve_square(a, b) else { continue };
        if !feasible(&case.rows, &v, FEAS) {
            continue;
        }
        let val: f64 = case.objective.iter().zip(&v).map(|(a, b)| a * b).sum();
        best = Some(match (best, case.sense) {
            (None, _) => val,
            (Some(b), Sense::Maximize) => b.max(val),
            (Some(b), Sense::Minimize) => b.min(val),
        });
    }
    best
}

/// Random bounded problem: a box `|v_i| <= r` plus integer rows, at most 12 in all.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.gen_range(1..=3);
    let r = rng.gen_range(2..=10) as f64;
    let mut rows = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        rows.push(Halfspace::new(e.clone(), r));
        e[i] = -1.0;
        rows.push(Halfspace::new(e, r));
    }
    let extra = rng.gen_range(0..=12 - 2 * d);
    for _ in 0..extra {
        let normal: Vec<f64> = (0..d).map(|_| rng.gen_range(-5..=5) as f64).collect();
        rows.push(Halfspace::new(normal, rng.gen_range(-6..=10) as f64));
    }
    let objective = (0..d).map(|_| rng.gen_range(-4..=4) as f64).collect();
    let sense = if rng.gen_bool(0.5) {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    Case { rows, objective, sense }
}

/// Hand-written degenerate problems followed by 300 seeded random ones.
pub fn regression_cases() -> Vec<Case> {
    let h = |n: &[f64], o: f64| Halfspace::new(n.to_vec(), o);
    let mut out = vec![
        // Four constraints through the optimum (1, 1).
        Case {
            rows: vec![
                h(&[1.0, 0.0], 1.0),
                h(&[0.0, 1.0], 1.0),
                h(&[1.0, 1.0], 2.0),
                h(&[2.0, 1.0], 3.0),
                h(&[-1.0, 0.0], 0.0),
                h(&[0.0, -1.0], 0.0),
            ],
            objective: vec![1.0, 1.0],
            sense: Sense::Maximize,
        },
        // Duplicate rows and a whole optimal edge.
        Case {
            rows: vec![
                h(&[1.0, 1.0], 4.0),
                h(&[1.0, 1.0], 4.0),
                h(&[-1.0, 0.0], 0.0),
                h(&[0.0, -1.0], 0.0),
            ],
            objective: vec![1.0, 1.0],
            sense: Sense::Maximize,
        },
        // Single point region.
        Case {
            rows: vec![h(&[1.0], 2.0), h(&[-1.0], -2.0)],
            objective: vec![3.0],
            sense: Sense::Minimize,
        },
        // Empty region in 3-D.
        Case {
            rows: vec![
                h(&[1.0, 1.0, 1.0], 1.0),
                h(&[-1.0, 0.0, 0.0], -1.0),
                h(&[0.0, -1.0, 0.0], -1.0),
                h(&[0.0, 0.0, -1.0], 0.0),
            ],
            objective: vec![0.0, 0.0, 1.0],
            sense: Sense::Maximize,
        },
        // Zero objective over a triangle.
        Case {
            rows: vec![h(&[-1.0, 0.0], 0.0), h(&[0.0, -1.0], 0.0), h(&[1.0, 1.0], 1.0)],
            objective: vec![0.0, 0.0],
            sense: Sense::Minimize,
        },
    ];
    out.extend((0..300).map(random_case));
    out
}
