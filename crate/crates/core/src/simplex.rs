//! Derivative-free Nelder-Mead simplex descent.
//!
//! Small, deterministic minimizer used to fit per-segment parameters. Works
//! on unconstrained coordinates; callers map constrained parameters into log
//! space. Non-finite objective values are treated as +inf so the simplex
//! backs away from invalid regions.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Evaluation budget for one run.
    pub max_evals: usize,
    /// Converged when max-min objective across the simplex drops below this.
    pub spread_tol: f64,
    /// Offset used to build the initial simplex around the start point.
    pub init_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 500,
            spread_tol: 1e-8,
            init_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` starting from `x0`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let dim = x0.len();
    assert!(dim > 0, "cannot optimize a zero-dimensional point");

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        sanitize(f(x))
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.init_step;
        simplex.push(p);
    }
    let mut scores: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = scores[worst] - scores[best];
        if spread.is_finite() && spread < opts.spread_tol {
            converged = true;
            break;
        }

        // Centroid of all points except the worst.
        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for d in 0..dim {
                centroid[d] += simplex[i][d];
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |a: &[f64], b: &[f64], coeff: f64| -> Vec<f64> {
            a.iter()
                .zip(b)
                .map(|(ai, bi)| ai + coeff * (ai - bi))
                .collect()
        };

        let reflected = blend(&centroid, &simplex[worst], REFLECT);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < scores[best] {
            let expanded = blend(&centroid, &simplex[worst], EXPAND);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                scores[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                scores[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < scores[second_worst] {
            simplex[worst] = reflected;
            scores[worst] = f_reflected;
            continue;
        }

        // Contract toward the centroid from the better of worst/reflected.
        let (base, f_base) = if f_reflected < scores[worst] {
            (reflected.clone(), f_reflected)
        } else {
            (simplex[worst].clone(), scores[worst])
        };
        let contracted: Vec<f64> = centroid
            .iter()
            .zip(&base)
            .map(|(c, b)| c + CONTRACT * (b - c))
            .collect();
        let f_contracted = eval(&contracted, &mut evals);
        if f_contracted < f_base {
            simplex[worst] = contracted;
            scores[worst] = f_contracted;
            continue;
        }

        // Shrink everything toward the best point.
        let best_point = simplex[best].clone();
        for &i in order.iter().skip(1) {
            for d in 0..dim {
                simplex[i][d] = best_point[d] + SHRINK * (simplex[i][d] - best_point[d]);
            }
            scores[i] = eval(&simplex[i].clone(), &mut evals);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
        .expect("simplex is nonempty");
    SimplexResult {
        x: simplex[best].clone(),
        fx: scores[best],
        evals,
        converged,
    }
}
