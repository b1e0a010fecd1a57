//! Derivative-free minimization via the Nelder-Mead simplex.
//!
//! The objective surfaces here (negative log posteriors over two
//! hyperparameters) are smooth and unimodal but their gradients are awkward
//! to derive, so a simplex search with box projection is the pragmatic
//! choice. Standard reflection/expansion/contraction coefficients.

/// Box bounds, applied by projection: candidate points are clamped
/// coordinate-wise before evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl Bounds {
    fn project(&self, x: &mut [f64; 2]) {
        for i in 0..2 {
            x[i] = x[i].clamp(self.lower[i], self.upper[i]);
        }
    }
}

/// Result of a simplex run.
#[derive(Debug, Clone, Copy)]
pub struct MinimizeResult {
    pub x: [f64; 2],
    pub fval: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimize `f` over a 2-d box starting from `x0`.
///
/// Convergence is declared when the spread of function values across the
/// simplex drops below `tol`. The evaluation budget is a hard cap; hitting
/// it returns the best vertex with `converged = false`.
pub fn minimize<F>(
    mut f: F,
    x0: [f64; 2],
    bounds: Bounds,
    tol: f64,
    max_evals: usize,
) -> MinimizeResult
where
    F: FnMut(&[f64; 2]) -> f64,
{
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut evals = 0usize;
    let mut eval = |x: &mut [f64; 2], evals: &mut usize| -> f64 {
        bounds.project(x);
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus per-coordinate steps scaled to the point.
    let mut simplex: Vec<([f64; 2], f64)> = Vec::with_capacity(3);
    let mut p0 = x0;
    let f0 = eval(&mut p0, &mut evals);
    simplex.push((p0, f0));
    for i in 0..2 {
        let mut p = p0;
        let step = if p[i].abs() > 1e-8 { 0.05 * p[i].abs() } else { 0.1 };
        p[i] += step;
        // Projection can collapse the vertex onto x0 at an upper bound; step
        // inward instead so the simplex keeps full rank.
        if p[i] > bounds.upper[i] {
            p[i] = p0[i] - step;
        }
        let fv = eval(&mut p, &mut evals);
        simplex.push((p, fv));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[2].1 - simplex[0].1;
        if spread.abs() < tol {
            return MinimizeResult {
                x: simplex[0].0,
                fval: simplex[0].1,
                evals,
                converged: true,
            };
        }
        if evals >= max_evals {
            return MinimizeResult {
                x: simplex[0].0,
                fval: simplex[0].1,
                evals,
                converged: false,
            };
        }

        let best = simplex[0];
        let second = simplex[1];
        let worst = simplex[2];
        let centroid = [
            0.5 * (best.0[0] + second.0[0]),
            0.5 * (best.0[1] + second.0[1]),
        ];

        let mut refl = [
            centroid[0] + ALPHA * (centroid[0] - worst.0[0]),
            centroid[1] + ALPHA * (centroid[1] - worst.0[1]),
        ];
        let f_refl = eval(&mut refl, &mut evals);

        if f_refl < best.1 {
            let mut exp = [
                centroid[0] + GAMMA * (refl[0] - centroid[0]),
                centroid[1] + GAMMA * (refl[1] - centroid[1]),
            ];
            let f_exp = eval(&mut exp, &mut evals);
            simplex[2] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
            continue;
        }
        if f_refl < second.1 {
            simplex[2] = (refl, f_refl);
            continue;
        }

        // Contract toward the better of worst/reflected.
        let (toward, f_toward) = if f_refl < worst.1 {
            (refl, f_refl)
        } else {
            (worst.0, worst.1)
        };
        let mut con = [
            centroid[0] + RHO * (toward[0] - centroid[0]),
            centroid[1] + RHO * (toward[1] - centroid[1]),
        ];
        let f_con = eval(&mut con, &mut evals);
        if f_con < f_toward {
            simplex[2] = (con, f_con);
            continue;
        }

        // Shrink toward the best vertex.
        for k in 1..3 {
            let mut p = [
                best.0[0] + SIGMA * (simplex[k].0[0] - best.0[0]),
                best.0[1] + SIGMA * (simplex[k].0[1] - best.0[1]),
            ];
            let fv = eval(&mut p, &mut evals);
            simplex[k] = (p, fv);
        }
    }
}
