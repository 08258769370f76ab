//! Damped Newton ascent for smooth objectives of a few variables, used to
//! finish first-order searches near flat maxima.

/// Solve `a x = b` for symmetric positive definite `a`; `None` if the
/// Cholesky factorization breaks down.
pub(crate) fn cholesky_solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N]) -> Option<[f64; N]> {
    let mut l = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; N];
    for i in 0..N {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let mut s = y[i];
        for k in (i + 1)..N {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

pub(crate) struct Ascent<P> {
    pub point: P,
    pub value: f64,
    pub steps: usize,
    /// Stopped on the gain or gradient tolerance rather than the step limit
    /// or a failed line of damping.
    pub converged: bool,
}

/// Maximize from `point` with Levenberg-damped Newton steps
/// `(mu I - H) delta = g`. Only improving steps are taken, so the value
/// sequence passed to `on_accept` is increasing.
#[allow(clippy::too_many_arguments)]
pub(crate) fn newton_ascent<const N: usize, P: Clone>(
    point: P,
    value: f64,
    model: impl Fn(&P) -> ([f64; N], [[f64; N]; N]),
    retract: impl Fn(&P, &[f64; N]) -> P,
    eval: impl Fn(&P) -> f64,
    tol: f64,
    max_steps: usize,
    mut on_accept: impl FnMut(f64),
) -> Ascent<P> {
    let mut state = Ascent {
        point,
        value,
        steps: 0,
        converged: false,
    };
    while state.steps < max_steps {
        let (g, h) = model(&state.point);
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-15 {
            state.converged = true;
            break;
        }
        let scale = 1.0 + h.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
        let mut mu = 0.0;
        let mut accepted = None;
        for _ in 0..40 {
            let mut a = [[0.0; N]; N];
            for i in 0..N {
                for j in 0..N {
                    a[i][j] = -h[i][j];
                }
                a[i][i] += mu;
            }
            if let Some(delta) = cholesky_solve(&a, &g) {
                let candidate = retract(&state.point, &delta);
                let v = eval(&candidate);
                if v > state.value {
                    accepted = Some((candidate, v));
                    break;
                }
            }
            mu = if mu == 0.0 { 1e-12 * scale } else { mu * 10.0 };
        }
        let Some((candidate, v)) = accepted else {
            state.converged = true;
            break;
        };
        let gain = v - state.value;
        state.point = candidate;
        state.value = v;
        state.steps += 1;
        on_accept(v);
        if gain < tol {
            state.converged = true;
            break;
        }
    }
    state
}
