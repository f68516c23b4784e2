//! Nelder–Mead simplex ascent with dimension-adaptive coefficients
//! (Gao & Han 2012) and simplex re-initialization on collapse.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct SimplexConfig<T> {
    pub max_iters: usize,
    pub initial_step: T,
    pub ftol: T,
    pub xtol: T,
    /// Simplex rebuilds around the incumbent after convergence.
    pub max_rebuilds: usize,
}

#[derive(Debug, Clone)]
pub struct Improvement<T, P> {
    pub iteration: usize,
    pub value: T,
    pub payload: P,
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome<T, P> {
    pub x: Vec<T>,
    pub value: T,
    pub payload: P,
    pub iterations: usize,
    /// Every strict improvement of the incumbent, in order.
    pub improvements: Vec<Improvement<T, P>>,
}

struct Vertex<T, P> {
    x: Vec<T>,
    value: T,
    payload: P,
}

fn sanitize<T: Real>(v: T) -> T {
    if v.is_nan() {
        T::neg_infinity()
    } else {
        v
    }
}

/// Maximizes `f`, which returns the objective and a payload that is kept
/// alongside the incumbent (for tracing).
pub fn maximize<T, P, F>(mut f: F, x0: &[T], cfg: &SimplexConfig<T>) -> SimplexOutcome<T, P>
where
    T: Real,
    P: Clone,
    F: FnMut(&[T]) -> (T, P),
{
    let n = x0.len();
    let nf = T::lit(n.max(1) as f64);
    let one = T::one();
    let two = T::lit(2.0);
    let alpha = one;
    let beta = one + two / nf;
    let gamma = T::lit(0.75) - one / (two * nf);
    let delta = one - one / nf;

    let mut eval = |x: Vec<T>| {
        let (v, p) = f(&x);
        Vertex {
            x,
            value: sanitize(v),
            payload: p,
        }
    };

    let first = eval(x0.to_vec());
    let mut improvements = vec![Improvement {
        iteration: 0,
        value: first.value,
        payload: first.payload.clone(),
    }];
    let mut incumbent = first;
    let mut iterations = 0;
    let mut step = cfg.initial_step;

    for _rebuild in 0..=cfg.max_rebuilds {
        let start_value = incumbent.value;
        let mut simplex = Vec::with_capacity(n + 1);
        simplex.push(Vertex {
            x: incumbent.x.clone(),
            value: incumbent.value,
            payload: incumbent.payload.clone(),
        });
        for i in 0..n {
            let mut x = incumbent.x.clone();
            x[i] = x[i] + step;
            simplex.push(eval(x));
        }

        while iterations < cfg.max_iters {
            // Stable: equal values keep insertion order.
            simplex.sort_by(|a, b| {
                b.value
                    .partial_cmp(&a.value)
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            if simplex[0].value > incumbent.value {
                incumbent = Vertex {
                    x: simplex[0].x.clone(),
                    value: simplex[0].value,
                    payload: simplex[0].payload.clone(),
                };
                improvements.push(Improvement {
                    iteration: iterations,
                    value: incumbent.value,
                    payload: incumbent.payload.clone(),
                });
            }

            let best = simplex[0].value;
            let worst = simplex[n].value;
            let spread = (best - worst).abs();
            let size = simplex[1..]
                .iter()
                .map(|v| {
                    v.x.iter()
                        .zip(&simplex[0].x)
                        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
                })
                .fold(T::zero(), T::max);
            if spread <= cfg.ftol * (one + best.abs()) && size <= cfg.xtol {
                break;
            }
            iterations += 1;

            let mut centroid = vec![T::zero(); n];
            for v in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(&v.x) {
                    *c = *c + *xi;
                }
            }
            for c in &mut centroid {
                *c = *c / nf;
            }
            let along = |t: T, from: &[T]| -> Vec<T> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, x)| *c + t * (*x - *c))
                    .collect()
            };

            let reflected = eval(along(-alpha, &simplex[n].x));
            let second_worst = simplex[n - 1].value;
            if reflected.value > best {
                let expanded = eval(along(-alpha * beta, &simplex[n].x));
                simplex[n] = if expanded.value > reflected.value {
                    expanded
                } else {
                    reflected
                };
                continue;
            }
            if reflected.value > second_worst {
                simplex[n] = reflected;
                continue;
            }
            let contracted = if reflected.value > worst {
                let c = eval(along(-alpha * gamma, &simplex[n].x));
                (c.value >= reflected.value).then_some(c)
            } else {
                let c = eval(along(gamma, &simplex[n].x));
                (c.value > worst).then_some(c)
            };
            match contracted {
                Some(c) => simplex[n] = c,
                None => {
                    let anchor = simplex[0].x.clone();
                    for v in simplex.iter_mut().skip(1) {
                        let x: Vec<T> = anchor
                            .iter()
                            .zip(&v.x)
                            .map(|(a, b)| *a + delta * (*b - *a))
                            .collect();
                        *v = eval(x);
                    }
                }
            }
        }

        if iterations >= cfg.max_iters
            || incumbent.value - start_value <= cfg.ftol * (one + start_value.abs()) && _rebuild > 0
        {
            break;
        }
        step = step * T::lit(0.5);
    }

    SimplexOutcome {
        x: incumbent.x,
        value: incumbent.value,
        payload: incumbent.payload,
        iterations,
        improvements,
    }
}
