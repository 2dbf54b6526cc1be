//! Minimization over measurement bases: a coarse sweep of the (theta, phi)
//! sphere followed by Nelder-Mead refinement seeded from the best grid
//! points.
//!
//! Objectives evaluated here are smooth and doubly periodic, so the simplex
//! is free to wander outside the canonical angle ranges; callers normalize
//! the reported minimizer at the end.

use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizerFailure {
    #[error("objective returned a non-finite value at theta={theta}, phi={phi}")]
    NonFinite { theta: f64, phi: f64 },
}

/// Grid density and refinement budget for basis optimization.
#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    /// Polar samples, endpoints included: theta_i = i * pi / (n - 1).
    pub theta_points: usize,
    /// Azimuthal samples on [0, 2pi), endpoint excluded.
    pub phi_points: usize,
    /// Run Nelder-Mead from the three best grid points.
    pub refine: bool,
    /// Cap on objective evaluations spent inside refinement.
    pub max_refine_evals: usize,
    /// Refinement stops once the simplex diameter drops below this.
    pub simplex_tol: f64,
}

impl OptimizerSettings {
    /// Everyday accuracy: 60 x 120 grid plus refinement.
    pub fn standard() -> Self {
        OptimizerSettings {
            theta_points: 60,
            phi_points: 120,
            refine: true,
            max_refine_evals: 500,
            simplex_tol: 1e-8,
        }
    }

    /// Brute-force 721 x 1441 sweep with no refinement; an independent
    /// slow route for tests.
    pub fn dense_grid() -> Self {
        OptimizerSettings {
            theta_points: 721,
            phi_points: 1441,
            refine: false,
            max_refine_evals: 0,
            simplex_tol: 1e-8,
        }
    }

    /// The dense sweep with refinement on top, for replay verification.
    pub fn dense_refined() -> Self {
        OptimizerSettings {
            refine: true,
            max_refine_evals: 500,
            ..Self::dense_grid()
        }
    }
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self::standard()
    }
}

/// Result of a basis search: minimizing angles (not yet normalized), the
/// minimum value, and how many objective evaluations were spent.
#[derive(Debug, Clone, Copy)]
pub struct OptOutcome {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
    pub evaluations: usize,
}

struct Tracker<F> {
    f: F,
    evals: usize,
    best: (f64, f64, f64), // (value, theta, phi)
}

impl<F: FnMut(f64, f64) -> f64> Tracker<F> {
    fn eval(&mut self, theta: f64, phi: f64) -> Result<f64, OptimizerFailure> {
        let v = (self.f)(theta, phi);
        self.evals += 1;
        if !v.is_finite() {
            return Err(OptimizerFailure::NonFinite { theta, phi });
        }
        if v < self.best.0 {
            self.best = (v, theta, phi);
        }
        Ok(v)
    }
}

/// Minimize a smooth objective over measurement directions. Returns the best
/// point ever evaluated, which the refinement stage can only improve.
pub fn minimize_over_bases<F: FnMut(f64, f64) -> f64>(
    f: F,
    settings: &OptimizerSettings,
) -> Result<OptOutcome, OptimizerFailure> {
    let nt = settings.theta_points.max(2);
    let np = settings.phi_points.max(1);
    let mut tr = Tracker {
        f,
        evals: 0,
        best: (f64::INFINITY, 0.0, 0.0),
    };

    // keep the three best grid points as refinement seeds
    let mut seeds: [(f64, f64, f64); 3] = [(f64::INFINITY, 0.0, 0.0); 3];
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for j in 0..np {
            let phi = TAU * j as f64 / np as f64;
            let v = tr.eval(theta, phi)?;
            if v < seeds[2].0 {
                seeds[2] = (v, theta, phi);
                if seeds[2].0 < seeds[1].0 {
                    seeds.swap(1, 2);
                }
                if seeds[1].0 < seeds[0].0 {
                    seeds.swap(0, 1);
                }
            }
        }
    }

    if settings.refine {
        nelder_mead(&mut tr, seeds, settings)?;
    }

    let (value, theta, phi) = tr.best;
    Ok(OptOutcome {
        theta,
        phi,
        value,
        evaluations: tr.evals,
    })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Standard Nelder-Mead on the plane (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2), seeded with the three best grid points.
/// The tracker remembers the best point seen regardless of how the simplex
/// ends up, so a misstep here can never worsen the reported minimum.
fn nelder_mead<F: FnMut(f64, f64) -> f64>(
    tr: &mut Tracker<F>,
    seeds: [(f64, f64, f64); 3],
    settings: &OptimizerSettings,
) -> Result<(), OptimizerFailure> {
    let mut simplex: Vec<([f64; 2], f64)> = seeds.iter().map(|&(v, t, p)| ([t, p], v)).collect();

    // Grid seeds can be collinear (all on one theta row). Nudge the worst
    // vertex off the line so the simplex has area to work with.
    let area = |s: &[([f64; 2], f64)]| -> f64 {
        let (a, b, c) = (s[0].0, s[1].0, s[2].0);
        ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
    };
    if area(&simplex) < 1e-9 {
        let nudged = [
            simplex[2].0[0] + 0.5 * PI / (settings.theta_points.max(2) as f64),
            simplex[2].0[1] + 0.5 * TAU / (settings.phi_points.max(1) as f64),
        ];
        let v = tr.eval(nudged[0], nudged[1])?;
        simplex[2] = (nudged, v);
    }

    let start_evals = tr.evals;
    loop {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite objective"));
        let diameter = dist(simplex[0].0, simplex[1].0)
            .max(dist(simplex[0].0, simplex[2].0))
            .max(dist(simplex[1].0, simplex[2].0));
        if diameter < settings.simplex_tol || tr.evals - start_evals >= settings.max_refine_evals {
            return Ok(());
        }

        let best = simplex[0];
        let second = simplex[1];
        let worst = simplex[2];
        let centroid = [
            0.5 * (best.0[0] + second.0[0]),
            0.5 * (best.0[1] + second.0[1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - worst.0[0]),
            centroid[1] + (centroid[1] - worst.0[1]),
        ];
        let fr = tr.eval(reflect[0], reflect[1])?;

        if fr < best.1 {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - worst.0[0]),
                centroid[1] + 2.0 * (centroid[1] - worst.0[1]),
            ];
            let fe = tr.eval(expand[0], expand[1])?;
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < second.1 {
            simplex[2] = (reflect, fr);
        } else {
            let (point, limit) = if fr < worst.1 {
                // outside contraction, between centroid and reflection
                (
                    [
                        centroid[0] + 0.5 * (reflect[0] - centroid[0]),
                        centroid[1] + 0.5 * (reflect[1] - centroid[1]),
                    ],
                    fr,
                )
            } else {
                // inside contraction, between centroid and the worst vertex
                (
                    [
                        centroid[0] + 0.5 * (worst.0[0] - centroid[0]),
                        centroid[1] + 0.5 * (worst.0[1] - centroid[1]),
                    ],
                    worst.1,
                )
            };
            let fc = tr.eval(point[0], point[1])?;
            if fc <= limit {
                simplex[2] = (point, fc);
            } else {
                // shrink toward the best vertex
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk = [
                        best.0[0] + 0.5 * (vertex.0[0] - best.0[0]),
                        best.0[1] + 0.5 * (vertex.0[1] - best.0[1]),
                    ];
                    let fs = tr.eval(shrunk[0], shrunk[1])?;
                    *vertex = (shrunk, fs);
                }
            }
        }
    }
}
