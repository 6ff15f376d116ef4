//! Exact verification of the projection lemmas on a finite universe.

use serde::Serialize;

use crate::geometry::{dot, Direction, DyadicPoint};

use super::constants::ToyConstants;
use super::{Code, Universe};

/// Complexity function after artificially capping one point's profile.
///
/// `k_t_z(t) = min(ceil(eta * r), K_t(z))` for `t <= r`; complexities
/// conditioned on `z` at precision `r` are untouched. When
/// `ceil(eta * r) > K_r(z)` the cap never binds and the clamp is vacuous.
pub struct ClampedComplexity<'a> {
    universe: &'a Universe,
    z: Vec<f64>,
    r: u32,
    clamp_bits: u32,
    vacuous: bool,
}

impl<'a> ClampedComplexity<'a> {
    pub fn clamp_bits(&self) -> u32 {
        self.clamp_bits
    }

    pub fn is_vacuous(&self) -> bool {
        self.vacuous
    }

    /// `K^D_t(z)` for `t <= r`.
    pub fn k_t_z(&self, t: u32) -> Option<u32> {
        debug_assert!(t <= self.r);
        self.universe
            .k_r(&self.z, t)
            .map(|k| k.min(self.clamp_bits))
    }

    /// `K^D(y | z at precision r)`: unchanged from the base universe.
    pub fn k_cond_given_z(&self, y: &[f64], t: u32) -> Option<u32> {
        self.universe.conditional_k_r_s(y, t, &self.z, self.r)
    }
}

/// Builds the capped complexity function for `z` at precision `r` with cap
/// ratio `eta`.
pub fn clamp_oracle<'a>(
    universe: &'a Universe,
    z: &[f64],
    eta: f64,
    r: u32,
) -> ClampedComplexity<'a> {
    let clamp_bits = (eta * r as f64).ceil() as u32;
    let vacuous = match universe.k_r(z, r) {
        Some(k) => clamp_bits > k,
        None => true,
    };
    ClampedComplexity {
        universe,
        z: z.to_vec(),
        r,
        clamp_bits,
        vacuous,
    }
}

/// Shortest-first search for a low-complexity point whose projection lands
/// within `2^-s` of `q`. Enumerates programs of length `<= floor(budget)` in
/// lexicographic order within each length and returns the first hit,
/// restricted to `B_{1/2}(hint)` when a hint is given.
pub fn recover_point(
    universe: &Universe,
    oracle: Option<&Code>,
    q: f64,
    e: &Direction,
    s: u32,
    budget: f64,
    hint: Option<&[f64]>,
) -> Option<DyadicPoint> {
    if budget < 0.0 {
        return None;
    }
    let l_cap = (budget.floor() as u32).min(universe.l_max());
    let tol = f64::powi(2.0, -(s as i32));
    for len in 0..=l_cap {
        for w in 0..(1u64 << len) {
            let code = Code::new(len as u8, w as u32);
            if let Some(p) = universe.decoder().decode(code, oracle) {
                if p.dim() != e.dim() {
                    continue;
                }
                let c = p.coords();
                if let Some(h) = hint {
                    let d2: f64 = c.iter().zip(h).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 >= 0.25 {
                        continue;
                    }
                }
                if (dot(e, &c) - q).abs() < tol {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// A producible point that breaks the cheap-neighbor hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSetViolation {
    pub w: Vec<f64>,
    pub t: f64,
    pub k_w: u32,
    pub required: f64,
}

/// Outcome of checking the point lemma's hypotheses and conclusion.
#[derive(Debug, Clone, Serialize)]
pub struct PointLemmaReport {
    pub r: u32,
    pub eta: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// `K_r(z)`; `None` when z is not approximable in this universe.
    pub k_r_z: Option<u32>,
    /// `K_r(z) <= (eta + epsilon) r`.
    pub hypothesis_i: bool,
    /// Every producible near-level-set point within `B_1(z)` is expensive.
    pub hypothesis_ii: bool,
    pub violations: Vec<LevelSetViolation>,
    /// `K_r(e . z)`; `None` means the projection value is unapproximable,
    /// in which case the conclusion holds trivially.
    pub lhs: Option<u32>,
    pub rhs: f64,
    /// Present only when both hypotheses hold and parameters are sane.
    pub conclusion_holds: Option<bool>,
    /// RHS <= 0, so the conclusion carries no information.
    pub vacuous: bool,
    /// `delta` too small against a positive `epsilon`: the error term is
    /// unbounded and no conclusion is asserted.
    pub degenerate_parameters: bool,
    /// Witness program for the cheapest approximation of `z`.
    pub witness: Option<String>,
}

/// Brute-force check of the recovery lemma for one `(z, e)` instance: both
/// hypotheses are evaluated exactly over all producible points, and when they
/// hold the conclusion `K_r(e.z) >= K_r(z) - (n eps/delta) r - C1(r)` is
/// asserted with the frozen slack.
#[allow(clippy::too_many_arguments)]
pub fn verify_point_lemma(
    universe: &Universe,
    z: &[f64],
    e: &Direction,
    r: u32,
    eta: f64,
    epsilon: f64,
    delta: f64,
    constants: &ToyConstants,
) -> PointLemmaReport {
    assert_eq!(z.len(), e.dim(), "dimension mismatch");
    let n = z.len();
    let degenerate = delta <= 0.0 || (epsilon > 0.0 && delta < 1e-6);

    let with_point = universe.base().k_r_with_point(z, r);
    let k_r_z = with_point.map(|(k, _)| k);
    let witness = with_point
        .and_then(|(_, p)| universe.base().entry(p))
        .map(|en| en.witness.to_string());

    let hypothesis_i = match k_r_z {
        Some(k) => (k as f64) <= (eta + epsilon) * r as f64 + 1e-9,
        None => false,
    };

    let proj_z = dot(e, z);
    let band = f64::powi(2.0, 1 - r as i32);
    let mut violations = Vec::new();
    for (p, en) in universe.base().iter() {
        if p.dim() != n {
            continue;
        }
        let w = p.coords();
        let d2: f64 = w.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 == 0.0 || d2 >= 1.0 {
            continue;
        }
        if (dot(e, &w) - proj_z).abs() >= band {
            continue;
        }
        let t = -0.5 * d2.log2();
        if t <= 0.0 || t > r as f64 {
            continue;
        }
        let required = (eta - epsilon) * r as f64 + delta * (r as f64 - t);
        if (en.k as f64) < required - 1e-9 {
            violations.push(LevelSetViolation {
                w,
                t,
                k_w: en.k,
                required,
            });
        }
    }
    let hypothesis_ii = violations.is_empty();

    let lhs = universe.k_r_value(proj_z, r);
    let rhs = match k_r_z {
        Some(k) => {
            k as f64 - (n as f64 * epsilon / delta.max(1e-12)) * r as f64 - constants.c1_at(r)
        }
        None => f64::NEG_INFINITY,
    };
    let vacuous = rhs <= 0.0;
    let conclusion_holds = if degenerate || !hypothesis_i || !hypothesis_ii {
        None
    } else {
        Some(match lhs {
            Some(v) => v as f64 >= rhs - 1e-9,
            None => true,
        })
    };

    PointLemmaReport {
        r,
        eta,
        epsilon,
        delta,
        k_r_z,
        hypothesis_i,
        hypothesis_ii,
        violations,
        lhs,
        rhs,
        conclusion_holds,
        vacuous,
        degenerate_parameters: degenerate,
        witness,
    }
}

/// Deviations of the two symmetry-of-information identities, with the frozen
/// logarithmic bound.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub r: u32,
    pub s: u32,
    /// `|K_r(x|y) + K_r(y) - K_r(x,y)|`; `None` if any term is bottom.
    pub chain_deviation: Option<f64>,
    /// `|K_{r,s}(x|x) + K_s(x) - K_r(x)|`; `None` if any term is bottom.
    pub self_deviation: Option<f64>,
    pub bound: f64,
    pub chain_ok: Option<bool>,
    pub self_ok: Option<bool>,
}

impl SymmetryReport {
    pub fn all_defined_and_ok(&self) -> bool {
        self.chain_ok == Some(true) && self.self_ok == Some(true)
    }
}

/// Evaluates both symmetry-of-information deviations exactly. Requires
/// `r >= s`.
pub fn verify_symmetry_of_information(
    universe: &Universe,
    x: &[f64],
    y: &[f64],
    r: u32,
    s: u32,
    constants: &ToyConstants,
) -> SymmetryReport {
    assert!(r >= s, "requires r >= s");
    let bound = constants.symmetry_bound(r);

    let cond = universe.conditional_k_r(x, r, y);
    let k_y = universe.k_r(y, r);
    let joint = universe.joint_k_r(x, y, r);
    let chain_deviation = match (cond, k_y, joint) {
        (Some(a), Some(b), Some(c)) => Some((a as f64 + b as f64 - c as f64).abs()),
        _ => None,
    };

    let self_cond = universe.conditional_k_r_s(x, r, x, s);
    let k_s_x = universe.k_r(x, s);
    let k_r_x = universe.k_r(x, r);
    let self_deviation = match (self_cond, k_s_x, k_r_x) {
        (Some(a), Some(b), Some(c)) => Some((a as f64 + b as f64 - c as f64).abs()),
        _ => None,
    };

    SymmetryReport {
        r,
        s,
        chain_deviation,
        self_deviation,
        bound,
        chain_ok: chain_deviation.map(|d| d <= bound),
        self_ok: self_deviation.map(|d| d <= bound),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectionBoundReport {
    pub r: u32,
    pub eta_prime: f64,
    pub eps_prime: f64,
    /// Direction incompressibility `K^{e - {e_i, e_j}}_s(e) >= s - log2 s`
    /// for every `s <= r` and coordinate pair; unapproximable values count as
    /// infinitely complex.
    pub condition_1: bool,
    /// Worst margin of condition 1 over all `(s, i, j)`.
    pub condition_1_margin: f64,
    /// `K^A_r(z) >= K_r(z) - eps' r` for the supplied oracle.
    pub condition_2: bool,
    pub k_r_z: Option<u32>,
    pub k_r_z_oracle: Option<u32>,
    pub clamp_vacuous: bool,
    pub lhs: Option<u32>,
    pub rhs: f64,
    pub vacuous: bool,
    /// Present only when both conditions hold.
    pub conclusion_holds: Option<bool>,
}

/// Checks the engine inequality for projections: under the direction
/// incompressibility condition and an oracle that does not reveal `z`, the
/// projection value keeps
/// `K_r(e.z) >= eta' r - eps' r - (2 n eps'/(1-eta')) r - C2`.
#[allow(clippy::too_many_arguments)]
pub fn verify_projection_bound(
    universe: &Universe,
    z: &[f64],
    e: &Direction,
    eta_prime: f64,
    eps_prime: f64,
    r: u32,
    oracle: Option<&Code>,
    constants: &ToyConstants,
) -> ProjectionBoundReport {
    assert_eq!(z.len(), e.dim(), "dimension mismatch");
    let n = z.len();
    let clamp = clamp_oracle(universe, z, eta_prime, r);

    // Condition 1: the direction's discretized complexity, conditioned on all
    // components but two, stays near maximal at every precision up to r.
    let mut condition_1 = true;
    let mut margin = f64::INFINITY;
    let comps = e.components();
    for s in 1..=r {
        let need = s as f64 - (s as f64).log2();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        for (i, j) in pairs {
            let rest: Vec<f64> = (0..n)
                .filter(|&k| k != i && k != j)
                .map(|k| comps[k])
                .collect();
            let k = if rest.is_empty() {
                universe.k_r(comps, s)
            } else {
                universe.conditional_k_r_s(comps, s, &rest, r)
            };
            match k {
                Some(v) => {
                    let m = v as f64 - need;
                    margin = margin.min(m);
                    if m < -1e-9 {
                        condition_1 = false;
                    }
                }
                None => {
                    // unreachable at this precision: maximally complex
                }
            }
        }
    }

    // Condition 2: the oracle leaves z's complexity intact up to eps' r.
    let k_r_z = universe.k_r(z, r);
    let k_r_z_oracle = match oracle {
        Some(bits) => universe.with_oracle(bits).k_r(z, r),
        None => k_r_z,
    };
    let condition_2 = match (k_r_z, k_r_z_oracle) {
        (Some(base), Some(rel)) => rel as f64 >= base as f64 - eps_prime * r as f64 - 1e-9,
        _ => false,
    };

    let proj = dot(e, z);
    let lhs = universe.k_r_value(proj, r);
    let rhs = eta_prime * r as f64
        - eps_prime * r as f64
        - (2.0 * n as f64 * eps_prime / (1.0 - eta_prime).max(1e-12)) * r as f64
        - constants.c2;
    let vacuous = rhs <= 0.0;
    let conclusion_holds = if condition_1 && condition_2 {
        Some(match lhs {
            Some(v) => v as f64 >= rhs - 1e-9,
            None => true,
        })
    } else {
        None
    };

    ProjectionBoundReport {
        r,
        eta_prime,
        eps_prime,
        condition_1,
        condition_1_margin: margin,
        condition_2,
        k_r_z,
        k_r_z_oracle,
        clamp_vacuous: clamp.is_vacuous(),
        lhs,
        rhs,
        vacuous,
        conclusion_holds,
    }
}
