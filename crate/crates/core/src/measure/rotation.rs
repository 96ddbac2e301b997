//! One rotation step on a step-density probability measure: move the k-th Fourier coefficient of
//! each arc to a prescribed c_j μ(I_j) while keeping arc masses and chosen pairings.
//!
//! This is the Kronecker route: atoms at independent points, a simultaneous approximation, then a
//! step density around each atom. It is exponential in the number of atoms and meant for small
//! inputs; the multi-stage construction uses the phase-aligned step in `layered`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;

use super::circle::{refine, CircleArc, CircleMeasure, Segment, MASS_TOL};

/// (B1) tolerance. Narrow segments have heights near 1/w, so masses carry errors of order ulp/w.
pub const STEP_MASS_TOL: f64 = 1e-9;
use super::discretize::discretize_atomic;
use super::kronecker::kronecker_search;
use super::trig::TrigPoly;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RotationOptions {
    pub kmax: u64,
    /// Cap on the number of atoms of the intermediate atomic measure.
    pub max_atoms: usize,
    /// (B4) is sampled on |l| <= this; 0 means max(2k, 64).
    pub b4_range: i64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        RotationOptions { kmax: 10_000_000, max_atoms: 64, b4_range: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct StepChecks {
    pub eps: f64,
    pub a: f64,
    /// max_j |ν(I_j) − μ(I_j)|.
    pub b1: f64,
    /// max_l |[μ − ν, h_l]|.
    pub b2: f64,
    /// max_j |ν̂_j(k) − c_j μ(I_j)|.
    pub b3: f64,
    /// max |μ̂(l) − ν̂(l)| over the sampled range.
    pub b4: f64,
    pub b4_range: i64,
}

impl StepChecks {
    pub fn pass(&self) -> bool {
        self.b1 <= STEP_MASS_TOL && self.b2 < self.eps && self.b3 < self.eps && self.b4 <= 2.0 * self.a + 1e-9
    }
}

#[derive(Clone, Debug)]
pub struct RotationStep {
    pub nu: CircleMeasure,
    pub k: u64,
    /// Frequency beyond which every restricted μ̂_j is below eps/3.
    pub k1: u64,
    pub atoms: usize,
    pub checks: StepChecks,
}

/// Runs the step on arcs I_j with targets c_j (0 < |c_j| <= 1), above frequency k0.
pub fn rotation_step(
    mu: &CircleMeasure,
    arcs: &[CircleArc],
    c: &[Complex64],
    k0: u64,
    eps: f64,
    h_list: &[TrigPoly],
    opts: &RotationOptions,
) -> Result<RotationStep> {
    if arcs.len() != c.len() || arcs.is_empty() {
        return Err(Error::Domain("one target per arc, at least one arc".into()));
    }
    if !mu.is_absolutely_continuous() {
        return Err(Error::Domain("rotation step needs an absolutely continuous measure".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("eps must be positive".into()));
    }
    let masses: Vec<f64> = arcs.iter().map(|a| mu.mass_on(a)).collect();
    if (masses.iter().sum::<f64>() - 1.0).abs() > MASS_TOL {
        return Err(Error::Domain("arc masses must sum to 1".into()));
    }
    if c.iter().any(|z| z.norm() == 0.0 || z.norm() > 1.0) {
        return Err(Error::Domain("targets need 0 < |c_j| <= 1".into()));
    }
    let a = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let m = arcs.len() as f64;

    // |μ̂_j(k)| <= V_j/(π|k|)
    let k1 = arcs
        .iter()
        .map(|arc| (3.0 * mu.restrict(arc).jump_variation() / (PI * eps)).ceil() as u64)
        .max()
        .unwrap_or(0);

    let lip = h_list.iter().map(TrigPoly::lipschitz).fold(0.0, f64::max);
    let mut subarcs = Vec::new();
    let mut owner = Vec::new();
    for (j, arc) in arcs.iter().enumerate() {
        let r = (2.0 * m * lip * arc.len() / eps).floor() as u64 + 1;
        if subarcs.len() as u64 + r > opts.max_atoms as u64 {
            return Err(Error::Budget(format!("more than {} atoms needed", opts.max_atoms)));
        }
        for s in refine(arc, &BigInt::from(r)) {
            subarcs.push(s);
            owner.push(j);
        }
    }
    let gamma = discretize_atomic(mu, &subarcs)?;
    let mut pts = Vec::new();
    let mut targets = Vec::new();
    let mut atom_info = Vec::new();
    for (i, p) in gamma.points.iter().enumerate() {
        let mass = mu.mass_on(&subarcs[i]);
        if mass <= 0.0 {
            continue;
        }
        let t = p.angle();
        pts.push(t);
        targets.push((c[owner[i]].arg() / (2.0 * PI)).rem_euclid(1.0));
        atom_info.push((t, mass, i));
    }
    let k = kronecker_search(&pts, &targets, k0.max(k1), eps / (3.0 * 2.0 * PI), opts.kmax)?;

    // spread each atom over an arc short enough for the pairing and k-th coefficient errors
    let mut w = eps / (6.0 * PI * k as f64);
    if lip > 0.0 {
        w = w.min(eps / (2.0 * m * lip));
    }
    w *= 0.5;
    let mut eta_segments = Vec::new();
    for &(t, mass, i) in &atom_info {
        let sub = &subarcs[i];
        let room = (t - sub.start()).min(sub.end() - t);
        let half = (0.5 * w).min(0.5 * room);
        eta_segments.push(Segment { t0: t - half, t1: t + half, height: mass / (2.0 * half) });
    }
    let eta = CircleMeasure::new(vec![], eta_segments)?;

    let mut parts_owned = Vec::new();
    for (j, arc) in arcs.iter().enumerate() {
        let cj = c[j].norm();
        parts_owned.push((1.0 - cj, mu.restrict(arc)));
        parts_owned.push((cj, eta.restrict(arc)));
    }
    let parts: Vec<(f64, &CircleMeasure)> = parts_owned.iter().map(|(w, m)| (*w, m)).collect();
    let nu = CircleMeasure::combine(&parts)?;

    let b1 = arcs.iter().zip(&masses).map(|(arc, mj)| (nu.mass_on(arc) - mj).abs()).fold(0.0, f64::max);
    let b2 = h_list.iter().map(|h| (mu.pair(h) - nu.pair(h)).norm()).fold(0.0, f64::max);
    let b3 = arcs
        .iter()
        .zip(c)
        .zip(&masses)
        .map(|((arc, cj), mj)| (nu.restrict(arc).fourier(k as i64) - cj * mj).norm())
        .fold(0.0, f64::max);
    let range = if opts.b4_range > 0 { opts.b4_range } else { (2 * k as i64).max(64) };
    let b4 = (-range..=range).map(|l| (mu.fourier(l) - nu.fourier(l)).norm()).fold(0.0, f64::max);
    Ok(RotationStep {
        nu,
        k,
        k1,
        atoms: pts.len(),
        checks: StepChecks { eps, a, b1, b2, b3, b4, b4_range: range },
    })
}
