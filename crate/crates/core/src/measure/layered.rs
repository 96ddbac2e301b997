//! Step densities built in layers: ρ_n(t) = Π_{i=2}^{n} v_i(frac(k_i t)), where v_i is a two-valued
//! pattern on Q_i equal cells of a period, chosen per block of the coarse grid 1/B.
//!
//! Every grid is an integer and every k_i is a multiple of the previous grid, so a cell index has a
//! mixed-radix expansion (block, period, pattern cell, period, pattern cell, ...). Fourier
//! coefficients at arbitrary integer frequencies and sums over arbitrarily small aligned arcs are
//! products of geometric sums over those digits.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::circle::{CircleArc, CircleMeasure, Segment};
use super::phase::{cis, geo, geo_range, segment_integral, to_f64};
use super::trig::TrigPoly;
use crate::error::{Error, Result};

/// Largest grid converted to an explicit segment list.
pub const EXPLICIT_CELL_CAP: u64 = 1 << 22;

/// v(u) = 1 + x on the window [start, start + q/2) mod q and 1 − x elsewhere; x = 0 is flat.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pattern {
    pub x: f64,
    pub start: u64,
}

impl Pattern {
    pub const FLAT: Pattern = Pattern { x: 0.0, start: 0 };

    /// The pattern with ∫_0^1 v(s) e^{2πis} ds = mag·e^{2πi s/q}: window centered at s/q, x = π·mag/2.
    pub fn aligned(mag: f64, s: u64, q: u64) -> Result<Pattern> {
        if q < 4 || q % 4 != 0 || s >= q {
            return Err(Error::Domain(format!("phase {s}/{q} needs q a positive multiple of 4")));
        }
        let x = std::f64::consts::FRAC_PI_2 * mag;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("|b| = {mag} exceeds 2/π")));
        }
        if x == 0.0 {
            return Ok(Pattern::FLAT);
        }
        Ok(Pattern { x, start: (s + q - q / 4) % q })
    }

    pub fn is_flat(&self) -> bool {
        self.x == 0.0
    }

    pub fn in_window(&self, u: u64, q: u64) -> bool {
        (u + q - self.start) % q < q / 2
    }

    pub fn value(&self, u: u64, q: u64) -> f64 {
        if self.is_flat() {
            1.0
        } else if self.in_window(u, q) {
            1.0 + self.x
        } else {
            1.0 - self.x
        }
    }

    /// ∫_0^1 v(s) e^{2πis} ds, from the cell values.
    pub fn first_moment(&self, q: u64) -> Complex64 {
        let one = BigInt::one();
        let qb = BigInt::from(q);
        self.range_sum(&one, &qb, 0, q, q) * segment_integral(&one, &one, &qb)
    }

    /// Σ_{u=y0}^{y1-1} v(u) e^{2πi ω u/den}.
    fn range_sum(&self, omega: &BigInt, den: &BigInt, y0: u64, y1: u64, q: u64) -> Complex64 {
        let g = |a: u64, b: u64| geo_range(omega, den, &BigInt::from(a), &BigInt::from(b));
        let base = g(y0, y1);
        if self.is_flat() {
            return base;
        }
        let half = q / 2;
        let mut win = Complex64::new(0.0, 0.0);
        let pieces = if self.start + half <= q {
            [(self.start, self.start + half), (0, 0)]
        } else {
            [(self.start, q), (0, self.start + half - q)]
        };
        for (a, b) in pieces {
            let (a, b) = (a.max(y0), b.min(y1));
            if a < b {
                win += g(a, b);
            }
        }
        base * (1.0 - self.x) + win * (2.0 * self.x)
    }
}

/// Blocks [start, start + len) sharing one pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub start: u64,
    pub len: u64,
    pub pattern: Pattern,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub k: BigInt,
    pub q: u64,
    pub runs: Vec<Run>,
}

impl Layer {
    pub fn max_x(&self) -> f64 {
        self.runs.iter().map(|r| r.pattern.x).fold(0.0, f64::max)
    }

    fn run_index(&self, block: u64) -> usize {
        self.runs.partition_point(|r| r.start + r.len <= block)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum DigitKind {
    Block,
    Period,
    Cell(usize),
}

#[derive(Clone, Debug, PartialEq)]
struct Digit {
    kind: DigitKind,
    radix: BigInt,
    /// The digit y contributes the phase e^{2πi ω y / den}.
    den: BigInt,
}

#[derive(Clone, Debug, PartialEq)]
struct JointRun {
    start: u64,
    len: u64,
    runs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredMeasure {
    blocks: u64,
    layers: Vec<Layer>,
    grids: Vec<BigInt>,
    digits: Vec<Digit>,
    joint: Vec<JointRun>,
    variation: Vec<f64>,
    density_max: Vec<f64>,
}

impl LayeredMeasure {
    /// Lebesgue measure, with the circle cut into `blocks` blocks.
    pub fn lebesgue(blocks: u64) -> Result<LayeredMeasure> {
        if blocks == 0 {
            return Err(Error::Domain("at least one block".into()));
        }
        let b = BigInt::from(blocks);
        Ok(LayeredMeasure {
            blocks,
            layers: Vec::new(),
            grids: vec![b.clone()],
            digits: vec![Digit { kind: DigitKind::Block, radix: b.clone(), den: b }],
            joint: vec![JointRun { start: 0, len: blocks, runs: Vec::new() }],
            variation: vec![0.0],
            density_max: vec![1.0],
        })
    }

    /// Multiplies the density by v_r(frac(k t)) on each run r of blocks.
    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        let prev = self.grid().clone();
        if !layer.k.is_positive() || !layer.k.is_multiple_of(&prev) {
            return Err(Error::Domain(format!("k = {} must be a positive multiple of the grid {prev}", layer.k)));
        }
        if layer.q < 4 || layer.q % 4 != 0 {
            return Err(Error::Domain(format!("pattern size {} must be a positive multiple of 4", layer.q)));
        }
        let mut next = 0u64;
        for r in &layer.runs {
            if r.start != next || r.len == 0 {
                return Err(Error::Domain("runs must tile the blocks in order".into()));
            }
            if !(0.0..=1.0).contains(&r.pattern.x) || r.pattern.start >= layer.q {
                return Err(Error::Domain(format!("bad pattern {:?}", r.pattern)));
            }
            next += r.len;
        }
        if next != self.blocks {
            return Err(Error::Domain("runs must cover every block".into()));
        }
        let xbar = layer.max_x();
        let boundaries = if layer.runs.len() > 1 { layer.runs.len() as f64 } else { 0.0 };
        let rho = *self.density_max.last().unwrap();
        let v = *self.variation.last().unwrap();
        // jumps of ρ_{n-1}·w: (1 + x̄)V(ρ_{n-1}) + sup ρ_{n-1}·V(w), V(w) <= 4x̄k + 2x̄·(run boundaries)
        self.variation.push((1.0 + xbar) * v + rho * xbar * (4.0 * to_f64(&layer.k) + 2.0 * boundaries));
        self.density_max.push(rho * (1.0 + xbar));
        let i = self.layers.len();
        let q = BigInt::from(layer.q);
        let grid = &layer.k * &q;
        self.digits.push(Digit { kind: DigitKind::Period, radix: &layer.k / &prev, den: layer.k.clone() });
        self.digits.push(Digit { kind: DigitKind::Cell(i), radix: q, den: grid.clone() });
        self.grids.push(grid);
        self.layers.push(layer);
        self.rebuild_joint();
        Ok(())
    }

    fn rebuild_joint(&mut self) {
        let mut cuts: Vec<u64> = self.layers.iter().flat_map(|l| l.runs.iter().map(|r| r.start)).collect();
        cuts.push(0);
        cuts.push(self.blocks);
        cuts.sort_unstable();
        cuts.dedup();
        self.joint = cuts
            .windows(2)
            .map(|w| JointRun { start: w[0], len: w[1] - w[0], runs: self.layers.iter().map(|l| l.run_index(w[0])).collect() })
            .collect();
    }

    /// The measure after the first `levels` levels (level 1 is the Lebesgue seed).
    pub fn prefix(&self, levels: usize) -> LayeredMeasure {
        let mut out = LayeredMeasure::lebesgue(self.blocks).expect("blocks > 0");
        for l in self.layers.iter().take(levels.saturating_sub(1)) {
            out.push_layer(l.clone()).expect("prefix of a valid measure");
        }
        out
    }

    pub fn levels(&self) -> usize {
        self.layers.len() + 1
    }

    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of cells of the finest grid.
    pub fn grid(&self) -> &BigInt {
        self.grids.last().unwrap()
    }

    pub fn grids(&self) -> &[BigInt] {
        &self.grids
    }

    pub fn joint_runs(&self) -> usize {
        self.joint.len()
    }

    /// Upper bound on the total jump variation of the density, wrap-around included.
    pub fn variation_bound(&self) -> f64 {
        *self.variation.last().unwrap()
    }

    /// Upper bound on the density.
    pub fn density_bound(&self) -> f64 {
        *self.density_max.last().unwrap()
    }

    /// Each period lies in one cell of the previous grid and each pattern is balanced, so every
    /// arc of a previous grid keeps its mass.
    pub fn structure_ok(&self) -> bool {
        self.layers.iter().zip(&self.grids).all(|(l, g)| l.k.is_multiple_of(g) && l.q % 4 == 0)
    }

    fn cell_digits(&self, c: &BigInt) -> Vec<BigInt> {
        let mut rest = c.clone();
        let mut out = vec![BigInt::zero(); self.digits.len()];
        for (p, d) in self.digits.iter().enumerate().rev() {
            let (q, r) = rest.div_mod_floor(&d.radix);
            out[p] = r;
            rest = q;
        }
        out
    }

    fn selection(&self, block: u64) -> Vec<usize> {
        self.layers.iter().map(|l| l.run_index(block)).collect()
    }

    fn pattern(&self, i: usize, sel: &[usize]) -> &Pattern {
        &self.layers[i].runs[sel[i]].pattern
    }

    /// Density on cell c of the finest grid.
    pub fn cell_density(&self, c: &BigInt) -> f64 {
        let d = self.cell_digits(c);
        let sel = self.selection(d[0].to_u64().unwrap());
        let mut rho = 1.0;
        for (p, dig) in self.digits.iter().enumerate() {
            if let DigitKind::Cell(i) = dig.kind {
                rho *= self.pattern(i, &sel).value(d[p].to_u64().unwrap(), self.layers[i].q);
            }
        }
        rho
    }

    /// Σ over digit values y ∈ [y0, y1) at position p of phase × density factor.
    fn digit_sum(&self, p: usize, omega: &BigInt, y0: &BigInt, y1: &BigInt, sel: &[usize]) -> Complex64 {
        let d = &self.digits[p];
        match d.kind {
            DigitKind::Block | DigitKind::Period => geo_range(omega, &d.den, y0, y1),
            DigitKind::Cell(i) => {
                let q = self.layers[i].q;
                self.pattern(i, sel).range_sum(omega, &d.den, y0.to_u64().unwrap(), y1.to_u64().unwrap(), q)
            }
        }
    }

    fn digit_term(&self, p: usize, omega: &BigInt, y: &BigInt, sel: &[usize]) -> Complex64 {
        let d = &self.digits[p];
        let ph = cis(&(omega * y), &d.den);
        match d.kind {
            DigitKind::Cell(i) => ph * self.pattern(i, sel).value(y.to_u64().unwrap(), self.layers[i].q),
            _ => ph,
        }
    }

    /// full[p] = Π_{q >= p} (sum over every value of digit q).
    fn full_products(&self, omega: &BigInt, sel: &[usize]) -> Vec<Complex64> {
        let n = self.digits.len();
        let mut full = vec![Complex64::new(1.0, 0.0); n + 1];
        for p in (1..n).rev() {
            full[p] = full[p + 1] * self.digit_sum(p, omega, &BigInt::zero(), &self.digits[p].radix, sel);
        }
        full
    }

    /// Sum over suffixes (digits p..) that are >= x in lexicographic order.
    fn suffix_ge(&self, p: usize, omega: &BigInt, x: &[BigInt], sel: &[usize], full: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for q in (p..self.digits.len()).rev() {
            let upper = self.digit_sum(q, omega, &(&x[q] + 1u32), &self.digits[q].radix, sel);
            acc = self.digit_term(q, omega, &x[q], sel) * acc + upper * full[q + 1];
        }
        acc
    }

    /// Sum over suffixes (digits p..) that are <= x.
    fn suffix_le(&self, p: usize, omega: &BigInt, x: &[BigInt], sel: &[usize], full: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for q in (p..self.digits.len()).rev() {
            let lower = self.digit_sum(q, omega, &BigInt::zero(), &x[q], sel);
            acc = lower * full[q + 1] + self.digit_term(q, omega, &x[q], sel) * acc;
        }
        acc
    }

    /// Full products below the block digit, for every layer's runs, at frequency ω.
    fn joint_fulls(&self, omega: &BigInt) -> Vec<Complex64> {
        let periods: Complex64 = self
            .digits
            .iter()
            .filter(|d| d.kind == DigitKind::Period)
            .map(|d| geo(omega, &d.den, &d.radix))
            .product();
        let cells: Vec<Vec<Complex64>> = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let den = &self.grids[i + 1];
                l.runs.par_iter().map(|r| r.pattern.range_sum(omega, den, 0, l.q, l.q)).collect()
            })
            .collect();
        self.joint
            .iter()
            .map(|j| j.runs.iter().enumerate().fold(periods, |acc, (i, &r)| acc * cells[i][r]))
            .collect()
    }

    /// Σ_{c=lo}^{hi-1} ∫_{cell c} ρ e^{2πiωt} dt for cells of the finest grid.
    pub fn fourier_cells(&self, omega: &BigInt, lo: &BigInt, hi: &BigInt) -> Complex64 {
        let grid = self.grid();
        assert!(!lo.is_negative() && hi <= grid, "cell range outside the grid");
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        let cell = segment_integral(omega, &BigInt::one(), grid);
        let last = hi - 1u32;
        let dl = self.cell_digits(lo);
        let dh = self.cell_digits(&last);
        let bl = dl[0].to_u64().unwrap();
        let bh = dh[0].to_u64().unwrap();
        let b = BigInt::from(self.blocks);
        if bl == bh {
            let sel = self.selection(bl);
            let full = self.full_products(omega, &sel);
            let Some(p) = (1..self.digits.len()).find(|&p| dl[p] != dh[p]) else {
                // a single cell
                let v: Complex64 = (0..self.digits.len()).map(|p| self.digit_term(p, omega, &dl[p], &sel)).product();
                return v * cell;
            };
            let head: Complex64 = (0..p).map(|q| self.digit_term(q, omega, &dl[q], &sel)).product();
            let left = self.digit_term(p, omega, &dl[p], &sel) * self.suffix_ge(p + 1, omega, &dl, &sel, &full);
            let mid = self.digit_sum(p, omega, &(&dl[p] + 1u32), &dh[p], &sel) * full[p + 1];
            let right = self.digit_term(p, omega, &dh[p], &sel) * self.suffix_le(p + 1, omega, &dh, &sel, &full);
            return head * (left + mid + right) * cell;
        }
        let sel_l = self.selection(bl);
        let sel_h = self.selection(bh);
        let left = cis(&(omega * &dl[0]), &b) * self.suffix_ge(1, omega, &dl, &sel_l, &self.full_products(omega, &sel_l));
        let right = cis(&(omega * &dh[0]), &b) * self.suffix_le(1, omega, &dh, &sel_h, &self.full_products(omega, &sel_h));
        let mut mid = Complex64::new(0.0, 0.0);
        if bh > bl + 1 {
            let fulls = self.joint_fulls(omega);
            for (j, f) in self.joint.iter().zip(&fulls) {
                let a = j.start.max(bl + 1);
                let e = (j.start + j.len).min(bh);
                if a < e {
                    mid += geo_range(omega, &b, &BigInt::from(a), &BigInt::from(e)) * f;
                }
            }
        }
        (left + mid + right) * cell
    }

    /// μ̂(ω) = ∫ e^{2πiωt} dμ.
    pub fn fourier(&self, omega: &BigInt) -> Complex64 {
        let b = BigInt::from(self.blocks);
        let fulls = self.joint_fulls(omega);
        let s: Complex64 = self
            .joint
            .iter()
            .zip(&fulls)
            .map(|(j, f)| cis(&(omega * j.start), &b) * geo(omega, &b, &BigInt::from(j.len)) * f)
            .sum();
        s * segment_integral(omega, &BigInt::one(), self.grid())
    }

    /// Fourier coefficient of the restriction to an arc with any rational endpoints.
    pub fn fourier_on_arc(&self, omega: &BigInt, arc: &CircleArc) -> Complex64 {
        let g = self.grid();
        let (cl, rl) = (&arc.lo * g).div_mod_floor(&arc.den);
        let (ch, rh) = (&arc.hi * g).div_mod_floor(&arc.den);
        let dg = &arc.den * g;
        if cl == ch {
            let len = &arc.hi - &arc.lo;
            return cis(&(omega * &arc.lo), &arc.den) * segment_integral(omega, &len, &arc.den) * self.cell_density(&cl);
        }
        let mut total = Complex64::new(0.0, 0.0);
        let mut first = cl.clone();
        if !rl.is_zero() {
            first += 1u32;
            let len = &first * &arc.den - &arc.lo * g;
            total += cis(&(omega * &arc.lo), &arc.den) * segment_integral(omega, &len, &dg) * self.cell_density(&cl);
        }
        total += self.fourier_cells(omega, &first, &ch);
        if !rh.is_zero() {
            let len = &arc.hi * g - &ch * &arc.den;
            total += cis(&(omega * &ch), g) * segment_integral(omega, &len, &dg) * self.cell_density(&ch);
        }
        total
    }

    pub fn mass_on(&self, arc: &CircleArc) -> f64 {
        self.fourier_on_arc(&BigInt::zero(), arc).re
    }

    /// [μ, f] = Σ f̂(k) μ̂(k).
    pub fn pair(&self, f: &TrigPoly) -> Complex64 {
        let terms: Vec<(&BigInt, &Complex64)> = f.terms().collect();
        let parts: Vec<Complex64> = terms.par_iter().map(|(k, c)| **c * self.fourier(k)).collect();
        parts.into_iter().sum()
    }

    /// The same measure as explicit segments; only for grids up to [`EXPLICIT_CELL_CAP`] cells.
    pub fn to_circle_measure(&self) -> Result<CircleMeasure> {
        let g = self.grid().to_u64().filter(|&g| g <= EXPLICIT_CELL_CAP);
        let Some(g) = g else {
            return Err(Error::Budget(format!("{} cells is too many to list", self.grid())));
        };
        let mut segments: Vec<Segment> = Vec::new();
        for c in 0..g {
            let h = self.cell_density(&BigInt::from(c));
            let (t0, t1) = (c as f64 / g as f64, (c + 1) as f64 / g as f64);
            match segments.last_mut() {
                Some(s) if s.height == h => s.t1 = t1,
                _ => segments.push(Segment { t0, t1, height: h }),
            }
        }
        CircleMeasure::new(vec![], segments)
    }
}
