//! Line-based text format for measures.
//!
//! ```text
//! circle-measure 1
//! atom <t> <mass>
//! segment <t0> <t1> <height>
//! end
//!
//! layered-measure 1
//! blocks <B>
//! layer <k> <q>
//! run <start> <len> <x> <window start>
//! end
//! ```
//!
//! Reals are written in shortest round-trip decimal form, integers in decimal. Blank lines and
//! lines starting with `#` are ignored. `run` lines belong to the preceding `layer`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;

use super::circle::{CircleMeasure, Segment};
use super::layered::{Layer, LayeredMeasure, Pattern, Run};
use crate::error::{Error, Result};

pub fn write_circle(mu: &CircleMeasure) -> String {
    let mut s = String::from("circle-measure 1\n");
    for (t, m) in mu.atoms() {
        writeln!(s, "atom {t:?} {m:?}").unwrap();
    }
    for g in mu.segments() {
        writeln!(s, "segment {:?} {:?} {:?}", g.t0, g.t1, g.height).unwrap();
    }
    s.push_str("end\n");
    s
}

pub fn write_layered(mu: &LayeredMeasure) -> String {
    let mut s = format!("layered-measure 1\nblocks {}\n", mu.blocks());
    for l in mu.layers() {
        writeln!(s, "layer {} {}", l.k, l.q).unwrap();
        for r in &l.runs {
            writeln!(s, "run {} {} {:?} {}", r.start, r.len, r.pattern.x, r.pattern.start).unwrap();
        }
    }
    s.push_str("end\n");
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate() }
    }

    /// Next meaningful line as (1-based number, fields).
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            return Some((i + 1, l.split_whitespace().collect()));
        }
        None
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: FromStr>(line: usize, fields: &[&str], i: usize, what: &str) -> Result<T> {
    let s = fields.get(i).ok_or_else(|| err(line, format!("missing {what}")))?;
    s.parse().map_err(|_| err(line, format!("bad {what} '{s}'")))
}

fn arity(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() != n {
        return Err(err(line, format!("'{}' takes {} fields, got {}", fields[0], n - 1, fields.len() - 1)));
    }
    Ok(())
}

fn header(lines: &mut Lines, kind: &str) -> Result<()> {
    let (line, f) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    if f.first() != Some(&kind) {
        return Err(err(line, format!("expected '{kind}'")));
    }
    arity(line, &f, 2)?;
    let v: u32 = field(line, &f, 1, "version")?;
    if v != 1 {
        return Err(err(line, format!("unsupported version {v}")));
    }
    Ok(())
}

fn trailer(lines: &mut Lines) -> Result<()> {
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "content after 'end'"));
    }
    Ok(())
}

pub fn read_circle(text: &str) -> Result<CircleMeasure> {
    let mut lines = Lines::new(text);
    header(&mut lines, "circle-measure")?;
    let mut atoms = Vec::new();
    let mut segments = Vec::new();
    let mut last = 1;
    loop {
        let (line, f) = lines.next().ok_or_else(|| err(last, "missing 'end'"))?;
        last = line;
        match f[0] {
            "atom" => {
                arity(line, &f, 3)?;
                atoms.push((field(line, &f, 1, "angle")?, field(line, &f, 2, "mass")?));
            }
            "segment" => {
                arity(line, &f, 4)?;
                segments.push(Segment { t0: field(line, &f, 1, "t0")?, t1: field(line, &f, 2, "t1")?, height: field(line, &f, 3, "height")? });
            }
            "end" => {
                arity(line, &f, 1)?;
                break;
            }
            other => return Err(err(line, format!("unknown record '{other}'"))),
        }
    }
    trailer(&mut lines)?;
    CircleMeasure::new(atoms, segments).map_err(|e| err(last, e.to_string()))
}

pub fn read_layered(text: &str) -> Result<LayeredMeasure> {
    let mut lines = Lines::new(text);
    header(&mut lines, "layered-measure")?;
    let (line, f) = lines.next().ok_or_else(|| err(1, "missing 'blocks'"))?;
    if f[0] != "blocks" {
        return Err(err(line, "expected 'blocks'"));
    }
    arity(line, &f, 2)?;
    let mut mu = LayeredMeasure::lebesgue(field(line, &f, 1, "block count")?).map_err(|e| err(line, e.to_string()))?;
    let mut pending: Option<(usize, Layer)> = None;
    let mut last = line;
    let flush = |mu: &mut LayeredMeasure, pending: &mut Option<(usize, Layer)>| -> Result<()> {
        if let Some((line, layer)) = pending.take() {
            mu.push_layer(layer).map_err(|e| err(line, e.to_string()))?;
        }
        Ok(())
    };
    loop {
        let (line, f) = lines.next().ok_or_else(|| err(last, "missing 'end'"))?;
        last = line;
        match f[0] {
            "layer" => {
                arity(line, &f, 3)?;
                flush(&mut mu, &mut pending)?;
                let k: BigInt = field(line, &f, 1, "k")?;
                pending = Some((line, Layer { k, q: field(line, &f, 2, "q")?, runs: Vec::new() }));
            }
            "run" => {
                arity(line, &f, 5)?;
                let (_, layer) = pending.as_mut().ok_or_else(|| err(line, "'run' before any 'layer'"))?;
                let pattern = Pattern { x: field(line, &f, 3, "x")?, start: field(line, &f, 4, "window start")? };
                layer.runs.push(Run { start: field(line, &f, 1, "run start")?, len: field(line, &f, 2, "run length")?, pattern });
            }
            "end" => {
                arity(line, &f, 1)?;
                flush(&mut mu, &mut pending)?;
                break;
            }
            other => return Err(err(line, format!("unknown record '{other}'"))),
        }
    }
    trailer(&mut lines)?;
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn circle_round_trip() {
        let mu = CircleMeasure::new(
            vec![(0.1, 0.25), (0.7, 0.125)],
            vec![Segment { t0: 0.2, t1: 0.5, height: 1.0 / 3.0 * 2.0 }, Segment { t0: 0.8, t1: 1.0, height: 0.625 }],
        )
        .unwrap();
        let back = read_circle(&write_circle(&mu)).unwrap();
        assert_eq!(back, mu);
        for k in -100..=100 {
            assert!((back.fourier(k) - mu.fourier(k)).norm() <= 1e-12);
        }
    }

    #[test]
    fn layered_round_trip() {
        let mut mu = LayeredMeasure::lebesgue(4).unwrap();
        let p = Pattern::aligned(0.3, 1, 8).unwrap();
        mu.push_layer(Layer {
            k: BigInt::from(12),
            q: 8,
            runs: vec![Run { start: 0, len: 2, pattern: p }, Run { start: 2, len: 2, pattern: Pattern::FLAT }],
        })
        .unwrap();
        let back = read_layered(&write_layered(&mu)).unwrap();
        assert_eq!(back, mu);
        for k in -100..=100 {
            let k = BigInt::from(k);
            assert!((back.fourier(&k) - mu.fourier(&k)).norm() <= 1e-12);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let mu = read_circle("# lebesgue\n\ncircle-measure 1\nsegment 0 1 1\nend\n").unwrap();
        assert!((mu.fourier(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn malformed_input_names_the_line() {
        let cases = [
            ("", 0),
            ("circle-measure 2\nend\n", 1),
            ("circle-measure 1\natom 0.5\nend\n", 2),
            ("circle-measure 1\natom 0.5 x\nend\n", 2),
            ("circle-measure 1\nsegment 0 1 1\n", 2),
            ("circle-measure 1\nend\nend\n", 3),
            ("circle-measure 1\nblob 1\nend\n", 2),
            ("layered-measure 1\nblocks 4\nrun 0 4 0 0\nend\n", 3),
            ("layered-measure 1\nblocks 4\nlayer 6 8\nrun 0 4 0 0\nend\n", 3),
        ];
        for (text, line) in cases {
            let r = if text.contains("layered") { read_layered(text).map(|_| ()) } else { read_circle(text).map(|_| ()) };
            match r {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
