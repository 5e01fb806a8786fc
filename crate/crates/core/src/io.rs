//! Text formats: braid files, word files, and twist-system files.
//!
//! Braid files round-trip exactly; anchors are written as integers or
//! `p/q` fractions.

use std::str::FromStr;
use std::sync::Arc;

use num::One;
use thiserror::Error;

use crate::braid::DiscretizedBraid;
use crate::colored::ColoredBraid;
use crate::dynamics::{
    psi_rotation, rotation_gf, upsilon_rotation, ChainParams, ChainedIsotopy, GeneratingFn,
    LocalRotation, PlaneMap, Step,
};
use crate::word::{ColoredWord, PositiveWord};
use crate::{Int, Rat};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    At(usize, String),
    #[error("{0}")]
    Bad(String),
}

fn bad(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::At(line + 1, msg.into())
}

fn parse_rat(tok: &str) -> Result<Rat, String> {
    if let Some((p, q)) = tok.split_once('/') {
        let p = Int::from_str(p.trim()).map_err(|e| e.to_string())?;
        let q = Int::from_str(q.trim()).map_err(|e| e.to_string())?;
        if q == Int::from(0) {
            return Err("zero denominator".into());
        }
        Ok(Rat::new(p, q))
    } else {
        let p = Int::from_str(tok.trim()).map_err(|e| e.to_string())?;
        Ok(Rat::from(p))
    }
}

fn show_rat(v: &Rat) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parse a braid file: header `braid m=<m> d=<d>`, then one strand per line
/// as `x_0 x_1 ... x_d`, optionally suffixed `color: red|black`.  The
/// closure permutation is inferred from the endpoints.
pub fn parse_braid(text: &str) -> Result<(DiscretizedBraid, Option<usize>), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hk, header) = lines.next().ok_or_else(|| ParseError::Bad("empty braid file".into()))?;
    let mut m = None;
    let mut d = None;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("braid") {
        return Err(bad(hk, "expected header `braid m=<m> d=<d>`"));
    }
    for field in fields {
        if let Some(v) = field.strip_prefix("m=") {
            m = Some(v.parse::<usize>().map_err(|e| bad(hk, e.to_string()))?);
        } else if let Some(v) = field.strip_prefix("d=") {
            d = Some(v.parse::<usize>().map_err(|e| bad(hk, e.to_string()))?);
        } else {
            return Err(bad(hk, format!("unknown header field `{field}`")));
        }
    }
    let (m, d) = match (m, d) {
        (Some(m), Some(d)) => (m, d),
        _ => return Err(bad(hk, "header must carry m= and d=")),
    };
    let mut red = Vec::new();
    let mut black = Vec::new();
    for (k, line) in lines {
        let (anchors_part, color) = match line.split_once("color:") {
            None => (line, "black"),
            Some((a, c)) => (a, c.trim()),
        };
        let anchors: Result<Vec<Rat>, _> = anchors_part
            .split_whitespace()
            .map(|tok| parse_rat(tok).map_err(|e| bad(k, e)))
            .collect();
        let anchors = anchors?;
        if anchors.len() != d + 1 {
            return Err(bad(k, format!("expected {} anchors, found {}", d + 1, anchors.len())));
        }
        match color {
            "red" => red.push(anchors),
            "black" => black.push(anchors),
            other => return Err(bad(k, format!("unknown color `{other}`"))),
        }
    }
    if red.len() + black.len() != m {
        return Err(ParseError::Bad(format!(
            "header says m={m} but found {} strands",
            red.len() + black.len()
        )));
    }
    let n = red.len();
    let mut strands = red;
    strands.extend(black);
    let braid = DiscretizedBraid::from_strands(strands)
        .map_err(|e| ParseError::Bad(e.to_string()))?;
    Ok((braid, if n > 0 { Some(n) } else { None }))
}

/// Parse a braid file that must carry red strands.
pub fn parse_colored_braid(text: &str) -> Result<ColoredBraid, ParseError> {
    let (braid, n) = parse_braid(text)?;
    ColoredBraid::new(n.unwrap_or(0), braid).map_err(|e| ParseError::Bad(e.to_string()))
}

/// Serialize a braid; strands `0..n` are labelled red.
pub fn show_braid(b: &DiscretizedBraid, n_red: usize) -> String {
    let mut out = format!("braid m={} d={}\n", b.strand_count(), b.period());
    for (s, strand) in b.strands().iter().enumerate() {
        let anchors: Vec<String> = strand.iter().map(show_rat).collect();
        out.push_str(&anchors.join(" "));
        if s < n_red {
            out.push_str(" color: red");
        }
        out.push('\n');
    }
    out
}

/// Parse a word in either spaced-index form (`1 2 2 1`) or compact sigma
/// form (`s1 s2 s2 s1`), with an optional `m=<m>:` prefix and an optional
/// `red={...}` suffix.
pub fn parse_word(text: &str) -> Result<(PositiveWord, Option<ColoredWord>), ParseError> {
    let text = text.trim();
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) if h.trim_start().starts_with("m=") => (Some(h.trim()), r),
        _ => (None, text),
    };
    let (word_part, red_part) = match rest.split_once("red=") {
        None => (rest, None),
        Some((w, r)) => (w, Some(r.trim())),
    };
    let mut letters = Vec::new();
    for tok in word_part.split_whitespace() {
        let tok = tok.strip_prefix('s').unwrap_or(tok);
        let i: usize = tok
            .parse()
            .map_err(|_| ParseError::Bad(format!("bad generator `{tok}`")))?;
        letters.push(i);
    }
    let m = match head {
        Some(h) => h
            .strip_prefix("m=")
            .unwrap()
            .parse::<usize>()
            .map_err(|e| ParseError::Bad(e.to_string()))?,
        None => letters.iter().copied().max().unwrap_or(1) + 1,
    };
    let word = PositiveWord::new(m, letters).map_err(|e| ParseError::Bad(e.to_string()))?;
    let colored = match red_part {
        None => None,
        Some(r) => {
            let r = r.trim_start_matches('{').trim_end_matches('}');
            let set: Result<std::collections::BTreeSet<usize>, _> = r
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<usize>())
                .collect();
            let set = set.map_err(|e| ParseError::Bad(e.to_string()))?;
            Some(ColoredWord::new(word.clone(), set).map_err(|e| ParseError::Bad(e.to_string()))?)
        }
    };
    Ok((word, colored))
}

/// Serialize a word in the `m=<m>: i1 i2 ...` form.
pub fn show_word(w: &PositiveWord) -> String {
    let letters: Vec<String> = w.letters().iter().map(|i| i.to_string()).collect();
    format!("m={}: {}", w.strands(), letters.join(" "))
}

pub fn show_colored_word(cw: &ColoredWord) -> String {
    let reds: Vec<String> = cw.red().iter().map(|r| r.to_string()).collect();
    format!("{} red={{{}}}", show_word(cw.word()), reds.join(","))
}

/// A parsed twist-system file.
pub struct SystemFile {
    pub chain: ChainedIsotopy<f64>,
    pub invariant_set: Vec<(f64, f64)>,
}

/// Parse a system file.  Two stanzas are understood:
///
/// * `step rot:<theta> | psi:<ell> | ups:<ell>` — explicit per-slice
///   generating functions;
/// * `chain ell=<l> kappa=<k> r=<r> ell_r=<lr> rho=<rho> ell_rho=<lrho>`
///   followed by `map disc:<cx>,<cy>,<r1>,<r2>,<angle>` lines giving the
///   near-identity factors of a chained decomposition.
///
/// `point <x> <y>` lines list the invariant set to trace.
pub fn parse_system(text: &str) -> Result<SystemFile, ParseError> {
    let mut steps: Vec<Step<f64>> = Vec::new();
    let mut params: Option<ChainParams> = None;
    let mut maps: Vec<Arc<dyn PlaneMap<f64>>> = Vec::new();
    let mut points = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kind {
            "step" => {
                let gf = parse_genfn(rest.trim()).map_err(|e| bad(k, e))?;
                steps.push(Step::Closed(gf));
            }
            "chain" => {
                let mut p = ChainParams::default();
                for field in rest.split_whitespace() {
                    let (key, val) =
                        field.split_once('=').ok_or_else(|| bad(k, "expected key=value"))?;
                    let v: usize = val.parse().map_err(|e: std::num::ParseIntError| {
                        bad(k, e.to_string())
                    })?;
                    match key {
                        "ell" => p.ell = v,
                        "kappa" => p.kappa = v,
                        "r" => p.r = v,
                        "ell_r" => p.ell_r = v,
                        "rho" => p.rho = v,
                        "ell_rho" => p.ell_rho = v,
                        other => return Err(bad(k, format!("unknown chain field `{other}`"))),
                    }
                }
                params = Some(p);
            }
            "map" => {
                let rest = rest.trim();
                if let Some(spec) = rest.strip_prefix("disc:") {
                    let vals: Result<Vec<f64>, _> =
                        spec.split(',').map(|t| t.trim().parse::<f64>()).collect();
                    let vals = vals.map_err(|e| bad(k, e.to_string()))?;
                    if vals.len() != 5 {
                        return Err(bad(k, "disc map needs cx,cy,r1,r2,angle"));
                    }
                    maps.push(Arc::new(LocalRotation {
                        center: (vals[0], vals[1]),
                        r1: vals[2],
                        r2: vals[3],
                        angle: vals[4],
                    }));
                } else {
                    return Err(bad(k, format!("unknown map `{rest}`")));
                }
            }
            "point" => {
                let vals: Result<Vec<f64>, _> =
                    rest.split_whitespace().map(|t| t.parse::<f64>()).collect();
                let vals = vals.map_err(|e| bad(k, e.to_string()))?;
                if vals.len() != 2 {
                    return Err(bad(k, "point needs two coordinates"));
                }
                points.push((vals[0], vals[1]));
            }
            other => return Err(bad(k, format!("unknown stanza `{other}`"))),
        }
    }
    let chain = match params {
        Some(p) => crate::dynamics::build_chained_isotopy(maps, p)
            .map_err(|e| ParseError::Bad(e.to_string()))?,
        None => {
            if steps.is_empty() {
                return Err(ParseError::Bad("system file has no steps".into()));
            }
            ChainedIsotopy { steps, params: ChainParams::default() }
        }
    };
    Ok(SystemFile { chain, invariant_set: points })
}

fn parse_genfn(spec: &str) -> Result<Arc<dyn GeneratingFn<f64>>, String> {
    if let Some(v) = spec.strip_prefix("rot:") {
        let theta = parse_angle(v)?;
        Ok(Arc::new(rotation_gf::<f64>(theta).map_err(|e| e.to_string())?))
    } else if let Some(v) = spec.strip_prefix("psi:") {
        let ell: usize = v.trim().parse().map_err(|_| format!("bad order `{v}`"))?;
        Ok(Arc::new(psi_rotation::<f64>(ell).map_err(|e| e.to_string())?))
    } else if let Some(v) = spec.strip_prefix("ups:") {
        let ell: usize = v.trim().parse().map_err(|_| format!("bad order `{v}`"))?;
        Ok(Arc::new(upsilon_rotation::<f64>(ell).map_err(|e| e.to_string())?))
    } else {
        Err(format!("unknown generating function `{spec}`"))
    }
}

fn parse_angle(v: &str) -> Result<f64, String> {
    let v = v.trim();
    if let Some(frac) = v.strip_prefix("pi/") {
        let q: f64 = frac.parse().map_err(|_| format!("bad angle `{v}`"))?;
        return Ok(std::f64::consts::PI / q);
    }
    if v == "pi" {
        return Ok(std::f64::consts::PI);
    }
    v.parse().map_err(|_| format!("bad angle `{v}`"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rati;

    #[test]
    fn braid_round_trip() {
        let b = DiscretizedBraid::from_ints(&[&[1, 4, 1], &[2, 2, 2], &[3, 3, 3]]).unwrap();
        let text = show_braid(&b, 1);
        let (parsed, n) = parse_braid(&text).unwrap();
        assert_eq!(parsed, b);
        assert_eq!(n, Some(1));
        assert_eq!(show_braid(&parsed, 1), text);
    }

    #[test]
    fn rational_anchors_round_trip() {
        let b = DiscretizedBraid::new(
            vec![vec![crate::rat(1, 2), crate::rat(5, 3), crate::rat(1, 2)]],
            vec![0],
        )
        .unwrap();
        let text = show_braid(&b, 0);
        let (parsed, _) = parse_braid(&text).unwrap();
        assert_eq!(parsed, b);
        assert_eq!(parsed.strands()[0][1], crate::rat(5, 3));
        let _ = rati(0);
    }

    #[test]
    fn word_forms() {
        let (w, _) = parse_word("1 2 2 1").unwrap();
        assert_eq!(w.letters(), &[1, 2, 2, 1]);
        assert_eq!(w.strands(), 3);
        let (w2, _) = parse_word("s1 s2 s2 s1").unwrap();
        assert_eq!(w, w2);
        let (w3, cw) = parse_word("m=5: 4 1 2 3 2 2 3 2 1 4 red={3}").unwrap();
        assert_eq!(w3.strands(), 5);
        let cw = cw.unwrap();
        assert_eq!(cw.red().iter().copied().collect::<Vec<_>>(), vec![3]);
        let shown = show_colored_word(&cw);
        let (_, cw2) = parse_word(&shown).unwrap();
        assert_eq!(cw, cw2.unwrap());
    }

    #[test]
    fn system_file() {
        let text = "step rot:pi/2\nstep psi:4\nstep ups:4\npoint 0.5 0\npoint -0.5 0\n";
        let sys = parse_system(text).unwrap();
        assert_eq!(sys.chain.period(), 3);
        assert_eq!(sys.invariant_set.len(), 2);
    }
}
