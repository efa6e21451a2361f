//! Typed-line certificate files.
//!
//! Certificates can be loaded from (and written to) flat text files, one
//! typed line each, so protocol runs can be driven by fixture certificates
//! instead of the built-in prover search:
//!
//! ```text
//! # comment
//! N 5
//! EDGE 0 1 2       matching edge (weight optional, default 1)
//! VTX 3 1          nonzero vertex dual, ascending order
//! CLAW 1 1 2 0 1 2 claw tuple: index, level, cumulative r, boundary
//! SEP 4            separator vertex (Tutte-Berge)
//! ROOT 0           starts a spanning tree; TEDGE lines attach to it
//! TEDGE 0 2        directed tree edge, parent first
//! ```

use crate::gstream::StreamError;
use crate::matching::dual_search::Claw;
use crate::matching::{LaminarDualCert, MatchingCert};
use crate::spanning::{SpanningForestCert, TreeCert};

/// Everything a certificate file can carry; sections are optional.
#[derive(Clone, Debug, Default)]
pub struct CertFile {
    pub n: usize,
    pub matching: MatchingCert,
    pub duals: Option<LaminarDualCert>,
    pub separator: Vec<usize>,
    pub forest: SpanningForestCert,
}

pub fn render(cert: &CertFile) -> String {
    let mut out = format!("N {}\n", cert.n);
    for &(a, b, w) in &cert.matching.edges {
        out.push_str(&format!("EDGE {a} {b} {w}\n"));
    }
    if let Some(duals) = &cert.duals {
        for (v, &y) in duals.y.iter().enumerate() {
            if y > 0 {
                out.push_str(&format!("VTX {v} {y}\n"));
            }
        }
        for (ci, claw) in duals.claws.iter().enumerate() {
            let rs = claw.r_values();
            for (t, boundary) in claw.boundaries().into_iter().enumerate() {
                out.push_str(&format!("CLAW {} {} {}", ci + 1, t + 1, rs[t]));
                for v in boundary {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
    }
    for &v in &cert.separator {
        out.push_str(&format!("SEP {v}\n"));
    }
    for tree in &cert.forest.trees {
        out.push_str(&format!("ROOT {}\n", tree.root));
        for &(a, b) in &tree.edges {
            out.push_str(&format!("TEDGE {a} {b}\n"));
        }
    }
    out
}

pub fn parse(text: &str) -> Result<CertFile, StreamError> {
    let mut cert = CertFile::default();
    // claw tuples keyed by claw index; recombined into nested sets below
    let mut claw_tuples: Vec<(usize, usize, u64, Vec<usize>)> = Vec::new();
    let mut vtx: Vec<(usize, u64)> = Vec::new();
    let mut saw_dual_section = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| StreamError::Parse {
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let num = |k: usize| -> Result<usize, StreamError> {
            parts
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("expected a number"))
        };
        match parts[0] {
            "N" => cert.n = num(1)?,
            "EDGE" => {
                let (a, b) = (num(1)?, num(2)?);
                let w = if parts.len() > 3 { num(3)? as u64 } else { 1 };
                cert.matching.edges.push((a.min(b), a.max(b), w));
            }
            "VTX" => {
                saw_dual_section = true;
                vtx.push((num(1)?, num(2)? as u64));
            }
            "CLAW" => {
                saw_dual_section = true;
                let (ci, level, r) = (num(1)?, num(2)?, num(3)? as u64);
                let boundary: Result<Vec<usize>, _> = (4..parts.len()).map(num).collect();
                claw_tuples.push((ci, level, r, boundary?));
            }
            "SEP" => cert.separator.push(num(1)?),
            "ROOT" => cert.forest.trees.push(TreeCert {
                root: num(1)?,
                edges: vec![],
            }),
            "TEDGE" => {
                let tree = cert
                    .forest
                    .trees
                    .last_mut()
                    .ok_or_else(|| bad("TEDGE before any ROOT"))?;
                tree.edges.push((num(1)?, num(2)?));
            }
            other => return Err(bad(&format!("unknown token `{other}`"))),
        }
    }
    cert.matching.edges.sort_unstable();
    if saw_dual_section {
        if cert.n == 0 {
            return Err(StreamError::Invalid("dual section requires an N header".into()));
        }
        let mut y = vec![0u64; cert.n];
        for (v, w) in vtx {
            if v >= cert.n {
                return Err(StreamError::Invalid(format!("VTX {v} out of range")));
            }
            y[v] = w;
        }
        claw_tuples.sort_unstable_by_key(|&(ci, level, _, _)| (ci, level));
        let mut claws: Vec<Claw> = Vec::new();
        let mut current: Option<(usize, Vec<(Vec<usize>, u64)>, u64)> = None;
        for (ci, _, r, boundary) in claw_tuples {
            match &mut current {
                Some((index, sets, prev_r)) if *index == ci => {
                    let z = r
                        .checked_sub(*prev_r)
                        .ok_or_else(|| StreamError::Invalid("r values not monotone".into()))?;
                    sets.push((boundary, z));
                    *prev_r = r;
                }
                _ => {
                    if let Some((_, sets, _)) = current.take() {
                        claws.push(rebuild_claw(sets));
                    }
                    current = Some((ci, vec![(boundary, r)], r));
                }
            }
        }
        if let Some((_, sets, _)) = current.take() {
            claws.push(rebuild_claw(sets));
        }
        cert.duals = Some(LaminarDualCert { y, claws });
    }
    Ok(cert)
}

/// Boundaries stream outermost-first; the actual sets are the suffix
/// unions.
fn rebuild_claw(boundaries_with_z: Vec<(Vec<usize>, u64)>) -> Claw {
    let mut sets = Vec::with_capacity(boundaries_with_z.len());
    for t in 0..boundaries_with_z.len() {
        let mut set: Vec<usize> = boundaries_with_z[t..]
            .iter()
            .flat_map(|(b, _)| b.iter().copied())
            .collect();
        set.sort_unstable();
        sets.push((set, boundaries_with_z[t].1));
    }
    Claw { sets }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_certificates() {
        let text = "\
# two-level claw over five vertices
N 6
EDGE 0 1 2
EDGE 2 3 2
VTX 5 1
CLAW 1 1 1 0 4
CLAW 1 2 3 1 2 3
SEP 5
ROOT 0
TEDGE 0 1
TEDGE 1 2
";
        let cert = parse(text).unwrap();
        assert_eq!(cert.n, 6);
        assert_eq!(cert.matching.edges, vec![(0, 1, 2), (2, 3, 2)]);
        let duals = cert.duals.as_ref().unwrap();
        assert_eq!(duals.y[5], 1);
        assert_eq!(duals.claws.len(), 1);
        assert_eq!(
            duals.claws[0].sets,
            vec![(vec![0, 1, 2, 3, 4], 1), (vec![1, 2, 3], 2)]
        );
        assert_eq!(duals.claws[0].r_values(), vec![1, 3]);
        assert_eq!(cert.separator, vec![5]);
        assert_eq!(cert.forest.trees[0].edges, vec![(0, 1), (1, 2)]);
        let rendered = render(&cert);
        let back = parse(&rendered).unwrap();
        assert_eq!(back.matching, cert.matching);
        assert_eq!(back.duals, cert.duals);
        assert_eq!(back.separator, cert.separator);
        assert_eq!(back.forest, cert.forest);
    }

    #[test]
    fn malformed_lines_are_reported() {
        assert!(parse("TEDGE 0 1\n").is_err());
        assert!(parse("WAT 1\n").is_err());
        assert!(parse("VTX 0 1\n").is_err()); // dual section without N
    }
}
