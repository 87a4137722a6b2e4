//! Tables, JSON reports and SVG figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deformations::{Branch, Provenance};
use crate::morse_tree::{NodeKind, PlaneTree, Source, SpectrumEntry};
use crate::rational::QStr;
use crate::reeb_surface::{DiskDecomposition, SurfaceReebGraph};
use crate::sphere::CounterexampleReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
}

impl From<csv::Error> for ReportError {
    fn from(e: csv::Error) -> Self {
        ReportError::Csv(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub source: String,
    pub kind: String,
    pub area: Option<QStr>,
    pub k: Option<i64>,
    pub level: Option<QStr>,
    pub action: QStr,
    pub negative: bool,
}

pub fn spectrum_rows(t: &PlaneTree, entries: &[SpectrumEntry], prefix: &str) -> Vec<SpectrumRow> {
    entries
        .iter()
        .map(|e| {
            let (source, kind, area, k, level) = match &e.source {
                Source::Trivial => (String::new(), "trivial", None, None, None),
                Source::Critical(n) => {
                    let node = &t.nodes[*n];
                    let kind = match node.kind {
                        NodeKind::Extremum => "extremum",
                        NodeKind::Saddle => "saddle",
                    };
                    (node.name.clone(), kind, None, Some(0), Some(QStr(node.level.clone())))
                }
                Source::Orbit(o) => (
                    t.edges[o.edge_id].name.clone(),
                    "orbit",
                    Some(QStr(o.area.clone())),
                    Some(o.k),
                    Some(QStr(o.level.clone())),
                ),
            };
            SpectrumRow {
                source: format!("{prefix}{source}"),
                kind: kind.into(),
                area,
                k,
                level,
                action: QStr(e.action.clone()),
                negative: e.negative,
            }
        })
        .collect()
}

pub fn write_spectrum_csv(rows: &[SpectrumRow]) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(["source", "kind", "area", "k", "level", "action", "negative"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Csv(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

pub fn parse_spectrum_csv(data: &[u8]) -> Result<Vec<SpectrumRow>, ReportError> {
    let mut r = csv::Reader::from_reader(data);
    r.deserialize().map(|row| row.map_err(ReportError::from)).collect()
}

/// One row per tracked sample, ordered by `sigma` then branch.
pub fn write_bifurcation_csv(branches: &[Branch]) -> String {
    let mut rows: Vec<(f64, usize, f64, Provenance)> = branches
        .iter()
        .flat_map(|b| b.points.iter().map(move |&(s, a)| (s, b.id, a, b.provenance)))
        .collect();
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut out = String::from("sigma,branch_id,action,provenance\n");
    for (s, id, a, p) in rows {
        let _ = writeln!(out, "{s:.16e},{id},{a:.16e},{}", p.as_str());
    }
    out
}

pub fn parse_bifurcation_csv(data: &[u8]) -> Result<Vec<Branch>, ReportError> {
    let text = std::str::from_utf8(data).map_err(|e| ReportError::Csv(e.to_string()))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "sigma,branch_id,action,provenance" => {}
        _ => return Err(ReportError::Row { line: 1, msg: "expected header sigma,branch_id,action,provenance".into() }),
    }
    let mut branches: BTreeMap<usize, Branch> = BTreeMap::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| ReportError::Row { line: i + 1, msg: msg.into() };
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let s: f64 = f[0].parse().map_err(|_| bad("bad sigma"))?;
        let id: usize = f[1].parse().map_err(|_| bad("bad branch_id"))?;
        let a: f64 = f[2].parse().map_err(|_| bad("bad action"))?;
        if !s.is_finite() || !a.is_finite() {
            return Err(bad("non-finite value"));
        }
        let p = Provenance::parse(f[3]).ok_or_else(|| bad("bad provenance"))?;
        let b = branches.entry(id).or_insert_with(|| Branch { id, provenance: p, points: Vec::new() });
        if b.provenance != p {
            return Err(bad("provenance changes along a branch"));
        }
        b.points.push((s, a));
    }
    Ok(branches.into_values().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskReport {
    pub attachment: String,
    pub boundary_level: QStr,
    pub root_edge: String,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub essential_saddles: Vec<String>,
    pub core_edges: Vec<String>,
    pub disks: Vec<DiskReport>,
}

impl DecompositionReport {
    pub fn new(g: &SurfaceReebGraph, d: &DiskDecomposition) -> Self {
        let v = |i: &usize| g.vertices[*i].id.clone();
        let e = |i: &usize| g.edges[*i].id.clone();
        DecompositionReport {
            essential_saddles: d.core_vertices.iter().map(v).collect(),
            core_edges: d.core_edges.iter().map(e).collect(),
            disks: d
                .disks
                .iter()
                .map(|k| DiskReport {
                    attachment: v(&k.attachment),
                    boundary_level: QStr(k.boundary_level.clone()),
                    root_edge: e(&k.root_edge),
                    vertices: k.vertices.iter().map(v).collect(),
                    edges: k.edges.iter().map(e).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleParameters {
    pub z_beta: QStr,
    pub delta_prime: QStr,
    pub d: QStr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleJson {
    pub c_sum: QStr,
    pub c_sum_error: QStr,
    pub c1: QStr,
    pub c1_is_bound: bool,
    pub c2: QStr,
    pub z_gamma2: QStr,
    pub gap: QStr,
    pub certified_gap: QStr,
    pub parameters: CounterexampleParameters,
}

impl From<&CounterexampleReport> for CounterexampleJson {
    fn from(r: &CounterexampleReport) -> Self {
        CounterexampleJson {
            c_sum: QStr(r.c_sum.clone()),
            c_sum_error: QStr(r.c_sum_error.clone()),
            c1: QStr(r.c1.clone()),
            c1_is_bound: r.c1_is_bound,
            c2: QStr(r.c2.clone()),
            z_gamma2: QStr(r.z_gamma2.clone()),
            gap: QStr(r.gap.clone()),
            certified_gap: QStr(r.certified_gap.clone()),
            parameters: CounterexampleParameters {
                z_beta: QStr(r.z_beta.clone()),
                delta_prime: QStr(r.delta_prime.clone()),
                d: QStr(r.d.clone()),
            },
        }
    }
}

pub fn to_json_pretty<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("serializable");
    s.push('\n');
    s
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const PAD: f64 = 40.0;

fn color(p: Provenance) -> &'static str {
    match p {
        Provenance::Inside => "#c0392b",
        Provenance::Outside => "#2471a3",
        Provenance::Whole => "#222222",
    }
}

/// Action against `sigma`, one polyline per branch.
pub fn bifurcation_svg(branches: &[Branch]) -> String {
    let pts = branches.iter().flat_map(|b| b.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(s, a) in pts {
        x0 = x0.min(s);
        x1 = x1.max(s);
        y0 = y0.min(a);
        y1 = y1.max(a);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |s: f64| PAD + (s - x0) / (x1 - x0) * (SVG_W - 2.0 * PAD);
    let py = |a: f64| SVG_H - PAD - (a - y0) / (y1 - y0) * (SVG_H - 2.0 * PAD);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" viewBox="0 0 {SVG_W} {SVG_H}">"#);
    let _ = writeln!(
        out,
        r##"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="#999999"/>"##,
        SVG_W - 2.0 * PAD,
        SVG_H - 2.0 * PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">sigma</text>"#, SVG_W / 2.0, SVG_H - 10.0);
    let _ = writeln!(out, r#"<text x="10" y="{}" font-size="12">action</text>"#, PAD - 10.0);
    let _ = writeln!(out, r#"<text x="{PAD}" y="{}" font-size="10">{x0:.4}</text>"#, SVG_H - PAD + 14.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{x1:.4}</text>"#, SVG_W - PAD, SVG_H - PAD + 14.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{y0:.4}</text>"#, PAD - 2.0, SVG_H - PAD);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{y1:.4}</text>"#, PAD - 2.0, PAD + 10.0);
    for b in branches {
        let mut d = String::new();
        for (i, &(s, a)) in b.points.iter().enumerate() {
            if i > 0 {
                d.push(' ');
            }
            let _ = write!(d, "{:.3},{:.3}", px(s), py(a));
        }
        let _ = writeln!(
            out,
            r#"<polyline data-branch="{}" data-provenance="{}" fill="none" stroke="{}" stroke-width="1.5" points="{d}"/>"#,
            b.id,
            b.provenance.as_str(),
            color(b.provenance)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::{bifurcation, default_grid, Family, TrackOptions};
    use crate::morse_tree::models::{double_mountain, single_mountain};
    use crate::morse_tree::spectrum;
    use crate::rational::q;
    use crate::reeb_surface::core_graph;
    use crate::reeb_surface::models::genus2_figure;
    use crate::sphere::counterexample;

    #[test]
    fn spectrum_csv_roundtrip() {
        let t = double_mountain();
        let rows = spectrum_rows(&t, &spectrum(&t).unwrap(), "");
        let text = write_spectrum_csv(&rows).unwrap();
        assert!(text.starts_with("source,kind,area,k,level,action,negative\n"));
        let back = parse_spectrum_csv(text.as_bytes()).unwrap();
        assert_eq!(back, rows);
        assert_eq!(write_spectrum_csv(&back).unwrap(), text);
        assert!(rows.iter().any(|r| r.kind == "orbit" && r.negative));
        assert_eq!(parse_spectrum_csv(write_spectrum_csv(&[]).unwrap().as_bytes()).unwrap(), vec![]);
    }

    #[test]
    fn bifurcation_csv_roundtrip() {
        let f = Family::Shift { base: single_mountain(), rate: q(1, 2) };
        let d = bifurcation(&f, &default_grid(9), TrackOptions::default()).unwrap();
        let text = write_bifurcation_csv(&d.branches);
        let back = parse_bifurcation_csv(text.as_bytes()).unwrap();
        assert_eq!(back, d.branches);
        assert_eq!(write_bifurcation_csv(&back), text);
        let svg = bifurcation_svg(&back);
        assert_eq!(svg.matches("<polyline").count(), back.len());
        assert_eq!(svg, bifurcation_svg(&back));
    }

    #[test]
    fn bad_bifurcation_rows() {
        for bad in ["", "x\n", "sigma,branch_id,action,provenance\n0,1,2\n", "sigma,branch_id,action,provenance\n0,1,NaN,whole\n"] {
            assert!(parse_bifurcation_csv(bad.as_bytes()).is_err(), "{bad:?}");
        }
        let mixed = "sigma,branch_id,action,provenance\n0,1,0,whole\n1,1,0,inside\n";
        assert!(parse_bifurcation_csv(mixed.as_bytes()).is_err());
    }

    #[test]
    fn decomposition_counts() {
        let g = genus2_figure();
        let r = DecompositionReport::new(&g, &core_graph(&g).unwrap());
        assert_eq!((r.essential_saddles.len(), r.disks.len(), r.core_edges.len()), (6, 4, 7));
        let text = to_json_pretty(&r);
        assert_eq!(serde_json::from_str::<DecompositionReport>(&text).unwrap(), r);
    }

    #[test]
    fn counterexample_json() {
        let r = counterexample(&q(1, 10), &q(1, 100)).unwrap();
        let j = CounterexampleJson::from(&r);
        let v: serde_json::Value = serde_json::from_str(&to_json_pretty(&j)).unwrap();
        for key in ["c_sum", "c1", "c2", "gap", "parameters"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["parameters"]["z_beta"], "1/10");
    }
}
