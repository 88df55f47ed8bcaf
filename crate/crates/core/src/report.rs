//! Report streams: JSON lines in, per-member CSV and ratio-band SVG out.
//!
//! All output is formatted with fixed precision so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::verify::{overall, EquivalenceReport, Sample, REFINE_GROWTH};

pub fn to_jsonl(reports: &[EquivalenceReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.to_json());
        s.push('\n');
    }
    s
}

/// Parse a JSON-lines stream; blank lines are skipped, errors name the line.
pub fn read_jsonl(text: &str) -> Result<Vec<EquivalenceReport>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| EquivalenceReport::from_json(l).map_err(|e| Error::Param(format!("line {}: {e}", i + 1))))
        .collect()
}

/// Member id and u of a sample index of the form `id@u`; plain indices have no u.
pub fn split_index(index: &str) -> (&str, Option<f64>) {
    match index.rsplit_once('@') {
        Some((id, u)) => match u.parse::<f64>() {
            Ok(u) if u > 0.0 && u.is_finite() => (id, Some(u)),
            _ => (index, None),
        },
        None => (index, None),
    }
}

pub fn is_stable(r: &EquivalenceReport) -> bool {
    match r.refinement {
        Some((a, b)) => b.is_finite() && b <= REFINE_GROWTH * a.max(1.0),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemberRow {
    pub label: String,
    pub member_id: String,
    pub u_count: usize,
    /// lhs and rhs at the sample with the largest ratio
    pub lhs: f64,
    pub rhs: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub spread: f64,
    pub stable: bool,
}

pub fn member_rows(r: &EquivalenceReport) -> Vec<MemberRow> {
    let mut groups: BTreeMap<&str, (usize, Vec<&Sample>)> = BTreeMap::new();
    for s in &r.samples {
        let id = split_index(&s.index).0;
        let n = groups.len();
        groups.entry(id).or_insert((n, Vec::new())).1.push(s);
    }
    let mut groups: Vec<_> = groups.into_iter().collect();
    groups.sort_by_key(|(_, (order, _))| *order);
    let stable = is_stable(r);
    groups
        .into_iter()
        .map(|(id, (_, ss))| {
            let lo = ss.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
            let top = ss.iter().copied().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).unwrap();
            MemberRow {
                label: r.label.clone(),
                member_id: id.to_string(),
                u_count: ss.len(),
                lhs: top.lhs,
                rhs: top.rhs,
                ratio_min: lo,
                ratio_max: top.ratio,
                spread: if lo > 0.0 { top.ratio / lo } else { f64::INFINITY },
                stable,
            }
        })
        .collect()
}

/// CSV with one row per (report, member) and a closing `# verdict,` line.
pub fn member_csv(reports: &[EquivalenceReport]) -> String {
    let mut s = String::from("label,member_id,u_count,lhs,rhs,ratio_min,ratio_max,spread,stable,verdict\n");
    for r in reports {
        for m in member_rows(r) {
            let _ = writeln!(
                s,
                "{},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{},{}",
                csv_field(&m.label),
                csv_field(&m.member_id),
                m.u_count,
                m.lhs,
                m.rhs,
                m.ratio_min,
                m.ratio_max,
                m.spread,
                m.stable,
                r.verdict.name()
            );
        }
    }
    let _ = writeln!(s, "# verdict,{}", overall(reports).name());
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 160.0;
const MARGIN: f64 = 48.0;

/// One panel per report: log ratio against log u (or sample order), with the min/max band shaded.
pub fn ratio_svg(reports: &[EquivalenceReport]) -> String {
    let height = MARGIN + reports.len().max(1) as f64 * (PANEL_H + MARGIN);
    let width = PANEL_W + 2.0 * MARGIN;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"monospace\" font-size=\"11\">"
    );
    for (k, r) in reports.iter().enumerate() {
        let y0 = MARGIN + k as f64 * (PANEL_H + MARGIN);
        panel(&mut s, r, MARGIN, y0);
    }
    s.push_str("</svg>\n");
    s
}

fn panel(s: &mut String, r: &EquivalenceReport, x0: f64, y0: f64) {
    let pts: Vec<(f64, f64)> = r
        .samples
        .iter()
        .enumerate()
        .filter(|(_, p)| p.ratio > 0.0 && p.ratio.is_finite())
        .map(|(i, p)| (split_index(&p.index).1.map_or(i as f64, f64::log10), p.ratio.log10()))
        .collect();
    let _ = writeln!(
        s,
        "<text x=\"{x0:.1}\" y=\"{:.1}\">{} [{}] spread={:.4e}</text>",
        y0 - 6.0,
        xml_escape(&r.label),
        r.verdict.name(),
        r.spread
    );
    let _ = writeln!(
        s,
        "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{PANEL_W:.1}\" height=\"{PANEL_H:.1}\" fill=\"none\" stroke=\"#888\"/>"
    );
    if pts.is_empty() {
        return;
    }
    let (mut xl, mut xh) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        xl = xl.min(x);
        xh = xh.max(x);
        yl = yl.min(y);
        yh = yh.max(y);
    }
    if xh - xl < 1e-12 {
        xh = xl + 1.0;
    }
    let pad = ((yh - yl) * 0.1).max(0.05);
    let (yl, yh) = (yl - pad, yh + pad);
    let px = |x: f64| x0 + (x - xl) / (xh - xl) * PANEL_W;
    let py = |y: f64| y0 + PANEL_H - (y - yl) / (yh - yl) * PANEL_H;
    if r.ratio_min > 0.0 && r.ratio_max.is_finite() {
        let (a, b) = (py(r.ratio_max.log10()), py(r.ratio_min.log10()));
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.1}\" y=\"{a:.1}\" width=\"{PANEL_W:.1}\" height=\"{:.1}\" fill=\"#cde\" stroke=\"none\"/>",
            (b - a).max(0.5)
        );
    }
    s.push_str("<polyline fill=\"none\" stroke=\"#236\" stroke-width=\"1\" points=\"");
    for (i, &(x, y)) in pts.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.1},{:.1}", px(x), py(y));
    }
    s.push_str("\"/>\n");
    let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\">{:.3e}</text>", x0 + 4.0, py(yh) + 12.0, 10f64.powf(yh));
    let _ = writeln!(s, "<text x=\"{:.1}\" y=\"{:.1}\">{:.3e}</text>", x0 + 4.0, py(yl) - 4.0, 10f64.powf(yl));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::check_equivalence;

    fn rep() -> EquivalenceReport {
        let l: Vec<(String, f64)> = (0..6).map(|i| (format!("m{}@{:.3e}", i % 2, 10f64.powi(-i - 1)), 1.0 + i as f64)).collect();
        let r: Vec<(String, f64)> = l.iter().map(|(k, _)| (k.clone(), 1.0)).collect();
        check_equivalence("x", &l, &r, 10.0).unwrap()
    }

    #[test]
    fn jsonl_round_trip() {
        let a = vec![rep(), rep()];
        let b = read_jsonl(&to_jsonl(&a)).unwrap();
        assert_eq!(to_jsonl(&a), to_jsonl(&b));
        let e = read_jsonl("\n{oops}\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn members_grouped_in_order() {
        let rows = member_rows(&rep());
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].member_id, "m0");
        assert_eq!(rows[0].u_count, 3);
        assert_eq!(rows[0].ratio_max, 5.0);
        assert_eq!(rows[1].ratio_min, 2.0);
        let csv = member_csv(&[rep()]);
        assert!(csv.ends_with(&format!("# verdict,{}\n", rep().verdict.name())));
    }

    #[test]
    fn svg_is_deterministic() {
        let a = ratio_svg(&[rep()]);
        assert_eq!(a, ratio_svg(&[rep()]));
        assert!(a.starts_with("<svg") && a.contains("polyline"));
    }
}
