//! SVG and CSV emitters for heat maps and radar charts.

use std::f64::consts::PI;
use std::fmt::Write as _;

fn esc(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// One heat-map row: trait key, display name, entropy, value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapRow {
    pub key: String,
    pub display_name: String,
    pub entropy: f64,
    pub values: Vec<Option<f64>>,
}

pub fn heatmap_csv(columns: &[String], rows: &[HeatmapRow]) -> String {
    let mut out = String::from("trait,entropy");
    for c in columns {
        write!(out, ",{}", crate::csv_field(c)).unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{},{:.6}", r.key, r.entropy).unwrap();
        for v in &r.values {
            match v {
                Some(x) => write!(out, ",{x:.6}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Linear grayscale: 0 is white, 1 is black.
fn gray(v: f64) -> String {
    let level = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
    format!("#{level:02x}{level:02x}{level:02x}")
}

fn svg_open(out: &mut String, width: u32, height: u32) {
    writeln!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">"
    )
    .unwrap();
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>").unwrap();
}

fn banner(out: &mut String, y: u32, text: &str) {
    writeln!(out, "<text class=\"provenance\" x=\"8\" y=\"{y}\" font-size=\"10\" fill=\"#555555\">{}</text>", esc(text)).unwrap();
}

/// Placeholder chart for empty inputs.
pub fn no_data_svg(title: &str, provenance: &str) -> String {
    let mut out = String::new();
    svg_open(&mut out, 480, 120);
    writeln!(out, "<text x=\"8\" y=\"20\" font-size=\"14\">{}</text>", esc(title)).unwrap();
    writeln!(out, "<text x=\"240\" y=\"65\" font-size=\"16\" text-anchor=\"middle\">no data</text>").unwrap();
    banner(&mut out, 110, provenance);
    out.push_str("</svg>\n");
    out
}

const CELL_W: u32 = 64;
const CELL_H: u32 = 20;
const LABEL_W: u32 = 170;
const TOP: u32 = 50;

/// Traits x clusters grid with a grayscale legend.
pub fn heatmap_svg(title: &str, columns: &[String], rows: &[HeatmapRow], provenance: &str) -> String {
    if rows.is_empty() || columns.is_empty() {
        return no_data_svg(title, provenance);
    }
    let width = (LABEL_W + CELL_W * columns.len() as u32 + 90).max(480);
    let grid_h = CELL_H * rows.len() as u32;
    let height = TOP + grid_h + 40;
    let mut out = String::new();
    svg_open(&mut out, width, height);
    writeln!(out, "<text x=\"8\" y=\"20\" font-size=\"14\">{}</text>", esc(title)).unwrap();
    for (j, c) in columns.iter().enumerate() {
        let x = LABEL_W + CELL_W * j as u32 + CELL_W / 2;
        writeln!(out, "<text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>", TOP - 6, esc(c)).unwrap();
    }
    for (i, r) in rows.iter().enumerate() {
        let y = TOP + CELL_H * i as u32;
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            LABEL_W - 6,
            y + 14,
            esc(&r.display_name)
        )
        .unwrap();
        for (j, v) in r.values.iter().enumerate() {
            let x = LABEL_W + CELL_W * j as u32;
            match v {
                Some(v) => {
                    let ink = if *v > 0.5 { "#ffffff" } else { "#000000" };
                    writeln!(
                        out,
                        "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL_W}\" height=\"{CELL_H}\" fill=\"{}\" stroke=\"#999999\"/><text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" fill=\"{ink}\">{:.1}%</text>",
                        gray(*v),
                        x + CELL_W / 2,
                        y + 14,
                        v * 100.0
                    )
                    .unwrap();
                }
                None => {
                    writeln!(out, "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL_W}\" height=\"{CELL_H}\" fill=\"none\" stroke=\"#999999\"/>").unwrap();
                }
            }
        }
    }
    // legend: 0% .. 100% in ten steps
    let lx = LABEL_W + CELL_W * columns.len() as u32 + 20;
    let step = grid_h.max(110) / 11;
    for s in 0..=10u32 {
        let v = 1.0 - s as f64 / 10.0;
        let y = TOP + step * s;
        writeln!(out, "<rect x=\"{lx}\" y=\"{y}\" width=\"16\" height=\"{step}\" fill=\"{}\"/>", gray(v)).unwrap();
        if s % 5 == 0 {
            writeln!(out, "<text x=\"{}\" y=\"{}\" font-size=\"9\">{:.0}%</text>", lx + 20, y + step / 2 + 3, v * 100.0).unwrap();
        }
    }
    banner(&mut out, height - 10, provenance);
    out.push_str("</svg>\n");
    out
}

pub fn radar_csv(axes: &[(String, f64)]) -> String {
    let mut out = String::from("trait,value\n");
    for (k, v) in axes {
        writeln!(out, "{k},{v:.6}").unwrap();
    }
    out
}

/// Polygon radar over `axes` (display name, value in `[0, 1]`).
pub fn radar_svg(title: &str, axes: &[(String, f64)], provenance: &str) -> String {
    if axes.len() < 3 {
        return no_data_svg(title, provenance);
    }
    let (w, h) = (520u32, 520u32);
    let (cx, cy, r) = (260.0, 270.0, 170.0);
    let n = axes.len();
    let point = |i: usize, scale: f64| {
        let a = -PI / 2.0 + 2.0 * PI * i as f64 / n as f64;
        (cx + r * scale * a.cos(), cy + r * scale * a.sin())
    };
    let mut out = String::new();
    svg_open(&mut out, w, h);
    writeln!(out, "<text x=\"8\" y=\"20\" font-size=\"14\">{}</text>", esc(title)).unwrap();
    for ring in [0.25, 0.5, 0.75, 1.0] {
        let pts: Vec<String> = (0..n)
            .map(|i| {
                let (x, y) = point(i, ring);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(out, "<polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\"/>", pts.join(" ")).unwrap();
    }
    for (i, (name, _)) in axes.iter().enumerate() {
        let (x, y) = point(i, 1.0);
        let (lx, ly) = point(i, 1.12);
        writeln!(out, "<line x1=\"{cx:.2}\" y1=\"{cy:.2}\" x2=\"{x:.2}\" y2=\"{y:.2}\" stroke=\"#cccccc\"/>").unwrap();
        writeln!(out, "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"10\" text-anchor=\"middle\">{}</text>", esc(name)).unwrap();
    }
    let pts: Vec<String> = axes
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            let (x, y) = point(i, v.clamp(0.0, 1.0));
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(
        out,
        "<polygon points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.35\" stroke=\"#1f77b4\" stroke-width=\"2\"/>",
        pts.join(" ")
    )
    .unwrap();
    banner(&mut out, h - 10, provenance);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn well_formed(svg: &str) -> bool {
        let mut r = quick_xml::Reader::from_str(svg);
        loop {
            match r.read_event() {
                Ok(quick_xml::events::Event::Eof) => return true,
                Ok(_) => {}
                Err(_) => return false,
            }
        }
    }

    #[test]
    fn grayscale_ends() {
        assert_eq!(gray(0.0), "#ffffff");
        assert_eq!(gray(1.0), "#000000");
        assert_eq!(gray(0.5), "#808080");
    }

    #[test]
    fn charts_are_well_formed() {
        let rows = vec![HeatmapRow {
            key: "trust".into(),
            display_name: "Trust & <co>".into(),
            entropy: 0.5,
            values: vec![Some(0.2), None],
        }];
        let cols = vec!["TC 0".to_string(), "TC 1".to_string()];
        let svg = heatmap_svg("t", &cols, &rows, "backend=lexicon");
        assert!(well_formed(&svg));
        assert!(svg.contains("backend=lexicon"));
        assert_eq!(heatmap_csv(&cols, &rows), "trait,entropy,TC 0,TC 1\ntrust,0.500000,0.200000,\n");
        let axes: Vec<(String, f64)> = (0..5).map(|i| (format!("a{i}"), i as f64 / 4.0)).collect();
        assert!(well_formed(&radar_svg("r", &axes, "p")));
        let empty = heatmap_svg("t", &cols, &[], "p");
        assert!(well_formed(&empty) && empty.contains("no data"));
    }
}
