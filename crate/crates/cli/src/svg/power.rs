//! Power-curve figure: one panel per control mean, rejection rate against
//! the group difference for both cross-sectional tests, with a dashed
//! reference line at the 5% level.

use propsim_core::harness::{CrossSummaryRow, ModelKind};

use super::{tick_label, Scale, SvgDoc, COLOR_LINEAR, COLOR_PROP};
use crate::CliError;

const PANEL_W: f64 = 300.0;
const PANEL_H: f64 = 240.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 52.0;
const GAP: f64 = 26.0;

/// Render the power figure from cross-experiment summary rows.
pub fn render(rows: &[CrossSummaryRow]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("summary has no rows to plot".into()));
    }
    // panels keyed by beta_c in first-appearance order
    let mut betas: Vec<f64> = Vec::new();
    for r in rows {
        if !betas.iter().any(|b| *b == r.beta_c) {
            betas.push(r.beta_c);
        }
    }
    let mut deltas: Vec<f64> = Vec::new();
    for r in rows {
        if !deltas.iter().any(|d| *d == r.delta) {
            deltas.push(r.delta);
        }
    }
    deltas.sort_by(f64::total_cmp);
    if deltas.len() < 2 {
        return Err(CliError::Config(
            "power plot needs a delta grid with at least 2 points".into(),
        ));
    }

    let cols = betas.len().min(2);
    let rows_n = betas.len().div_ceil(cols);
    let width = MARGIN_L + cols as f64 * PANEL_W + (cols - 1) as f64 * GAP + MARGIN_R;
    let height = MARGIN_T + rows_n as f64 * PANEL_H + (rows_n - 1) as f64 * GAP + MARGIN_B;
    let mut doc = SvgDoc::new(width, height);

    for (k, &beta) in betas.iter().enumerate() {
        let (ci, ri) = (k % cols, k / cols);
        let x0 = MARGIN_L + ci as f64 * (PANEL_W + GAP);
        let y0 = MARGIN_T + ri as f64 * (PANEL_H + GAP);
        let sx = Scale {
            d0: deltas[0],
            d1: *deltas.last().unwrap(),
            p0: x0 + 8.0,
            p1: x0 + PANEL_W - 8.0,
        };
        let sy = Scale {
            d0: 0.0,
            d1: 100.0,
            p0: y0 + PANEL_H,
            p1: y0,
        };
        doc.rect_outline(x0, y0, PANEL_W, PANEL_H);
        doc.text(
            x0 + PANEL_W / 2.0,
            y0 - 8.0,
            13.0,
            "middle",
            &format!("control mean = {}", tick_label(beta)),
        );
        // y ticks
        for yt in [0.0, 25.0, 50.0, 75.0, 100.0] {
            let py = sy.map(yt);
            doc.line(x0 - 4.0, py, x0, py, "#333333", 1.0);
            if ci == 0 {
                doc.text(x0 - 8.0, py + 4.0, 11.0, "end", &tick_label(yt));
            }
        }
        // x ticks at every grid delta
        for &d in &deltas {
            let px = sx.map(d);
            doc.line(px, y0 + PANEL_H, px, y0 + PANEL_H + 4.0, "#333333", 1.0);
            if ri == rows_n - 1 {
                doc.text(px, y0 + PANEL_H + 16.0, 10.0, "middle", &tick_label(d));
            }
        }
        // 5% reference
        doc.dashed_line(x0, sy.map(5.0), x0 + PANEL_W, sy.map(5.0), "#888888");
        // curves: proportional then t-test
        for (model, color) in [
            (ModelKind::PropNls, COLOR_PROP),
            (ModelKind::TTest, COLOR_LINEAR),
        ] {
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for &d in &deltas {
                if let Some(row) = rows
                    .iter()
                    .find(|r| r.beta_c == beta && r.delta == d && r.model == model)
                {
                    pts.push((sx.map(d), sy.map(row.rejection_pct)));
                }
            }
            doc.polyline(&pts, color, 1.8);
            for &(px, py) in &pts {
                doc.circle(px, py, 2.2, color);
            }
        }
    }

    // axis titles and legend
    doc.text(
        width / 2.0,
        height - 14.0,
        13.0,
        "middle",
        "group difference",
    );
    doc.text(14.0, MARGIN_T - 22.0, 13.0, "start", "rejection rate (%)");
    let lx = width - MARGIN_R - 190.0;
    let ly = height - 18.0;
    doc.line(lx, ly - 4.0, lx + 24.0, ly - 4.0, COLOR_PROP, 1.8);
    doc.text(lx + 30.0, ly, 12.0, "start", "proportional");
    doc.line(
        lx + 118.0,
        ly - 4.0,
        lx + 142.0,
        ly - 4.0,
        COLOR_LINEAR,
        1.8,
    );
    doc.text(lx + 148.0, ly, 12.0, "start", "t-test");
    Ok(doc.finish())
}
