//! Zipper figure: per-replicate estimates with confidence intervals, ranked
//! by standardized bias or p-value, one panel per model. Intervals whose
//! two-sided p falls under 0.05 draw in red; intervals that miss the truth
//! without a significant p draw in a lighter red, making p-versus-coverage
//! disagreements visible. Dashed lines mark the truth (vertical) and the 5%
//! rank (horizontal).

use propsim_core::harness::{zipper_select, ModelKind, RankedRecord, ReplicateRecord, ZipperSort};

use super::{tick_label, Scale, SvgDoc, COLOR_MISS, COLOR_NEUTRAL, COLOR_REJECT};
use crate::CliError;

const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 52.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 64.0;
const GAP: f64 = 30.0;

/// Render the zipper figure from (already filtered) replicate records.
pub fn render(
    records: &[ReplicateRecord],
    truth: f64,
    sort: ZipperSort,
    fraction: f64,
) -> Result<String, CliError> {
    if records.is_empty() {
        return Err(CliError::Config("no records to plot".into()));
    }
    // panels in fixed model order, restricted to models present
    let mut models: Vec<ModelKind> = Vec::new();
    for m in [
        ModelKind::TTest,
        ModelKind::PropNls,
        ModelKind::Slope,
        ModelKind::PropMixed,
    ] {
        if records.iter().any(|r| r.model == m) {
            models.push(m);
        }
    }

    let width =
        MARGIN_L + models.len() as f64 * PANEL_W + (models.len() - 1) as f64 * GAP + MARGIN_R;
    let height = MARGIN_T + PANEL_H + MARGIN_B;
    let mut doc = SvgDoc::new(width, height);

    for (k, model) in models.iter().enumerate() {
        let subset: Vec<ReplicateRecord> = records
            .iter()
            .filter(|r| r.model == *model)
            .copied()
            .collect();
        let selected = zipper_select(&subset, truth, sort, fraction)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let x0 = MARGIN_L + k as f64 * (PANEL_W + GAP);
        let y0 = MARGIN_T;
        doc.rect_outline(x0, y0, PANEL_W, PANEL_H);
        doc.text(x0 + PANEL_W / 2.0, y0 - 8.0, 13.0, "middle", model.as_str());

        // deterministic x range: central interval quantiles plus the truth
        let mut xs: Vec<f64> = Vec::new();
        for r in &selected {
            for v in [r.record.estimate, r.record.ci_low, r.record.ci_high] {
                if v.is_finite() {
                    xs.push(v);
                }
            }
        }
        if xs.is_empty() {
            xs.push(truth);
        }
        xs.sort_by(f64::total_cmp);
        let q = |p: f64| xs[(p * (xs.len() - 1) as f64).round() as usize];
        let (mut lo, mut hi) = (q(0.02).min(truth), q(0.98).max(truth));
        if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        let pad = 0.04 * (hi - lo);
        let sx = Scale {
            d0: lo - pad,
            d1: hi + pad,
            p0: x0 + 6.0,
            p1: x0 + PANEL_W - 6.0,
        };
        let sy = Scale {
            d0: 1.0,
            d1: selected.len().max(2) as f64,
            p0: y0 + 10.0,
            p1: y0 + PANEL_H - 10.0,
        };

        // truth line
        doc.dashed_line(sx.map(truth), y0, sx.map(truth), y0 + PANEL_H, "#555555");
        // 5% rank line over the model's full record count
        let rank_5pct = 0.05 * subset.len() as f64;
        if rank_5pct >= 1.0 && rank_5pct <= selected.len() as f64 {
            let py = sy.map(rank_5pct);
            doc.dashed_line(x0, py, x0 + PANEL_W, py, "#888888");
        }

        let clip = |v: f64| v.clamp(sx.d0, sx.d1);
        for RankedRecord { rank, record } in &selected {
            let py = sy.map(*rank as f64);
            let covers = record.ci_low <= truth && truth <= record.ci_high;
            let color = if record.converged && record.p_value < 0.05 {
                COLOR_REJECT
            } else if record.converged && !covers {
                COLOR_MISS
            } else {
                COLOR_NEUTRAL
            };
            if record.ci_low.is_finite() && record.ci_high.is_finite() {
                doc.line(
                    sx.map(clip(record.ci_low)),
                    py,
                    sx.map(clip(record.ci_high)),
                    py,
                    color,
                    0.8,
                );
            }
            if record.estimate.is_finite() {
                doc.circle(sx.map(clip(record.estimate)), py, 1.6, color);
            }
        }

        // x ticks: five evenly spaced data values
        for i in 0..5 {
            let v = sx.d0 + (sx.d1 - sx.d0) * i as f64 / 4.0;
            let px = sx.map(v);
            doc.line(px, y0 + PANEL_H, px, y0 + PANEL_H + 4.0, "#333333", 1.0);
            doc.text(px, y0 + PANEL_H + 16.0, 10.0, "middle", &tick_label(v));
        }
    }

    let sort_name = match sort {
        ZipperSort::StandardizedBias => "standardized bias",
        ZipperSort::PValue => "p-value",
    };
    doc.text(
        width / 2.0,
        height - 30.0,
        12.0,
        "middle",
        &format!(
            "estimate with 95% CI, top {}% by {sort_name}; dashed vertical line at truth",
            tick_label(fraction * 100.0)
        ),
    );
    doc.text(
        width / 2.0,
        height - 14.0,
        12.0,
        "middle",
        "red: p < 0.05; light red: interval misses the truth without p < 0.05",
    );
    Ok(doc.finish())
}
