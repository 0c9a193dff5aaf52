//! Zipper-plot record selection: rank replicates by standardized bias or
//! p-value and keep the most extreme fraction.

use crate::error::{Error, Result};

use super::ReplicateRecord;

/// Sort key for zipper displays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZipperSort {
    /// `|estimate - truth| / se`, largest first; records with `se = 0` or
    /// undefined values sort last.
    StandardizedBias,
    /// Smallest p-value first; undefined p-values sort last.
    PValue,
}

/// A selected record with its 1-based rank in the full ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedRecord {
    pub rank: usize,
    pub record: ReplicateRecord,
}

/// Order `records` by the sort key and return the top `ceil(fraction * n)`
/// with rank metadata. Ties and undefined keys break by replicate index and
/// model so the ordering is total and deterministic.
pub fn zipper_select(
    records: &[ReplicateRecord],
    truth: f64,
    sort_key: ZipperSort,
    fraction: f64,
) -> Result<Vec<RankedRecord>> {
    if records.is_empty() {
        return Err(Error::InvalidData("zipper selection needs records".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    // key: smaller sorts first; None (undefined) sorts last
    let key = |r: &ReplicateRecord| -> Option<f64> {
        match sort_key {
            ZipperSort::StandardizedBias => {
                let sb = (r.estimate - truth).abs() / r.se;
                if sb.is_finite() && r.se > 0.0 {
                    Some(-sb)
                } else {
                    None
                }
            }
            ZipperSort::PValue => {
                if r.p_value.is_finite() {
                    Some(r.p_value)
                } else {
                    None
                }
            }
        }
    };
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(&records[a]), key(&records[b]));
        match (ka, kb) {
            (Some(x), Some(y)) => x
                .total_cmp(&y)
                .then_with(|| records[a].replicate.cmp(&records[b].replicate))
                .then_with(|| (records[a].model.as_str()).cmp(records[b].model.as_str())),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => records[a]
                .replicate
                .cmp(&records[b].replicate)
                .then_with(|| (records[a].model.as_str()).cmp(records[b].model.as_str())),
        }
    });
    let keep = (fraction * records.len() as f64).ceil() as usize;
    Ok(order
        .into_iter()
        .take(keep.max(1))
        .enumerate()
        .map(|(i, idx)| RankedRecord {
            rank: i + 1,
            record: records[idx],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ModelKind;

    fn rec(replicate: usize, estimate: f64, se: f64, p: f64) -> ReplicateRecord {
        ReplicateRecord {
            replicate,
            model: ModelKind::TTest,
            estimate,
            se,
            p_value: p,
            ci_low: estimate - 2.0 * se,
            ci_high: estimate + 2.0 * se,
            converged: true,
            favors_active: estimate > 0.0,
        }
    }

    #[test]
    fn quarter_of_ten_thousand_is_2500() {
        let records: Vec<ReplicateRecord> = (0..10_000)
            .map(|i| rec(i, i as f64 * 1e-4, 1.0, 0.5))
            .collect();
        let sel = zipper_select(&records, 0.0, ZipperSort::StandardizedBias, 0.25).unwrap();
        assert_eq!(sel.len(), 2500);
        assert_eq!(sel[0].rank, 1);
        // largest |estimate|/se first
        assert_eq!(sel[0].record.replicate, 9999);
    }

    #[test]
    fn full_fraction_returns_everything_ordered() {
        let records = vec![rec(0, 1.0, 1.0, 0.2), rec(1, -3.0, 1.0, 0.01)];
        let sel = zipper_select(&records, 0.0, ZipperSort::PValue, 1.0).unwrap();
        assert_eq!(sel.len(), 2);
        assert_eq!(sel[0].record.replicate, 1);
        assert_eq!(sel[1].record.replicate, 0);
    }

    #[test]
    fn smallest_p_first() {
        let records = vec![rec(0, 1.0, 1.0, 0.01), rec(1, 1.0, 1.0, 0.2)];
        let sel = zipper_select(&records, 0.0, ZipperSort::PValue, 0.5).unwrap();
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].record.p_value, 0.01);
    }

    #[test]
    fn zero_se_sorts_last_under_standardized_bias() {
        let records = vec![rec(0, 5.0, 0.0, 0.5), rec(1, 0.5, 1.0, 0.5)];
        let sel = zipper_select(&records, 0.0, ZipperSort::StandardizedBias, 1.0).unwrap();
        assert_eq!(sel[0].record.replicate, 1);
        assert_eq!(sel[1].record.replicate, 0);
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(zipper_select(&[], 0.0, ZipperSort::PValue, 0.5).is_err());
        let records = vec![rec(0, 1.0, 1.0, 0.2)];
        assert!(zipper_select(&records, 0.0, ZipperSort::PValue, 0.0).is_err());
        assert!(zipper_select(&records, 0.0, ZipperSort::PValue, 1.5).is_err());
    }
}
