use std::io::Write;

use super::{CurvePoint, RepRecord, SweepCell};

/// `rep_index,value,leaf_cost,sim_calls`
pub fn write_records_csv<W: Write>(w: W, records: &[RepRecord]) -> csv::Result<()> {
    write_rows(w, records)
}

/// `estimator,budget,mse,mean_cost`
pub fn write_curve_csv<W: Write>(w: W, points: &[CurvePoint]) -> csv::Result<()> {
    write_rows(w, points)
}

/// `r0,r1,mean,sd,wn_sd,unvalidated`
pub fn write_sweep_csv<W: Write>(w: W, cells: &[SweepCell]) -> csv::Result<()> {
    write_rows(w, cells)
}

fn write_rows<W: Write, T: serde::Serialize>(w: W, rows: &[T]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_csv_columns() {
        let mut buf = Vec::new();
        let recs = [
            RepRecord {
                rep_index: 0,
                value: 0.5,
                leaf_cost: 3,
                sim_calls: 7,
            },
            RepRecord {
                rep_index: 1,
                value: -1.25,
                leaf_cost: 1,
                sim_calls: 3,
            },
        ];
        write_records_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "rep_index,value,leaf_cost,sim_calls\n0,0.5,3,7\n1,-1.25,1,3\n"
        );
        let back: Vec<RepRecord> = csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(back, recs);
    }

    #[test]
    fn sweep_csv_columns() {
        let mut buf = Vec::new();
        let cells = [SweepCell {
            r0: 0.6,
            r1: 0.55,
            mean: 0.6,
            sd: 1.0,
            wn_sd: 2.0,
            unvalidated: false,
        }];
        write_sweep_csv(&mut buf, &cells).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("r0,r1,mean,sd,wn_sd,unvalidated\n"));
    }
}
