//! CSV export of norm tracks and decay-fit tables.

use crate::fits::DecayFit;
use crate::solve::LinearSeries;
use std::io::Write;

/// One row per sample time: `t`, then the six stored norms for every
/// populated column, labeled `<norm>_k<k>`. Numbers are written in Rust's
/// shortest round-trip form.
pub fn write_series_csv<W: Write>(out: W, series: &LinearSeries) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(out);
    let ks = series.populated_ks();
    let names = ["theta", "wj", "dy_theta", "dy_wj", "dy2_theta", "dy2_wj"];
    let mut header = vec!["t".to_string()];
    for &k in &ks {
        for name in names {
            header.push(format!("{name}_k{k}"));
        }
    }
    wtr.write_record(&header)?;
    for (ti, &t) in series.times.iter().enumerate() {
        let n = &series.norms[ti];
        let mut row = vec![t.to_string()];
        for &k in &ks {
            let i = series.grid.index_of_k(k).expect("populated k is on the grid");
            for v in [
                n.theta[i],
                n.wj[i],
                n.dy_theta[i],
                n.dy_wj[i],
                n.dy2_theta[i],
                n.dy2_wj[i],
            ] {
                row.push(v.to_string());
            }
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// One row per decay fit; absent optional values are left empty.
pub fn write_fits_csv<W: Write>(out: W, fits: &[DecayFit]) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "k",
        "kind",
        "rate",
        "prefactor",
        "rate_floor",
        "bracket",
        "prefactor_over_bracket",
        "pass",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for f in fits {
        wtr.write_record([
            f.k.to_string(),
            f.kind.label(),
            opt(f.rate),
            opt(f.prefactor),
            f.rate_floor.to_string(),
            opt(f.bracket),
            opt(f.prefactor_over_bracket),
            f.pass.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fits::NormKind;
    use crate::solve::integrate_spectrum;
    use crate::state::localized_random_state;
    use spectral_core::{GridSpec, PhysParams};

    #[test]
    fn series_csv_has_one_row_per_sample_and_column_block_per_k() {
        let grid = GridSpec::new(6, 32, 16.0 * std::f64::consts::PI, true).unwrap();
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let st = localized_random_state(grid, params, &[1], 6, 7);
        let series = integrate_spectrum(&st, 0.25, 1e-2).unwrap();

        let mut buf = Vec::new();
        write_series_csv(&mut buf, &series).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let header = rdr.headers().unwrap().clone();
        // populated columns are k = -1 and k = 1
        assert_eq!(header.len(), 1 + 2 * 6);
        assert_eq!(&header[0], "t");
        assert!(header.iter().any(|h| h == "theta_k-1"));
        assert!(header.iter().any(|h| h == "dy2_wj_k1"));
        let rows: Vec<_> = rdr.records().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows.len(), series.times.len());
        let t1: f64 = rows[1][0].parse().unwrap();
        assert_eq!(t1, series.times[1]);
    }

    #[test]
    fn fits_csv_round_trips_values_and_blanks() {
        let fits = vec![
            DecayFit {
                k: 2,
                kind: NormKind::Theta,
                rate: Some(0.75),
                prefactor: Some(1.25),
                rate_floor: 0.09921256574801249,
                bracket: Some(3.5),
                prefactor_over_bracket: Some(1.25 / 3.5),
                pass: true,
            },
            DecayFit {
                k: 0,
                kind: NormKind::DyWj(1),
                rate: None,
                prefactor: None,
                rate_floor: 0.0,
                bracket: Some(0.0),
                prefactor_over_bracket: None,
                pass: true,
            },
        ];
        let mut buf = Vec::new();
        write_fits_csv(&mut buf, &fits).unwrap();
        let mut rdr = csv::Reader::from_reader(buf.as_slice());
        let rows: Vec<_> = rdr.records().collect::<Result<_, _>>().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(&rows[0][1], "theta");
        assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.75);
        assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.09921256574801249);
        assert_eq!(&rows[1][1], "dy1_wj");
        assert_eq!(&rows[1][2], "");
        assert_eq!(&rows[1][7], "true");
    }
}
