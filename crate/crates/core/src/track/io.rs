use std::io::{Read, Write};
use std::path::Path as FsPath;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Track;

const COLUMNS: [&str; 4] = ["x_m", "y_m", "w_tr_left_m", "w_tr_right_m"];

/// Loads a track CSV with header `x_m,y_m,w_tr_left_m,w_tr_right_m`.
///
/// Columns are matched by name, and a leading `#` on the header line is
/// tolerated, so files from the common race-track database load unchanged.
pub fn load_track<T: Scalar>(path: impl AsRef<FsPath>) -> Result<Track<T>> {
    let file = std::fs::File::open(path)?;
    read_track(file)
}

pub fn read_track<T: Scalar, R: Read>(reader: R) -> Result<Track<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim_start_matches('#').trim().to_string())
        .collect();
    let mut idx = [0usize; 4];
    for (k, name) in COLUMNS.iter().enumerate() {
        idx[k] = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse { line: 1, msg: format!("missing column `{name}`") })?;
    }

    let mut points = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |k: usize| -> Result<f64> {
            let raw = rec.get(idx[k]).ok_or_else(|| Error::Parse {
                line,
                msg: format!("missing field `{}` in row `{}`", COLUMNS[k], join(&rec)),
            })?;
            raw.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid number `{raw}` for `{}` in row `{}`", COLUMNS[k], join(&rec)),
            })
        };
        let (x, y, wl, wr) = (field(0)?, field(1)?, field(2)?, field(3)?);
        points.push([T::lit(x), T::lit(y)]);
        left.push(T::lit(wl));
        right.push(T::lit(wr));
    }
    Track::new(points, left, right)
}

fn join(rec: &csv::StringRecord) -> String {
    rec.iter().collect::<Vec<_>>().join(",")
}

/// Writes a track in the same CSV layout [`load_track`] reads.
pub fn dump_track<T: Scalar>(track: &Track<T>, path: impl AsRef<FsPath>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", COLUMNS.join(","))?;
    for i in 0..track.len() {
        let p = track.centerline.points[i];
        writeln!(
            f,
            "{},{},{},{}",
            p[0].to_f64_lossy(),
            p[1].to_f64_lossy(),
            track.half_width_left[i].to_f64_lossy(),
            track.half_width_right[i].to_f64_lossy()
        )?;
    }
    f.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_csv(extra: &str) -> String {
        let mut s = String::from("x_m,y_m,w_tr_left_m,w_tr_right_m\n");
        s.push_str("0,0,0.1,0.1\n1,0,0.1,0.1\n1,1,0.1,0.1\n0,1,0.1,0.1\n");
        for k in 0..6 {
            // pad along the last edge so the file has >= 10 rows
            s.push_str(&format!("0,{},0.1,0.1\n", 1.0 - (k + 1) as f64 / 7.0));
        }
        s.push_str(extra);
        s
    }

    #[test]
    fn square_perimeter_from_csv() {
        let t: Track<f64> = read_track(square_csv("").as_bytes()).unwrap();
        assert!((t.length() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bad_row_names_line() {
        let err = read_track::<f64, _>(square_csv("a,b,0.1,0.1\n").as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 12);
                assert!(msg.contains("a,b,0.1,0.1"), "{msg}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn four_points_is_degenerate() {
        let csv = "x_m,y_m,w_tr_left_m,w_tr_right_m\n0,0,0.1,0.1\n1,0,0.1,0.1\n1,1,0.1,0.1\n0,1,0.1,0.1\n";
        assert!(matches!(read_track::<f64, _>(csv.as_bytes()), Err(Error::DegenerateTrack(_))));
    }

    #[test]
    fn hash_header_and_swapped_columns() {
        let body = square_csv("").replacen(
            "x_m,y_m,w_tr_left_m,w_tr_right_m",
            "# x_m,y_m,w_tr_right_m,w_tr_left_m",
            1,
        );
        let t: Track<f64> = read_track(body.as_bytes()).unwrap();
        assert_eq!(t.len(), 10);
    }

    #[test]
    fn non_positive_width_rejected() {
        let body = square_csv("").replacen("1,1,0.1,0.1", "1,1,0.0,0.1", 1);
        assert!(matches!(read_track::<f64, _>(body.as_bytes()), Err(Error::Validation(_))));
    }
}
