use std::path::Path;

use crate::error::{Error, Result};
use crate::spread::{WindSample, WindSeries};

enum Form {
    Vector,
    Bearing,
}

/// Reads `time_s,wx_mps,wy_mps` or `time_s,speed_mps,dir_deg`.
///
/// `dir_deg` is the direction the wind blows toward, counter-clockwise from
/// +x.
pub fn load_wind_csv(path: &Path) -> Result<WindSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let form = match cols.as_slice() {
        ["time_s", "wx_mps", "wy_mps"] => Form::Vector,
        ["time_s", "speed_mps", "dir_deg"] => Form::Bearing,
        _ => {
            return Err(Error::format(
                path,
                format!(
                    "expected header `time_s,wx_mps,wy_mps` or `time_s,speed_mps,dir_deg`, got `{}`",
                    cols.join(",")
                ),
            ))
        }
    };
    let mut samples: Vec<WindSample> = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| Error::format(path, format!("row {row}: {e}")))?;
        if record.len() != 3 {
            return Err(Error::format(
                path,
                format!("row {row}: expected 3 columns, got {}", record.len()),
            ));
        }
        let mut v = [0.0; 3];
        for (c, field) in record.iter().enumerate() {
            v[c] = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    Error::format(path, format!("row {row}: `{field}` in column {} is not a finite number", cols[c]))
                })?;
        }
        let (wx, wy) = match form {
            Form::Vector => (v[1], v[2]),
            Form::Bearing => {
                let a = v[2].to_radians();
                (v[1] * a.cos(), v[1] * a.sin())
            }
        };
        if let Some(prev) = samples.last() {
            if v[0] <= prev.time {
                return Err(Error::format(
                    path,
                    format!("row {row}: time {} does not follow {}", v[0], prev.time),
                ));
            }
        }
        samples.push(WindSample { time: v[0], wx, wy });
    }
    WindSeries::new(samples).map_err(|e| Error::format(path, e.to_string()))
}

/// Writes the vector form.
pub fn write_wind_csv(series: &WindSeries, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["time_s", "wx_mps", "wy_mps"])
        .map_err(|e| csv_error(path, e))?;
    for s in series.samples() {
        w.write_record([s.time.to_string(), s.wx.to_string(), s.wy.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::format(path, e.to_string())
    }
}
