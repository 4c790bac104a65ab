//! energy.csv reading and writing. Values use `{:.16e}` (17 significant
//! digits), which round-trips every finite `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::energy::EnergyRecord;
use crate::error::{ChevronError, Result};

/// Writes one row per record and flushes it, so a run that fails midway
/// leaves every row observed so far on disk.
pub struct EnergyCsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl EnergyCsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", EnergyRecord::CSV_HEADER.join(","))?;
        out.flush()?;
        Ok(Self { path: path.to_path_buf(), out })
    }

    pub fn write(&mut self, r: &EnergyRecord) -> Result<()> {
        let row: Vec<String> = r.to_row().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(self.out, "{}", row.join(","))?;
        self.out.flush()?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Parses an energy log. Errors name the offending line (1-based, header = 1).
pub fn read_energy_csv(path: &Path) -> Result<Vec<EnergyRecord>> {
    let file = File::open(path).map_err(|e| ChevronError::Format(format!("{}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let where_ = |line: u64| format!("{}:{line}", path.display());
    let header = rdr.headers().map_err(|e| ChevronError::Format(format!("{}: {e}", where_(1))))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(ChevronError::Format(format!("{}: empty file, expected a header line", where_(1))));
    }
    let names: Vec<&str> = header.iter().collect();
    if names != EnergyRecord::CSV_HEADER {
        return Err(ChevronError::Format(format!(
            "{}: header {:?} does not match {:?}",
            where_(1),
            names,
            EnergyRecord::CSV_HEADER
        )));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ChevronError::Format(format!("{}: {e}", where_(line)))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 8 {
            return Err(ChevronError::Format(format!("{}: expected 8 fields, got {}", where_(line), rec.len())));
        }
        let mut row = [0.0; 8];
        for (k, field) in rec.iter().enumerate() {
            row[k] = field.parse().map_err(|_| {
                ChevronError::Format(format!("{}: column {} is not a number: '{field}'", where_(line), EnergyRecord::CSV_HEADER[k]))
            })?;
        }
        out.push(EnergyRecord::from_row(row));
    }
    if out.is_empty() {
        return Err(ChevronError::Format(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64) -> EnergyRecord {
        EnergyRecord::from_row([t, 0.1 / 3.0, 1e-300, 2.0, 3.0, 4.0, std::f64::consts::PI, f64::NAN])
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("energy.csv");
        let mut w = EnergyCsvWriter::create(&path).unwrap();
        for t in [0.0, 0.1, 0.2] {
            w.write(&rec(t)).unwrap();
        }
        w.finish().unwrap();
        let back = read_energy_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, t) in back.iter().zip([0.0, 0.1, 0.2]) {
            let e = rec(t);
            for (x, y) in a.to_row().iter().zip(e.to_row()) {
                assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn malformed_input_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "").unwrap();
        assert!(read_energy_csv(&path).is_err());

        std::fs::write(&path, format!("{}\n", EnergyRecord::CSV_HEADER.join(","))).unwrap();
        assert!(read_energy_csv(&path).unwrap_err().to_string().contains("no data rows"));

        let good = "0,1,2,3,4,5,6,7";
        std::fs::write(&path, format!("{}\n{good}\n{good}\n0,1,x,3,4,5,6,7\n", EnergyRecord::CSV_HEADER.join(","))).unwrap();
        let e = read_energy_csv(&path).unwrap_err().to_string();
        assert!(e.contains("bad.csv:4") && e.contains("normPhi_sq"), "{e}");

        std::fs::write(&path, format!("{}\n{good}\n1,2\n", EnergyRecord::CSV_HEADER.join(","))).unwrap();
        assert!(read_energy_csv(&path).unwrap_err().to_string().contains("bad.csv:3"));

        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_energy_csv(&path).unwrap_err().to_string().contains("header"));
    }
}
