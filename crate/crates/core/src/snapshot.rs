//! Binary snapshot format, little-endian on every host.
//!
//! ```text
//! "CHEV1"  version:u32  nx:u32  ny:u32  Lx:f64  Ly:f64  t:f64
//! phi[nx*ny]:f64            row-major (x index outer)
//! A[nx*ny]:(re:f64, im:f64) row-major
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{ChevronError, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid2D;
use crate::state::SimState;

pub const MAGIC: &[u8; 5] = b"CHEV1";
pub const VERSION: u32 = 1;

pub fn write<W: Write>(mut w: W, s: &SimState) -> Result<()> {
    let g = s.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in [g.nx(), g.ny()] {
        let n = u32::try_from(n).map_err(|_| ChevronError::Format(format!("grid dimension {n} exceeds u32")))?;
        w.write_all(&n.to_le_bytes())?;
    }
    for v in [g.lx(), g.ly(), s.t] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in s.phi.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    for z in s.a.values() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R, what: &str) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => ChevronError::Format(format!("snapshot truncated while reading {what}")),
        _ => ChevronError::Io(e),
    })?;
    Ok(b)
}

fn take_f64<R: Read>(r: &mut R, what: &str) -> Result<f64> {
    Ok(f64::from_le_bytes(take::<8, _>(r, what)?))
}

pub fn read<R: Read>(mut r: R) -> Result<SimState> {
    let magic = take::<5, _>(&mut r, "magic")?;
    if &magic != MAGIC {
        return Err(ChevronError::Format(format!("bad magic {magic:?}, expected \"CHEV1\"")));
    }
    let version = u32::from_le_bytes(take::<4, _>(&mut r, "version")?);
    if version != VERSION {
        return Err(ChevronError::Format(format!("unsupported snapshot version {version} (reader knows {VERSION})")));
    }
    let nx = u32::from_le_bytes(take::<4, _>(&mut r, "nx")?) as usize;
    let ny = u32::from_le_bytes(take::<4, _>(&mut r, "ny")?) as usize;
    let lx = take_f64(&mut r, "Lx")?;
    let ly = take_f64(&mut r, "Ly")?;
    let t = take_f64(&mut r, "t")?;
    let grid = Grid2D::new(nx, ny, lx, ly).map_err(|e| ChevronError::Format(format!("snapshot header: {e}")))?;

    let mut phi = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        phi.push(take_f64(&mut r, "phi")?);
    }
    let mut a = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = take_f64(&mut r, "A")?;
        a.push(Complex64::new(re, take_f64(&mut r, "A")?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(ChevronError::Format("trailing bytes after snapshot body".into()));
    }
    SimState::new(ComplexField::from_values(grid, a)?, RealField::from_values(grid, phi)?, t)
}

pub fn write_file(path: &Path, s: &SimState) -> Result<()> {
    write(BufWriter::new(File::create(path)?), s)
}

pub fn read_file(path: &Path) -> Result<SimState> {
    let f = File::open(path)
        .map_err(|e| ChevronError::Format(format!("cannot open snapshot {}: {e}", path.display())))?;
    read(BufReader::new(f)).map_err(|e| match e {
        ChevronError::Format(m) => ChevronError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}
