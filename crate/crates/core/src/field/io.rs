//! Field import/export: CSV with coordinate columns, and raw little-endian
//! f64 blocks behind a small header {dim, points, extent, components}.

use super::{FieldError, Grid, ScalarField, StateField};
use std::io::{BufRead, BufWriter, Read, Write};
use std::path::Path;

fn io_err<E: std::fmt::Display>(e: E) -> FieldError {
    FieldError::Io(e.to_string())
}

pub fn write_scalar_csv(f: &ScalarField, path: &Path) -> Result<(), FieldError> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let coords: &str = match f.grid.dim {
        1 => "x",
        _ => "x,y,z",
    };
    writeln!(w, "{coords},value").map_err(io_err)?;
    for i in 0..f.data.len() {
        let pos = f.grid.position(i);
        for axis in 0..f.grid.dim {
            write!(w, "{},", pos[axis]).map_err(io_err)?;
        }
        writeln!(w, "{}", f.data[i]).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_scalar_csv(grid: Grid, path: &Path) -> Result<ScalarField, FieldError> {
    let file = std::fs::File::open(path).map_err(io_err)?;
    let reader = std::io::BufReader::new(file);
    let mut data = Vec::with_capacity(grid.len());
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if n == 0 {
            continue;
        }
        let last = line
            .rsplit(',')
            .next()
            .ok_or_else(|| FieldError::Io(format!("malformed row {n}")))?;
        data.push(last.trim().parse::<f64>().map_err(io_err)?);
    }
    if data.len() != grid.len() {
        return Err(FieldError::Io(format!(
            "expected {} rows, found {}",
            grid.len(),
            data.len()
        )));
    }
    Ok(ScalarField { grid, data })
}

pub fn write_state_csv(f: &StateField, path: &Path) -> Result<(), FieldError> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    let coords: &str = match f.grid.dim {
        1 => "x",
        _ => "x,y,z",
    };
    writeln!(w, "{coords},S,P,U1,U2,U3,phi,psi0,psi1,psi2,psi3").map_err(io_err)?;
    for i in 0..f.data.len() {
        let pos = f.grid.position(i);
        for axis in 0..f.grid.dim {
            write!(w, "{},", pos[axis]).map_err(io_err)?;
        }
        let row: Vec<String> = f.data[i].iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_state_csv(grid: Grid, path: &Path) -> Result<StateField, FieldError> {
    let file = std::fs::File::open(path).map_err(io_err)?;
    let reader = std::io::BufReader::new(file);
    let mut data = Vec::with_capacity(grid.len());
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if n == 0 {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != grid.dim + 10 {
            return Err(FieldError::Io(format!("malformed row {n}")));
        }
        let mut row = [0.0; 10];
        for c in 0..10 {
            row[c] = cells[grid.dim + c].trim().parse::<f64>().map_err(io_err)?;
        }
        data.push(row);
    }
    if data.len() != grid.len() {
        return Err(FieldError::Io(format!(
            "expected {} rows, found {}",
            grid.len(),
            data.len()
        )));
    }
    Ok(StateField { grid, data })
}

/// Header: dim u32, points u32, components u32, extent f64, all little
/// endian, followed by components × len f64 values in point-major order.
pub fn write_state_raw(f: &StateField, path: &Path) -> Result<(), FieldError> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(&(f.grid.dim as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(f.grid.points as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&10u32.to_le_bytes()).map_err(io_err)?;
    w.write_all(&f.grid.extent.to_le_bytes()).map_err(io_err)?;
    for row in &f.data {
        for x in row {
            w.write_all(&x.to_le_bytes()).map_err(io_err)?;
        }
    }
    Ok(())
}

pub fn read_state_raw(path: &Path) -> Result<StateField, FieldError> {
    let mut file = std::fs::File::open(path).map_err(io_err)?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(io_err)?;
    if buf.len() < 20 {
        return Err(FieldError::Io("truncated header".into()));
    }
    let u32_at = |off: usize| u32::from_le_bytes(buf[off..off + 4].try_into().unwrap()) as usize;
    let dim = u32_at(0);
    let points = u32_at(4);
    let components = u32_at(8);
    let extent = f64::from_le_bytes(buf[12..20].try_into().unwrap());
    if components != 10 {
        return Err(FieldError::Io(format!("expected 10 components, got {components}")));
    }
    let grid = Grid::new(dim, points, extent)?;
    let need = 20 + grid.len() * 10 * 8;
    if buf.len() != need {
        return Err(FieldError::Io(format!(
            "expected {need} bytes, found {}",
            buf.len()
        )));
    }
    let mut data = vec![[0.0; 10]; grid.len()];
    let mut off = 20;
    for row in data.iter_mut() {
        for x in row.iter_mut() {
            *x = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
            off += 8;
        }
    }
    Ok(StateField { grid, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;
    use proptest::prelude::*;

    #[test]
    fn raw_roundtrip_canonical() {
        let grid = Grid::new_1d(16, 2.0).unwrap();
        let f = StateField::from_fn(grid, |x| {
            StateVector([x[0], 1.0, 0.5, 0.0, 0.0, -0.3, 0.0, 0.1, 0.0, 0.0])
        });
        let dir = std::env::temp_dir().join("enkappa-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.bin");
        write_state_raw(&f, &path).unwrap();
        let back = read_state_raw(&path).unwrap();
        assert_eq!(back, f);
        let csv = dir.join("state.csv");
        write_state_csv(&f, &csv).unwrap();
        let back = read_state_csv(grid, &csv).unwrap();
        assert_eq!(back, f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn csv_roundtrip_preserves_values(values in proptest::collection::vec(-1e3f64..1e3, 16)) {
            let grid = Grid::new_1d(16, 1.0).unwrap();
            let f = ScalarField { grid, data: values };
            let dir = std::env::temp_dir().join("enkappa-io-prop");
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join(format!("scalar-{}.csv", std::process::id()));
            write_scalar_csv(&f, &path).unwrap();
            let back = read_scalar_csv(grid, &path).unwrap();
            prop_assert_eq!(back.data, f.data);
        }
    }
}
