//! Binary checkpoint container, little-endian throughout:
//!
//! ```text
//! magic      8 bytes  "SPNCSNAP"
//! version    u32
//! n_atoms    u64
//! n_points   u64
//! half_width f64
//! time       f64
//! N + 1 records, k = 0..=N:
//!   ln|d_k| f64, arg d_k f64, A_k f64,
//!   φ_a as n_points (re f64, im f64) pairs, then φ_b likewise
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use super::state::{MultimodeState, NumberComponent};
use crate::field1d::{ComplexField, Grid1D};
use crate::logspace::LogComplex;
use crate::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"SPNCSNAP";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(state: &MultimodeState, mut w: W) -> Result<()> {
    let grid = state.grid();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(state.n_atoms() as u64).to_le_bytes())?;
    w.write_all(&(grid.n_points() as u64).to_le_bytes())?;
    w.write_all(&grid.half_width().to_le_bytes())?;
    w.write_all(&state.time().to_le_bytes())?;
    for (d, c) in state.coeffs().iter().zip(state.components()) {
        for v in [d.ln_mag, d.phase, c.action] {
            w.write_all(&v.to_le_bytes())?;
        }
        for f in [&c.phi_a, &c.phi_b] {
            for z in f.values() {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<MultimodeState> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n_atoms = read_u64(&mut r)? as usize;
    let n_points = read_u64(&mut r)? as usize;
    let half_width = read_f64(&mut r)?;
    let time = read_f64(&mut r)?;
    if n_atoms == 0 || n_atoms > 1 << 24 {
        return Err(Error::Format(format!("implausible atom number {n_atoms}")));
    }
    let grid = Grid1D::new(n_points, half_width).map_err(|e| Error::Format(e.to_string()))?;
    let mut coeffs = Vec::with_capacity(n_atoms + 1);
    let mut components = Vec::with_capacity(n_atoms + 1);
    for k in 0..=n_atoms {
        let ln_mag = read_f64(&mut r)?;
        let phase = read_f64(&mut r)?;
        let action = read_f64(&mut r)?;
        let mut fields = [Vec::with_capacity(n_points), Vec::with_capacity(n_points)];
        for f in fields.iter_mut() {
            for _ in 0..n_points {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                f.push(Complex64::new(re, im));
            }
        }
        let [a, b] = fields;
        coeffs.push(LogComplex::new(ln_mag, phase));
        components.push(NumberComponent {
            n_a: k,
            n_b: n_atoms - k,
            phi_a: ComplexField::new(a),
            phi_b: ComplexField::new(b),
            action,
        });
    }
    let state = MultimodeState::from_raw(n_atoms, grid, coeffs, components, time);
    if (state.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(Error::Format("coefficients not normalised".into()));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field1d::{solve_ground_state, SplitStepper};
    use crate::multimode::{init_state, step_all, InteractionParams};

    #[test]
    fn round_trip_is_exact() {
        let grid = Grid1D::new(64, 8.0).unwrap();
        let gs = solve_ground_state(0.2, 4, &grid, 1e-12).unwrap();
        let mut s = init_state(4, &gs, &grid).unwrap();
        let p = InteractionParams {
            g0: 0.2,
            lambda: 0.5,
            kappa: 0.1,
        };
        step_all(&mut s, &SplitStepper::new(&grid, 1e-3).unwrap(), &p, 50).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 8 + 8 + 8 + 8 + 5 * (24 + 2 * 64 * 16));
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.time(), s.time());
        assert_eq!(back.coeffs(), s.coeffs());
        assert_eq!(back.components(), s.components());
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(matches!(read_snapshot(&b"NOTASNAPxxxx"[..]), Err(Error::Format(_))));
        let mut buf = Vec::new();
        buf.extend_from_slice(SNAPSHOT_MAGIC);
        buf.extend_from_slice(&7u32.to_le_bytes());
        assert!(matches!(read_snapshot(buf.as_slice()), Err(Error::Format(_))));
        buf.truncate(8);
        buf.extend_from_slice(&1u32.to_le_bytes());
        assert!(matches!(read_snapshot(buf.as_slice()), Err(Error::Io(_))));
    }
}
