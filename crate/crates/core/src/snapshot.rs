//! Binary field snapshots.
//!
//! Layout (all integers and floats little-endian):
//!
//! | offset | size | content                                   |
//! |-------:|-----:|-------------------------------------------|
//! | 0      | 4    | magic `b"KSF1"`                           |
//! | 4      | 4    | `n`, cells per axis, `u32`                |
//! | 8      | 8    | half width `L`, `f64`                     |
//! | 16     | 8    | time `t`, `f64`                           |
//! | 24     | 4    | number of component planes `c`, `u32`     |
//! | 28     | 4    | reserved, zero                            |
//! | 32     | 8·c·n² | planes, each `n²` `f64` values           |
//!
//! A plane stores cell `(i, j)` at position `j·n + i`, so `x` varies fastest. A fluid
//! state is written as the three planes `ρ, m₁, m₂`; a deposited density as one plane.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField, VectorField};
use crate::state::FluidState;

pub const MAGIC: [u8; 4] = *b"KSF1";
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub grid: GridSpec,
    pub t: f64,
    pub planes: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_state(state: &FluidState) -> Self {
        Self {
            grid: *state.grid(),
            t: state.t,
            planes: vec![state.rho.values().to_vec(), state.m.x().to_vec(), state.m.y().to_vec()],
        }
    }

    pub fn from_scalar(field: &ScalarField, t: f64) -> Self {
        Self { grid: *field.grid(), t, planes: vec![field.values().to_vec()] }
    }

    pub fn into_state(self) -> Result<FluidState> {
        let [rho, mx, my]: [Vec<f64>; 3] = self
            .planes
            .try_into()
            .map_err(|p: Vec<Vec<f64>>| Error::Format(format!("a fluid state needs 3 planes, found {}", p.len())))?;
        FluidState::new(
            ScalarField::from_vec(self.grid, rho)?,
            VectorField::from_components(self.grid, mx, my)?,
            self.t,
        )
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        let len = self.grid.len();
        if let Some(p) = self.planes.iter().find(|p| p.len() != len) {
            return Err(Error::GridMismatch(format!("plane of {} values on a grid of {len} cells", p.len())));
        }
        let n = u32::try_from(self.grid.n()).map_err(|_| Error::Format("grid too large".into()))?;
        let mut header = [0u8; HEADER_LEN];
        header[0..4].copy_from_slice(&MAGIC);
        header[4..8].copy_from_slice(&n.to_le_bytes());
        header[8..16].copy_from_slice(&self.grid.half_width().to_le_bytes());
        header[16..24].copy_from_slice(&self.t.to_le_bytes());
        header[24..28].copy_from_slice(&(self.planes.len() as u32).to_le_bytes());
        out.write_all(&header)?;
        let mut buf = Vec::with_capacity(8 * len);
        for plane in &self.planes {
            buf.clear();
            for v in plane {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read(mut input: impl Read) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN];
        input
            .read_exact(&mut header)
            .map_err(|e| Error::Format(format!("truncated snapshot header: {e}")))?;
        if header[0..4] != MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", &header[0..4])));
        }
        let u32_at = |k: usize| u32::from_le_bytes(header[k..k + 4].try_into().unwrap());
        let f64_at = |k: usize| f64::from_le_bytes(header[k..k + 8].try_into().unwrap());
        if u32_at(28) != 0 {
            return Err(Error::Format("reserved header bytes are not zero".into()));
        }
        let grid = GridSpec::new(f64_at(8), u32_at(4) as usize)?;
        let t = f64_at(16);
        let count = u32_at(24) as usize;
        let mut bytes = vec![0u8; 8 * grid.len()];
        let mut planes = Vec::with_capacity(count);
        for k in 0..count {
            input
                .read_exact(&mut bytes)
                .map_err(|e| Error::Format(format!("truncated plane {k}: {e}")))?;
            planes.push(bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect());
        }
        Ok(Self { grid, t, planes })
    }
}
