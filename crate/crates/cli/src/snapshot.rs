//! Binary snapshot files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "MNPL"
//!      4     4  format version (u32, currently 1)
//!      8     4  N (u32)
//!     12     4  N_t (u32, 0 for spatial fields)
//!     16     8  L (f64)
//!     24     8  T (f64): time stamp for spatial fields, period for space-time
//!     32     4  tag: kind (0 abelian, 1 su, 2 scalar), matrix size,
//!               representation (0 physical, 1 fourier), reserved 0
//!     36     4  component count (u32)
//!     40     -  payload: (re, im) f64 pairs, component-major, row-major
//! ```
//!
//! Each component holds `N^2` values (`N_t N^2` for space-time fields). The
//! payload length must match the header exactly.

use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use monopole_core::algebra::{Algebra, AlgebraKind};
use monopole_core::monopole::MonopoleState;
use monopole_core::nullform::{SpaceTimeField, SpaceTimeGrid};
use monopole_core::spectral::{Field, GridSpec, LieField, Repr, ScalarField};

pub const MAGIC: [u8; 4] = *b"MNPL";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

#[derive(Debug, Error, PartialEq)]
pub enum SnapshotError {
    #[error("not a snapshot file (bad magic)")]
    BadMagic,
    #[error("unsupported snapshot version {found} (this build reads version {VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("truncated snapshot: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("snapshot has {extra} bytes beyond the declared payload")]
    TrailingBytes { extra: usize },
    #[error("invalid snapshot header: {0}")]
    InvalidHeader(String),
    #[error("snapshot i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Abelian,
    Su,
    Scalar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u32,
    pub nt: u32,
    pub length: f64,
    pub time: f64,
    pub kind: FieldKind,
    pub matrix_size: u8,
    pub repr: Repr,
    pub components: Vec<Vec<Complex64>>,
}

impl Snapshot {
    fn points(&self) -> usize {
        let spatial = self.n as usize * self.n as usize;
        if self.nt == 0 {
            spatial
        } else {
            spatial * self.nt as usize
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * self.points() * self.components.len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.nt.to_le_bytes());
        out.extend_from_slice(&self.length.to_le_bytes());
        out.extend_from_slice(&self.time.to_le_bytes());
        let kind = match self.kind {
            FieldKind::Abelian => 0u8,
            FieldKind::Su => 1,
            FieldKind::Scalar => 2,
        };
        let repr = match self.repr {
            Repr::Physical => 0u8,
            Repr::Fourier => 1,
        };
        out.extend_from_slice(&[kind, self.matrix_size, repr, 0]);
        out.extend_from_slice(&(self.components.len() as u32).to_le_bytes());
        for c in &self.components {
            for z in c {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, SnapshotError> {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(SnapshotError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(SnapshotError::Truncated { expected: HEADER_LEN, found: bytes.len() });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(4);
        if version != VERSION {
            return Err(SnapshotError::UnsupportedVersion { found: version });
        }
        let n = u32_at(8);
        let nt = u32_at(12);
        let length = f64_at(16);
        let time = f64_at(24);
        let kind = match bytes[32] {
            0 => FieldKind::Abelian,
            1 => FieldKind::Su,
            2 => FieldKind::Scalar,
            k => return Err(SnapshotError::InvalidHeader(format!("unknown field kind {k}"))),
        };
        let matrix_size = bytes[33];
        let repr = match bytes[34] {
            0 => Repr::Physical,
            1 => Repr::Fourier,
            r => return Err(SnapshotError::InvalidHeader(format!("unknown representation {r}"))),
        };
        if bytes[35] != 0 {
            return Err(SnapshotError::InvalidHeader("reserved tag byte is not zero".into()));
        }
        if n == 0 {
            return Err(SnapshotError::InvalidHeader("N must be positive".into()));
        }
        let count = u32_at(36) as usize;
        let mut snap = Snapshot { n, nt, length, time, kind, matrix_size, repr, components: Vec::new() };
        let expected = (snap.points() as u128) * 16 * count as u128 + HEADER_LEN as u128;
        if expected > usize::MAX as u128 || (bytes.len() as u128) < expected {
            return Err(SnapshotError::Truncated {
                expected: expected.min(usize::MAX as u128) as usize,
                found: bytes.len(),
            });
        }
        let expected = expected as usize;
        if bytes.len() > expected {
            return Err(SnapshotError::TrailingBytes { extra: bytes.len() - expected });
        }
        let points = snap.points();
        snap.components = bytes[HEADER_LEN..]
            .chunks_exact(16 * points)
            .take(count)
            .map(|chunk| {
                chunk
                    .chunks_exact(16)
                    .map(|p| {
                        Complex64::new(
                            f64::from_le_bytes(p[..8].try_into().expect("8 bytes")),
                            f64::from_le_bytes(p[8..].try_into().expect("8 bytes")),
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(snap)
    }

    pub fn write(&self, path: &Path) -> Result<(), SnapshotError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| SnapshotError::Io(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, SnapshotError> {
        let bytes = std::fs::read(path).map_err(|e| SnapshotError::Io(e.to_string()))?;
        Self::from_bytes(&bytes)
    }

    /// Components in the order `phi, A0, A1, A2`, matrix entries row-major
    /// within each field.
    pub fn from_monopole(state: &MonopoleState) -> Self {
        let grid = state.grid();
        let algebra = state.algebra();
        Snapshot {
            n: grid.n() as u32,
            nt: 0,
            length: grid.length(),
            time: state.t,
            kind: match algebra.kind {
                AlgebraKind::Abelian => FieldKind::Abelian,
                AlgebraKind::Su => FieldKind::Su,
            },
            matrix_size: algebra.dim as u8,
            repr: state.repr(),
            components: state.components().iter().map(|c| c.data().to_vec()).collect(),
        }
    }

    pub fn to_monopole(&self) -> Result<MonopoleState, SnapshotError> {
        let bad = |m: String| SnapshotError::InvalidHeader(m);
        if self.nt != 0 {
            return Err(bad("space-time snapshot where a spatial state was expected".into()));
        }
        let kind = match self.kind {
            FieldKind::Abelian => AlgebraKind::Abelian,
            FieldKind::Su => AlgebraKind::Su,
            FieldKind::Scalar => return Err(bad("scalar snapshot where a monopole state was expected".into())),
        };
        let algebra = Algebra::new(kind, self.matrix_size as usize).map_err(|e| bad(e.to_string()))?;
        let grid = GridSpec::new(self.n as usize, self.length).map_err(|e| bad(e.to_string()))?;
        let per_field = algebra.entries();
        if self.components.len() != 4 * per_field {
            return Err(bad(format!(
                "expected {} components for a monopole state, found {}",
                4 * per_field,
                self.components.len()
            )));
        }
        let mut fields = self.components.chunks(per_field).map(|chunk| {
            let entries = chunk
                .iter()
                .map(|data| ScalarField::from_data(grid, self.repr, data.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(e.to_string()))?;
            LieField::from_entries(algebra, entries).map_err(|e| bad(e.to_string()))
        });
        let mut next = || fields.next().expect("four fields");
        let (phi, a0, a1, a2) = (next()?, next()?, next()?, next()?);
        MonopoleState::new(phi, a0, a1, a2, self.time).map_err(|e| bad(e.to_string()))
    }

    pub fn from_space_time(field: &SpaceTimeField) -> Self {
        let g = field.grid();
        Snapshot {
            n: g.space.n() as u32,
            nt: g.nt() as u32,
            length: g.space.length(),
            time: g.period(),
            kind: FieldKind::Scalar,
            matrix_size: 1,
            repr: Repr::Fourier,
            components: vec![field.coeffs().to_vec()],
        }
    }

    pub fn to_space_time(&self) -> Result<SpaceTimeField, SnapshotError> {
        let bad = |m: String| SnapshotError::InvalidHeader(m);
        if self.nt == 0 || self.kind != FieldKind::Scalar || self.components.len() != 1 || self.repr != Repr::Fourier {
            return Err(bad("not a space-time coefficient snapshot".into()));
        }
        let space = GridSpec::new(self.n as usize, self.length).map_err(|e| bad(e.to_string()))?;
        let grid = SpaceTimeGrid::new(self.nt as usize, self.time, space).map_err(|e| bad(e.to_string()))?;
        SpaceTimeField::from_coeffs(grid, self.components[0].clone()).map_err(|e| bad(e.to_string()))
    }
}
