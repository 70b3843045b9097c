//! Binary operator container. A 16-byte header holds the magic `CQOP`, the
//! `u32` dimension `N` and eight reserved zero bytes; `N*N` complex128
//! entries follow in row-major order. All fields are little-endian.

use std::io::{Read, Write};

use faer::{c64, Mat};

use super::ScalarOp;
use crate::error::{Error, Result};

pub const CQOP_MAGIC: &[u8; 4] = b"CQOP";

pub fn write_operator<W: Write>(op: &ScalarOp, mut out: W) -> Result<()> {
    let n = op.n();
    let n32 = u32::try_from(n).map_err(|_| Error::InvalidArgument("operator too large".into()))?;
    out.write_all(CQOP_MAGIC)?;
    out.write_all(&n32.to_le_bytes())?;
    out.write_all(&[0u8; 8])?;
    let mut row = Vec::with_capacity(16 * n);
    for i in 0..n {
        row.clear();
        for j in 0..n {
            let v = op.entry(i, j);
            row.extend_from_slice(&v.re.to_le_bytes());
            row.extend_from_slice(&v.im.to_le_bytes());
        }
        out.write_all(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_operator<R: Read>(mut input: R) -> Result<Mat<c64>> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[..4] != CQOP_MAGIC {
        return Err(Error::InvalidArgument("not a CQOP operator file".into()));
    }
    let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let mut bytes = vec![0u8; 16 * n * n];
    input.read_exact(&mut bytes)?;
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().unwrap());
    Ok(Mat::<c64>::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        c64::new(f(k), f(k + 1))
    }))
}
