//! Retained-draw traces and their binary container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes  "BAETRACE"
//! version    u32      1
//! hdr_len    u32      byte length of the JSON header
//! header     hdr_len  UTF-8 JSON (TraceHeader)
//! records    n_retained x { sweep: u64, omega upper triangle: p(p+1)/2 x f64 }
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::prior::PriorSpec;
use crate::rng::RNG_ALGORITHM;
use crate::sampler::ChainConfig;

pub const TRACE_MAGIC: &[u8; 8] = b"BAETRACE";
pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub p: usize,
    pub n: usize,
    pub prior: PriorSpec,
    pub seed: u64,
    pub stream: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub n_retained: usize,
    pub rng_algorithm: String,
    pub tool_version: String,
    /// Caller-supplied configuration echoed into the file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_config: Option<serde_json::Value>,
}

impl TraceHeader {
    pub fn new(p: usize, n: usize, config: &ChainConfig) -> Self {
        Self {
            p,
            n,
            prior: config.prior,
            seed: config.seed,
            stream: config.stream,
            burn_in: config.burn_in,
            thinning: config.thinning,
            n_retained: 0,
            rng_algorithm: RNG_ALGORITHM.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            run_config: None,
        }
    }

    pub fn width(&self) -> usize {
        self.p * (self.p + 1) / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub header: TraceHeader,
    sweeps: Vec<u64>,
    values: Vec<f64>,
}

impl ChainTrace {
    pub fn with_capacity(header: TraceHeader, draws: usize) -> Self {
        let width = header.width();
        Self {
            header,
            sweeps: Vec::with_capacity(draws),
            values: Vec::with_capacity(draws * width),
        }
    }

    /// Builds a trace from raw upper-triangle rows.
    pub fn from_rows(mut header: TraceHeader, sweeps: Vec<u64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != sweeps.len() * header.width() {
            return Err(Error::Format(format!(
                "{} values for {} records of width {}",
                values.len(),
                sweeps.len(),
                header.width()
            )));
        }
        header.n_retained = sweeps.len();
        Ok(Self {
            header,
            sweeps,
            values,
        })
    }

    pub fn push(&mut self, sweep: u64, omega: &SymmetricMatrix) {
        debug_assert_eq!(omega.dim(), self.header.p);
        self.sweeps.push(sweep);
        self.values.extend(omega.upper_triangle());
        self.header.n_retained = self.sweeps.len();
    }

    pub fn len(&self) -> usize {
        self.sweeps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sweeps.is_empty()
    }

    pub fn sweep_indices(&self) -> &[u64] {
        &self.sweeps
    }

    /// Upper-triangle values of draw `t`.
    pub fn row(&self, t: usize) -> &[f64] {
        let w = self.header.width();
        &self.values[t * w..(t + 1) * w]
    }

    pub fn omega(&self, t: usize) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_upper_triangle(self.header.p, self.row(t))
    }

    /// Time series of upper-triangle element `e` across draws.
    pub fn element_series(&self, e: usize) -> Vec<f64> {
        let w = self.header.width();
        self.values.iter().skip(e).step_by(w).copied().collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&self.header)
            .map_err(|e| Error::Format(format!("header encode: {e}")))?;
        w.write_all(TRACE_MAGIC)?;
        w.write_all(&TRACE_VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u32).to_le_bytes())?;
        w.write_all(&header)?;
        let width = self.header.width();
        let mut buf = Vec::with_capacity(8 * (1 + width));
        for t in 0..self.len() {
            buf.clear();
            buf.extend_from_slice(&self.sweeps[t].to_le_bytes());
            for v in self.row(t) {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic, "magic")?;
        if &magic != TRACE_MAGIC {
            return Err(Error::Format("not a trace file (bad magic)".into()));
        }
        let version = read_u32(&mut r, "version")?;
        if version != TRACE_VERSION {
            return Err(Error::Format(format!("unsupported trace version {version}")));
        }
        let len = read_u32(&mut r, "header length")? as usize;
        let mut hdr = vec![0u8; len];
        read_exact(&mut r, &mut hdr, "header")?;
        let header: TraceHeader = serde_json::from_slice(&hdr)
            .map_err(|e| Error::Format(format!("header decode: {e}")))?;
        if header.p == 0 {
            return Err(Error::Format("header declares p = 0".into()));
        }
        let width = header.width();
        let mut sweeps = Vec::with_capacity(header.n_retained);
        let mut values = Vec::with_capacity(header.n_retained * width);
        let mut rec = vec![0u8; 8 * (1 + width)];
        for t in 0..header.n_retained {
            read_exact(&mut r, &mut rec, &format!("record {t}"))?;
            let mut chunks = rec.chunks_exact(8).map(|c| <[u8; 8]>::try_from(c).unwrap());
            sweeps.push(u64::from_le_bytes(chunks.next().unwrap()));
            values.extend(chunks.map(f64::from_le_bytes));
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Format(format!(
                "trailing bytes after {} declared records",
                header.n_retained
            )));
        }
        Ok(Self {
            header,
            sweeps,
            values,
        })
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated trace while reading {what}")),
        _ => Error::Io(e.to_string()),
    })
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}
