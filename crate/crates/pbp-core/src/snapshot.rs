//! Snapshot format, all integers little-endian:
//!
//! ```text
//! magic "PBP1" | u8 d | d x u64 origin (two's complement) | d x u64 extents
//! | f64 p | f64 q | u64 seed | u64 payload length | packed states
//! ```
//!
//! Packed states are two bits per site in window index order (first
//! coordinate fastest), little-endian within each byte, i.e. site index k
//! lives at bits `2 (k mod 4)` of byte `k / 4`.

use std::io::{Read, Write};

use crate::config::{Configuration, Meta};
use crate::error::{Error, Result};
use crate::state::SiteState;
use crate::window::BoxWindow;

pub const MAGIC: [u8; 4] = *b"PBP1";

/// Sanity cap on dimension while reading untrusted headers.
const MAX_DIM: u8 = 16;
/// Sanity cap on payload while reading untrusted headers (1 GiB of states).
const MAX_PAYLOAD: u64 = 1 << 30;

pub fn write_snapshot<W: Write>(cfg: &Configuration, mut out: W) -> Result<()> {
    let window = cfg.window();
    let meta = cfg.meta();
    out.write_all(&MAGIC)?;
    out.write_all(&[window.dim() as u8])?;
    for &o in window.origin() {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for &e in window.extents() {
        out.write_all(&e.to_le_bytes())?;
    }
    out.write_all(&meta.p.to_le_bytes())?;
    out.write_all(&meta.q.to_le_bytes())?;
    out.write_all(&meta.seed.to_le_bytes())?;
    let payload = cfg.raw_bits();
    out.write_all(&(payload.len() as u64).to_le_bytes())?;
    out.write_all(payload)?;
    Ok(())
}

fn read_exact_or(
    r: &mut impl Read,
    buf: &mut [u8],
    what: &'static str,
    got_so_far: u64,
) -> Result<u64> {
    let mut filled = 0usize;
    while filled < buf.len() {
        let n = r.read(&mut buf[filled..])?;
        if n == 0 {
            return Err(Error::Truncated {
                what,
                expected: buf.len() as u64,
                actual: got_so_far + filled as u64,
            });
        }
        filled += n;
    }
    Ok(filled as u64)
}

fn read_u64(r: &mut impl Read, what: &'static str) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact_or(r, &mut b, what, 0)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Configuration> {
    let mut magic = [0u8; 4];
    read_exact_or(&mut input, &mut magic, "magic", 0)?;
    if magic != MAGIC {
        if magic[..3] == MAGIC[..3] {
            return Err(Error::VersionMismatch { found: magic[3] });
        }
        return Err(Error::BadMagic { found: magic });
    }
    let mut d = [0u8; 1];
    read_exact_or(&mut input, &mut d, "dimension", 0)?;
    let d = d[0];
    if d == 0 || d > MAX_DIM {
        return Err(Error::HeaderCorrupt(format!(
            "dimension {d} outside 1..={MAX_DIM}"
        )));
    }
    let mut origin = Vec::with_capacity(d as usize);
    for _ in 0..d {
        origin.push(read_u64(&mut input, "origin")? as i64);
    }
    let mut extents = Vec::with_capacity(d as usize);
    for _ in 0..d {
        extents.push(read_u64(&mut input, "extents")?);
    }
    let p = f64::from_le_bytes(read_u64(&mut input, "p")?.to_le_bytes());
    let q = f64::from_le_bytes(read_u64(&mut input, "q")?.to_le_bytes());
    let seed = read_u64(&mut input, "seed")?;
    let payload_len = read_u64(&mut input, "payload length")?;
    if payload_len > MAX_PAYLOAD {
        return Err(Error::SizeGuard {
            what: "snapshot payload bytes",
            actual: payload_len,
            limit: MAX_PAYLOAD,
        });
    }
    let window = BoxWindow::new(origin, extents)
        .map_err(|e| Error::HeaderCorrupt(format!("bad window: {e}")))?;
    let expected = window.volume().div_ceil(4) as u64;
    if payload_len != expected {
        return Err(Error::HeaderCorrupt(format!(
            "payload length {payload_len} does not match window volume {} (need {expected} bytes)",
            window.volume()
        )));
    }
    let mut bits = vec![0u8; payload_len as usize];
    read_exact_or(&mut input, &mut bits, "payload", 0)?;
    // reject reserved state bits, including slack bits in the last byte
    let volume = window.volume();
    for k in 0..volume {
        if SiteState::from_bits((bits[k >> 2] >> ((k & 3) * 2)) & 3).is_none() {
            return Err(Error::HeaderCorrupt(format!(
                "reserved state value at site index {k}"
            )));
        }
    }
    if volume % 4 != 0 {
        let last = bits[volume >> 2];
        if last >> ((volume % 4) * 2) != 0 {
            return Err(Error::HeaderCorrupt(
                "nonzero slack bits in final payload byte".into(),
            ));
        }
    }
    Ok(Configuration::from_raw(
        window,
        bits,
        Meta {
            p,
            q,
            seed,
            generation: 0,
        },
    ))
}

pub fn write_snapshot_file(cfg: &Configuration, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_snapshot(cfg, std::io::BufWriter::new(file))
}

pub fn read_snapshot_file(path: &std::path::Path) -> Result<Configuration> {
    let file = std::fs::File::open(path)?;
    read_snapshot(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::CouplingSource;

    fn sample16() -> Configuration {
        let w = BoxWindow::new(vec![-8, 3, -1], vec![16, 16, 16]).unwrap();
        Configuration::sample(w, 0.22, 0.11, CouplingSource::new(606)).unwrap()
    }

    #[test]
    fn roundtrip_identity() {
        let cfg = sample16();
        let mut buf = Vec::new();
        write_snapshot(&cfg, &mut buf).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, cfg);
        // and byte-stable on rewrite
        let mut buf2 = Vec::new();
        write_snapshot(&back, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn wrong_magic() {
        let err = read_snapshot(&b"XYZ1rest"[..]).unwrap_err();
        assert!(matches!(err, Error::BadMagic { .. }), "{err}");
    }

    #[test]
    fn version_mismatch() {
        let mut buf = Vec::new();
        write_snapshot(&sample16(), &mut buf).unwrap();
        buf[3] = b'2';
        let err = read_snapshot(buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::VersionMismatch { found: b'2' }), "{err}");
    }

    #[test]
    fn truncated_payload_reports_sizes() {
        let mut buf = Vec::new();
        write_snapshot(&sample16(), &mut buf).unwrap();
        let cut = buf.len() - 100;
        let err = read_snapshot(&buf[..cut]).unwrap_err();
        match err {
            Error::Truncated {
                what,
                expected,
                actual,
            } => {
                assert_eq!(what, "payload");
                assert_eq!(expected, 1024);
                assert_eq!(actual, 924);
            }
            other => panic!("expected truncation error, got {other}"),
        }
    }

    #[test]
    fn payload_length_must_match_volume() {
        let mut buf = Vec::new();
        write_snapshot(&sample16(), &mut buf).unwrap();
        // header payload-length field is the 8 bytes before the payload
        let pos = buf.len() - 1024 - 8;
        buf[pos..pos + 8].copy_from_slice(&1025u64.to_le_bytes());
        buf.push(0);
        let err = read_snapshot(buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::HeaderCorrupt(_)), "{err}");
    }

    #[test]
    fn reserved_states_rejected() {
        let mut buf = Vec::new();
        write_snapshot(&sample16(), &mut buf).unwrap();
        let payload_start = buf.len() - 1024;
        buf[payload_start] = 0xFF; // state value 3 in all four slots
        let err = read_snapshot(buf.as_slice()).unwrap_err();
        assert!(matches!(err, Error::HeaderCorrupt(_)), "{err}");
    }
}
