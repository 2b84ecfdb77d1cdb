//! Versioned little-endian binary encoding of a finalized [`Sketch`].
//!
//! Header: magic, version, n, k, eps, delta2, m_hint, degree_cap,
//! edge_budget, seed, p_star, element_count, edge_count. Then one record per
//! retained element in hash order: element id, hash, degree, set ids.

use std::io::{Read, Write};

use super::{RetainedElement, Sketch, SketchParams};
use crate::error::{Error, Result};
use crate::hash::unit_interval;
use crate::instance::ElementId;

pub const SKETCH_MAGIC: [u8; 8] = *b"CVSKETCH";
pub const SKETCH_VERSION: u32 = 1;

pub fn write_sketch<W: Write>(sk: &Sketch, mut out: W) -> Result<()> {
    let p = sk.params();
    out.write_all(&SKETCH_MAGIC)?;
    out.write_all(&SKETCH_VERSION.to_le_bytes())?;
    out.write_all(&(p.n as u32).to_le_bytes())?;
    out.write_all(&(p.k as u64).to_le_bytes())?;
    out.write_all(&p.eps.to_le_bytes())?;
    out.write_all(&p.delta2.to_le_bytes())?;
    out.write_all(&p.m_hint.to_le_bytes())?;
    out.write_all(&p.degree_cap.to_le_bytes())?;
    out.write_all(&p.edge_budget.to_le_bytes())?;
    out.write_all(&sk.seed().to_le_bytes())?;
    out.write_all(&sk.p_star().to_le_bytes())?;
    out.write_all(&(sk.retained().len() as u64).to_le_bytes())?;
    out.write_all(&sk.total_edges().to_le_bytes())?;
    for r in sk.retained() {
        out.write_all(&r.element.0.to_le_bytes())?;
        out.write_all(&r.hash.to_le_bytes())?;
        out.write_all(&(r.sets.len() as u32).to_le_bytes())?;
        for s in &r.sets {
            out.write_all(&s.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Format("truncated sketch".into()),
            _ => e.into(),
        })?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

pub fn read_sketch<R: Read>(input: R) -> Result<Sketch> {
    let mut c = Cursor { inner: input };
    if c.bytes::<8>()? != SKETCH_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = c.u32()?;
    if version != SKETCH_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = c.u32()? as usize;
    let k = c.u64()? as usize;
    let eps = c.f64()?;
    let delta2 = c.f64()?;
    let m_hint = c.u64()?;
    let degree_cap = c.u64()?;
    let edge_budget = c.u64()?;
    let seed = c.u64()?;
    let p_star = c.f64()?;
    let element_count = c.u64()?;
    let edge_count = c.u64()?;
    let params = SketchParams::new(n, k, eps, delta2, Some(m_hint))?
        .with_limits(degree_cap, edge_budget)?;

    let bad = |msg: &str| Error::Format(msg.to_string());
    let mut retained: Vec<RetainedElement> = Vec::new();
    let mut edges = 0u64;
    for _ in 0..element_count {
        let element = ElementId(c.u32()?);
        let hash = c.u64()?;
        let degree = c.u32()?;
        if degree as u64 > degree_cap {
            return Err(bad("element degree exceeds cap"));
        }
        let mut sets = Vec::with_capacity(degree as usize);
        for _ in 0..degree {
            let s = c.u32()?;
            if s as usize >= n {
                return Err(bad("set id out of range"));
            }
            if sets.last().is_some_and(|&prev| prev >= s) {
                return Err(bad("set ids not strictly ascending"));
            }
            sets.push(s);
        }
        if retained
            .last()
            .is_some_and(|prev| (prev.hash, prev.element) >= (hash, element))
        {
            return Err(bad("elements not in hash order"));
        }
        edges += degree as u64;
        retained.push(RetainedElement {
            element,
            hash,
            sets,
        });
    }
    if edges != edge_count {
        return Err(bad("edge count mismatch"));
    }
    let expected_p = match retained.last() {
        Some(last) if p_star != 1.0 => unit_interval(last.hash),
        _ => 1.0,
    };
    if p_star != expected_p {
        return Err(bad("p_star does not match the largest retained hash"));
    }
    Ok(Sketch::assemble(params, seed, retained, p_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_random;
    use crate::sketch::build_h_leq_n_offline;

    #[test]
    fn roundtrip_is_bit_exact() {
        let inst = gen_random(7, 300, 0.3, 5).unwrap();
        let params = SketchParams::new(7, 2, 0.2, 1.0, Some(300))
            .unwrap()
            .with_limits(3, 120)
            .unwrap();
        let sk = build_h_leq_n_offline(&inst, params, 12);
        let mut bytes = Vec::new();
        write_sketch(&sk, &mut bytes).unwrap();
        let back = read_sketch(&bytes[..]).unwrap();
        assert_eq!(back, sk);
        let mut again = Vec::new();
        write_sketch(&back, &mut again).unwrap();
        assert_eq!(again, bytes);
    }

    #[test]
    fn rejects_corruption() {
        let inst = gen_random(3, 20, 0.5, 1).unwrap();
        let params = SketchParams::new(3, 1, 0.2, 1.0, None).unwrap();
        let sk = build_h_leq_n_offline(&inst, params, 0);
        let mut bytes = Vec::new();
        write_sketch(&sk, &mut bytes).unwrap();
        assert!(read_sketch(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_sketch(&bad[..]), Err(Error::Format(_))));
    }
}
