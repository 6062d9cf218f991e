use std::io::{Read, Write};

use bitvec::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{Exec, BLOCK};
use crate::ffcore::{DenseFunction, FieldParams};

const BLOB_MAGIC: &[u8; 4] = b"PSET";

/// Subset of `F_p^n` as a bitset over point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    params: FieldParams,
    bits: BitVec<u64, Lsb0>,
    count: usize,
}

impl PointSet {
    pub fn empty(params: FieldParams) -> Self {
        let bits = bitvec![u64, Lsb0; 0; params.size()];
        Self {
            params,
            bits,
            count: 0,
        }
    }

    pub fn full(params: FieldParams) -> Self {
        let bits = bitvec![u64, Lsb0; 1; params.size()];
        let count = params.size();
        Self {
            params,
            bits,
            count,
        }
    }

    pub fn from_indices(params: FieldParams, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = bitvec![u64, Lsb0; 0; params.size()];
        for i in indices {
            if i >= params.size() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    limit: params.size(),
                });
            }
            bits.set(i, true);
        }
        Ok(Self::from_bits(params, bits))
    }

    fn from_bits(params: FieldParams, bits: BitVec<u64, Lsb0>) -> Self {
        let count = bits.count_ones();
        Self {
            params,
            bits,
            count,
        }
    }

    /// `{x : pred(x)}`, evaluated block-parallel. `pred` gets the point
    /// index and a scratch buffer holding its coordinates.
    pub fn from_predicate<F>(params: FieldParams, exec: &Exec, pred: F) -> Self
    where
        F: Fn(usize, &[u32]) -> bool + Sync + Send,
    {
        let size = params.size() as u64;
        let words = exec.map_blocks(size, BLOCK, |range| {
            let mut coords = vec![0u32; params.n()];
            let mut out = vec![0u64; (range.end - range.start).div_ceil(64) as usize];
            for i in range.clone() {
                params.digits_into(i as usize, &mut coords);
                if pred(i as usize, &coords) {
                    let k = (i - range.start) as usize;
                    out[k / 64] |= 1 << (k % 64);
                }
            }
            out
        });
        let mut bits: BitVec<u64, Lsb0> = BitVec::from_vec(words.concat());
        bits.truncate(params.size());
        Self::from_bits(params, bits)
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn contains(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Fraction `|S| / p^n`.
    pub fn density(&self) -> f64 {
        self.count as f64 / self.params.size() as f64
    }

    pub fn complement(&self) -> Self {
        Self::from_bits(self.params.clone(), !self.bits.clone())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self::from_bits(self.params.clone(), self.bits.clone() & other.bits.clone())
    }

    pub fn indicator(&self) -> DenseFunction {
        let table = self
            .bits
            .iter()
            .map(|b| Complex64::new(if *b { 1.0 } else { 0.0 }, 0.0))
            .collect();
        DenseFunction::bounded(self.params.clone(), table).expect("indicator is 1-bounded")
    }

    /// Sorted index list, one per line.
    pub fn to_index_list(&self) -> String {
        let mut s = String::new();
        for i in self.iter() {
            s.push_str(&i.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses whitespace-separated indices; `#` starts a comment.
    pub fn from_index_list(params: FieldParams, text: &str) -> Result<Self> {
        let mut idx = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                idx.push(
                    tok.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("index {tok:?}: {e}")))?,
                );
            }
        }
        Self::from_indices(params, idx)
    }

    /// Raw blob: `PSET`, then `p: u32`, `n: u32`, `count: u64` (little
    /// endian), then the bitset as little-endian u64 words.
    pub fn write_blob(&self, mut w: impl Write) -> Result<()> {
        w.write_all(BLOB_MAGIC)?;
        w.write_all(&self.params.p().to_le_bytes())?;
        w.write_all(&(self.params.n() as u32).to_le_bytes())?;
        w.write_all(&(self.count as u64).to_le_bytes())?;
        for word in self.bits.as_raw_slice() {
            w.write_all(&word.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_blob(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != BLOB_MAGIC {
            return Err(Error::Parse("bad point-set blob magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let p = u32::from_le_bytes(b4);
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4) as usize;
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let params = FieldParams::new(p, n)?;
        let nwords = params.size().div_ceil(64);
        let mut words = Vec::with_capacity(nwords);
        for _ in 0..nwords {
            r.read_exact(&mut b8)?;
            words.push(u64::from_le_bytes(b8));
        }
        let mut bits: BitVec<u64, Lsb0> = BitVec::from_vec(words);
        bits.truncate(params.size());
        let set = Self::from_bits(params, bits);
        if set.count != count {
            return Err(Error::Parse(format!(
                "blob header says {count} points, bitset has {}",
                set.count
            )));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_matches_indices_across_workers() {
        let fp = FieldParams::new(3, 9).unwrap();
        let pred = |i: usize, c: &[u32]| (c[0] + c[3] + i as u32) % 5 == 1;
        let one = PointSet::from_predicate(fp.clone(), &Exec::default(), pred);
        let many = PointSet::from_predicate(fp.clone(), &Exec::new(4, 1 << 31).unwrap(), pred);
        assert_eq!(one, many);
        let mut coords = vec![0; 9];
        let expected: Vec<usize> = (0..fp.size())
            .filter(|&i| {
                fp.digits_into(i, &mut coords);
                pred(i, &coords)
            })
            .collect();
        assert_eq!(one.iter().collect::<Vec<_>>(), expected);
        assert_eq!(one.len(), expected.len());
    }

    #[test]
    fn exports_round_trip() {
        let fp = FieldParams::new(5, 3).unwrap();
        let s = PointSet::from_indices(fp.clone(), [0, 7, 64, 124]).unwrap();
        assert_eq!(s.to_index_list(), "0\n7\n64\n124\n");
        assert_eq!(PointSet::from_index_list(fp.clone(), &s.to_index_list()).unwrap(), s);
        let mut blob = Vec::new();
        s.write_blob(&mut blob).unwrap();
        assert_eq!(blob.len(), 4 + 4 + 4 + 8 + 2 * 8);
        assert_eq!(PointSet::read_blob(blob.as_slice()).unwrap(), s);
        blob[0] = b'X';
        assert!(PointSet::read_blob(blob.as_slice()).is_err());
        assert!(PointSet::from_indices(fp, [125]).is_err());
    }

    #[test]
    fn set_algebra() {
        let fp = FieldParams::new(2, 3).unwrap();
        let s = PointSet::from_indices(fp.clone(), [1, 2, 3]).unwrap();
        let t = PointSet::from_indices(fp.clone(), [3, 4]).unwrap();
        assert_eq!(s.intersection(&t).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(s.complement().len(), 5);
        assert_eq!(PointSet::full(fp.clone()).len(), 8);
        assert!(PointSet::empty(fp).is_empty());
        assert_eq!(s.indicator().table()[2].re, 1.0);
    }
}
