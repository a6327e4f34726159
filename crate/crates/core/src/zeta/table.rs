use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::orbits::trace_power;
use crate::error::Result;
use crate::scalar::Real;

/// One trace tr K_{z,q}^l with its tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub l: usize,
    pub q: u32,
    pub z: Complex<T>,
    pub value: Complex<T>,
    pub tail: T,
}

/// Traces tr K_{z,q}^l for l = 1..=lmax and q in {0, 1} at a fixed truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceTable<T> {
    pub kmax: u64,
    pub entries: Vec<TraceEntry<T>>,
}

impl<T: Real> TraceTable<T> {
    pub fn build(z: Complex<T>, lmax: usize, kmax: u64) -> Result<Self> {
        let mut entries = Vec::with_capacity(2 * lmax);
        for l in 1..=lmax {
            for q in 0..=1 {
                let t = trace_power(l, z, q, kmax)?;
                entries.push(TraceEntry { l, q, z, value: t.value, tail: t.tail_bound });
            }
        }
        Ok(TraceTable { kmax, entries })
    }

    pub fn get(&self, l: usize, q: u32) -> Option<&TraceEntry<T>> {
        self.entries.iter().find(|e| e.l == l && e.q == q)
    }

    /// Columns l,q,z,value,tail with 17 significant digits; a complex cell is written a+bi.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,q,z,value,tail\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{}", e.l, e.q, cell(e.z), cell(e.value), sci(e.tail));
        }
        out
    }
}

pub(crate) fn sci<T: Real>(x: T) -> String {
    format!("{:.16e}", x)
}

fn cell<T: Real>(c: Complex<T>) -> String {
    if c.im == T::zero() {
        sci(c.re)
    } else if c.im < T::zero() {
        format!("{}-{}i", sci(c.re), sci(-c.im))
    } else {
        format!("{}+{}i", sci(c.re), sci(c.im))
    }
}
