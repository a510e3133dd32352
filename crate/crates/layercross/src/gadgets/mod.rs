//! Deterministic builders for the lower-bound constructions: the bit
//! gadgets and their complements, symbol gadgets, the string encoders on 4
//! and 5 layers, their canonical and restrictive drawings with pinned
//! crossing counts, and a Disjoint Factors solver.

mod build;
mod df;

use thiserror::Error;

pub use build::{
    build_eth5, build_gadget, build_nokern4, build_r, build_rhat, build_s, build_shat,
    restrictive_drawing, yes_drawing, Built, GadgetKind, Reduction,
};
pub use df::{df_brute_intervals, df_solve, DfError, DfInstance, Factor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("k must be at least 1, got {0}")]
    BadK(u64),
    #[error("p must be at least 2, got {0}")]
    BadP(u64),
    #[error("symbol index {0} out of range 1..={1}")]
    BadSymbol(usize, u64),
    #[error("factor witness invalid: {0}")]
    BadWitness(String),
}

/// Balanced binary encodings for a `k`-symbol alphabet: length
/// `2*ceil(log2 k) + 2`, equally many zeros and ones, first symbol 0, last
/// symbol 1. The frame makes every string distinct from every reversal.
pub fn encode_alphabet(k: u64) -> Result<Vec<String>, GadgetError> {
    if k == 0 {
        return Err(GadgetError::BadK(k));
    }
    let log = 64 - (k.max(1) - 1).leading_zeros() as usize; // ceil(log2 k)
    let core_len = 2 * log;
    let mut out = Vec::with_capacity(k as usize);
    // Lexicographic enumeration of balanced core strings.
    let mut core: Vec<u8> = vec![0; core_len];
    loop {
        if core.iter().filter(|&&b| b == 1).count() == log {
            let mut s = String::with_capacity(core_len + 2);
            s.push('0');
            for &b in &core {
                s.push(if b == 1 { '1' } else { '0' });
            }
            s.push('1');
            out.push(s);
            if out.len() == k as usize {
                return Ok(out);
            }
        }
        // Increment the binary core.
        let mut i = core_len;
        loop {
            if i == 0 {
                unreachable!("enough balanced strings exist for any k");
            }
            i -= 1;
            if core[i] == 0 {
                core[i] = 1;
                for b in &mut core[i + 1..] {
                    *b = 0;
                }
                break;
            }
        }
    }
}

/// Parameters driving the gadget constructions.
#[derive(Clone, Debug)]
pub struct GadgetParams {
    pub k: u64,
    /// Encoding half-length: the number of zeros (and ones) per symbol.
    pub ell: u64,
    /// Pendant-set size; crossing counts are independent of it.
    pub p: u64,
    pub encodings: Vec<String>,
}

impl GadgetParams {
    pub fn new(k: u64, p: Option<u64>) -> Result<Self, GadgetError> {
        if k == 0 {
            return Err(GadgetError::BadK(k));
        }
        let log = 64 - (k.max(1) - 1).leading_zeros() as u64;
        let ell = log + 1;
        let p = p.unwrap_or(40 * k * k * k);
        if p < 2 {
            return Err(GadgetError::BadP(p));
        }
        Ok(GadgetParams {
            k,
            ell,
            p,
            encodings: encode_alphabet(k)?,
        })
    }

    /// Bits of symbol `i` (1-based), zeros and ones as booleans.
    pub(crate) fn bits(&self, i: usize) -> Result<Vec<bool>, GadgetError> {
        let enc = self
            .encodings
            .get(i.checked_sub(1).ok_or(GadgetError::BadSymbol(i, self.k))?)
            .ok_or(GadgetError::BadSymbol(i, self.k))?;
        Ok(enc.chars().map(|c| c == '1').collect())
    }

    /// Exact crossing count of a restrictive symbol drawing.
    pub fn restrictive_count(&self) -> u64 {
        14 * self.ell - 2
    }

    /// Budget of the 4-layer reduction.
    pub fn nokern4_budget(&self) -> u64 {
        2 * self.k * self.restrictive_count()
            + self.k * (self.k - 1) / 2
            + self.k * (self.k - 1) * (12 * self.ell + 1)
    }

    /// Budget of the 5-layer reduction.
    pub fn eth5_budget(&self) -> u64 {
        2 * self.k * self.restrictive_count()
    }
}
