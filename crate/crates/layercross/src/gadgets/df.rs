//! Disjoint Factors: given a string over a `k`-symbol alphabet, find `k`
//! disjoint factors (substrings of length at least 2 whose first and last
//! symbols agree) with pairwise distinct first symbols.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfError {
    #[error("symbol {0} out of range for alphabet size {1}")]
    BadSymbol(usize, usize),
    #[error("string length {0} exceeds the solver limit {1}")]
    TooLong(usize, usize),
    #[error("alphabet size {0} exceeds the solver limit {1}")]
    TooWide(usize, usize),
}

pub const DF_MAX_LEN: usize = 4096;
pub const DF_MAX_K: usize = 20;

/// A factor occurrence: half-open index range into the string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub symbol: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfInstance {
    /// Symbols as indices `0..k`.
    pub symbols: Vec<usize>,
    pub k: usize,
}

impl DfInstance {
    pub fn new(symbols: Vec<usize>, k: usize) -> Result<Self, DfError> {
        for &s in &symbols {
            if s >= k {
                return Err(DfError::BadSymbol(s, k));
            }
        }
        Ok(DfInstance { symbols, k })
    }

    /// Parses a string; distinct characters map to symbols in order of
    /// first appearance, which must not exceed `k` kinds.
    pub fn parse(s: &str, k: usize) -> Result<Self, DfError> {
        let mut map = std::collections::BTreeMap::new();
        let mut symbols = Vec::with_capacity(s.len());
        for c in s.chars() {
            let next = map.len();
            let id = *map.entry(c).or_insert(next);
            symbols.push(id);
        }
        DfInstance::new(symbols, k)
    }

    pub fn witness_valid(&self, factors: &[Factor]) -> bool {
        if factors.len() != self.k {
            return false;
        }
        let mut symbols_seen = vec![false; self.k];
        let mut intervals: Vec<(usize, usize)> = Vec::new();
        for f in factors {
            if f.end <= f.start + 1 || f.end > self.symbols.len() {
                return false;
            }
            if self.symbols[f.start] != f.symbol || self.symbols[f.end - 1] != f.symbol {
                return false;
            }
            if symbols_seen[f.symbol] {
                return false;
            }
            symbols_seen[f.symbol] = true;
            intervals.push((f.start, f.end));
        }
        intervals.sort_unstable();
        intervals.windows(2).all(|w| w[0].1 <= w[1].0)
    }
}

/// Exact decision with a witness: dynamic programming over (position,
/// outstanding symbol set), `O(2^k * n^2)`.
pub fn df_solve(inst: &DfInstance) -> Result<Option<Vec<Factor>>, DfError> {
    let n = inst.symbols.len();
    if n > DF_MAX_LEN {
        return Err(DfError::TooLong(n, DF_MAX_LEN));
    }
    if inst.k > DF_MAX_K {
        return Err(DfError::TooWide(inst.k, DF_MAX_K));
    }
    let full: u32 = if inst.k == 32 {
        u32::MAX
    } else {
        (1u32 << inst.k) - 1
    };
    // solvable[pos][mask]: factors for `mask` fit disjointly in s[pos..].
    let width = full as usize + 1;
    let mut solvable = vec![false; (n + 1) * width];
    let idx = |pos: usize, mask: u32| pos * width + mask as usize;
    for pos in (0..=n).rev() {
        for mask in 0..=full {
            let v = if mask == 0 {
                true
            } else if pos >= n {
                false
            } else {
                let mut ok = solvable[idx(pos + 1, mask)];
                let c = inst.symbols[pos];
                if !ok && (mask >> c) & 1 == 1 {
                    for q in pos + 1..n {
                        if inst.symbols[q] == c && solvable[idx(q + 1, mask & !(1 << c))] {
                            ok = true;
                            break;
                        }
                    }
                }
                ok
            };
            solvable[idx(pos, mask)] = v;
        }
    }
    if !solvable[idx(0, full)] {
        return Ok(None);
    }
    // Reconstruct greedily from the left.
    let mut factors = Vec::with_capacity(inst.k);
    let mut pos = 0usize;
    let mut mask = full;
    while mask != 0 {
        let c = inst.symbols[pos];
        let mut advanced = false;
        if (mask >> c) & 1 == 1 {
            for q in pos + 1..n {
                if inst.symbols[q] == c && solvable[idx(q + 1, mask & !(1 << c))] {
                    factors.push(Factor {
                        symbol: c,
                        start: pos,
                        end: q + 1,
                    });
                    mask &= !(1 << c);
                    pos = q + 1;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            pos += 1;
        }
    }
    debug_assert!(inst.witness_valid(&factors));
    Ok(Some(factors))
}

/// Independent brute force: enumerates every family of disjoint candidate
/// intervals directly. Exponential; for cross-validation on short strings.
pub fn df_brute_intervals(inst: &DfInstance) -> bool {
    let n = inst.symbols.len();
    let mut candidates: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.k];
    for a in 0..n {
        for b in a + 1..n {
            if inst.symbols[a] == inst.symbols[b] {
                candidates[inst.symbols[a]].push((a, b + 1));
            }
        }
    }
    fn rec(candidates: &[Vec<(usize, usize)>], sym: usize, used: &mut Vec<(usize, usize)>) -> bool {
        if sym == candidates.len() {
            return true;
        }
        for &(a, b) in &candidates[sym] {
            if used.iter().all(|&(x, y)| b <= x || y <= a) {
                used.push((a, b));
                if rec(candidates, sym + 1, used) {
                    return true;
                }
                used.pop();
            }
        }
        false
    }
    rec(&candidates, 0, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aa_is_a_yes_for_one_symbol() {
        let inst = DfInstance::parse("aa", 1).unwrap();
        let w = df_solve(&inst).unwrap().expect("aa itself is the factor");
        assert!(inst.witness_valid(&w));
    }

    #[test]
    fn abab_has_no_two_disjoint_factors() {
        let inst = DfInstance::parse("abab", 2).unwrap();
        assert!(df_solve(&inst).unwrap().is_none());
        assert!(!df_brute_intervals(&inst));
    }

    #[test]
    fn aabb_splits() {
        let inst = DfInstance::parse("aabb", 2).unwrap();
        let w = df_solve(&inst).unwrap().expect("aa and bb");
        assert!(inst.witness_valid(&w));
        assert!(df_brute_intervals(&inst));
    }
}
