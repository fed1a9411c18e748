//! Brute-force minimization over all assignments of the free cells.
//!
//! Coefficients are scaled to `i128` by their common denominator and visited in
//! Gray-code order, so each step costs one cell's degree.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::energy::BinaryEnergy;
use crate::error::{Error, Result};
use crate::grid::CellSet;
use crate::Rational;

pub const DEFAULT_CAP: usize = 22;
pub const CAP_ENV: &str = "PERIVAR_EXHAUSTIVE_CAP";

/// Cap from `PERIVAR_EXHAUSTIVE_CAP`, if set and valid.
pub fn cap_from_env() -> Option<usize> {
    std::env::var(CAP_ENV).ok()?.trim().parse().ok()
}

/// Flag, then environment, then file option, then [`DEFAULT_CAP`].
pub fn resolve_cap(flag: Option<usize>, file: Option<usize>) -> usize {
    flag.or_else(cap_from_env).or(file).unwrap_or(DEFAULT_CAP)
}

#[derive(Clone, Debug)]
pub struct VolumeBest {
    pub value: Rational,
    pub set: CellSet,
}

#[derive(Clone, Debug)]
pub struct ExhaustiveResult {
    /// Minimizer of smallest volume, then lexicographically first by sorted cell indices.
    pub best: CellSet,
    pub value: Rational,
    /// Number of assignments attaining `value`.
    pub minimizer_count: u64,
    /// Best set per total volume (`|A|` including frozen cells), same tie-break.
    pub per_volume: Vec<Option<VolumeBest>>,
}

impl ExhaustiveResult {
    /// Minimum over nonempty sets.
    pub fn best_nonempty(&self) -> Option<&VolumeBest> {
        self.per_volume
            .iter()
            .skip(1)
            .flatten()
            .fold(None, |acc: Option<&VolumeBest>, vb| match acc {
                Some(a) if a.value <= vb.value => Some(a),
                _ => Some(vb),
            })
    }
}

fn to_i128(r: &Rational, scale: &BigInt) -> Result<i128> {
    let v = r * Rational::from_integer(scale.clone());
    v.to_integer().to_i128().ok_or(Error::NumericRange)
}

struct Incidence {
    other: usize,
    /// Table indexed `[own][other]`.
    table: [[i128; 2]; 2],
}

/// Enumerates all `2^free` assignments. Errors when the free cell count exceeds `cap`.
pub fn exhaustive_minimize(energy: &BinaryEnergy, cap: usize) -> Result<ExhaustiveResult> {
    let free = energy.free_cells();
    let m = free.len();
    if m > cap || m > 40 {
        return Err(Error::ExhaustiveCapacityExceeded {
            cells: m,
            cap: cap.min(40),
        });
    }
    let scale = energy.common_denominator();
    let n = energy.domain().cell_count();
    let mut slot = vec![usize::MAX; n];
    for (k, &c) in free.iter().enumerate() {
        slot[c] = k;
    }
    let mut bound = BigInt::from(0);
    let mut unary = Vec::with_capacity(m);
    for &c in &free {
        let [e0, e1] = &energy.unary()[c];
        let u = [to_i128(e0, &scale)?, to_i128(e1, &scale)?];
        bound += BigInt::from(u[0].abs()) + BigInt::from(u[1].abs());
        unary.push(u);
    }
    let mut inc: Vec<Vec<Incidence>> = (0..m).map(|_| Vec::new()).collect();
    for term in energy.pairs() {
        let (i, j) = (slot[term.cells.0], slot[term.cells.1]);
        let mut t = [[0i128; 2]; 2];
        for (a, row) in t.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = to_i128(&term.table[a][b], &scale)?;
                bound += BigInt::from(v.abs());
            }
        }
        inc[i].push(Incidence { other: j, table: t });
        let tt = [[t[0][0], t[1][0]], [t[0][1], t[1][1]]];
        inc[j].push(Incidence { other: i, table: tt });
    }
    let constant = to_i128(energy.constant(), &scale)?;
    bound += BigInt::from(constant.abs());
    if bound.to_i128().is_none_or(|b| b > i128::MAX / 4) {
        return Err(Error::NumericRange);
    }

    let mut state = vec![false; m];
    let mut value: i128 = constant + unary.iter().map(|u| u[0]).sum::<i128>();
    for (k, list) in inc.iter().enumerate() {
        for e in list {
            if k < e.other {
                value += e.table[0][0];
            }
        }
    }
    let base_volume = energy.frozen_ones().volume();
    let mut best_val: Vec<Option<(i128, u64)>> = vec![None; m + 1];
    let mut global: (i128, u64) = (value, 0);
    let mut low = value;
    let mut count: u64 = 0;
    let beats = |a: u64, b: u64| {
        let d = a ^ b;
        d & d.wrapping_neg() & a != 0
    };
    let consider = |mask: u64, value: i128, best_val: &mut Vec<Option<(i128, u64)>>| {
        let v = mask.count_ones() as usize;
        match best_val[v] {
            Some((bv, bm)) if bv < value || (bv == value && !beats(mask, bm)) => {}
            _ => best_val[v] = Some((value, mask)),
        }
    };
    consider(0, value, &mut best_val);
    let mut tally = |value: i128| {
        if value < low {
            low = value;
            count = 1;
        } else if value == low {
            count += 1;
        }
    };
    tally(value);
    let mut mask: u64 = 0;
    for step in 1u64..(1u64 << m) {
        let k = step.trailing_zeros() as usize;
        let old = state[k] as usize;
        let new = 1 - old;
        let mut delta = unary[k][new] - unary[k][old];
        for e in &inc[k] {
            let o = state[e.other] as usize;
            delta += e.table[new][o] - e.table[old][o];
        }
        state[k] = new == 1;
        mask ^= 1 << k;
        value += delta;
        consider(mask, value, &mut best_val);
        tally(value);
    }
    for &(v, mk) in best_val.iter().flatten() {
        let better = v < global.0
            || (v == global.0
                && (mk.count_ones() < global.1.count_ones()
                    || (mk.count_ones() == global.1.count_ones() && beats(mk, global.1))));
        if better {
            global = (v, mk);
        }
    }
    let to_set = |mk: u64| {
        let mut set = energy.frozen_ones();
        for (k, &c) in free.iter().enumerate() {
            if mk >> k & 1 == 1 {
                set.set(c, true);
            }
        }
        set
    };
    let to_rat = |v: i128| Rational::new(BigInt::from(v), scale.clone());
    let mut per_volume = vec![None; n + 1];
    for (k, entry) in best_val.iter().enumerate() {
        if let Some((v, mk)) = entry {
            per_volume[base_volume + k] = Some(VolumeBest {
                value: to_rat(*v),
                set: to_set(*mk),
            });
        }
    }
    let best = to_set(global.1);
    let value = to_rat(global.0);
    debug_assert_eq!(energy.evaluate(&best)?, value);
    Ok(ExhaustiveResult {
        best,
        value,
        minimizer_count: count,
        per_volume,
    })
}

/// Minimum of `energy` over all cell sets, without scaling or Gray codes.
/// Reference for tests only; exponential with a large constant.
pub fn naive_minimum(energy: &BinaryEnergy) -> Result<Rational> {
    let free = energy.free_cells();
    if free.len() > 20 {
        return Err(Error::ExhaustiveCapacityExceeded {
            cells: free.len(),
            cap: 20,
        });
    }
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1 << free.len()) {
        let mut set = energy.frozen_ones();
        for (k, &c) in free.iter().enumerate() {
            set.set(c, mask >> k & 1 == 1);
        }
        let v = energy.evaluate(&set)?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.expect("at least one assignment"))
}
