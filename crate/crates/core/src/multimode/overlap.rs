use num_complex::Complex64;

use super::state::MultimodeState;
use crate::field1d::ComplexField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Species {
    A,
    B,
}

impl Species {
    fn idx(self) -> usize {
        match self {
            Species::A => 0,
            Species::B => 1,
        }
    }
}

pub const MAX_ORDER: i32 = 2;

/// `γ^{jk}_{m'}(k) = ∫ φ_{j,k} φ*_{k', k-m'}` for `|m'| ≤ 2`, stamped with
/// the time of the state it was computed from.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    n_atoms: usize,
    time: f64,
    // [k][m' + 2][j][k']
    data: Vec<[[[Complex64; 2]; 2]; 5]>,
}

impl OverlapTable {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Overlap for component index `k = n_a`; `None` when `k - m'` falls
    /// outside `0..=N` or `|m'| > 2`.
    pub fn gamma(&self, j: Species, kk: Species, m_prime: i32, k: usize) -> Option<Complex64> {
        if m_prime.abs() > MAX_ORDER || k > self.n_atoms {
            return None;
        }
        let other = k as i64 - m_prime as i64;
        if other < 0 || other > self.n_atoms as i64 {
            return None;
        }
        Some(self.data[k][(m_prime + MAX_ORDER) as usize][j.idx()][kk.idx()])
    }
}

fn integral(dx: f64, f: &ComplexField, g: &ComplexField) -> Complex64 {
    f.values().iter().zip(g.values()).map(|(x, y)| x * y.conj()).sum::<Complex64>() * dx
}

pub fn overlaps(state: &MultimodeState) -> OverlapTable {
    let n = state.n_atoms();
    let dx = state.grid().dx();
    let comps = state.components();
    let zero = Complex64::new(0.0, 0.0);
    let mut data = vec![[[[zero; 2]; 2]; 5]; n + 1];
    for (k, entry) in data.iter_mut().enumerate() {
        for mp in -MAX_ORDER..=MAX_ORDER {
            let other = k as i64 - mp as i64;
            if other < 0 || other > n as i64 {
                continue;
            }
            let (c, o) = (&comps[k], &comps[other as usize]);
            let slot = &mut entry[(mp + MAX_ORDER) as usize];
            slot[0][0] = integral(dx, &c.phi_a, &o.phi_a);
            slot[0][1] = integral(dx, &c.phi_a, &o.phi_b);
            slot[1][0] = integral(dx, &c.phi_b, &o.phi_a);
            slot[1][1] = integral(dx, &c.phi_b, &o.phi_b);
        }
    }
    OverlapTable {
        n_atoms: n,
        time: state.time(),
        data,
    }
}

/// Overlap of arbitrary order, e.g. `γ^{bb}_3`.
pub fn overlap_order(state: &MultimodeState, j: Species, kk: Species, m_prime: i32, k: usize) -> Option<Complex64> {
    let n = state.n_atoms() as i64;
    let other = k as i64 - m_prime as i64;
    if k as i64 > n || other < 0 || other > n {
        return None;
    }
    let comps = state.components();
    let field = |s: Species, idx: usize| match s {
        Species::A => &comps[idx].phi_a,
        Species::B => &comps[idx].phi_b,
    };
    Some(integral(state.grid().dx(), field(j, k), field(kk, other as usize)))
}
