use num_complex::Complex64;

use super::overlap::{OverlapTable, Species};
use super::state::MultimodeState;
use crate::fisher::{qfi_from_moments, FisherResult, LadderMoments, SpinMoments};
use crate::logspace::LogComplex;
use crate::{Error, Result};

/// Normally ordered moments, with `J_+ = a†b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub n_atoms: usize,
    pub time: f64,
    pub jplus: Complex64,
    pub jpjm: f64,
    pub jpjp: Complex64,
    pub nb_jp: Complex64,
    pub na_jm: Complex64,
    pub jz: f64,
    pub jz2: f64,
    pub n: f64,
    pub n2: f64,
}

impl MomentSet {
    pub fn jmjp(&self) -> f64 {
        self.jpjm - 2.0 * self.jz
    }

    pub fn ladder(&self) -> LadderMoments {
        LadderMoments {
            jp: self.jplus,
            jp_jp: self.jpjp,
            jp_jm: self.jpjm,
            jm_jp: self.jmjp(),
            jp_jz_anti: self.na_jm.conj() - self.nb_jp,
            jz: self.jz,
            jz2: self.jz2,
        }
    }

    pub fn spin_moments(&self) -> SpinMoments {
        self.ladder().to_spin_moments()
    }
}

fn lc(z: Complex64) -> LogComplex {
    LogComplex::from_complex(z)
}

fn real_lc(x: f64) -> LogComplex {
    LogComplex::new(x.ln(), 0.0)
}

pub fn assemble_moments(state: &MultimodeState, table: &OverlapTable) -> Result<MomentSet> {
    let n = state.n_atoms();
    if table.n_atoms() != n {
        return Err(Error::invalid("overlap table built for a different N"));
    }
    if table.time() != state.time() {
        return Err(Error::invalid(format!(
            "overlap table time {} does not match state time {}",
            table.time(),
            state.time()
        )));
    }
    let d = state.coeffs();
    let comps = state.components();
    let missing = || Error::invalid("overlap table is missing an order");

    let mut jm = Complex64::new(0.0, 0.0);
    let mut na_jm = Complex64::new(0.0, 0.0);
    let mut jm_nb = Complex64::new(0.0, 0.0);
    let mut jmjm = Complex64::new(0.0, 0.0);
    let mut cross = 0.0;
    let (mut jz, mut jz2) = (0.0, 0.0);
    let half = 0.5 * n as f64;

    for k in 0..=n {
        let (na, nb) = (k as u64, (n - k) as u64);
        let pk = d[k].norm_sqr();
        let m = k as f64 - half;
        jz += pk * m;
        jz2 += pk * m * m;

        let g0ab = table.gamma(Species::A, Species::B, 0, k).ok_or_else(missing)?;
        cross += pk * (na * nb) as f64 * g0ab.norm_sqr();

        if k >= 1 {
            let g_ab = table.gamma(Species::A, Species::B, 1, k).ok_or_else(missing)?;
            let g_aa = table.gamma(Species::A, Species::A, 1, k).ok_or_else(missing)?;
            let g_bb = table.gamma(Species::B, Species::B, 1, k).ok_or_else(missing)?;
            let phase = LogComplex::new(0.0, comps[k - 1].action - comps[k].action);
            let s1 = d[k - 1]
                .conj()
                .mul(d[k])
                .mul(real_lc(((na * (nb + 1)) as f64).sqrt()))
                .mul(phase)
                .mul(lc(g_ab))
                .mul(lc(g_aa).powi(na - 1))
                .mul(lc(g_bb).powi(nb))
                .to_complex();
            jm += s1;
            na_jm += s1 * (na - 1) as f64;
            jm_nb += s1 * nb as f64;
        }
        if k >= 2 {
            let g_ab = table.gamma(Species::A, Species::B, 2, k).ok_or_else(missing)?;
            let g_aa = table.gamma(Species::A, Species::A, 2, k).ok_or_else(missing)?;
            let g_bb = table.gamma(Species::B, Species::B, 2, k).ok_or_else(missing)?;
            let phase = LogComplex::new(0.0, comps[k - 2].action - comps[k].action);
            let pref = ((na * (na - 1) * (nb + 1) * (nb + 2)) as f64).sqrt();
            let s2 = d[k - 2]
                .conj()
                .mul(d[k])
                .mul(real_lc(pref))
                .mul(phase)
                .mul(lc(g_ab).powi(2))
                .mul(lc(g_aa).powi(na - 2))
                .mul(lc(g_bb).powi(nb))
                .to_complex();
            jmjm += s2;
        }
    }
    let norm = state.norm_sqr();
    let n_f = n as f64;
    Ok(MomentSet {
        n_atoms: n,
        time: state.time(),
        jplus: jm.conj(),
        jpjm: (half + jz) + cross,
        jpjp: jmjm.conj(),
        nb_jp: jm_nb.conj(),
        na_jm,
        jz,
        jz2,
        n: n_f * norm,
        n2: n_f * n_f * norm,
    })
}

pub fn qfi_multimode(moments: &MomentSet) -> Result<FisherResult> {
    qfi_from_moments(&moments.spin_moments())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    /// `4 Var(J_y)` evaluated independently from the symmetric moments.
    pub var_jy4: f64,
}

impl Decomposition {
    pub fn sum(&self) -> f64 {
        self.f0 + self.f1 + self.f2
    }
}

/// `F0 = <J+J-> + <J-J+>`, `F1 = -4<J_y>²`, `F2 = -<J+J+> - <J-J->`,
/// checked against `4 Var(J_y)` to 1e-8 relative to `N²`.
pub fn f012(state: &MultimodeState, table: &OverlapTable) -> Result<Decomposition> {
    decompose(&assemble_moments(state, table)?)
}

pub fn decompose(moments: &MomentSet) -> Result<Decomposition> {
    let f0 = moments.jpjm + moments.jmjp();
    let f1 = -4.0 * moments.jplus.im * moments.jplus.im;
    let f2 = -2.0 * moments.jpjp.re;
    let sm = moments.spin_moments();
    let var_jy4 = 4.0 * sm.variance(1);
    let out = Decomposition { f0, f1, f2, var_jy4 };
    let scale = (moments.n_atoms as f64).powi(2).max(1.0);
    if !((out.sum() - var_jy4).abs() <= 1e-8 * scale) {
        return Err(Error::Integrity(format!(
            "F0 + F1 + F2 = {} but 4 Var(J_y) = {var_jy4}",
            out.sum()
        )));
    }
    Ok(out)
}
