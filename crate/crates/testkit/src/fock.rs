//! Multimode moments by brute force: every component field is expanded in
//! one shared orthonormal basis, basis states are built by repeated
//! creation operators, and ladder operators act on the sparse Fock vector.

use std::collections::HashMap;

use nalgebra::Matrix3;
use num_complex::Complex64;

const BITS: usize = 4;

type Fock = HashMap<u128, Complex64>;

pub struct Component<'a> {
    pub n_a: usize,
    pub n_b: usize,
    pub phi_a: &'a [Complex64],
    pub phi_b: &'a [Complex64],
    /// Full amplitude of this component, including any action phase.
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct FockMoments {
    pub norm: f64,
    pub jplus: Complex64,
    pub jpjm: f64,
    pub jmjp: f64,
    pub jpjp: Complex64,
    pub nb_jp: Complex64,
    pub na_jm: Complex64,
    pub qfi: f64,
}

fn occ(key: u128, mode: usize) -> u32 {
    ((key >> (BITS * mode)) & 0xf) as u32
}

fn raise(key: u128, mode: usize) -> u128 {
    key + (1u128 << (BITS * mode))
}

fn lower(key: u128, mode: usize) -> u128 {
    key - (1u128 << (BITS * mode))
}

fn add(out: &mut Fock, key: u128, amp: Complex64) {
    *out.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
}

fn create(state: &Fock, coeffs: &[Complex64], offset: usize) -> Fock {
    let mut out = Fock::new();
    for (&key, &amp) in state {
        for (i, &c) in coeffs.iter().enumerate() {
            let mode = offset + i;
            add(&mut out, raise(key, mode), amp * c * ((occ(key, mode) + 1) as f64).sqrt());
        }
    }
    out
}

fn transfer(state: &Fock, from: usize, to: usize, m: usize) -> Fock {
    let mut out = Fock::new();
    for (&key, &amp) in state {
        for i in 0..m {
            let nf = occ(key, from + i);
            if nf == 0 {
                continue;
            }
            let nt = occ(key, to + i);
            add(&mut out, raise(lower(key, from + i), to + i), amp * (nf as f64 * (nt + 1) as f64).sqrt());
        }
    }
    out
}

fn number(state: &Fock, offset: usize, m: usize) -> Fock {
    state
        .iter()
        .map(|(&key, &amp)| (key, amp * (0..m).map(|i| occ(key, offset + i)).sum::<u32>() as f64))
        .collect()
}

fn combine(parts: &[(&Fock, Complex64)]) -> Fock {
    let mut out = Fock::new();
    for (f, c) in parts {
        for (&k, &a) in f.iter() {
            add(&mut out, k, a * c);
        }
    }
    out
}

fn inner(x: &Fock, y: &Fock) -> Complex64 {
    x.iter().filter_map(|(k, a)| y.get(k).map(|b| a.conj() * b)).sum()
}

fn dot(dx: f64, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dx
}

fn gram_schmidt(dx: f64, fields: &[&[Complex64]]) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for f in fields {
        let mut v = f.to_vec();
        for _ in 0..2 {
            for u in &basis {
                let c = dot(dx, u, &v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n = dot(dx, &v, &v).re.sqrt();
        if n > 1e-6 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn moments(dx: f64, components: &[Component<'_>]) -> FockMoments {
    let fields: Vec<&[Complex64]> = components.iter().flat_map(|c| [c.phi_a, c.phi_b]).collect();
    let basis = gram_schmidt(dx, &fields);
    let m = basis.len();
    assert!(2 * m * BITS <= 128, "too many modes for the packed key");
    let expand = |f: &[Complex64]| -> Vec<Complex64> { basis.iter().map(|u| dot(dx, u, f)).collect() };

    let mut psi = Fock::new();
    for c in components {
        let (ca, cb) = (expand(c.phi_a), expand(c.phi_b));
        let mut s = Fock::new();
        s.insert(0, Complex64::new(1.0, 0.0));
        for _ in 0..c.n_a {
            s = create(&s, &ca, 0);
        }
        for _ in 0..c.n_b {
            s = create(&s, &cb, m);
        }
        let scale = c.amplitude / (factorial(c.n_a) * factorial(c.n_b)).sqrt();
        for (k, a) in s {
            add(&mut psi, k, a * scale);
        }
    }

    let jp = |s: &Fock| transfer(s, m, 0, m);
    let jm = |s: &Fock| transfer(s, 0, m, m);
    let jp_psi = jp(&psi);
    let jm_psi = jm(&psi);
    let na_psi = number(&psi, 0, m);
    let nb_psi = number(&psi, m, m);

    let half = Complex64::new(0.5, 0.0);
    let jx = combine(&[(&jp_psi, half), (&jm_psi, half)]);
    let jy = combine(&[(&jp_psi, Complex64::new(0.0, -0.5)), (&jm_psi, Complex64::new(0.0, 0.5))]);
    let jz = combine(&[(&na_psi, half), (&nb_psi, -half)]);
    let applied = [jx, jy, jz];
    let mean: Vec<f64> = applied.iter().map(|v| inner(&psi, v).re).collect();
    let mut f = Matrix3::<f64>::zeros();
    for i in 0..3 {
        for k in 0..3 {
            f[(i, k)] = 4.0 * inner(&applied[i], &applied[k]).re - 4.0 * mean[i] * mean[k];
        }
    }

    FockMoments {
        norm: inner(&psi, &psi).re,
        jplus: inner(&psi, &jp_psi),
        jpjm: inner(&jm_psi, &jm_psi).re,
        jmjp: inner(&jp_psi, &jp_psi).re,
        jpjp: inner(&psi, &jp(&jp_psi)),
        nb_jp: inner(&psi, &number(&jp_psi, m, m)),
        na_jm: inner(&psi, &number(&jm_psi, 0, m)),
        qfi: f.symmetric_eigenvalues().max(),
    }
}
