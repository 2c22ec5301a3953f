//! Shared samplers and scenario builders for the integration suites.
//! Everything is seeded ChaCha, so runs are reproducible bit for bit.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lhvlab_core::linalg::{inner, norm, tensor, ComplexMatrix};
use lhvlab_core::quantum::{DensityMatrix, MeasurementAssemblage, Povm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian via Box–Muller.
pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (-2.0 * u.ln()).sqrt();
    Complex64::new(r * v.cos(), r * v.sin())
}

/// Haar-ish random unitary: Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        for c in &cols {
            let proj = inner(c, &v);
            for (z, e) in v.iter_mut().zip(c) {
                *z -= proj * e;
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            for z in &mut v {
                *z /= nv;
            }
            cols.push(v);
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            u.set(i, j, col[i]);
        }
    }
    u
}

/// Normalized Gaussian pure-state vector of the given length.
pub fn random_pure_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..len).map(|_| gaussian(rng)).collect();
    let nv = norm(&v);
    for z in &mut v {
        *z /= nv;
    }
    v
}

/// Hilbert–Schmidt-ensemble density matrix: GG†/tr(GG†).
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, gaussian(rng));
        }
    }
    let gg = g.matmul(&g.dagger());
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_re(1.0 / tr)).expect("valid random state")
}

/// Random mixture of at most `terms` pure product states of two qubits.
pub fn random_separable_two_qubit(rng: &mut ChaCha8Rng, terms: usize) -> DensityMatrix {
    let k = rng.gen_range(1..=terms);
    let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for &w in &weights {
        let a = random_pure_vector(rng, 2);
        let b = random_pure_vector(rng, 2);
        let pa = ComplexMatrix::outer(&a, &a);
        let pb = ComplexMatrix::outer(&b, &b);
        m = m.add(&tensor(&pa, &pb).scale_re(w));
    }
    DensityMatrix::new(m).expect("valid separable state")
}

/// Random dichotomic qubit POVM: U·diag(λ)·U† and its complement.
pub fn random_dichotomic_povm(rng: &mut ChaCha8Rng) -> Povm {
    let u = random_unitary(rng, 2);
    let l0: f64 = rng.gen_range(0.0..1.0);
    let l1: f64 = rng.gen_range(0.0..1.0);
    let mut d = ComplexMatrix::zeros(2, 2);
    d.set(0, 0, Complex64::new(l0, 0.0));
    d.set(1, 1, Complex64::new(l1, 0.0));
    let e0 = u.matmul(&d).matmul(&u.dagger());
    let e1 = ComplexMatrix::identity(2).sub(&e0);
    Povm::new(vec![e0, e1]).expect("valid random POVM")
}

/// Random projective qubit measurement.
pub fn random_projective_povm(rng: &mut ChaCha8Rng) -> Povm {
    let u = random_unitary(rng, 2);
    let effects = (0..2)
        .map(|j| {
            let col = u.column_vec(j);
            ComplexMatrix::outer(&col, &col)
        })
        .collect();
    Povm::new(effects).expect("valid projective POVM")
}

/// Two-setting dichotomic assemblage, generically non-projective.
pub fn random_two_setting_assemblage(rng: &mut ChaCha8Rng) -> MeasurementAssemblage {
    MeasurementAssemblage::new(vec![
        random_dichotomic_povm(rng),
        random_dichotomic_povm(rng),
    ])
    .expect("valid assemblage")
}

/// Two-setting projective assemblage (steers more often).
pub fn random_projective_assemblage(rng: &mut ChaCha8Rng) -> MeasurementAssemblage {
    MeasurementAssemblage::new(vec![
        random_projective_povm(rng),
        random_projective_povm(rng),
    ])
    .expect("valid assemblage")
}

/// The CHSH-optimal scenario: Alice Z/X, Bob (Z±X)/√2, as projective pairs.
pub fn chsh_scenario() -> (MeasurementAssemblage, MeasurementAssemblage) {
    let z = ComplexMatrix::from_rows(&[vec![(1.0, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (-1.0, 0.0)]])
        .unwrap();
    let x = ComplexMatrix::from_rows(&[vec![(0.0, 0.0), (1.0, 0.0)], vec![(1.0, 0.0), (0.0, 0.0)]])
        .unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bp = z.add(&x).scale_re(s);
    let bm = z.sub(&x).scale_re(s);
    let pair = |o: &ComplexMatrix| {
        let i2 = ComplexMatrix::identity(2);
        Povm::new(vec![i2.add(o).scale_re(0.5), i2.sub(o).scale_re(0.5)]).unwrap()
    };
    (
        MeasurementAssemblage::new(vec![pair(&z), pair(&x)]).unwrap(),
        MeasurementAssemblage::new(vec![pair(&bp), pair(&bm)]).unwrap(),
    )
}

/// λ_max of a 2x2 Hermitian matrix in closed form, an eigensolver-free
/// oracle for re-verifying witness bounds.
pub fn max_eig_2x2(m: &ComplexMatrix) -> f64 {
    assert_eq!(m.rows(), 2);
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let tr = a + d;
    let det = a * d - b.norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    0.5 * (tr + disc)
}
