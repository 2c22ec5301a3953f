//! Conditional-state assemblages and joint correlation tensors induced by a
//! bipartite state under local measurement assemblages.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_raw, partial_trace, ComplexMatrix, Subsystem};
use crate::quantum::povm::{MeasurementAssemblage, PSD_TOL};
use crate::quantum::state::DensityMatrix;

/// Unnormalized conditional states ρ_{a|x} on the trusted party, indexed by
/// (outcome a, setting x).
#[derive(Debug, Clone)]
pub struct Assemblage {
    /// members[x·o + a] = ρ_{a|x}.
    members: Vec<ComplexMatrix>,
    outcomes: usize,
    settings: usize,
    dim_b: usize,
}

impl Assemblage {
    /// Validates positivity, no-signalling consistency of the setting-wise
    /// sums, and unit total trace.
    pub fn new(members: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let settings = members.len();
        if settings == 0 {
            return Err(Error::Domain("assemblage needs at least one setting".into()));
        }
        let outcomes = members[0].len();
        if outcomes == 0 || members.iter().any(|row| row.len() != outcomes) {
            return Err(Error::Dimension("ragged assemblage grid".into()));
        }
        let dim_b = members[0][0].rows();
        let mut flat = Vec::with_capacity(settings * outcomes);
        let mut sums: Vec<ComplexMatrix> = Vec::with_capacity(settings);
        for row in &members {
            let mut sum = ComplexMatrix::zeros(dim_b, dim_b);
            for m in row {
                if m.rows() != dim_b || m.cols() != dim_b {
                    return Err(Error::Dimension("assemblage members differ in dimension".into()));
                }
                let eig = hermitian_eigen_raw(m)?;
                if eig.min() < -PSD_TOL {
                    return Err(Error::Domain(format!(
                        "assemblage member has negative eigenvalue {:.3e}",
                        eig.min()
                    )));
                }
                sum = sum.add(m);
            }
            sums.push(sum);
        }
        for s in &sums[1..] {
            if s.distance(&sums[0]) > 1e-8 {
                return Err(Error::Domain(
                    "assemblage violates no-signalling: setting-wise sums differ".into(),
                ));
            }
        }
        let tr = sums[0].trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::Domain(format!(
                "assemblage total trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        for row in members {
            flat.extend(row);
        }
        Ok(Self {
            members: flat,
            outcomes,
            settings,
            dim_b,
        })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// ρ_{a|x}.
    pub fn member(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.members[x * self.outcomes + a]
    }

    /// The common setting-wise sum Σ_a ρ_{a|x} (Bob's marginal state).
    pub fn marginal(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(self.dim_b, self.dim_b);
        for a in 0..self.outcomes {
            sum = sum.add(self.member(a, 0));
        }
        sum
    }

    /// Entry-wise convex mixture of two assemblages on the same scenario.
    pub fn mix(&self, other: &Assemblage, t: f64) -> Result<Assemblage> {
        if self.outcomes != other.outcomes
            || self.settings != other.settings
            || self.dim_b != other.dim_b
        {
            return Err(Error::Dimension("assemblage shapes differ".into()));
        }
        let members = (0..self.settings)
            .map(|x| {
                (0..self.outcomes)
                    .map(|a| {
                        self.member(a, x)
                            .scale_re(t)
                            .add(&other.member(a, x).scale_re(1.0 - t))
                    })
                    .collect()
            })
            .collect();
        Assemblage::new(members)
    }
}

/// Conditional state tr_A[(E ⊗ 1)ρ] without materializing the Kronecker
/// product: out[k][l] = Σ_{i,i'} E[i][i']·ρ[(i',k),(i,l)].
fn conditional_state(
    rho: &ComplexMatrix,
    effect: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for i in 0..dim_a {
        for ip in 0..dim_a {
            let e = effect.get(i, ip);
            if e.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..dim_b {
                for l in 0..dim_b {
                    let v = out.get(k, l) + e * rho.get(ip * dim_b + k, i * dim_b + l);
                    out.set(k, l, v);
                }
            }
        }
    }
    out
}

/// The assemblage ρ_{a|x} = tr_A[(M_{a|x} ⊗ 1)ρ] induced by Alice's
/// measurements.
pub fn assemblage_of(rho: &DensityMatrix, ma: &MeasurementAssemblage) -> Result<Assemblage> {
    let dim_a = ma.dim();
    if rho.dim() % dim_a != 0 {
        return Err(Error::Dimension(format!(
            "state dimension {} is not divisible by Alice's dimension {dim_a}",
            rho.dim()
        )));
    }
    let dim_b = rho.dim() / dim_a;
    let members = (0..ma.settings())
        .map(|x| {
            (0..ma.outcomes())
                .map(|a| conditional_state(rho.matrix(), ma.effect(a, x), dim_a, dim_b))
                .collect()
        })
        .collect();
    let out = Assemblage::new(members)?;
    debug_assert!(
        out.marginal()
            .distance(&partial_trace(rho.matrix(), dim_a, dim_b, Subsystem::B).unwrap())
            < 1e-8
    );
    Ok(out)
}

/// Joint outcome probabilities P(a,b|x,y), shape (o_A, o_B, m_A, m_B).
#[derive(Debug, Clone)]
pub struct CorrelationTensor {
    o_a: usize,
    o_b: usize,
    m_a: usize,
    m_b: usize,
    /// Flattened as ((x·m_B + y)·o_A + a)·o_B + b.
    p: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(o_a: usize, o_b: usize, m_a: usize, m_b: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != o_a * o_b * m_a * m_b {
            return Err(Error::Dimension(format!(
                "correlation tensor needs {} entries, got {}",
                o_a * o_b * m_a * m_b,
                p.len()
            )));
        }
        let t = Self { o_a, o_b, m_a, m_b, p };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        if self.p.iter().any(|&v| v < -1e-12 || !v.is_finite()) {
            return Err(Error::Domain("correlation tensor has a negative entry".into()));
        }
        for x in 0..self.m_a {
            for y in 0..self.m_b {
                let mut s = 0.0;
                for a in 0..self.o_a {
                    for b in 0..self.o_b {
                        s += self.get(a, b, x, y);
                    }
                }
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain(format!(
                        "correlations at (x = {x}, y = {y}) sum to {s}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.m_b + y) * self.o_a + a) * self.o_b + b
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.index(a, b, x, y)]
    }

    pub fn outcomes_a(&self) -> usize {
        self.o_a
    }

    pub fn outcomes_b(&self) -> usize {
        self.o_b
    }

    pub fn settings_a(&self) -> usize {
        self.m_a
    }

    pub fn settings_b(&self) -> usize {
        self.m_b
    }

    pub fn flat(&self) -> &[f64] {
        &self.p
    }

    /// Alice's marginal P(a|x, y) summed over b.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.o_b).map(|b| self.get(a, b, x, y)).sum()
    }

    /// Bob's marginal P(b|x, y) summed over a.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        (0..self.o_a).map(|a| self.get(a, b, x, y)).sum()
    }

    /// Entry-wise convex mixture.
    pub fn mix(&self, other: &CorrelationTensor, t: f64) -> Result<CorrelationTensor> {
        if (self.o_a, self.o_b, self.m_a, self.m_b) != (other.o_a, other.o_b, other.m_a, other.m_b)
        {
            return Err(Error::Dimension("correlation tensor shapes differ".into()));
        }
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(u, v)| t * u + (1.0 - t) * v)
            .collect();
        CorrelationTensor::new(self.o_a, self.o_b, self.m_a, self.m_b, p)
    }
}

/// P(a,b|x,y) = tr[(M_{a|x} ⊗ N_{b|y})ρ], computed through Bob's traces on
/// the conditional states.
pub fn correlations_of(
    rho: &DensityMatrix,
    ma: &MeasurementAssemblage,
    nb: &MeasurementAssemblage,
) -> Result<CorrelationTensor> {
    if ma.dim() * nb.dim() != rho.dim() {
        return Err(Error::Dimension(format!(
            "state dimension {} differs from {}·{}",
            rho.dim(),
            ma.dim(),
            nb.dim()
        )));
    }
    let (o_a, o_b, m_a, m_b) = (ma.outcomes(), nb.outcomes(), ma.settings(), nb.settings());
    let mut p = vec![0.0; o_a * o_b * m_a * m_b];
    for x in 0..m_a {
        for a in 0..o_a {
            let cond = conditional_state(rho.matrix(), ma.effect(a, x), ma.dim(), nb.dim());
            for y in 0..m_b {
                for b in 0..o_b {
                    let val: Complex64 = nb.effect(b, y).matmul(&cond).trace();
                    let idx = ((x * m_b + y) * o_a + a) * o_b + b;
                    p[idx] = val.re;
                }
            }
        }
    }
    CorrelationTensor::new(o_a, o_b, m_a, m_b, p)
}
