//! States, operators and measurements over small multi-qubit Hilbert
//! spaces.
//!
//! Qubit ordering convention, used everywhere in this crate: **qubit 0 is
//! the most significant bit of the basis index**. A tensor product
//! `a.tensor(&b)` therefore puts `a` on the most significant positions,
//! and for a probe-signal pair the probe is written first.
//!
//! All types validate their physicality invariants on construction
//! (tolerances from [`crate::tol::Tolerances`]) and are immutable
//! afterwards; operations are pure functions. Sampling takes an explicit
//! RNG handle.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, Matrix};
use crate::tol::{Tolerances, DIM_CAP};

fn check_pow2_dim(dim: usize) -> Result<()> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    if dim > DIM_CAP {
        return Err(Error::DimensionCap(dim, DIM_CAP));
    }
    Ok(())
}

/// Scatter the bits of `packed` onto the qubit `positions` (ascending) of
/// an `n`-qubit basis index. Bit 0 of the result of `positions[0]` is the
/// most significant packed bit.
fn scatter_bits(packed: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    let mut out = 0usize;
    for (i, &q) in positions.iter().enumerate() {
        let bit = (packed >> (k - 1 - i)) & 1;
        out |= bit << (n - 1 - q);
    }
    out
}

// ---------------------------------------------------------------------------
// State vectors
// ---------------------------------------------------------------------------

/// Pure state over a power-of-two dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::new_with(amps, &Tolerances::default())
    }

    pub fn new_with(amps: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        check_pow2_dim(amps.len())?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > tol.physicality {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(StateVector { amps })
    }

    /// Normalize and construct; fails on (numerically) zero vectors.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_pow2_dim(amps.len())?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 1e-300 {
            return Err(Error::ZeroNorm);
        }
        let s = norm2.sqrt().recip();
        Ok(StateVector {
            amps: amps.into_iter().map(|a| a * s).collect(),
        })
    }

    /// Computational basis state |index> of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_pow2_dim(dim)?;
        if index >= dim {
            return Err(Error::param(format!("basis index {index} out of 0..{dim}")));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { amps })
    }

    /// Real qubit (cos a, sin a); the workhorse signal state.
    pub fn real_qubit(alpha: f64) -> Self {
        StateVector {
            amps: vec![
                Complex64::new(alpha.cos(), 0.0),
                Complex64::new(alpha.sin(), 0.0),
            ],
        }
    }

    /// Equatorial qubit (|0> + i^m |1>)/sqrt(2); m = 0..3 walks the four
    /// states of the two conjugate equatorial bases.
    pub fn equatorial(m: u8) -> Self {
        let phase = match m % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector {
            amps: vec![s, s * phase],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// <self|rhs>.
    pub fn inner(&self, rhs: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(rhs.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Tensor product; `self` occupies the most significant qubits.
    pub fn tensor(&self, rhs: &StateVector) -> Result<StateVector> {
        let dim = self.dim() * rhs.dim();
        if dim > DIM_CAP {
            return Err(Error::DimensionCap(dim, DIM_CAP));
        }
        let mut amps = Vec::with_capacity(dim);
        for a in &self.amps {
            for b in &rhs.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { amps })
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = Matrix::from_fn(self.dim(), |i, j| self.amps[i] * self.amps[j].conj());
        DensityOperator { m }
    }

    pub fn apply_unitary(&self, u: &UnitaryOperator) -> Result<StateVector> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch(u.dim(), self.dim()));
        }
        Ok(StateVector {
            amps: u.m.apply(&self.amps),
        })
    }

    /// Apply a single-qubit gate (2x2 matrix) to one qubit of a register.
    pub fn apply_single_qubit(&self, qubit: usize, gate: &Matrix) -> Result<StateVector> {
        let n = self.n_qubits();
        if gate.dim() != 2 {
            return Err(Error::DimensionMismatch(gate.dim(), 2));
        }
        if qubit >= n {
            return Err(Error::param(format!("qubit {qubit} out of 0..{n}")));
        }
        let bit = 1usize << (n - 1 - qubit);
        let mut amps = self.amps.clone();
        for idx in 0..self.dim() {
            if idx & bit == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
                amps[idx] = gate[(0, 0)] * a0 + gate[(0, 1)] * a1;
                amps[idx | bit] = gate[(1, 0)] * a0 + gate[(1, 1)] * a1;
            }
        }
        Ok(StateVector { amps })
    }
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

/// Hermitian, unit-trace, positive operator; the universal state carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    m: Matrix,
}

impl DensityOperator {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        check_pow2_dim(m.dim())?;
        let defect = m.hermiticity_defect();
        if defect > tol.physicality {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol.physicality || tr.im.abs() > tol.physicality {
            return Err(Error::TraceNotOne(tr.re));
        }
        if m.dim() <= tol.psd_check_dim {
            let min = hermitian_eigenvalues(&m)[0];
            if min < -tol.eigen_floor {
                return Err(Error::NotPositive(min));
            }
        } else {
            for i in 0..m.dim() {
                if m[(i, i)].re < -tol.eigen_floor {
                    return Err(Error::NotPositive(m[(i, i)].re));
                }
            }
        }
        Ok(DensityOperator { m })
    }

    pub fn from_state(psi: &StateVector) -> Self {
        psi.to_density()
    }

    /// Convex mixture of density operators; weights must sum to one.
    pub fn mixture(parts: &[(f64, DensityOperator)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("empty mixture"));
        }
        let dim = parts[0].1.dim();
        let mut m = Matrix::zeros(dim);
        let mut total = 0.0;
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::BadProbability(*w));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch(rho.dim(), dim));
            }
            total += w;
            m = m.add(&rho.m.scale(Complex64::new(*w, 0.0)));
        }
        if (total - 1.0).abs() > Tolerances::default().physicality {
            return Err(Error::param(format!("mixture weights sum to {total}")));
        }
        DensityOperator::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.m.dim().trailing_zeros() as usize
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Smallest eigenvalue; the explicit positivity probe for dimensions
    /// above the automatic check threshold.
    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.m)[0]
    }

    /// Tensor product; `self` occupies the most significant qubits.
    pub fn tensor(&self, rhs: &DensityOperator) -> Result<DensityOperator> {
        let dim = self.dim() * rhs.dim();
        if dim > DIM_CAP {
            return Err(Error::DimensionCap(dim, DIM_CAP));
        }
        Ok(DensityOperator {
            m: self.m.kron(&rhs.m),
        })
    }

    /// Trace out every qubit not in `keep`; `keep` must be a nonempty
    /// proper subset of the qubit indices.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let n = self.n_qubits();
        let keep = normalize_keep(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dt = 1usize << traced.len();
        let mut out = Matrix::zeros(dk);
        for a in 0..dk {
            let ia = scatter_bits(a, &keep, n);
            for b in 0..dk {
                let ib = scatter_bits(b, &keep, n);
                let mut acc = Complex64::ZERO;
                for t in 0..dt {
                    let it = scatter_bits(t, &traced, n);
                    acc += self.m[(ia | it, ib | it)];
                }
                out[(a, b)] = acc;
            }
        }
        DensityOperator::new(out)
    }

    /// Conditioned trace: Tr_traced[rho (I_keep (x) a)] together with its
    /// trace as the classical weight. The positive operator `a` acts on
    /// the traced-out qubits; with `a` the identity this reduces to
    /// `partial_trace`. The caller normalizes.
    pub fn conditioned_trace(&self, keep: &[usize], a: &PovmElement) -> Result<WeightedOperator> {
        let n = self.n_qubits();
        let keep = normalize_keep(keep, n)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dt = 1usize << traced.len();
        if a.dim() != dt {
            return Err(Error::DimensionMismatch(a.dim(), dt));
        }
        let mut out = Matrix::zeros(dk);
        for i in 0..dk {
            let ii = scatter_bits(i, &keep, n);
            for j in 0..dk {
                let jj = scatter_bits(j, &keep, n);
                let mut acc = Complex64::ZERO;
                for t in 0..dt {
                    let it = scatter_bits(t, &traced, n);
                    for tp in 0..dt {
                        let itp = scatter_bits(tp, &traced, n);
                        acc += self.m[(ii | it, jj | itp)] * a.m[(tp, t)];
                    }
                }
                out[(i, j)] = acc;
            }
        }
        let weight = out.trace().re;
        Ok(WeightedOperator { weight, m: out })
    }

    /// Bloch vector of a single-qubit state.
    pub fn to_bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch(self.dim(), 2));
        }
        Ok(BlochVector {
            x: 2.0 * self.m[(0, 1)].re,
            y: -2.0 * self.m[(0, 1)].im,
            z: self.m[(0, 0)].re - self.m[(1, 1)].re,
        })
    }

    /// Single-qubit state (I + r . sigma)/2 from a Bloch vector.
    pub fn from_bloch(r: BlochVector) -> Result<DensityOperator> {
        let mut m = Matrix::zeros(2);
        m[(0, 0)] = Complex64::new(0.5 * (1.0 + r.z), 0.0);
        m[(1, 1)] = Complex64::new(0.5 * (1.0 - r.z), 0.0);
        m[(0, 1)] = Complex64::new(0.5 * r.x, -0.5 * r.y);
        m[(1, 0)] = Complex64::new(0.5 * r.x, 0.5 * r.y);
        DensityOperator::new(m)
    }

    /// Tr(rho A), real part.
    pub fn expect(&self, a: &Matrix) -> f64 {
        let n = self.dim();
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.m[(i, j)] * a[(j, i)];
            }
        }
        acc.re
    }
}

fn normalize_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut k: Vec<usize> = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.is_empty() || k.len() >= n || k.iter().any(|&q| q >= n) {
        return Err(Error::BadKeepSet(n));
    }
    Ok(k)
}

/// A non-normalized positive operator plus its trace, as produced by a
/// conditioned trace. `weight` is the classical probability of the
/// conditioning event.
#[derive(Debug, Clone)]
pub struct WeightedOperator {
    pub weight: f64,
    m: Matrix,
}

impl WeightedOperator {
    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Normalize to a unit-trace density operator.
    pub fn normalized(&self) -> Result<DensityOperator> {
        if self.weight <= 1e-300 {
            return Err(Error::ZeroNorm);
        }
        DensityOperator::new(self.m.scale(Complex64::new(1.0 / self.weight, 0.0)))
    }
}

// ---------------------------------------------------------------------------
// Unitaries
// ---------------------------------------------------------------------------

/// Unitary operator over a power-of-two dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    m: Matrix,
}

impl UnitaryOperator {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        check_pow2_dim(m.dim())?;
        let defect = m.adjoint().mul(&m).max_abs_diff(&Matrix::identity(m.dim()));
        if defect > tol.algebraic {
            return Err(Error::NotUnitary(defect));
        }
        Ok(UnitaryOperator { m })
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// U rho U-dagger.
    pub fn conjugate(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        DensityOperator::new(self.m.mul(rho.matrix()).mul(&self.m.adjoint()))
    }

    pub fn tensor(&self, rhs: &UnitaryOperator) -> Result<UnitaryOperator> {
        let dim = self.dim() * rhs.dim();
        if dim > DIM_CAP {
            return Err(Error::DimensionCap(dim, DIM_CAP));
        }
        Ok(UnitaryOperator {
            m: self.m.kron(&rhs.m),
        })
    }
}

// ---------------------------------------------------------------------------
// Bloch vectors
// ---------------------------------------------------------------------------

/// Cartesian Bloch (Poincare) vector of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Pure states sit on the unit sphere.
    pub fn is_pure(&self, tol: &Tolerances) -> bool {
        (self.norm() - 1.0).abs() <= tol.physicality
    }
}

// ---------------------------------------------------------------------------
// POVMs
// ---------------------------------------------------------------------------

/// Positive semidefinite measurement element.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    m: Matrix,
}

impl PovmElement {
    pub fn new(m: Matrix) -> Result<Self> {
        Self::new_with(m, &Tolerances::default())
    }

    pub fn new_with(m: Matrix, tol: &Tolerances) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tol.physicality {
            return Err(Error::NotHermitian(defect));
        }
        let min = hermitian_eigenvalues(&m)[0];
        if min < -tol.physicality {
            return Err(Error::NotPositive(min));
        }
        Ok(PovmElement { m })
    }

    pub fn identity(dim: usize) -> Self {
        PovmElement {
            m: Matrix::identity(dim),
        }
    }

    /// |psi><psi|.
    pub fn projector(psi: &StateVector) -> Self {
        PovmElement { m: psi.to_density().m }
    }

    /// c |psi><psi| for c >= 0.
    pub fn scaled_projector(psi: &StateVector, c: f64) -> Result<Self> {
        if c < 0.0 {
            return Err(Error::BadProbability(c));
        }
        Ok(PovmElement {
            m: psi.to_density().m.scale(Complex64::new(c, 0.0)),
        })
    }

    /// Sum of scaled projectors; positivity is automatic.
    pub fn from_projector_sum(parts: &[(f64, StateVector)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("empty projector sum"));
        }
        let dim = parts[0].1.dim();
        let mut m = Matrix::zeros(dim);
        for (c, psi) in parts {
            if *c < 0.0 {
                return Err(Error::BadProbability(*c));
            }
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch(psi.dim(), dim));
            }
            m = m.add(&psi.to_density().m.scale(Complex64::new(*c, 0.0)));
        }
        PovmElement::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }
}

/// Check that the elements sum to the identity.
pub fn verify_complete(elements: &[PovmElement], tol: &Tolerances) -> Result<()> {
    if elements.is_empty() {
        return Err(Error::IncompletePovm(1.0));
    }
    let dim = elements[0].dim();
    let mut sum = Matrix::zeros(dim);
    for e in elements {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch(e.dim(), dim));
        }
        sum = sum.add(&e.m);
    }
    let defect = sum.max_abs_diff(&Matrix::identity(dim));
    if defect > tol.physicality {
        return Err(Error::IncompletePovm(defect));
    }
    Ok(())
}

/// Sample a generalized measurement. Returns the outcome index together
/// with its Born probability Tr(rho A).
pub fn measure_povm<R: Rng + ?Sized>(
    rho: &DensityOperator,
    elements: &[PovmElement],
    rng: &mut R,
) -> Result<(usize, f64)> {
    verify_complete(elements, &Tolerances::default())?;
    if elements[0].dim() != rho.dim() {
        return Err(Error::DimensionMismatch(elements[0].dim(), rho.dim()));
    }
    let probs: Vec<f64> = elements
        .iter()
        .map(|e| rho.expect(&e.m).max(0.0))
        .collect();
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok((i, *p));
        }
    }
    Ok((probs.len() - 1, probs[probs.len() - 1]))
}

// ---------------------------------------------------------------------------
// Bell basis
// ---------------------------------------------------------------------------

/// Outcome of a Bell-operator measurement, in the fixed order used by
/// [`bell_states`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BellOutcome {
    /// Singlet (|01> - |10>)/sqrt(2).
    PsiMinus,
    /// (|01> + |10>)/sqrt(2).
    PsiPlus,
    /// (|00> + |11>)/sqrt(2).
    PhiPlus,
    /// (|00> - |11>)/sqrt(2).
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PsiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
    ];

    pub fn index(&self) -> usize {
        match self {
            BellOutcome::PsiMinus => 0,
            BellOutcome::PsiPlus => 1,
            BellOutcome::PhiPlus => 2,
            BellOutcome::PhiMinus => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            BellOutcome::PsiMinus => "psi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
        }
    }
}

/// The four Bell states in the order Psi-, Psi+, Phi+, Phi-.
pub fn bell_states() -> [StateVector; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mk = |a: f64, i: usize, b: f64, j: usize| {
        let mut amps = vec![Complex64::ZERO; 4];
        amps[i] = Complex64::new(a, 0.0);
        amps[j] = Complex64::new(b, 0.0);
        StateVector { amps }
    };
    [
        mk(s, 1, -s, 2), // (|01> - |10>)/sqrt(2)
        mk(s, 1, s, 2),  // (|01> + |10>)/sqrt(2)
        mk(s, 0, s, 3),  // (|00> + |11>)/sqrt(2)
        mk(s, 0, -s, 3), // (|00> - |11>)/sqrt(2)
    ]
}

/// Project a two-qubit pure state onto the Bell basis, sampling the
/// outcome with its Born probability.
pub fn bell_project<R: Rng + ?Sized>(
    pair: &StateVector,
    rng: &mut R,
) -> Result<(BellOutcome, f64)> {
    if pair.dim() != 4 {
        return Err(Error::DimensionMismatch(pair.dim(), 4));
    }
    let basis = bell_states();
    let probs: Vec<f64> = basis.iter().map(|b| b.inner(pair).norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok((BellOutcome::ALL[i], *p));
        }
    }
    Ok((BellOutcome::PhiMinus, probs[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn basis_tensor_product() {
        // |0> (x) |1> = (0, 1, 0, 0)
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let prod = zero.tensor(&one).unwrap();
        assert_eq!(prod.amps(), &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn diagonal_density_tensor_square() {
        // diag(c^2, s^2) (x) itself = diag(c^4, c^2 s^2, c^2 s^2, s^4)
        let alpha = 0.3f64;
        let (cs, sn) = (alpha.cos(), alpha.sin());
        let rho = DensityOperator::new(Matrix::from_real(
            2,
            &[cs * cs, 0.0, 0.0, sn * sn],
        ))
        .unwrap();
        let rho2 = rho.tensor(&rho).unwrap();
        let expect = [
            cs.powi(4),
            cs * cs * sn * sn,
            cs * cs * sn * sn,
            sn.powi(4),
        ];
        for (i, e) in expect.iter().enumerate() {
            assert!((rho2.entry(i, i).re - e).abs() < TOL);
        }
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(rho2.entry(i, j).norm() < TOL);
                }
            }
        }
    }

    #[test]
    fn tensor_respects_operator_action() {
        // (A (x) B)(u (x) v) = (A u) (x) (B v) for fixed small cases.
        let a = Matrix::from_real(2, &[0.2, 0.7, -0.4, 1.1]);
        let b = Matrix::from_real(2, &[1.0, -0.3, 0.5, 0.9]);
        let u = vec![c(0.6), c(-0.8)];
        let v = vec![c(0.28), c(0.96)];
        let kron = a.kron(&b);
        let mut uv = Vec::new();
        for x in &u {
            for y in &v {
                uv.push(x * y);
            }
        }
        let lhs = kron.apply(&uv);
        let au = a.apply(&u);
        let bv = b.apply(&v);
        let mut rhs = Vec::new();
        for x in &au {
            for y in &bv {
                rhs.push(x * y);
            }
        }
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            assert!((l - r).norm() < TOL);
        }
    }

    #[test]
    fn tensor_associative() {
        let r0 = StateVector::real_qubit(0.2).to_density();
        let r1 = StateVector::real_qubit(0.9).to_density();
        let r2 = StateVector::real_qubit(1.3).to_density();
        let left = r0.tensor(&r1).unwrap().tensor(&r2).unwrap();
        let right = r0.tensor(&r1.tensor(&r2).unwrap()).unwrap();
        assert!(left.matrix().max_abs_diff(right.matrix()) < TOL);
    }

    #[test]
    fn singlet_partial_trace_is_maximally_mixed() {
        let singlet = &bell_states()[0];
        let rho = singlet.to_density();
        for keep in [&[0usize][..], &[1usize][..]] {
            let red = rho.partial_trace(keep).unwrap();
            assert!((red.entry(0, 0).re - 0.5).abs() < TOL);
            assert!((red.entry(1, 1).re - 0.5).abs() < TOL);
            assert!(red.entry(0, 1).norm() < TOL);
        }
    }

    #[test]
    fn product_state_partial_trace_recovers_factor() {
        let ra = StateVector::real_qubit(0.4).to_density();
        let rb = StateVector::real_qubit(1.1).to_density();
        let joint = ra.tensor(&rb).unwrap();
        let back_a = joint.partial_trace(&[0]).unwrap();
        let back_b = joint.partial_trace(&[1]).unwrap();
        assert!(back_a.matrix().max_abs_diff(ra.matrix()) < TOL);
        assert!(back_b.matrix().max_abs_diff(rb.matrix()) < TOL);
    }

    #[test]
    fn partial_trace_multiqubit_product() {
        // Three qubits; keep the middle one.
        let r0 = StateVector::real_qubit(0.3).to_density();
        let r1 = StateVector::real_qubit(0.8).to_density();
        let r2 = StateVector::real_qubit(1.2).to_density();
        let joint = r0.tensor(&r1).unwrap().tensor(&r2).unwrap();
        let mid = joint.partial_trace(&[1]).unwrap();
        assert!(mid.matrix().max_abs_diff(r1.matrix()) < TOL);
        let pair = joint.partial_trace(&[0, 2]).unwrap();
        let expect = r0.tensor(&r2).unwrap();
        assert!(pair.matrix().max_abs_diff(expect.matrix()) < TOL);
    }

    #[test]
    fn keep_set_must_be_proper() {
        let rho = StateVector::real_qubit(0.4)
            .to_density()
            .tensor(&StateVector::real_qubit(0.5).to_density())
            .unwrap();
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[0, 1]).is_err());
        assert!(rho.partial_trace(&[5]).is_err());
    }

    #[test]
    fn conditioned_trace_with_identity_is_partial_trace() {
        let psi = StateVector::real_qubit(0.35)
            .tensor(&StateVector::real_qubit(0.95))
            .unwrap();
        // Entangle a bit so the test is not a pure product case.
        let mut m = Matrix::identity(4);
        let g = 0.25f64;
        m[(1, 1)] = c(g.cos());
        m[(1, 2)] = c(-g.sin());
        m[(2, 1)] = c(g.sin());
        m[(2, 2)] = c(g.cos());
        let u = UnitaryOperator::new(m).unwrap();
        let rho = psi.apply_unitary(&u).unwrap().to_density();
        let plain = rho.partial_trace(&[0]).unwrap();
        let cond = rho
            .conditioned_trace(&[0], &PovmElement::identity(2))
            .unwrap();
        assert!((cond.weight - 1.0).abs() < TOL);
        assert!(cond.normalized().unwrap().matrix().max_abs_diff(plain.matrix()) < TOL);
    }

    #[test]
    fn conditioned_trace_weight_matches_dense_product() {
        let psi = StateVector::real_qubit(0.5)
            .tensor(&StateVector::real_qubit(0.2))
            .unwrap();
        let rho = psi.to_density();
        let a = PovmElement::scaled_projector(&StateVector::real_qubit(0.7), 0.6).unwrap();
        let cond = rho.conditioned_trace(&[0], &a).unwrap();
        // Dense oracle: Tr[rho (I (x) a)]
        let big = Matrix::identity(2).kron(a.matrix());
        let expect = rho.expect(&big);
        assert!((cond.weight - expect).abs() < TOL);
    }

    #[test]
    fn bloch_of_mixed_and_pure() {
        let mixed = DensityOperator::new(Matrix::from_real(2, &[0.5, 0.0, 0.0, 0.5])).unwrap();
        let r = mixed.to_bloch().unwrap();
        assert!(r.norm() < TOL);

        let alpha = 0.6f64;
        let pure = StateVector::real_qubit(alpha).to_density();
        let r = pure.to_bloch().unwrap();
        assert!((r.x - (2.0 * alpha).sin()).abs() < TOL);
        assert!(r.y.abs() < TOL);
        assert!((r.z - (2.0 * alpha).cos()).abs() < TOL);
        assert!(r.is_pure(&Tolerances::default()));
    }

    #[test]
    fn bloch_round_trip() {
        for (x, y, z) in [(0.1, -0.2, 0.3), (0.0, 0.0, 0.0), (0.6, 0.0, -0.8)] {
            let rho = DensityOperator::from_bloch(BlochVector { x, y, z }).unwrap();
            let r = rho.to_bloch().unwrap();
            assert!((r.x - x).abs() < TOL);
            assert!((r.y - y).abs() < TOL);
            assert!((r.z - z).abs() < TOL);
        }
    }

    #[test]
    fn projective_z_measurement_is_deterministic_on_basis_state() {
        let rho = StateVector::basis(2, 0).unwrap().to_density();
        let elems = [
            PovmElement::projector(&StateVector::basis(2, 0).unwrap()),
            PovmElement::projector(&StateVector::basis(2, 1).unwrap()),
        ];
        let mut rng = crate::rng::SeededStreams::new(7).stream(0);
        for _ in 0..16 {
            let (idx, p) = measure_povm(&rho, &elems, &mut rng).unwrap();
            assert_eq!(idx, 0);
            assert!((p - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn incomplete_povm_rejected() {
        let rho = StateVector::basis(2, 0).unwrap().to_density();
        let elems = [PovmElement::projector(&StateVector::basis(2, 0).unwrap())];
        let mut rng = crate::rng::SeededStreams::new(7).stream(0);
        assert!(measure_povm(&rho, &elems, &mut rng).is_err());
    }

    #[test]
    fn bell_states_orthonormal() {
        let basis = bell_states();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = a.inner(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g.re - expect).abs() < TOL && g.im.abs() < TOL);
            }
        }
    }

    #[test]
    fn bell_projection_of_up_down() {
        // |01>: Psi- and Psi+ each with probability 1/2, Phi+- zero.
        let pair = StateVector::basis(4, 1).unwrap();
        let basis = bell_states();
        let probs: Vec<f64> = basis.iter().map(|b| b.inner(&pair).norm_sqr()).collect();
        assert!((probs[0] - 0.5).abs() < TOL);
        assert!((probs[1] - 0.5).abs() < TOL);
        assert!(probs[2] < TOL && probs[3] < TOL);
    }

    #[test]
    fn bell_projection_same_states_never_singlet() {
        // |00>: singlet amplitude is exactly zero.
        let pair = StateVector::basis(4, 0).unwrap();
        assert!(bell_states()[0].inner(&pair).norm_sqr() < TOL);
        let mut rng = crate::rng::SeededStreams::new(3).stream(0);
        for _ in 0..64 {
            let (o, _) = bell_project(&pair, &mut rng).unwrap();
            assert_ne!(o, BellOutcome::PsiMinus);
        }
    }

    #[test]
    fn bell_eigenstate_projects_to_itself() {
        let phi_plus = &bell_states()[2];
        let mut rng = crate::rng::SeededStreams::new(9).stream(0);
        let (o, p) = bell_project(phi_plus, &mut rng).unwrap();
        assert_eq!(o, BellOutcome::PhiPlus);
        assert!((p - 1.0).abs() < TOL);
    }

    #[test]
    fn single_qubit_gate_application() {
        // X on qubit 0 of |00> gives |10> (qubit 0 is the MSB).
        let x = Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]);
        let s = StateVector::basis(4, 0).unwrap();
        let t = s.apply_single_qubit(0, &x).unwrap();
        assert!((t.amp(2).re - 1.0).abs() < TOL);
        let t2 = s.apply_single_qubit(1, &x).unwrap();
        assert!((t2.amp(1).re - 1.0).abs() < TOL);
    }

    #[test]
    fn nonphysical_operators_rejected() {
        // Not unit trace.
        let m = Matrix::from_real(2, &[0.9, 0.0, 0.0, 0.2]);
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::TraceNotOne(_))
        ));
        // Not Hermitian.
        let mut m = Matrix::zeros(2);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        m[(0, 1)] = c(0.3);
        m[(1, 0)] = c(-0.3);
        assert!(matches!(
            DensityOperator::new(m),
            Err(Error::NotHermitian(_))
        ));
        // Negative eigenvalue.
        let m = Matrix::from_real(2, &[1.2, 0.6, 0.6, -0.2]);
        assert!(matches!(DensityOperator::new(m), Err(Error::NotPositive(_))));
        // Non-unitary.
        let m = Matrix::from_real(2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(UnitaryOperator::new(m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn dimension_cap_enforced() {
        let q = StateVector::basis(2, 0).unwrap();
        let mut acc = q.clone();
        // 14 qubits is the cap; the 15th tensor factor must fail.
        for _ in 0..13 {
            acc = acc.tensor(&q).unwrap();
        }
        assert_eq!(acc.dim(), 1 << 14);
        assert!(matches!(acc.tensor(&q), Err(Error::DimensionCap(_, _))));
    }
}
