//! Nambu-space linear algebra.
//!
//! In the standard layout `W = C^{2n}` is ordered as `(c_1..c_n, c†_1..c†_n)` and
//! the CAR bracket is `{w, w'} = wᵀ S w'` with `S = [[0, Id], [Id, 0]]`. Doubled
//! spaces `C² ⊗ W` carry `Id₂ ⊗ S`, so [`NambuSpace`] keeps `S` general: real,
//! symmetric and squaring to the identity. `γ w = S conj(w)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Frobenius distance of orthogonal projectors below which two subspaces compare equal.
pub const SUBSPACE_TOL: f64 = 1e-9;
/// Eigenvalue gap used to decide numerical rank of projector sums and QR factors.
pub const RANK_TOL: f64 = 1e-8;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const IM: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron_all(factors: &[&CMat]) -> CMat {
    factors
        .iter()
        .fold(CMat::identity(1, 1), |acc, f| acc.kronecker(*f))
}

/// Block-diagonal matrix `diag(a, b)`.
pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = CMat::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

/// Horizontal concatenation of frames with equal row counts.
pub fn hstack(parts: &[&CMat]) -> CMat {
    let rows = parts.first().map_or(0, |p| p.nrows());
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut m = CMat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        m.view_mut((0, at), (rows, p.ncols())).copy_from(*p);
        at += p.ncols();
    }
    m
}

pub fn select_columns(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), idx.len(), |r, k| m[(r, idx[k])])
}

/// Spectral norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub mod pauli {
    //! Two-by-two building blocks.
    use super::{c, CMat};

    pub fn s0() -> CMat {
        CMat::identity(2, 2)
    }
    pub fn s1() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }
    pub fn s2() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }
    pub fn s3() -> CMat {
        CMat::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }
    /// `[[0, 1], [-1, 0]] = iσ2`.
    pub fn eps() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(-1., 0.), c(0., 0.)])
    }
    /// `diag(i, -i)`.
    pub fn diag_i() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0., 1.), c(0., 0.), c(0., 0.), c(0., -1.)])
    }
}

/// Eigenvectors of the Hermitian part of `h` whose eigenvalues pass `keep`,
/// ordered by ascending eigenvalue.
pub fn hermitian_eigvecs(h: &CMat, keep: impl Fn(f64) -> bool) -> CMat {
    let n = h.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let herm = (h + h.adjoint()) * real(0.5);
    let eig = herm.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).filter(|&i| keep(eig.eigenvalues[i])).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    select_columns(&eig.eigenvectors, &idx)
}

/// Eigenvalues of the Hermitian part of `h`, ascending.
pub fn hermitian_eigvals(h: &CMat) -> Vec<f64> {
    if h.nrows() == 0 {
        return Vec::new();
    }
    let herm = (h + h.adjoint()) * real(0.5);
    let mut v: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Orthonormal basis of the column span, via QR with column pivoting.
pub fn orthonormalize(f: &CMat) -> CMat {
    let (rows, cols) = f.shape();
    if cols == 0 || rows == 0 {
        return CMat::zeros(rows, 0);
    }
    let scale = f.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return CMat::zeros(rows, 0);
    }
    let qr = f.clone().col_piv_qr();
    let r = qr.r();
    let k = r.nrows().min(r.ncols());
    let rank = (0..k)
        .take_while(|&i| r[(i, i)].norm() > RANK_TOL * scale)
        .count();
    let q = qr.q();
    q.columns(0, rank).into_owned()
}

/// A complex subspace stored as an orthonormal frame.
#[derive(Clone, Debug)]
pub struct Subspace {
    frame: CMat,
}

impl Subspace {
    /// Span of the columns of `f` (orthonormalized).
    pub fn from_frame(f: &CMat) -> Self {
        Self {
            frame: orthonormalize(f),
        }
    }

    /// Wraps a frame that is already orthonormal.
    pub fn from_orthonormal(frame: CMat) -> Result<Self> {
        let r = frame.ncols();
        let gram = frame.adjoint() * &frame;
        let err = (gram - identity(r)).norm();
        if err > 1e-10 {
            return Err(Error::Invalid(format!(
                "frame is not orthonormal (residual {err:.3e})"
            )));
        }
        Ok(Self { frame })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            frame: CMat::zeros(dim, 0),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            frame: identity(dim),
        }
    }

    /// Span of standard basis vectors.
    pub fn coordinate(dim: usize, idx: &[usize]) -> Self {
        let mut f = CMat::zeros(dim, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            f[(i, k)] = ONE;
        }
        Self { frame: f }
    }

    /// Range of an orthogonal projector.
    pub fn from_projector(p: &CMat) -> Self {
        Self {
            frame: hermitian_eigvecs(p, |e| e > 0.5),
        }
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn into_frame(self) -> CMat {
        self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn projector(&self) -> CMat {
        &self.frame * self.frame.adjoint()
    }

    /// Frobenius norm of the projector difference.
    pub fn distance(&self, other: &Subspace) -> f64 {
        (self.projector() - other.projector()).norm()
    }

    /// Spectral norm of the projector difference (sine of the largest principal angle).
    pub fn spectral_distance(&self, other: &Subspace) -> f64 {
        op_norm(&(self.projector() - other.projector()))
    }

    pub fn approx_eq(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim() && self.distance(other) < tol
    }

    /// Orthogonal complement `A^c`.
    pub fn complement(&self) -> Subspace {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Subspace::full(n);
        }
        Subspace {
            frame: hermitian_eigvecs(&self.projector(), |e| e < 0.5),
        }
    }

    /// Image `g · A`.
    pub fn map(&self, g: &CMat) -> Subspace {
        Subspace::from_frame(&(g * &self.frame))
    }

    /// `A ∩ B`, as the null space of `Π_{A^c} + Π_{B^c}`.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let n = self.ambient_dim();
        let m = (identity(n) - self.projector()) + (identity(n) - other.projector());
        Subspace {
            frame: hermitian_eigvecs(&m, |e| e < RANK_TOL),
        }
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::from_frame(&hstack(&[&self.frame, &other.frame]))
    }

    /// Frame change `F → F·U`; the subspace is unchanged.
    pub fn regauge(&self, u: &CMat) -> Result<Subspace> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Subspace::from_orthonormal(&self.frame * u)
    }
}

/// `E_{±i}(X)` for a normal operator with `X² = -Id`.
pub fn eigenspace_pm_i(x: &CMat, sign: f64) -> Subspace {
    let n = x.nrows();
    let p = (identity(n) - x * c(0.0, sign)) * real(0.5);
    Subspace::from_projector(&p)
}

/// `E_{±1}(L)` for a unitary involution `L`.
pub fn eigenspace_pm_1(l: &CMat, sign: f64) -> Subspace {
    let n = l.nrows();
    let p = (identity(n) + l * real(sign)) * real(0.5);
    Subspace::from_projector(&p)
}

pub fn random_complex_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = random_complex_matrix(dim, dim, rng);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            ONE
        }
    }));
    q * phases
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = random_complex_matrix(dim, dim, rng);
    (&g + g.adjoint()) * real(0.5)
}

pub fn random_subspace<R: Rng + ?Sized>(dim: usize, r: usize, rng: &mut R) -> Subspace {
    Subspace::from_frame(&random_complex_matrix(dim, r, rng))
}

/// Ambient space with CAR bracket, Hermitian product and `γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct NambuSpace {
    n: usize,
    s: CMat,
}

impl NambuSpace {
    /// Standard layout `S = [[0, Id_n], [Id_n, 0]]`.
    pub fn standard(n: usize) -> Self {
        let s = kron(&pauli::s1(), &identity(n));
        Self { n, s }
    }

    /// General bracket matrix; checks `S = Sᵀ`, `S S̄ = Id` and `S S = Id`
    /// (the last one makes `⟨w, w'⟩ = {γw, w'}` hold).
    pub fn with_bracket(s: CMat) -> Result<Self> {
        let (r, cdim) = s.shape();
        if r != cdim || r % 2 != 0 || r == 0 {
            return Err(Error::InvalidBracket(format!("shape {r}x{cdim}")));
        }
        let id = identity(r);
        let sym = (&s - s.transpose()).norm();
        let inv = (&s * s.map(|z| z.conj()) - &id).norm();
        let sq = (&s * &s - &id).norm();
        if sym > 1e-12 || inv > 1e-12 || sq > 1e-12 {
            return Err(Error::InvalidBracket(format!(
                "symmetry {sym:.2e}, S·conj(S) {inv:.2e}, S·S {sq:.2e}"
            )));
        }
        Ok(Self { n: r / 2, s })
    }

    /// `C² ⊗ W` with bracket `Id₂ ⊗ S`.
    pub fn doubled(&self) -> Self {
        Self {
            n: 2 * self.n,
            s: kron(&identity(2), &self.s),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn bracket_matrix(&self) -> &CMat {
        &self.s
    }

    pub fn is_standard(&self) -> bool {
        self.s == NambuSpace::standard(self.n).s
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }

    /// `{w, w'} = wᵀ S w'`.
    pub fn car_bracket(&self, w: &CVec, w2: &CVec) -> Result<C64> {
        self.check_len(w.len())?;
        self.check_len(w2.len())?;
        Ok((w.transpose() * &self.s * w2)[(0, 0)])
    }

    /// `⟨w, w'⟩ = w† w'`.
    pub fn hermitian(&self, w: &CVec, w2: &CVec) -> Result<C64> {
        self.check_len(w.len())?;
        self.check_len(w2.len())?;
        Ok(w.dotc(w2))
    }

    pub fn gamma(&self, w: &CVec) -> Result<CVec> {
        self.check_len(w.len())?;
        Ok(&self.s * w.map(|z| z.conj()))
    }

    /// Column-wise `γ` applied to a frame.
    pub fn gamma_frame(&self, f: &CMat) -> CMat {
        &self.s * f.map(|z| z.conj())
    }

    /// `γ X γ = S X̄ S̄`, the conjugate of a linear operator by `γ`.
    pub fn gamma_conjugate(&self, x: &CMat) -> CMat {
        &self.s * x.map(|z| z.conj()) * self.s.map(|z| z.conj())
    }

    /// `A^⊥ = {w : {w, a} = 0 for all a ∈ A}`, computed as `γ(A^c)`.
    pub fn car_annihilator(&self, a: &Subspace) -> Subspace {
        Subspace::from_frame(&self.gamma_frame(a.complement().frame()))
    }

    /// Transpose with respect to the bracket: `{Xᵀ w, w'} = {w, X w'}`.
    pub fn car_transpose(&self, x: &CMat) -> Result<CMat> {
        self.check_len(x.nrows())?;
        self.check_len(x.ncols())?;
        Ok(self.s.map(|z| z.conj()) * x.transpose() * &self.s)
    }

    /// `τ_car(g) = (g⁻¹)ᵀ`.
    pub fn tau_car(&self, g: &CMat) -> Result<CMat> {
        self.check_len(g.nrows())?;
        let inv = g.clone().try_inverse().ok_or(Error::Singular)?;
        if !inv.iter().all(|z| z.is_finite()) {
            return Err(Error::Singular);
        }
        self.car_transpose(&inv)
    }

    /// Residuals `‖Jᵀ S J − S‖` and `‖Jᵀ S J + S‖` (bracket preserved / reversed).
    pub fn bracket_residuals(&self, j: &CMat) -> (f64, f64) {
        let m = j.transpose() * &self.s * j;
        ((&m - &self.s).norm(), (&m + &self.s).norm())
    }
}

/// Real / imaginary type and square of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorFlags {
    /// `τ_car(J) = J` (bracket preserved); otherwise the bracket is reversed.
    pub is_real_car: bool,
    pub squares_to: i8,
}

impl OperatorFlags {
    pub fn detect(space: &NambuSpace, j: &CMat) -> Self {
        let n = j.nrows();
        let sq = j * j;
        let minus = (&sq + identity(n)).norm();
        let plus = (&sq - identity(n)).norm();
        let (keep, flip) = space.bracket_residuals(j);
        Self {
            is_real_car: keep <= flip,
            squares_to: if minus <= plus { -1 } else { 1 },
        }
    }
}

/// The modified bracket `{w, w'}~ = {u0 w, u0 w'}` with `u0 = (Id - IK)/√2`.
#[derive(Clone, Debug)]
pub struct ModifiedCar {
    space: NambuSpace,
    u0: CMat,
    ik: CMat,
    ik_inv: CMat,
}

impl ModifiedCar {
    /// `i_op` must be a real generator and `k_op` an imaginary one; both unitary,
    /// squaring to `-Id` and anti-commuting.
    pub fn new(space: &NambuSpace, i_op: &CMat, k_op: &CMat) -> Result<Self> {
        let n = space.dim();
        for (name, x) in [("I", i_op), ("K", k_op)] {
            if x.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.nrows(),
                });
            }
            let sq = (x * x + identity(n)).norm();
            let un = (x.adjoint() * x - identity(n)).norm();
            if sq > 1e-10 || un > 1e-10 {
                return Err(Error::GeneratorPrecondition(format!(
                    "{name}: square residual {sq:.2e}, unitarity residual {un:.2e}"
                )));
            }
        }
        let ac = anticommutator(i_op, k_op).norm();
        if ac > 1e-10 {
            return Err(Error::GeneratorPrecondition(format!(
                "I and K do not anti-commute (residual {ac:.2e})"
            )));
        }
        let (i_keep, _) = space.bracket_residuals(i_op);
        let (_, k_flip) = space.bracket_residuals(k_op);
        if i_keep > 1e-10 {
            return Err(Error::GeneratorPrecondition("I is not real".into()));
        }
        if k_flip > 1e-10 {
            return Err(Error::GeneratorPrecondition("K is not imaginary".into()));
        }
        let ik = i_op * k_op;
        let ik_inv = ik.adjoint();
        let u0 = (identity(n) - &ik) * real(std::f64::consts::FRAC_1_SQRT_2);
        Ok(Self {
            space: space.clone(),
            u0,
            ik,
            ik_inv,
        })
    }

    pub fn u0(&self) -> &CMat {
        &self.u0
    }

    pub fn bracket(&self, w: &CVec, w2: &CVec) -> Result<C64> {
        self.space.car_bracket(&(&self.u0 * w), &(&self.u0 * w2))
    }

    /// Matrix `u0ᵀ S u0` of the modified bracket.
    pub fn bracket_matrix(&self) -> CMat {
        self.u0.transpose() * self.space.bracket_matrix() * &self.u0
    }

    /// `τ̃_car(X) = IK τ_car(X) (IK)⁻¹`.
    pub fn tilde_tau_car(&self, x: &CMat) -> Result<CMat> {
        Ok(&self.ik * self.space.tau_car(x)? * &self.ik_inv)
    }

    /// `τ̃(A) = IK A^⊥`.
    pub fn tilde_tau(&self, a: &Subspace) -> Subspace {
        self.space.car_annihilator(a).map(&self.ik)
    }
}

pub fn modified_car(space: &NambuSpace, i_op: &CMat, k_op: &CMat) -> Result<ModifiedCar> {
    ModifiedCar::new(space, i_op, k_op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(dim: usize, i: usize) -> CVec {
        let mut v = CVec::zeros(dim);
        v[i] = ONE;
        v
    }

    #[test]
    fn bracket_of_c_and_cdag() {
        let sp = NambuSpace::standard(2);
        let c1 = basis(4, 0);
        let cd1 = basis(4, 2);
        assert_eq!(sp.car_bracket(&c1, &cd1).unwrap(), ONE);
        assert_eq!(sp.car_bracket(&c1, &c1).unwrap(), ZERO);
        assert!(sp.car_bracket(&c1, &basis(3, 0)).is_err());
    }

    #[test]
    fn gamma_swaps_and_conjugates() {
        let sp = NambuSpace::standard(2);
        let g = sp.gamma(&basis(4, 0)).unwrap();
        assert_eq!(g, basis(4, 2));
        let g = sp.gamma(&(basis(4, 0) * IM)).unwrap();
        assert_eq!(g, basis(4, 2) * (-IM));
    }

    #[test]
    fn complement_and_annihilator_for_one_mode() {
        let sp = NambuSpace::standard(1);
        let a = Subspace::coordinate(2, &[0]);
        assert!(a
            .complement()
            .approx_eq(&Subspace::coordinate(2, &[1]), 1e-12));
        assert!(sp.car_annihilator(&a).approx_eq(&a, 1e-12));
        assert_eq!(Subspace::full(4).complement().dim(), 0);
        assert_eq!(Subspace::zero(4).complement().dim(), 4);
    }

    #[test]
    fn modified_bracket_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = NambuSpace::standard(1).doubled();
        let i_op = kron(&pauli::eps(), &identity(2));
        let k_op = kron(&pauli::diag_i(), &identity(2));
        let m = modified_car(&sp, &i_op, &k_op).unwrap();
        assert!((m.tilde_tau_car(&k_op).unwrap() - &k_op).norm() < 1e-12);
        assert!((m.tilde_tau_car(&i_op).unwrap() + &i_op).norm() < 1e-12);
        let ik_inv = (&i_op * &k_op).try_inverse().unwrap();
        for _ in 0..10 {
            let w = random_complex_matrix(4, 1, &mut rng).column(0).into_owned();
            let w2 = random_complex_matrix(4, 1, &mut rng).column(0).into_owned();
            let lhs = m.bracket(&w, &w2).unwrap();
            let rhs = sp.car_bracket(&(&ik_inv * &w), &w2).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!(modified_car(&sp, &k_op, &i_op).is_err());
    }

    #[test]
    fn flags_detect_real_and_imaginary() {
        let sp = NambuSpace::standard(1).doubled();
        let f = OperatorFlags::detect(&sp, &kron(&pauli::eps(), &identity(2)));
        assert!(f.is_real_car && f.squares_to == -1);
        let f = OperatorFlags::detect(&sp, &kron(&pauli::diag_i(), &identity(2)));
        assert!(!f.is_real_car && f.squares_to == -1);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(NambuSpace::with_bracket(identity(3)).is_err());
        assert!(NambuSpace::with_bracket(identity(4) * real(2.0)).is_err());
        assert!(NambuSpace::with_bracket(identity(4)).is_ok());
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_complex_matrix(6, 2, &mut rng);
        let g = hstack(&[&f, &(&f * c(0.3, -1.0))]);
        let s = Subspace::from_frame(&g);
        assert_eq!(s.dim(), 2);
        assert!(s.approx_eq(&Subspace::from_frame(&f), 1e-10));
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let a = Subspace::coordinate(5, &[0, 1, 2]);
        let b = Subspace::coordinate(5, &[2, 3]);
        let x = a.intersection(&b);
        assert!(x.approx_eq(&Subspace::coordinate(5, &[2]), 1e-12));
    }
}
