//! The (1,1) doubling `C_s(n) → C_{s+2}(2n)`, its inverse, and the `s ≥ 4` reduction.
//!
//! On `C² ⊗ W` the canonical extension of `j_1..j_s` is `J_l = σx ⊗ j_l` together
//! with the real generator `I = ε ⊗ Id` and the imaginary one `K = diag(i, -i) ⊗ Id`.
//! Then `L = iIK = σx ⊗ Id` and `E_{+i}(K)` is the upper copy of `W`.

use nalgebra::DMatrix;

use crate::clifford::{membership, GeneratorSet, QuaternionicData, SymmetryClass};
use crate::error::{Error, Result};
use crate::linalg::{
    c, eigenspace_pm_1, hstack, identity, kron, pauli, real, CMat, Subspace, IM, SUBSPACE_TOL,
};

fn shifted(class: SymmetryClass) -> SymmetryClass {
    match class {
        SymmetryClass::Real(s) => SymmetryClass::Real((s + 2) % 8),
        other => other,
    }
}

/// Frame `(1, 1)ᵀ/√2` or `(1, -1)ᵀ/√2`.
fn half(sign: f64) -> CMat {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_column_slice(2, 1, &[real(r), real(sign * r)])
}

/// Upper-copy embedding `W → C² ⊗ W`.
fn upper(dim: usize) -> CMat {
    kron(
        &DMatrix::from_column_slice(2, 1, &[real(1.0), real(0.0)]),
        &identity(dim),
    )
}

/// `f(a) = span{(1,1) ⊗ a, (1,-1) ⊗ a^c}`.
pub fn doubling_map(a: &Subspace) -> Subspace {
    let plus = kron(&half(1.0), a.frame());
    let minus = kron(&half(-1.0), a.complement().frame());
    Subspace::from_frame(&hstack(&[&plus, &minus]))
}

/// Big generator set with its distinguished real `I`, imaginary `K` and `L = iIK`.
#[derive(Clone, Debug)]
pub struct DoubledContext {
    small: GeneratorSet,
    big: GeneratorSet,
    i_op: CMat,
    k_op: CMat,
    l_op: CMat,
    pi: CMat,
}

impl DoubledContext {
    /// `J_l = σx ⊗ j_l`, then `I = ε ⊗ Id`, `K = diag(i,-i) ⊗ Id`.
    pub fn canonical(small: &GeneratorSet) -> Result<Self> {
        let d = small.space().dim();
        let id = identity(d);
        let mut ops: Vec<CMat> = small.ops().iter().map(|j| kron(&pauli::s1(), j)).collect();
        let i_op = kron(&pauli::eps(), &id);
        let k_op = kron(&pauli::diag_i(), &id);
        ops.push(i_op.clone());
        ops.push(k_op.clone());
        let big = GeneratorSet::new(shifted(small.class()), small.space().doubled(), ops)?;
        let l_op = &i_op * &k_op * IM;
        let pi = (identity(2 * d) - &k_op * IM) * real(0.5);
        Ok(Self {
            small: small.clone(),
            big,
            i_op,
            k_op,
            l_op,
            pi,
        })
    }

    pub fn small(&self) -> &GeneratorSet {
        &self.small
    }

    pub fn big(&self) -> &GeneratorSet {
        &self.big
    }

    pub fn i_op(&self) -> &CMat {
        &self.i_op
    }

    pub fn k_op(&self) -> &CMat {
        &self.k_op
    }

    pub fn l_op(&self) -> &CMat {
        &self.l_op
    }

    /// Projector onto `E_{+i}(K)`.
    pub fn pi(&self) -> &CMat {
        &self.pi
    }

    /// `j_l = L J_l |_W` for the first `s` big generators.
    pub fn restricted_generators(&self) -> Vec<CMat> {
        let d = self.small.space().dim();
        let v = upper(d);
        self.big.ops()[..self.small.len()]
            .iter()
            .map(|j| v.adjoint() * &self.l_op * j * &v)
            .collect()
    }
}

/// `f(a)` after checking `a ∈ C_s(n)` for the small set.
pub fn double_11(a: &Subspace, ctx: &DoubledContext) -> Result<Subspace> {
    let rep = membership(a, ctx.small())?;
    if !rep.in_cs {
        return Err(Error::Membership(format!(
            "input is not in C_s (residuals {:?})",
            rep.residuals
        )));
    }
    Ok(doubling_map(a))
}

/// `a = Π(A ∩ E_{+1}(L))`, read in the upper copy of `W`.
pub fn reduce_11(big_a: &Subspace, ctx: &DoubledContext) -> Result<Subspace> {
    let rep = membership(big_a, ctx.big())?;
    if !rep.in_cs {
        return Err(Error::Membership(format!(
            "input is not in C_(s+2) (residuals {:?})",
            rep.residuals
        )));
    }
    reduce_through(big_a, ctx.l_op(), &ctx.pi, ctx.small().space().dim())
}

fn reduce_through(big_a: &Subspace, l_op: &CMat, pi: &CMat, small_dim: usize) -> Result<Subspace> {
    // A must split along the eigenspaces of L; the split need not be balanced
    // when there are no generators besides I and K
    let x = big_a.intersection(&eigenspace_pm_1(l_op, 1.0));
    let y = big_a.intersection(&eigenspace_pm_1(l_op, -1.0));
    if x.dim() + y.dim() != big_a.dim() {
        return Err(Error::Membership(format!(
            "A is not L-invariant: A ∩ E_±1(L) have dimensions {} + {}, A has {}",
            x.dim(),
            y.dim(),
            big_a.dim()
        )));
    }
    let v = upper(small_dim);
    Ok(Subspace::from_frame(&(v.adjoint() * pi * x.frame())))
}

/// `A ∩ E_{+1}(L)`, `A ∩ E_{-1}(L)`, `A^c ∩ E_{+1}(L)`, `A^c ∩ E_{-1}(L)`.
pub fn four_subspaces(big_a: &Subspace, ctx: &DoubledContext) -> [Subspace; 4] {
    let ep = eigenspace_pm_1(ctx.l_op(), 1.0);
    let em = eigenspace_pm_1(ctx.l_op(), -1.0);
    let ac = big_a.complement();
    [
        big_a.intersection(&ep),
        big_a.intersection(&em),
        ac.intersection(&ep),
        ac.intersection(&em),
    ]
}

/// `f(a)` for half-size data: requires `j_1 a = j_2 a = a` and `j_m a = a^c`.
pub fn double_s4(a: &Subspace, data: &QuaternionicData) -> Result<Subspace> {
    if a.ambient_dim() != data.space.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.space.dim(),
            found: a.ambient_dim(),
        });
    }
    let ac = a.complement();
    let mut failures = Vec::new();
    for (l, j) in data.true_syms.iter().enumerate() {
        let r = a.map(j).distance(a);
        if r > SUBSPACE_TOL {
            failures.push(format!("j_{} a != a (residual {r:.3e})", l + 1));
        }
    }
    for (m, j) in data.pseudo.iter().enumerate() {
        let r = a.map(j).distance(&ac);
        if r > SUBSPACE_TOL {
            failures.push(format!("j_{} a != a^c (residual {r:.3e})", m + 5));
        }
    }
    if !failures.is_empty() {
        return Err(Error::Membership(failures.join("; ")));
    }
    Ok(doubling_map(a))
}

/// Output of [`reduce_s4`]: the reduced plane and the restricted generators `j_1..j_s`.
#[derive(Clone, Debug)]
pub struct ReducedS4 {
    pub a: Subspace,
    pub restricted: Vec<CMat>,
}

/// With `K = iJ_1J_2J_3`, `I = J_4` and `L = iIK`: `a = Π(A ∩ E_{+1}(L))` on
/// `W = E_{+i}(K)`, `j_l = J_l|_W` for `l ≤ 3` and `j_l = L J_l|_W` for `l ≥ 4`.
pub fn reduce_s4(big_a: &Subspace, big: &GeneratorSet) -> Result<ReducedS4> {
    if big.len() < 4 {
        return Err(Error::Unsupported(format!(
            "reduction needs at least four generators, got {}",
            big.len()
        )));
    }
    let rep = membership(big_a, big)?;
    if !rep.in_cs {
        return Err(Error::Membership(format!(
            "input is not in C_s (residuals {:?})",
            rep.residuals
        )));
    }
    let ops = big.ops();
    let d = big.space().dim();
    let k_op = &ops[0] * &ops[1] * &ops[2] * IM;
    let i_op = &ops[3];
    let l_op = i_op * &k_op * IM;
    let pi = (identity(d) - &k_op * IM) * real(0.5);
    let small_dim = d / 2;
    let v = upper(small_dim);
    if (&pi * &v - &v).norm() > 1e-10 {
        return Err(Error::Unsupported(
            "E_+i(K) is not the upper copy of W for this generator layout".into(),
        ));
    }
    let a = reduce_through(big_a, &l_op, &pi, small_dim)?;
    let restricted = ops
        .iter()
        .enumerate()
        .map(|(l, j)| {
            if l < 3 {
                v.adjoint() * j * &v
            } else {
                v.adjoint() * &l_op * j * &v
            }
        })
        .collect();
    Ok(ReducedS4 { a, restricted })
}

/// `span{cos θ c↑ + sin θ c†↓, cos θ c↓ - sin θ c†↑}` in the one-orbital spinful space.
pub fn spin_singlet_lagrangian(theta: f64) -> Subspace {
    let (s, co) = theta.sin_cos();
    let mut f = CMat::zeros(4, 2);
    f[(0, 0)] = c(co, 0.0);
    f[(3, 0)] = c(s, 0.0);
    f[(1, 1)] = c(co, 0.0);
    f[(2, 1)] = c(-s, 0.0);
    Subspace::from_frame(&f)
}
