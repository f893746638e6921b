//! The diagonal map `β_t(A) = e^{(tπ/2) K J(A)} · E_{+i}(K)` and suspensions built from it.
//!
//! `J(A) = i(Π_A - Π_{A^c})`. When `K A = A^c` the operator `K J(A)` squares to
//! `-Id`, so the exponential is `cos(tπ/2) + sin(tπ/2) K J(A)`.
//! An imaginary `K` gives the momentum-like variant, a real one the position-like variant.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::clifford::{membership, GeneratorSet, SymmetryClass};
use crate::error::{Error, Result};
use crate::linalg::{anticommutator, eigenspace_pm_i, identity, op_norm, real, CMat, Subspace, IM};
use crate::periodicity::DoubledContext;
use crate::spaces::{check_bundle, AxisKind, SampledBundle, SuspensionPoint};

/// Generators with a distinguished `K` that drives the map.
#[derive(Clone, Debug)]
pub struct BottContext {
    gens: GeneratorSet,
    k_index: usize,
    kind: AxisKind,
    e_plus: Subspace,
    e_minus: Subspace,
    remaining: GeneratorSet,
}

impl BottContext {
    pub fn new(gens: GeneratorSet, k_index: usize) -> Result<Self> {
        let k = gens
            .ops()
            .get(k_index)
            .ok_or_else(|| Error::Invalid(format!("no generator with index {k_index}")))?
            .clone();
        let d = k.nrows();
        let sq = op_norm(&(&k * &k + identity(d)));
        let un = op_norm(&(k.adjoint() * &k - identity(d)));
        if sq > 1e-10 || un > 1e-10 {
            return Err(Error::GeneratorPrecondition(format!(
                "K must be unitary with K^2 = -Id (residuals {sq:.2e}, {un:.2e})"
            )));
        }
        let (keep, flip) = gens.space().bracket_residuals(&k);
        let kind = if flip < 1e-10 {
            AxisKind::Momentum
        } else if keep < 1e-10 {
            AxisKind::Position
        } else {
            return Err(Error::GeneratorPrecondition(
                "K neither preserves nor reverses the bracket".into(),
            ));
        };
        let e_plus = eigenspace_pm_i(&k, 1.0);
        let e_minus = eigenspace_pm_i(&k, -1.0);
        let rest: Vec<CMat> = gens
            .ops()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k_index)
            .map(|(_, j)| j.clone())
            .collect();
        let class = if gens.class().is_complex() {
            if rest.len() % 2 == 0 {
                SymmetryClass::ComplexA
            } else {
                SymmetryClass::ComplexAIII
            }
        } else {
            SymmetryClass::Real((rest.len() % 8) as u8)
        };
        let remaining = GeneratorSet::new(class, gens.space().clone(), rest)?;
        Ok(Self {
            gens,
            k_index,
            kind,
            e_plus,
            e_minus,
            remaining,
        })
    }

    /// The big set of a (1,1) doubling with its imaginary `K`.
    pub fn from_doubled(ctx: &DoubledContext) -> Result<Self> {
        let big = ctx.big().clone();
        let k = big.len() - 1;
        BottContext::new(big, k)
    }

    pub fn gens(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn k(&self) -> &CMat {
        &self.gens.ops()[self.k_index]
    }

    pub fn kind(&self) -> AxisKind {
        self.kind
    }

    pub fn e_plus(&self) -> &Subspace {
        &self.e_plus
    }

    pub fn e_minus(&self) -> &Subspace {
        &self.e_minus
    }

    /// Generators that survive the map (all but `K`).
    pub fn remaining(&self) -> &GeneratorSet {
        &self.remaining
    }

    /// `‖K J(A) + J(A) K‖`, zero exactly when `K A = A^c`.
    pub fn precondition_residual(&self, a: &Subspace) -> f64 {
        op_norm(&anticommutator(self.k(), &j_of(a)))
    }

    fn check(&self, a: &Subspace) -> Result<()> {
        if a.ambient_dim() != self.gens.space().dim() {
            return Err(Error::DimensionMismatch {
                expected: self.gens.space().dim(),
                found: a.ambient_dim(),
            });
        }
        let r = self.precondition_residual(a);
        if r > 1e-8 {
            return Err(Error::Membership(format!(
                "K does not map A to its complement (residual {r:.3e})"
            )));
        }
        Ok(())
    }
}

/// `J(A) = i(Π_A - Π_{A^c})`.
pub fn j_of(a: &Subspace) -> CMat {
    (a.projector() * real(2.0) - identity(a.ambient_dim())) * IM
}

/// `e^{(tπ/2) K J(A)} = cos(tπ/2) + sin(tπ/2) K J(A)`.
pub fn geodesic_unitary(a: &Subspace, t: f64, ctx: &BottContext) -> Result<CMat> {
    ctx.check(a)?;
    Ok(rotation(a, t, ctx))
}

fn rotation(a: &Subspace, t: f64, ctx: &BottContext) -> CMat {
    let (s, c) = (t * FRAC_PI_2).sin_cos();
    identity(a.ambient_dim()) * real(c) + ctx.k() * j_of(a) * real(s)
}

pub fn beta(a: &Subspace, t: f64, ctx: &BottContext) -> Result<Subspace> {
    ctx.check(a)?;
    Ok(ctx.e_plus.map(&rotation(a, t, ctx)))
}

/// `F(p, t) = β_t(A_p)` on the suspended grid; the poles carry `E_{±i}(K)`.
pub fn suspend(
    bundle: &SampledBundle,
    ctx: &BottContext,
    resolution: usize,
) -> Result<SampledBundle> {
    if bundle.gens.space() != ctx.gens.space() || bundle.gens.len() != ctx.gens.len() {
        return Err(Error::Invalid(
            "bundle generators do not match the suspension context".into(),
        ));
    }
    let rep = check_bundle(bundle);
    if !rep.equivariance_failures.is_empty() {
        return Err(Error::Equivariance(format!(
            "{} points violate A(τk) = A(k)^⊥ (max residual {:.3e})",
            rep.equivariance_failures.len(),
            rep.equivariance_residual
        )));
    }
    if !rep.membership_failures.is_empty() {
        return Err(Error::Membership(format!(
            "{} fibers fail the pseudo-symmetry relations (max residual {:.3e})",
            rep.membership_failures.len(),
            rep.membership_residual
        )));
    }
    if let Some(i) = (0..bundle.fibers.len()).find(|&i| ctx.check(&bundle.fibers[i]).is_err()) {
        return Err(Error::Membership(format!(
            "fiber {i} is not compatible with K"
        )));
    }
    let space = bundle.space.suspend(ctx.kind, resolution)?;
    let m = space.t_steps() as f64;
    let fibers: Vec<Subspace> = (0..space.len())
        .into_par_iter()
        .map(|i| match space.locate(i).expect("suspended space") {
            SuspensionPoint::South => ctx.e_plus.clone(),
            SuspensionPoint::North => ctx.e_minus.clone(),
            SuspensionPoint::Interior { parent, step } => {
                ctx.e_plus
                    .map(&rotation(&bundle.fibers[parent], step as f64 / m, ctx))
            }
        })
        .collect();
    SampledBundle::new(
        space,
        ctx.remaining.clone(),
        fibers,
        bundle.base_fiber.clone(),
    )
}

/// `p(β_t(A)) = τ_car(σ)^{-1} · β_t(A)` with the geodesic section `σ = e^{(tπ/2) K J(A)}`.
/// Defined for `s ∈ {2, 6}` (generators `J_1..J_s, I, K`) and `A ∈ R_{s+1,1}`.
pub fn squaring_projection_on_geodesic(
    a: &Subspace,
    t: f64,
    ctx: &BottContext,
) -> Result<Subspace> {
    let s = ctx.gens.len().checked_sub(2).unwrap_or(usize::MAX);
    if ctx.kind != AxisKind::Momentum || !(s == 2 || s == 6) {
        return Err(Error::Unsupported(format!(
            "squaring projection needs a momentum-like context with s in {{2, 6}}, got {} generators",
            ctx.gens.len()
        )));
    }
    if !(0.0..=0.5).contains(&t) {
        return Err(Error::Invalid(format!("t = {t} outside [0, 1/2]")));
    }
    let rep = membership(a, &ctx.gens)?;
    if !rep.in_rs {
        return Err(Error::Membership(format!(
            "input is not in R_(s+1,1) (residuals {:?}, Fermi {:.3e})",
            rep.residuals, rep.fermi_residual
        )));
    }
    let sigma = geodesic_unitary(a, t, ctx)?;
    let tau_sigma = ctx.gens.space().tau_car(&sigma)?;
    let inv = tau_sigma.try_inverse().ok_or(Error::Singular)?;
    Ok(ctx.e_plus.map(&sigma).map(&inv))
}
