//! The two worked constructions: a one-dimensional class-DIII superconductor from
//! class-D data over `S^0`, and a two-dimensional class-AII insulator from that.
//!
//! Index conventions. The 4-dimensional space is `BdG ⊗ spin` with
//! `c↑ = 0, c↓ = 1, c†↑ = 2, c†↓ = 3`. The 8-dimensional space is
//! `BdG ⊗ spin ⊗ band` with index `4b + 2σ + o` and bands `p = 0`, `h = 1`.

use nalgebra::DMatrix;

use crate::bott::{suspend, BottContext};
use crate::clifford::{GeneratorSet, SymmetryClass};
use crate::error::{Error, Result};
use crate::linalg::{c, hstack, kron, kron_all, pauli, real, CMat, NambuSpace, Subspace, IM};
use crate::periodicity::{doubling_map, reduce_11, DoubledContext};
use crate::spaces::{MomentumSpace, SampledBundle};

pub const KITAEV_DIII: &str = "kitaev_d_to_diii";
pub const QSH: &str = "diii_to_aii_qsh";

#[derive(Clone, Debug)]
pub struct ExampleBundle {
    pub label: &'static str,
    pub bundle: SampledBundle,
    /// Closed-form frame at each grid point.
    pub closed_form: Vec<CMat>,
}

impl ExampleBundle {
    /// Largest projector distance between generated and closed-form fibers.
    pub fn closed_form_residual(&self) -> f64 {
        self.bundle
            .fibers
            .iter()
            .zip(&self.closed_form)
            .map(|(f, cf)| f.distance(&Subspace::from_frame(cf)))
            .fold(0.0, f64::max)
    }
}

/// `a ↦ a ⊗ C²_spin`, embedding `n = 1` data into the spinful space.
pub fn spin_embed(a: &Subspace) -> Subspace {
    Subspace::from_frame(&kron(a.frame(), &pauli::s0()))
}

/// Angle of a point on a 1-sphere; the base point sits at `π`.
pub fn circle_angle(space: &MomentumSpace, i: usize) -> f64 {
    space.angle(i)
}

/// `(k0, k1)` of a point on a 2-sphere with embedding `(cos k0 cos k1, cos k0 sin k1, sin k0)`.
pub fn sphere_angles(space: &MomentumSpace, i: usize) -> (f64, f64) {
    let x = &space.points()[i];
    let (a, b, z) = (x[0], x[1], x[2]);
    let k0 = z.atan2(a.hypot(b));
    let k1 = if a.hypot(b) < 1e-14 { 0.0 } else { b.atan2(a) };
    (k0, k1)
}

/// `I = σ1 ⊗ iσ2`, `K(α) = i σ1 ⊗ (σ1 cos α + σ3 sin α)`.
pub fn kitaev_diii_generators(alpha: f64) -> Result<GeneratorSet> {
    let i_op = kron(&pauli::s1(), &pauli::eps());
    let spin = pauli::s1() * real(alpha.cos()) + pauli::s3() * real(alpha.sin());
    let k_op = kron(&pauli::s1(), &spin) * IM;
    GeneratorSet::new(
        SymmetryClass::Real(0),
        NambuSpace::standard(2),
        vec![i_op, k_op],
    )
}

/// Class-D data over `S^0`: `span{c†↑, c†↓}` at `+1`, the vacuum `span{c↑, c↓}` at the base point.
pub fn kitaev_seed(alpha: f64) -> Result<SampledBundle> {
    let occupied = spin_embed(&Subspace::coordinate(2, &[1]));
    let empty = spin_embed(&Subspace::coordinate(2, &[0]));
    SampledBundle::new(
        MomentumSpace::s0(),
        kitaev_diii_generators(alpha)?,
        vec![occupied, empty.clone()],
        empty,
    )
}

/// `span{c†_{-k,σ} cos(k/2) - c_{k,-σ} sin(k/2)}`, columns `σ = ↑, ↓`.
pub fn kitaev_diii_closed_form(k: f64) -> CMat {
    let (s, co) = (k / 2.0).sin_cos();
    let mut f = CMat::zeros(4, 2);
    for sigma in 0..2 {
        f[(2 + sigma, sigma)] = real(co);
        f[(1 - sigma, sigma)] = real(-s);
    }
    f
}

fn kitaev_bundle(resolution: usize, alpha: f64) -> Result<SampledBundle> {
    let seed = kitaev_seed(alpha)?;
    let ctx = BottContext::new(seed.gens.clone(), 1)?;
    suspend(&seed, &ctx, resolution)
}

/// Momentum-like suspension of [`kitaev_seed`] over `S^1`.
pub fn build_d_to_diii(resolution: usize) -> Result<ExampleBundle> {
    let bundle = kitaev_bundle(resolution, 0.0)?;
    let closed_form = (0..bundle.space.len())
        .map(|i| kitaev_diii_closed_form(circle_angle(&bundle.space, i)))
        .collect();
    Ok(ExampleBundle {
        label: KITAEV_DIII,
        bundle,
        closed_form,
    })
}

/// As [`build_d_to_diii`] with the rotated generator `K(α)`.
pub fn build_d_to_diii_twisted(resolution: usize, alpha: f64) -> Result<SampledBundle> {
    kitaev_bundle(resolution, alpha)
}

/// Pair amplitude `M` of a 4-dimensional fiber: the fiber is spanned by
/// `c_{k,σ} - Σ M_{σσ'} c†_{-k,σ'}`, so the ground state is `exp(Σ M_{σσ'} c†_{kσ} c†_{-kσ'})|vac⟩`.
pub fn pair_amplitude(fiber: &Subspace) -> Option<CMat> {
    let f = fiber.frame();
    let u = f.rows(0, 2).into_owned();
    let v = f.rows(2, 2).into_owned();
    let uinv = u.try_inverse()?;
    Some(-(v * uinv).transpose())
}

/// Fixed unitary taking the (1,1)-doubled class-DIII data to the charge-conserving form:
/// `U (σx⊗j, ε⊗Id, diag(i,-i)⊗Id) U† = (J_1, I, K)`.
pub fn particle_hole_unitary() -> CMat {
    #[rustfmt::skip]
    let rows: [[(f64, f64); 8]; 8] = [
        [(0.,0.),(0.,1.),(-1.,0.),(0.,0.),(0.,0.),(0.,-1.),(-1.,0.),(0.,0.)],
        [(0.,-1.),(0.,0.),(0.,0.),(-1.,0.),(0.,-1.),(0.,0.),(0.,0.),(1.,0.)],
        [(0.,-1.),(0.,0.),(0.,0.),(-1.,0.),(0.,1.),(0.,0.),(0.,0.),(-1.,0.)],
        [(0.,0.),(0.,1.),(-1.,0.),(0.,0.),(0.,0.),(0.,1.),(1.,0.),(0.,0.)],
        [(-1.,0.),(0.,0.),(0.,0.),(0.,-1.),(-1.,0.),(0.,0.),(0.,0.),(0.,1.)],
        [(0.,0.),(-1.,0.),(0.,1.),(0.,0.),(0.,0.),(1.,0.),(0.,1.),(0.,0.)],
        [(0.,0.),(-1.,0.),(0.,1.),(0.,0.),(0.,0.),(-1.,0.),(0.,-1.),(0.,0.)],
        [(-1.,0.),(0.,0.),(0.,0.),(0.,-1.),(1.,0.),(0.,0.),(0.,0.),(0.,-1.)],
    ];
    DMatrix::from_fn(8, 8, |r, k| c(rows[r][k].0 / 2.0, rows[r][k].1 / 2.0))
}

/// `J_1 = σ1⊗iσ2⊗Id`, `I = σ2⊗iσ2⊗Id`, `K = i Id⊗σ1⊗σ1` on the 8-dimensional space.
pub fn qsh_generators() -> Result<GeneratorSet> {
    let id = pauli::s0();
    let j1 = kron_all(&[&pauli::s1(), &pauli::eps(), &id]);
    let i_op = kron_all(&[&pauli::s2(), &pauli::eps(), &id]);
    let k_op = kron_all(&[&id, &pauli::s1(), &pauli::s1()]) * IM;
    GeneratorSet::new(
        SymmetryClass::Real(1),
        NambuSpace::standard(4),
        vec![j1, i_op, k_op],
    )
}

/// The class-DIII bundle after (1,1) doubling and the fixed change of basis, over `S^1`.
pub fn doubled_kitaev_diii(resolution: usize) -> Result<SampledBundle> {
    let diii = build_d_to_diii(resolution)?.bundle;
    let u = particle_hole_unitary();
    let fibers = diii
        .fibers
        .iter()
        .map(|a| doubling_map(a).map(&u))
        .collect();
    let base = doubling_map(&diii.base_fiber).map(&u);
    SampledBundle::new(diii.space, qsh_generators()?, fibers, base)
}

/// The (1,1) context whose big generators `U` carries to [`qsh_generators`].
pub fn kitaev_doubled_context() -> Result<DoubledContext> {
    let small = kitaev_diii_generators(0.0)?;
    let diii = GeneratorSet::new(
        SymmetryClass::Real(1),
        small.space().clone(),
        vec![small.ops()[0].clone()],
    )?;
    DoubledContext::canonical(&diii)
}

/// Inverse of [`doubled_kitaev_diii`]: undo the change of basis and reduce the (1,1) doubling.
pub fn undouble_kitaev_diii(b: &SampledBundle) -> Result<SampledBundle> {
    let qsh = qsh_generators()?;
    let matches = b.gens.space() == qsh.space()
        && b.gens.len() >= 2
        && b.gens.ops()[..2]
            .iter()
            .zip(qsh.ops())
            .all(|(x, y)| (x - y).norm() < 1e-12);
    if !matches {
        return Err(Error::Unsupported(
            "bundle is not in the doubled charge-conserving layout".into(),
        ));
    }
    let ctx = kitaev_doubled_context()?;
    let ud = particle_hole_unitary().adjoint();
    let undo = |f: &Subspace| reduce_11(&f.map(&ud), &ctx);
    let fibers = b.fibers.iter().map(undo).collect::<Result<Vec<_>>>()?;
    let base = undo(&b.base_fiber)?;
    SampledBundle::new(b.space.clone(), ctx.small().clone(), fibers, base)
}

fn e8(b: usize, sigma: usize, o: usize) -> usize {
    4 * b + 2 * sigma + o
}

/// `A_{k1} = span{a_{↑,+}, a_{↓,-}, b†_{-k1,↓,-}, b†_{-k1,↑,+}}`.
pub fn qsh_line_closed_form(k1: f64) -> CMat {
    qsh_closed_form(0.0, k1)
}

/// `J(A_{k1}) = i σ3 ⊗ (Id ⊗ σ3 cos k1 + σ2 ⊗ σ1 sin k1)`.
pub fn qsh_j_closed_form(k1: f64) -> CMat {
    let inner = kron(&pauli::s0(), &pauli::s3()) * real(k1.cos())
        + kron(&pauli::s2(), &pauli::s1()) * real(k1.sin());
    kron(&pauli::s3(), &inner) * IM
}

/// Spanning operators of `A_k`, `k = (k0, k1)`: annihilators `ã_{k,σ,ε}` and creators
/// `b̃†_{-k,σ,ε}`. The `sin(k0/2)` term of `b̃†` enters with a minus sign, which is
/// the sign compatible with `A_{τk} = A_k^⊥`.
pub fn qsh_closed_form(k0: f64, k1: f64) -> CMat {
    let (s1, c1) = (k1 / 2.0).sin_cos();
    let (s0, c0) = (k0 / 2.0).sin_cos();
    let mut cols = Vec::with_capacity(4);
    for (sigma, eps) in [(0usize, 1.0f64), (1, -1.0)] {
        let mut v = CMat::zeros(8, 1);
        v[(e8(0, sigma, 0), 0)] += real(c1 * c0) - IM * (eps * s1 * s0);
        v[(e8(0, 1 - sigma, 1), 0)] += IM * (eps * s1 * c0) - real(c1 * s0);
        cols.push(v);
    }
    for (sigma, eps) in [(1usize, -1.0f64), (0, 1.0)] {
        let mut v = CMat::zeros(8, 1);
        v[(e8(1, sigma, 1), 0)] += real(c1 * c0) + IM * (eps * s1 * s0);
        v[(e8(1, 1 - sigma, 0), 0)] += -IM * (eps * s1 * c0) - real(c1 * s0);
        cols.push(v);
    }
    let refs: Vec<&CMat> = cols.iter().collect();
    hstack(&refs)
}

/// Context for the second suspension: `K = i Id⊗σ1⊗σ1` is the third generator.
pub fn qsh_context() -> Result<BottContext> {
    BottContext::new(qsh_generators()?, 2)
}

/// Momentum-like suspension of [`doubled_kitaev_diii`] over `S^2`.
pub fn build_diii_to_aii(resolution: usize) -> Result<ExampleBundle> {
    let line = doubled_kitaev_diii(resolution)?;
    let bundle = suspend(&line, &qsh_context()?, resolution)?;
    let closed_form = (0..bundle.space.len())
        .map(|i| {
            let (k0, k1) = sphere_angles(&bundle.space, i);
            qsh_closed_form(k0, k1)
        })
        .collect();
    Ok(ExampleBundle {
        label: QSH,
        bundle,
        closed_form,
    })
}
