//! Topological invariants of sampled bundles.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{random_unitary, CMat, Subspace, C64, ONE, ZERO};
use crate::spaces::{MomentumSpace, SampledBundle};

/// Integer results must be this close to an integer.
pub const INTEGER_TOL: f64 = 0.05;
/// Largest phase step between neighbouring loop samples.
pub const MAX_PHASE_STEP: f64 = 0.9 * PI;
/// `|Pf|` below this fraction of the grid maximum counts as a zero.
pub const PFAFFIAN_ZERO_REL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InvariantKind {
    Winding,
    Chern,
    KaneMeleZ2,
    ClassD1dZ2,
    PfaffianZeroLocus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantValue {
    Integer(i64),
    /// `true` for the nontrivial element.
    Z2(bool),
    Points(Vec<usize>),
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub kind: InvariantKind,
    pub value: InvariantValue,
    pub diagnostics: BTreeMap<String, f64>,
    /// Grid points singled out by the computation (e.g. Pfaffian zeros).
    pub points: Vec<usize>,
}

impl InvariantResult {
    fn new(kind: InvariantKind, value: InvariantValue) -> Self {
        Self {
            kind,
            value,
            diagnostics: BTreeMap::new(),
            points: Vec::new(),
        }
    }

    fn diag(mut self, key: &str, v: f64) -> Self {
        self.diagnostics.insert(key.to_string(), v);
        self
    }

    pub fn integer(&self) -> Option<i64> {
        match self.value {
            InvariantValue::Integer(v) => Some(v),
            _ => None,
        }
    }

    pub fn z2(&self) -> Option<bool> {
        match self.value {
            InvariantValue::Z2(v) => Some(v),
            _ => None,
        }
    }
}

fn to_integer(raw: f64) -> Result<i64> {
    let r = raw.round();
    if (raw - r).abs() > INTEGER_TOL {
        return Err(Error::Invariant(format!(
            "estimate {raw:.4} is not within {INTEGER_TOL} of an integer"
        )));
    }
    Ok(r as i64)
}

/// Pfaffian of a complex skew-symmetric matrix, by `LTLᵀ` reduction with pivoting.
pub fn pfaffian(a: &CMat) -> Result<C64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let scale = a.norm().max(1.0);
    if (a + a.transpose()).norm() > 1e-10 * scale {
        return Err(Error::Invalid("matrix is not skew-symmetric".into()));
    }
    if n % 2 == 1 {
        return Ok(ZERO);
    }
    let mut m = a.clone();
    let mut pf = ONE;
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let kp = (k + 1..n)
            .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
            .unwrap_or(k + 1);
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = m[(k, k + 1)];
        if piv == ZERO {
            return Ok(ZERO);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<C64> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (a_i, i) in (k + 2..n).enumerate() {
                for (b_j, j) in (k + 2..n).enumerate() {
                    m[(i, j)] += tau[a_i] * col[b_j] - col[a_i] * tau[b_j];
                }
            }
        }
    }
    Ok(pf)
}

/// Winding of a closed loop of nonzero complex numbers: total continuous phase increment / 2π.
pub fn winding_from_phases(values: &[C64]) -> Result<InvariantResult> {
    if values.len() < 3 {
        return Err(Error::Invariant("loop needs at least three samples".into()));
    }
    let mut total = 0.0;
    let mut max_step = 0.0f64;
    for i in 0..values.len() {
        let (a, b) = (values[i], values[(i + 1) % values.len()]);
        if a.norm() < 1e-12 || b.norm() < 1e-12 {
            return Err(Error::Invariant(format!(
                "loop value vanishes near sample {i}"
            )));
        }
        let step = (b / a).arg();
        if step.abs() > MAX_PHASE_STEP {
            return Err(Error::Invariant(format!(
                "phase jump {step:.3} between samples {i} and {} (resolution too coarse)",
                (i + 1) % values.len()
            )));
        }
        max_step = max_step.max(step.abs());
        total += step;
    }
    let raw = total / (2.0 * PI);
    Ok(InvariantResult::new(
        InvariantKind::Winding,
        InvariantValue::Integer(to_integer(raw)?),
    )
    .diag("raw", raw)
    .diag("max_phase_step", max_step))
}

/// Winding of `det U(k)` around a closed loop of square matrices.
pub fn winding_number(loop_: &[CMat]) -> Result<InvariantResult> {
    let dets: Vec<C64> = loop_.iter().map(|u| u.determinant()).collect();
    winding_from_phases(&dets)
}

/// For a class-AIII fiber `A = {(x, Ux)}`, the unitary `U = Y X⁻¹` read off a frame `(X; Y)`.
pub fn aiii_unitary(fiber: &Subspace) -> Result<CMat> {
    let d = fiber.ambient_dim();
    let n = d / 2;
    if fiber.dim() != n {
        return Err(Error::Invariant(format!(
            "fiber has dimension {}, expected {n}",
            fiber.dim()
        )));
    }
    let f = fiber.frame();
    let x = f.rows(0, n).into_owned();
    let y = f.rows(n, n).into_owned();
    let xinv = x.try_inverse().ok_or(Error::Singular)?;
    Ok(y * xinv)
}

/// Winding number of a class-AIII bundle over a 1-sphere.
pub fn winding_of_bundle(b: &SampledBundle) -> Result<InvariantResult> {
    let order = b.space.cycle_order()?;
    let loop_: Vec<CMat> = order
        .iter()
        .map(|&i| aiii_unitary(&b.fibers[i]))
        .collect::<Result<_>>()?;
    winding_number(&loop_)
}

/// Coefficients `(u, v)` of a line `span(u c + v c†)`.
fn line_ratio(f: &Subspace) -> (C64, C64) {
    let fr = f.frame();
    (fr[(0, 0)], fr[(1, 0)])
}

/// Class-D, `n = 1` invariant on a circle: each τ-fixed fiber is either `span(c)` (0-type,
/// `z = 0`) or `span(c†)` (∞-type); nontrivial when the two fixed points differ.
pub fn class_d_1d_invariant(b: &SampledBundle) -> Result<InvariantResult> {
    if b.space.dim() != 1 || b.space.dk() != 1 {
        return Err(Error::Invariant("class-D detector needs S^{0,1}".into()));
    }
    if b.gens.space().dim() != 2 || b.fibers.iter().any(|f| f.dim() != 1) {
        return Err(Error::Invariant(
            "class-D detector needs n = 1 line data".into(),
        ));
    }
    let tol = 1e-8;
    let mut types = Vec::new();
    for &i in b.space.fixed() {
        let (u, v) = line_ratio(&b.fibers[i]);
        if v.norm() < tol {
            types.push(false);
        } else if u.norm() < tol {
            types.push(true);
        } else {
            return Err(Error::Invariant(format!(
                "fixed point {i}: z = v/u is neither zero nor infinite"
            )));
        }
    }
    if types.len() != 2 {
        return Err(Error::Invariant(format!(
            "expected two fixed points, found {}",
            types.len()
        )));
    }
    let mut odd = 0.0f64;
    for i in 0..b.space.len() {
        let j = b.space.tau()[i];
        let (u1, v1) = line_ratio(&b.fibers[i]);
        let (u2, v2) = line_ratio(&b.fibers[j]);
        if u1.norm() > 1e-3 && u2.norm() > 1e-3 {
            odd = odd.max((v2 / u2 + v1 / u1).norm());
        }
    }
    Ok(InvariantResult::new(
        InvariantKind::ClassD1dZ2,
        InvariantValue::Z2(types[0] != types[1]),
    )
    .diag("z_odd_residual", odd)
    .diag(
        "infinite_type_fixed_points",
        types.iter().filter(|t| **t).count() as f64,
    ))
}

/// Restriction of a spinful `n = 2` bundle to the sector `span{c_{-σ}, c†_σ}`, read as `n = 1` data.
pub fn spin_sector_reduction(b: &SampledBundle, sigma: usize) -> Result<SampledBundle> {
    if b.gens.space().dim() != 4 || sigma > 1 {
        return Err(Error::Invariant(
            "spin-sector reduction needs n = 2 data".into(),
        ));
    }
    let idx = [1 - sigma, 2 + sigma];
    let sector = Subspace::coordinate(4, &idx);
    let restrict = |f: &Subspace| -> Result<Subspace> {
        let x = f.intersection(&sector);
        if x.dim() != 1 {
            return Err(Error::Invariant(format!(
                "fiber meets the spin sector in dimension {}",
                x.dim()
            )));
        }
        let fr = x.frame();
        Ok(Subspace::from_frame(&CMat::from_fn(2, 1, |r, _| {
            fr[(idx[r], 0)]
        })))
    };
    let fibers = b.fibers.iter().map(restrict).collect::<Result<Vec<_>>>()?;
    let base = restrict(&b.base_fiber)?;
    let gens = crate::clifford::build_generators(crate::clifford::SymmetryClass::Real(0), 1)?;
    SampledBundle::new(b.space.clone(), gens, fibers, base)
}

/// Class-DIII invariant on a circle from the class-D invariants of the two spin sectors.
pub fn diii_spin_sector_invariant(b: &SampledBundle) -> Result<InvariantResult> {
    let up = class_d_1d_invariant(&spin_sector_reduction(b, 0)?)?;
    let down = class_d_1d_invariant(&spin_sector_reduction(b, 1)?)?;
    let (zu, zd) = (up.z2().unwrap_or(false), down.z2().unwrap_or(false));
    if zu != zd {
        return Err(Error::Invariant("spin sectors disagree".into()));
    }
    Ok(
        InvariantResult::new(InvariantKind::ClassD1dZ2, InvariantValue::Z2(zu))
            .diag("up_nontrivial", zu as u8 as f64)
            .diag("down_nontrivial", zd as u8 as f64),
    )
}

/// Which part of each fiber enters a Chern number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sector {
    /// The whole fiber.
    All,
    /// `A ∩ V` with `V` the creation-operator half.
    Valence,
    /// `A ∩ span{e_i}` for the listed ambient indices.
    Coordinates(Vec<usize>),
}

/// Spin-up and spin-down valence blocks of the charge-conserving 8-dimensional layout.
pub const QSH_VALENCE_UP: [usize; 2] = [5, 6];
pub const QSH_VALENCE_DOWN: [usize; 2] = [4, 7];

pub fn select_sector(f: &Subspace, sector: &Sector) -> Subspace {
    let d = f.ambient_dim();
    match sector {
        Sector::All => f.clone(),
        Sector::Valence => {
            f.intersection(&Subspace::coordinate(d, &(d / 2..d).collect::<Vec<_>>()))
        }
        Sector::Coordinates(idx) => f.intersection(&Subspace::coordinate(d, idx)),
    }
}

/// Frames of the selected sub-bundle; its rank must be constant.
pub fn sector_frames(b: &SampledBundle, sector: &Sector) -> Result<Vec<CMat>> {
    let subs: Vec<Subspace> = b
        .fibers
        .par_iter()
        .map(|f| select_sector(f, sector))
        .collect();
    let r = subs.first().map_or(0, |s| s.dim());
    if r == 0 || subs.iter().any(|s| s.dim() != r) {
        return Err(Error::Invariant(
            "selected sub-bundle has zero or varying rank".into(),
        ));
    }
    Ok(subs.into_iter().map(|s| s.into_frame()).collect())
}

/// Berry flux `arg Π det(F_a† F_b)` through each face of a 2-sphere grid, with the
/// smallest link overlap met on that face.
pub fn face_fluxes(space: &MomentumSpace, frames: &[CMat]) -> Result<Vec<(f64, f64)>> {
    if space.dim() != 2 || space.faces().is_empty() {
        return Err(Error::Invariant(
            "Chern number needs a 2-sphere grid".into(),
        ));
    }
    if frames.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            found: frames.len(),
        });
    }
    space
        .faces()
        .par_iter()
        .map(|face| {
            let mut prod = ONE;
            let mut min_link = f64::INFINITY;
            for e in 0..4 {
                let (a, b) = (face[e], face[(e + 1) % 4]);
                let link = (frames[a].adjoint() * &frames[b]).determinant();
                let mag = link.norm();
                min_link = min_link.min(mag);
                if mag < 1e-8 {
                    return Err(Error::Invariant(format!(
                        "near-zero link overlap between points {a} and {b}"
                    )));
                }
                prod *= link / mag;
            }
            Ok((prod.arg(), min_link))
        })
        .collect()
}

/// Lattice field strength: `Σ_faces arg Π det(F_a† F_b) / 2π` around each oriented face.
pub fn chern_from_frames(space: &MomentumSpace, frames: &[CMat]) -> Result<InvariantResult> {
    let mut total = 0.0;
    let mut max_flux = 0.0f64;
    let mut min_link = f64::INFINITY;
    for (flux, link) in face_fluxes(space, frames)? {
        total += flux;
        max_flux = max_flux.max(flux.abs());
        min_link = min_link.min(link);
    }
    let raw = total / (2.0 * PI);
    Ok(InvariantResult::new(
        InvariantKind::Chern,
        InvariantValue::Integer(to_integer(raw)?),
    )
    .diag("raw", raw)
    .diag("max_face_flux", max_flux)
    .diag("min_link_overlap", min_link))
}

pub fn chern_number(b: &SampledBundle, sector: &Sector) -> Result<InvariantResult> {
    chern_from_frames(&b.space, &sector_frames(b, sector)?)
}

/// `m(k) = u† T_V conj(u)` on the valence block, `T_V = iσ2 ⊗ Id` on `spin ⊗ band`.
pub fn time_reversal_overlap(valence: &CMat, n: usize) -> CMat {
    let v = valence.rows(n, n).into_owned();
    let t = crate::linalg::kron(
        &crate::linalg::pauli::eps(),
        &crate::linalg::identity(n / 2),
    );
    v.adjoint() * t * v.map(|z| z.conj())
}

/// Pfaffian of the time-reversal overlap on the valence block at every grid point, its
/// zero set, and a Z2 from the parity of τ-orbits of connected zero clusters.
pub fn kane_mele_zero_locus(b: &SampledBundle) -> Result<InvariantResult> {
    let n = b.gens.space().n();
    if n % 2 != 0 || b.space.dim() != 2 {
        return Err(Error::Invariant(
            "Kane-Mele detector needs spinful data on a 2-sphere".into(),
        ));
    }
    let frames = sector_frames(b, &Sector::Valence)?;
    let pf: Vec<f64> = frames
        .par_iter()
        .map(|u| {
            let m = time_reversal_overlap(u, n);
            pfaffian(&m).map(|p| p.norm())
        })
        .collect::<Result<_>>()?;
    let max = pf.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Invariant("Pfaffian vanishes everywhere".into()));
    }
    let zeros: Vec<usize> = (0..pf.len())
        .filter(|&i| pf[i] < PFAFFIAN_ZERO_REL * max)
        .collect();
    let zero_set: BTreeSet<usize> = zeros.iter().copied().collect();

    // connected clusters of zeros under grid adjacency
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, c) in b.space.neighbour_pairs() {
        if zero_set.contains(&a) && zero_set.contains(&c) {
            adj.entry(a).or_default().push(c);
            adj.entry(c).or_default().push(a);
        }
    }
    let mut cluster_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut clusters = 0;
    for &z in &zeros {
        if cluster_of.contains_key(&z) {
            continue;
        }
        let mut stack = vec![z];
        cluster_of.insert(z, clusters);
        while let Some(p) = stack.pop() {
            for &q in adj.get(&p).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !cluster_of.contains_key(&q) {
                    cluster_of.insert(q, clusters);
                    stack.push(q);
                }
            }
        }
        clusters += 1;
    }
    let mut orbits = BTreeSet::new();
    for &z in &zeros {
        let a = cluster_of[&z];
        let c = cluster_of
            .get(&b.space.tau()[z])
            .copied()
            .ok_or_else(|| Error::Invariant("zero set is not τ-invariant".into()))?;
        orbits.insert((a.min(c), a.max(c)));
    }
    let sizes: Vec<usize> = (0..clusters)
        .map(|c| cluster_of.values().filter(|v| **v == c).count())
        .collect();
    let isolated = sizes.iter().all(|&s| s == 1);
    let mut res = InvariantResult::new(
        InvariantKind::KaneMeleZ2,
        InvariantValue::Z2(orbits.len() % 2 == 1),
    )
    .diag("zero_count", zeros.len() as f64)
    .diag("clusters", clusters as f64)
    .diag("orbits", orbits.len() as f64)
    .diag("isolated", isolated as u8 as f64)
    .diag("max_abs_pfaffian", max);
    res.points = zeros;
    Ok(res)
}

/// `|Pf m(k)|` at every grid point, for maps and diagnostics.
pub fn pfaffian_map(b: &SampledBundle) -> Result<Vec<f64>> {
    let n = b.gens.space().n();
    let frames = sector_frames(b, &Sector::Valence)?;
    frames
        .iter()
        .map(|u| pfaffian(&time_reversal_overlap(u, n)).map(|p| p.norm()))
        .collect()
}

/// Per-fiber random frame change `F(k) ↦ F(k) U(k)`.
pub fn random_gauge<R: Rng + ?Sized>(b: &SampledBundle, rng: &mut R) -> SampledBundle {
    let fibers = b
        .fibers
        .iter()
        .map(|f| {
            let u = random_unitary(f.dim(), rng);
            f.regauge(&u).expect("square gauge")
        })
        .collect();
    SampledBundle {
        space: b.space.clone(),
        gens: b.gens.clone(),
        fibers,
        base_fiber: b.base_fiber.clone(),
    }
}
