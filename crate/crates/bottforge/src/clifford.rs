//! Pseudo-symmetry generators for the ten symmetry classes.
//!
//! Matrices act on the standard Nambu space with layout `BdG ⊗ spin ⊗ orbital`.
//! Classes with `s ≤ 3` use `J_1 = γT`, `J_2 = iQJ_1`, `J_3 = iQγC` directly;
//! classes with `s ≥ 4` are built on `C² ⊗ W'` (with `W'` of half the band
//! count) from two spin-rotation generators and up to three pseudo-symmetries.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    anticommutator, commutator, identity, kron, kron_all, op_norm, pauli, random_hermitian, real,
    CMat, NambuSpace, OperatorFlags, Subspace, IM, SUBSPACE_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    /// Real class with `s` pseudo-symmetries, `s ∈ 0..8`.
    Real(u8),
    ComplexA,
    ComplexAIII,
}

const REAL_NAMES: [&str; 8] = ["D", "DIII", "AII", "CII", "C", "CI", "AI", "BDI"];

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 10] = [
        SymmetryClass::Real(0),
        SymmetryClass::Real(1),
        SymmetryClass::Real(2),
        SymmetryClass::Real(3),
        SymmetryClass::Real(4),
        SymmetryClass::Real(5),
        SymmetryClass::Real(6),
        SymmetryClass::Real(7),
        SymmetryClass::ComplexA,
        SymmetryClass::ComplexAIII,
    ];

    pub fn real(s: u8) -> Result<Self> {
        if s < 8 {
            Ok(SymmetryClass::Real(s))
        } else {
            Err(Error::Invalid(format!(
                "real class index {s} out of range 0..8"
            )))
        }
    }

    pub fn cartan_name(&self) -> &'static str {
        match self {
            SymmetryClass::Real(s) => REAL_NAMES[*s as usize % 8],
            SymmetryClass::ComplexA => "A",
            SymmetryClass::ComplexAIII => "AIII",
        }
    }

    /// Accepts a Cartan label (`DIII`, `aii`) or a real index (`3`, `s=3`).
    pub fn parse(label: &str) -> Result<Self> {
        let t = label.trim();
        let digits = t.strip_prefix("s=").unwrap_or(t);
        if let Ok(s) = digits.parse::<u8>() {
            return SymmetryClass::real(s);
        }
        let up = t.to_ascii_uppercase();
        match up.as_str() {
            "A" => return Ok(SymmetryClass::ComplexA),
            "AIII" => return Ok(SymmetryClass::ComplexAIII),
            _ => {}
        }
        REAL_NAMES
            .iter()
            .position(|n| *n == up)
            .map(|s| SymmetryClass::Real(s as u8))
            .ok_or_else(|| Error::Invalid(format!("unknown symmetry class '{label}'")))
    }

    pub fn s(&self) -> Option<u8> {
        match self {
            SymmetryClass::Real(s) => Some(*s),
            _ => None,
        }
    }

    pub fn is_complex(&self) -> bool {
        !matches!(self, SymmetryClass::Real(_))
    }

    /// Number of pseudo-symmetry generators.
    pub fn num_generators(&self) -> usize {
        match self {
            SymmetryClass::Real(s) => *s as usize,
            SymmetryClass::ComplexA => 0,
            SymmetryClass::ComplexAIII => 1,
        }
    }

    /// Minimal band multiplicity `m_s`.
    pub fn multiplicity(&self) -> usize {
        match self {
            SymmetryClass::Real(s) => [1, 2, 2, 4, 4, 4, 4, 8][*s as usize % 8],
            _ => 1,
        }
    }

    pub fn check_bands(&self, n: usize) -> Result<()> {
        let m = self.multiplicity();
        if n == 0 || n % m != 0 {
            return Err(Error::BandCount { n, multiple: m });
        }
        Ok(())
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cartan_name())
    }
}

/// Ordered pseudo-symmetry operators on a Nambu space.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    class: SymmetryClass,
    space: NambuSpace,
    ops: Vec<CMat>,
    flags: Vec<OperatorFlags>,
}

impl GeneratorSet {
    /// Wraps operators without checking the Clifford relations (see [`verify_generator_set`]).
    pub fn new(class: SymmetryClass, space: NambuSpace, ops: Vec<CMat>) -> Result<Self> {
        let d = space.dim();
        if let Some(bad) = ops.iter().find(|j| j.shape() != (d, d)) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.nrows(),
            });
        }
        let flags = ops
            .iter()
            .map(|j| OperatorFlags::detect(&space, j))
            .collect();
        Ok(Self {
            class,
            space,
            ops,
            flags,
        })
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    /// Band count; the ambient dimension is `2n`.
    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn space(&self) -> &NambuSpace {
        &self.space
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    pub fn flags(&self) -> &[OperatorFlags] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Same space, operators appended, new class label.
    pub fn extended(&self, class: SymmetryClass, extra: &[CMat]) -> Result<Self> {
        let mut ops = self.ops.clone();
        ops.extend(extra.iter().cloned());
        GeneratorSet::new(class, self.space.clone(), ops)
    }
}

/// Time reversal, charge, particle-hole conjugation and spin rotations in the standard layout.
#[derive(Clone, Debug)]
pub struct PhysicalOps {
    pub n: usize,
    /// `T w = t_matrix · conj(w)`.
    pub t_matrix: CMat,
    pub q: CMat,
    /// `C w = c_matrix · conj(w)`; present when `n` is a multiple of 4.
    pub c_matrix: Option<CMat>,
    /// Band twist used by `C`.
    pub twist: Option<CMat>,
    /// `j_1, j_2, j_3 = j_2 j_1`.
    pub spin: [CMat; 3],
}

impl PhysicalOps {
    pub fn standard(n: usize) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::BandCount { n, multiple: 2 });
        }
        let orb = identity(n / 2);
        let t_matrix = kron_all(&[&pauli::s0(), &pauli::eps(), &orb]);
        let q = kron(&pauli::s3(), &identity(n)) * real(-1.0);
        let twist = (n % 4 == 0).then(|| kron_all(&[&pauli::s0(), &pauli::s1(), &identity(n / 4)]));
        let c_matrix = twist.as_ref().map(|tw| kron(&pauli::s1(), tw));
        let y1 = pauli::s1() * IM;
        let y2 = pauli::s2() * IM;
        let lift = |y: &CMat| {
            let blk = crate::linalg::block_diag(&y.map(|z| z.conj()), y);
            kron(&blk, &orb)
        };
        let j1 = lift(&y1);
        let j2 = lift(&y2);
        let j3 = &j2 * &j1;
        Ok(Self {
            n,
            t_matrix,
            q,
            c_matrix,
            twist,
            spin: [j1, j2, j3],
        })
    }

    /// `J_1 = γ ∘ T`, a linear map.
    pub fn j1(&self, space: &NambuSpace) -> CMat {
        space.bracket_matrix() * self.t_matrix.map(|z| z.conj())
    }

    /// `J_2 = i Q J_1`.
    pub fn j2(&self, space: &NambuSpace) -> CMat {
        &self.q * self.j1(space) * IM
    }

    /// `J_3 = i Q γ C`.
    pub fn j3(&self, space: &NambuSpace) -> Option<CMat> {
        let c = self.c_matrix.as_ref()?;
        let gamma_c = space.bracket_matrix() * c.map(|z| z.conj());
        Some(&self.q * gamma_c * IM)
    }
}

/// Half-size data for `s ≥ 4`: spin generators `j_1, j_2` and pseudo-symmetries `j_5..j_s`.
#[derive(Clone, Debug)]
pub struct QuaternionicData {
    pub class: SymmetryClass,
    pub space: NambuSpace,
    pub true_syms: [CMat; 2],
    pub pseudo: Vec<CMat>,
}

impl QuaternionicData {
    /// Data on `W'` with `n/2` bands for the real class `s ∈ 4..8`.
    pub fn for_class(class: SymmetryClass, n: usize) -> Result<Self> {
        let s = match class {
            SymmetryClass::Real(s) if (4..8).contains(&s) => s as usize,
            _ => {
                return Err(Error::Unsupported(format!(
                    "quaternionic data only exists for s = 4..7, got {class}"
                )))
            }
        };
        class.check_bands(n)?;
        let small_n = n / 2;
        let space = NambuSpace::standard(small_n);
        let phys = PhysicalOps::standard(small_n)?;
        let mut pseudo = Vec::new();
        if s >= 5 {
            pseudo.push(phys.j1(&space));
        }
        if s >= 6 {
            pseudo.push(phys.j2(&space));
        }
        if s >= 7 {
            pseudo.push(phys.j3(&space).ok_or(Error::BandCount { n, multiple: 8 })?);
        }
        let [j1, j2, _] = phys.spin;
        Ok(Self {
            class,
            space,
            true_syms: [j1, j2],
            pseudo,
        })
    }

    /// Largest residual of the relations required of the half-size data.
    pub fn relation_residual(&self) -> f64 {
        let id = identity(self.space.dim());
        let [j1, j2] = &self.true_syms;
        let mut r = op_norm(&(j1 * j1 + &id))
            .max(op_norm(&(j2 * j2 + &id)))
            .max(op_norm(&anticommutator(j1, j2)));
        for (a, ja) in self.pseudo.iter().enumerate() {
            r = r.max(op_norm(&commutator(ja, j1)));
            r = r.max(op_norm(&commutator(ja, j2)));
            for (b, jb) in self.pseudo.iter().enumerate() {
                let target = if a == b {
                    &id * real(-2.0)
                } else {
                    id.clone() * real(0.0)
                };
                r = r.max(op_norm(&(anticommutator(ja, jb) - target)));
            }
        }
        r
    }
}

/// Generators on `C² ⊗ W'` from half-size data:
/// `J_{1,2} = σz ⊗ j_{1,2}`, `J_3 = σz ⊗ j_2 j_1`, `J_4 = ε ⊗ Id`, `J_m = σx ⊗ j_m`.
pub fn double_quaternionic(data: &QuaternionicData) -> Result<GeneratorSet> {
    let [j1, j2] = &data.true_syms;
    let id = identity(data.space.dim());
    let mut ops = vec![
        kron(&pauli::s3(), j1),
        kron(&pauli::s3(), j2),
        kron(&pauli::s3(), &(j2 * j1)),
        kron(&pauli::eps(), &id),
    ];
    ops.extend(data.pseudo.iter().map(|j| kron(&pauli::s1(), j)));
    GeneratorSet::new(data.class, data.space.doubled(), ops)
}

/// Generators `J_1..J_s` for `class` with `n` bands.
pub fn build_generators(class: SymmetryClass, n: usize) -> Result<GeneratorSet> {
    class.check_bands(n)?;
    let space = NambuSpace::standard(n);
    match class {
        SymmetryClass::ComplexA | SymmetryClass::Real(0) => GeneratorSet::new(class, space, vec![]),
        SymmetryClass::ComplexAIII => {
            let q = kron(&pauli::s3(), &identity(n)) * real(-1.0);
            GeneratorSet::new(class, space, vec![q * IM])
        }
        SymmetryClass::Real(s) if s <= 3 => {
            let phys = PhysicalOps::standard(n)?;
            let mut ops = vec![phys.j1(&space)];
            if s >= 2 {
                ops.push(phys.j2(&space));
            }
            if s >= 3 {
                ops.push(phys.j3(&space).ok_or(Error::BandCount { n, multiple: 4 })?);
            }
            GeneratorSet::new(class, space, ops)
        }
        SymmetryClass::Real(_) => double_quaternionic(&QuaternionicData::for_class(class, n)?),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub class: String,
    pub n: usize,
    pub count: usize,
    /// `max ‖J_l J_m + J_m J_l + 2δ_lm‖`.
    pub clifford_residual: f64,
    pub unitarity_residual: f64,
    /// Per generator: `‖JᵀSJ ∓ S‖` for the sign matching its flag.
    pub bracket_residuals: Vec<f64>,
    pub real_flags: Vec<bool>,
    pub failures: Vec<String>,
}

impl GeneratorReport {
    pub fn max_residual(&self) -> f64 {
        self.bracket_residuals.iter().copied().fold(
            self.clifford_residual.max(self.unitarity_residual),
            f64::max,
        )
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Spectral-norm residuals of the Clifford relations, unitarity and bracket behaviour.
pub fn verify_generator_set(g: &GeneratorSet) -> GeneratorReport {
    verify_generator_set_with_tol(g, 1e-10)
}

pub fn verify_generator_set_with_tol(g: &GeneratorSet, tol: f64) -> GeneratorReport {
    let d = g.space().dim();
    let id = identity(d);
    let mut clifford = 0.0f64;
    let mut unitarity = 0.0f64;
    let mut bracket = Vec::with_capacity(g.len());
    let mut failures = Vec::new();
    for (a, ja) in g.ops().iter().enumerate() {
        let u = op_norm(&(ja.adjoint() * ja - &id));
        unitarity = unitarity.max(u);
        if u > tol {
            failures.push(format!("J_{} is not unitary (residual {u:.3e})", a + 1));
        }
        for (b, jb) in g.ops().iter().enumerate().skip(a) {
            let mut m = anticommutator(ja, jb);
            if a == b {
                m += &id * real(2.0);
            }
            let r = op_norm(&m);
            clifford = clifford.max(r);
            if r > tol {
                failures.push(format!(
                    "J_{} J_{} + J_{} J_{} + 2δ has residual {r:.3e}",
                    a + 1,
                    b + 1,
                    b + 1,
                    a + 1
                ));
            }
        }
        let (keep, flip) = g.space().bracket_residuals(ja);
        let flag = g.flags()[a];
        let r = if flag.is_real_car { keep } else { flip };
        bracket.push(r);
        if r > tol {
            failures.push(format!(
                "J_{} neither preserves nor reverses the bracket (residual {r:.3e})",
                a + 1
            ));
        }
    }
    GeneratorReport {
        class: g.class().to_string(),
        n: g.n(),
        count: g.len(),
        clifford_residual: clifford,
        unitarity_residual: unitarity,
        bracket_residuals: bracket,
        real_flags: g.flags().iter().map(|f| f.is_real_car).collect(),
        failures,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub in_cs: bool,
    pub in_rs: bool,
    /// Frobenius projector distance between `J_l A` and `A^c`, per generator.
    pub residuals: Vec<f64>,
    /// Projector distance between `A` and `A^⊥`.
    pub fermi_residual: f64,
}

impl MembershipReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Tests `J_l A = A^c` for every generator and, additionally, `A = A^⊥`.
pub fn membership(a: &Subspace, g: &GeneratorSet) -> Result<MembershipReport> {
    membership_with_tol(a, g, SUBSPACE_TOL)
}

pub fn membership_with_tol(a: &Subspace, g: &GeneratorSet, tol: f64) -> Result<MembershipReport> {
    let d = g.space().dim();
    if a.ambient_dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: a.ambient_dim(),
        });
    }
    let ac = a.complement();
    let residuals: Vec<f64> = g.ops().iter().map(|j| a.map(j).distance(&ac)).collect();
    let fermi_residual = a.distance(&g.space().car_annihilator(a));
    let in_cs = residuals.iter().all(|&r| r < tol);
    Ok(MembershipReport {
        in_cs,
        in_rs: in_cs && fermi_residual < tol,
        residuals,
        fermi_residual,
    })
}

/// `H = -Π_A + Π_{A^c} = Id - 2Π_A`.
pub fn flattened_hamiltonian(a: &Subspace) -> CMat {
    identity(a.ambient_dim()) - a.projector() * real(2.0)
}

/// Random element of `C_s` (or of `R_s` when `fermi` is set): the negative
/// eigenspace of a random Hermitian matrix projected to anti-commute with every
/// generator (and to satisfy `γHγ = -H`).
///
/// # Panics
/// If no member of the right dimension turns up in 10 000 draws, which happens when
/// the requested set is empty (e.g. Lagrangian members for some complex classes).
pub fn random_member<R: Rng + ?Sized>(g: &GeneratorSet, fermi: bool, rng: &mut R) -> Subspace {
    random_member_for(g.space(), g.ops(), fermi, rng)
}

/// As [`random_member`], for an explicit operator list.
pub fn random_member_for<R: Rng + ?Sized>(
    space: &NambuSpace,
    ops: &[CMat],
    fermi: bool,
    rng: &mut R,
) -> Subspace {
    let d = space.dim();
    for _ in 0..MEMBER_ATTEMPTS {
        let mut h = random_hermitian(d, rng);
        for j in ops {
            let jinv = j.adjoint();
            h = (&h - j * &h * &jinv) * real(0.5);
        }
        if fermi {
            h = (&h - space.gamma_conjugate(&h)) * real(0.5);
        }
        let eig = crate::linalg::hermitian_eigvals(&h);
        if eig.iter().any(|e| e.abs() < 1e-3) {
            continue;
        }
        let a = Subspace::from_frame(&crate::linalg::hermitian_eigvecs(&h, |e| e < 0.0));
        if !ops.is_empty() || fermi {
            if a.dim() != space.n() {
                continue;
            }
        }
        return a;
    }
    panic!(
        "no member found in {MEMBER_ATTEMPTS} draws (fermi = {fermi}, {} generators)",
        ops.len()
    );
}

const MEMBER_ATTEMPTS: usize = 10_000;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diii_generator_matches_bdg_spin_form() {
        let g = build_generators(SymmetryClass::Real(1), 2).unwrap();
        let expect = kron(&pauli::s1(), &pauli::eps());
        assert!((&g.ops()[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn aii_second_generator() {
        let g = build_generators(SymmetryClass::Real(2), 4).unwrap();
        let expect = kron_all(&[&pauli::s2(), &pauli::eps(), &identity(2)]);
        assert!((&g.ops()[1] - expect).norm() < 1e-15);
    }

    #[test]
    fn all_classes_verify() {
        for class in SymmetryClass::ALL {
            let m = class.multiplicity();
            for n in [m, 2 * m] {
                let g = build_generators(class, n).unwrap();
                let rep = verify_generator_set_with_tol(&g, 1e-12);
                assert!(rep.passed(), "{class} n={n}: {:?}", rep.failures);
                assert_eq!(g.len(), class.num_generators());
                assert!(g
                    .flags()
                    .iter()
                    .all(|f| f.is_real_car && f.squares_to == -1));
            }
        }
    }

    #[test]
    fn scaled_generator_flags_unitarity() {
        let g = build_generators(SymmetryClass::Real(3), 4).unwrap();
        let mut ops = g.ops().to_vec();
        ops[0] *= real(1.01);
        let bad = GeneratorSet::new(g.class(), g.space().clone(), ops).unwrap();
        let rep = verify_generator_set(&bad);
        assert!(rep.unitarity_residual > 1e-3);
        assert!(!rep.passed());
    }

    #[test]
    fn bad_band_counts_rejected() {
        assert!(build_generators(SymmetryClass::Real(3), 2).is_err());
        assert!(build_generators(SymmetryClass::Real(7), 4).is_err());
        assert!(build_generators(SymmetryClass::Real(1), 3).is_err());
    }

    #[test]
    fn spin_generators_commute_with_pseudo_symmetries() {
        for s in 4..8u8 {
            let data = QuaternionicData::for_class(SymmetryClass::Real(s), 8).unwrap();
            assert!(data.relation_residual() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn physical_relations() {
        let p = PhysicalOps::standard(4).unwrap();
        let id = identity(8);
        let tt = &p.t_matrix * p.t_matrix.map(|z| z.conj());
        assert!((tt + &id).norm() < 1e-15);
        let c = p.c_matrix.as_ref().unwrap();
        assert!((c * c.map(|z| z.conj()) - &id).norm() < 1e-15);
        let ct = c * p.t_matrix.map(|z| z.conj());
        let tc = &p.t_matrix * c.map(|z| z.conj());
        assert!((ct - tc).norm() < 1e-15);
        let [j1, j2, j3] = &p.spin;
        assert!((j1 * j1 + &id).norm() < 1e-15);
        assert!((j2 * j1 - j3).norm() < 1e-15);
        assert!((j3 * j3 + &id).norm() < 1e-15);
    }

    #[test]
    fn vacuum_is_lagrangian_for_class_d() {
        let n = 3;
        let g = build_generators(SymmetryClass::Real(0), n).unwrap();
        let vac = Subspace::coordinate(2 * n, &[0, 1, 2]);
        let rep = membership(&vac, &g).unwrap();
        assert!(rep.in_rs);
    }

    #[test]
    fn hamiltonian_of_single_mode() {
        let a = Subspace::coordinate(2, &[0]);
        let h = flattened_hamiltonian(&a);
        assert!((h[(0, 0)] + 1.0).norm() < 1e-15 && (h[(1, 1)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn random_members_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for class in SymmetryClass::ALL {
            let g = build_generators(class, class.multiplicity() * 2).unwrap();
            let fermi = !class.is_complex();
            let a = random_member(&g, fermi, &mut rng);
            let rep = membership(&a, &g).unwrap();
            assert!(rep.in_cs, "{class}: {:?}", rep.residuals);
            if fermi {
                assert!(rep.in_rs, "{class}: {}", rep.fermi_residual);
            }
        }
    }

    #[test]
    fn parse_labels() {
        assert_eq!(
            SymmetryClass::parse("diii").unwrap(),
            SymmetryClass::Real(1)
        );
        assert_eq!(SymmetryClass::parse("s=6").unwrap(), SymmetryClass::Real(6));
        assert_eq!(
            SymmetryClass::parse("AIII").unwrap(),
            SymmetryClass::ComplexAIII
        );
        assert!(SymmetryClass::parse("Q").is_err());
    }
}
