//! JSON persistence for sampled bundles.
//!
//! Complex numbers are `[re, im]` pairs and matrices are stored column-major.
//! Floats use the shortest round-trip representation, so write → read → write is stable.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clifford::{verify_generator_set_with_tol, GeneratorSet, SymmetryClass};
use crate::error::{Error, Result};
use crate::linalg::{CMat, NambuSpace, Subspace, C64};
use crate::spaces::{check_bundle_with, CheckOptions, MomentumSpace, SampledBundle, SpaceRecord};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMat> for MatrixRecord {
    fn from(m: &CMat) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl MatrixRecord {
    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Invalid(format!(
                "matrix record has {} entries for shape {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Invalid(
                "matrix record contains non-finite values".into(),
            ));
        }
        Ok(CMat::from_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub schema_version: u32,
    pub class: String,
    pub n: usize,
    pub bracket: MatrixRecord,
    pub generators: Vec<MatrixRecord>,
    pub space: SpaceRecord,
    pub base_fiber: MatrixRecord,
    pub frames: Vec<MatrixRecord>,
}

impl BundleFile {
    pub fn from_bundle(b: &SampledBundle) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            class: b.gens.class().cartan_name().to_string(),
            n: b.gens.n(),
            bracket: b.gens.space().bracket_matrix().into(),
            generators: b.gens.ops().iter().map(MatrixRecord::from).collect(),
            space: b.space.record(),
            base_fiber: b.base_fiber.frame().into(),
            frames: b.fibers.iter().map(|f| f.frame().into()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bundle file is serializable") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Invalid(format!("malformed bundle JSON: {e}")))
    }

    /// Rebuilds the bundle without running the bundle checks.
    pub fn to_bundle_unchecked(&self) -> Result<SampledBundle> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let class = SymmetryClass::parse(&self.class)?;
        let space = NambuSpace::with_bracket(self.bracket.to_matrix()?)?;
        if space.n() != self.n {
            return Err(Error::Invalid(format!(
                "n = {} but the bracket has size {}",
                self.n,
                space.dim()
            )));
        }
        let ops = self
            .generators
            .iter()
            .map(MatrixRecord::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        let gens = GeneratorSet::new(class, space, ops)?;
        let grid = MomentumSpace::from_record(&self.space)?;
        let frame = |m: &MatrixRecord| m.to_matrix().and_then(Subspace::from_orthonormal);
        let fibers = self.frames.iter().map(frame).collect::<Result<Vec<_>>>()?;
        let base = frame(&self.base_fiber)?;
        SampledBundle::new(grid, gens, fibers, base)
    }

    /// Rebuilds and validates: generator relations, equivariance, membership, base point, continuity.
    pub fn to_bundle(&self, opts: &CheckOptions) -> Result<SampledBundle> {
        let b = self.to_bundle_unchecked()?;
        let g = verify_generator_set_with_tol(&b.gens, opts.tol.max(1e-10));
        if let Some(f) = g.failures.first() {
            return Err(Error::GeneratorPrecondition(f.clone()));
        }
        validate(&b, opts)?;
        Ok(b)
    }
}

/// Runs the bundle checks and turns the first failing one into an error.
pub fn validate(b: &SampledBundle, opts: &CheckOptions) -> Result<()> {
    let r = check_bundle_with(b, opts);
    if !r.equivariance_failures.is_empty() {
        return Err(Error::Equivariance(format!(
            "A(tau k) = A(k)^perp fails at {} points (max residual {:.3e})",
            r.equivariance_failures.len(),
            r.equivariance_residual
        )));
    }
    if !r.membership_failures.is_empty() {
        return Err(Error::Membership(format!(
            "pseudo-symmetry relations fail at {} points (max residual {:.3e})",
            r.membership_failures.len(),
            r.membership_residual
        )));
    }
    if !r.base_ok {
        return Err(Error::Invalid(format!(
            "fiber at the base point differs from the recorded anchor (residual {:.3e})",
            r.base_residual
        )));
    }
    if !r.continuity_failures.is_empty() {
        return Err(Error::Grid(format!(
            "{} neighbouring fibers jump by more than {} (max {:.3})",
            r.continuity_failures.len(),
            opts.continuity,
            r.max_neighbour_distance
        )));
    }
    Ok(())
}

pub fn save_bundle(b: &SampledBundle, path: &Path) -> Result<()> {
    fs::write(path, BundleFile::from_bundle(b).to_json())
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

pub fn load_bundle(path: &Path, opts: &CheckOptions) -> Result<SampledBundle> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    BundleFile::from_json(&text)?.to_bundle(opts)
}
