//! Sampled spheres `S^{dx,dk}` with involution, and bundles over them.
//!
//! A sphere is built from `S^0 = {+1, -1}` (both points fixed, `-1` is the base
//! point) by iterated suspension, position-like axes first. A suspension of `X`
//! with `m = resolution / 2` steps stores the south pole (`t = 0`), then every
//! point of `X` at `t = j/m` for `j = 1..m-1`, then the north pole (`t = 1`).
//! The point `(p, t)` sits at `(sin(πt)·x_p, -cos(πt))`. Momentum-like
//! suspensions map `(p, t) ↦ (τp, 1 - t)`, position-like ones `(p, t) ↦ (τp, t)`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{membership_with_tol, GeneratorSet};
use crate::error::{Error, Result};
use crate::linalg::{Subspace, SUBSPACE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    Position,
    Momentum,
}

impl AxisKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "position" => Ok(AxisKind::Position),
            "momentum" => Ok(AxisKind::Momentum),
            other => Err(Error::Invalid(format!("unknown axis kind '{other}'"))),
        }
    }
}

/// Location of a point relative to the last suspension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuspensionPoint {
    South,
    North,
    /// Parent point `parent` at `t = step / m`.
    Interior {
        parent: usize,
        step: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSpace {
    suspensions: Vec<AxisKind>,
    resolution: usize,
    points: Vec<Vec<f64>>,
    tau: Vec<usize>,
    fixed: Vec<usize>,
    base: usize,
    edges: Vec<(usize, usize)>,
    faces: Vec<[usize; 4]>,
}

/// Serializable description; the grid is rebuilt from it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceRecord {
    pub dx: usize,
    pub dk: usize,
    pub resolution: usize,
    pub suspensions: Vec<AxisKind>,
}

impl MomentumSpace {
    /// `S^0`: index 0 is `+1`, index 1 is the base point `-1`.
    pub fn s0() -> Self {
        Self {
            suspensions: Vec::new(),
            resolution: 0,
            points: vec![vec![1.0], vec![-1.0]],
            tau: vec![0, 1],
            fixed: vec![0, 1],
            base: 1,
            edges: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn from_suspensions(kinds: &[AxisKind], resolution: usize) -> Result<Self> {
        let mut sp = MomentumSpace::s0();
        for &k in kinds {
            sp = sp.suspend(k, resolution)?;
        }
        Ok(sp)
    }

    /// Suspension of `self` with `resolution / 2` steps in `t`.
    pub fn suspend(&self, kind: AxisKind, resolution: usize) -> Result<Self> {
        if resolution < 4 || resolution % 4 != 0 {
            return Err(Error::Grid(format!(
                "resolution must be a positive multiple of 4, got {resolution}"
            )));
        }
        if !self.suspensions.is_empty() && resolution != self.resolution {
            return Err(Error::Grid(format!(
                "resolution {resolution} differs from the existing grid ({})",
                self.resolution
            )));
        }
        let m = resolution / 2;
        let np = self.len();
        let north = 1 + (m - 1) * np;
        let idx = |p: usize, j: usize| -> usize {
            match j {
                0 => 0,
                j if j == m => north,
                j => 1 + (j - 1) * np + p,
            }
        };
        let total = north + 1;
        let dim = self.points[0].len();
        let mut points = Vec::with_capacity(total);
        let mut south = vec![0.0; dim];
        south.push(-1.0);
        points.push(south);
        for j in 1..m {
            let t = j as f64 / m as f64;
            let (s, c) = (std::f64::consts::PI * t).sin_cos();
            for p in &self.points {
                let mut x: Vec<f64> = p.iter().map(|v| v * s).collect();
                x.push(-c);
                points.push(x);
            }
        }
        let mut np_vec = vec![0.0; dim];
        np_vec.push(1.0);
        points.push(np_vec);

        let mut tau = vec![0; total];
        for j in 0..=m {
            let tj = match kind {
                AxisKind::Momentum => m - j,
                AxisKind::Position => j,
            };
            for p in 0..np {
                tau[idx(p, j)] = idx(self.tau[p], tj);
            }
        }
        let fixed = (0..total).filter(|&i| tau[i] == i).collect();
        let base = idx(self.base, m / 2);

        let mut edges = Vec::new();
        let mut faces = Vec::new();
        if self.suspensions.is_empty() {
            // circle: one directed cycle, angle increasing
            for j in 0..m {
                edges.push((idx(0, j), idx(0, j + 1)));
            }
            for j in (1..=m).rev() {
                edges.push((idx(1, j), idx(1, j - 1)));
            }
        } else {
            let mut seen = BTreeSet::new();
            for p in 0..np {
                for j in 0..m {
                    let e = (idx(p, j), idx(p, j + 1));
                    if seen.insert(e) {
                        edges.push(e);
                    }
                }
            }
            for &(p, q) in &self.edges {
                for j in 1..m {
                    edges.push((idx(p, j), idx(q, j)));
                }
                for j in 0..m {
                    faces.push([idx(p, j), idx(p, j + 1), idx(q, j + 1), idx(q, j)]);
                }
            }
        }
        let mut suspensions = self.suspensions.clone();
        suspensions.push(kind);
        Ok(Self {
            suspensions,
            resolution,
            points,
            tau,
            fixed,
            base,
            edges,
            faces,
        })
    }

    pub fn record(&self) -> SpaceRecord {
        SpaceRecord {
            dx: self.dx(),
            dk: self.dk(),
            resolution: self.resolution,
            suspensions: self.suspensions.clone(),
        }
    }

    pub fn from_record(r: &SpaceRecord) -> Result<Self> {
        let sp = MomentumSpace::from_suspensions(&r.suspensions, r.resolution)?;
        if sp.dx() != r.dx || sp.dk() != r.dk {
            return Err(Error::Grid(format!(
                "dx/dk ({}, {}) do not match the suspension list",
                r.dx, r.dk
            )));
        }
        Ok(sp)
    }

    pub fn dx(&self) -> usize {
        self.suspensions
            .iter()
            .filter(|k| **k == AxisKind::Position)
            .count()
    }

    pub fn dk(&self) -> usize {
        self.suspensions
            .iter()
            .filter(|k| **k == AxisKind::Momentum)
            .count()
    }

    pub fn dim(&self) -> usize {
        self.suspensions.len()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn suspensions(&self) -> &[AxisKind] {
        &self.suspensions
    }

    /// Momentum-like mask over the embedding coordinates: the `S^0` axis first,
    /// then one entry per suspension.
    pub fn momentum_axes(&self) -> Vec<bool> {
        let mut v = vec![false];
        v.extend(self.suspensions.iter().map(|k| *k == AxisKind::Momentum));
        v
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Oriented quadrilaterals (degenerate at the poles) for 2-spheres and up.
    pub fn faces(&self) -> &[[usize; 4]] {
        &self.faces
    }

    pub fn t_steps(&self) -> usize {
        self.resolution / 2
    }

    /// Point count of the space before the last suspension.
    pub fn parent_len(&self) -> Option<usize> {
        let m = self.t_steps();
        (!self.suspensions.is_empty()).then(|| (self.len() - 2) / (m - 1))
    }

    pub fn locate(&self, i: usize) -> Option<SuspensionPoint> {
        let np = self.parent_len()?;
        Some(if i == 0 {
            SuspensionPoint::South
        } else if i == self.len() - 1 {
            SuspensionPoint::North
        } else {
            let k = i - 1;
            SuspensionPoint::Interior {
                parent: k % np,
                step: k / np + 1,
            }
        })
    }

    /// Vertices of a 1-sphere in cyclic (increasing-angle) order.
    pub fn cycle_order(&self) -> Result<Vec<usize>> {
        if self.dim() != 1 {
            return Err(Error::Grid(
                "cycle order needs a 1-dimensional space".into(),
            ));
        }
        Ok(self.edges.iter().map(|e| e.0).collect())
    }

    /// Angle `atan2` of the last two coordinates, for 1-spheres.
    pub fn angle(&self, i: usize) -> f64 {
        let x = &self.points[i];
        x[x.len() - 1].atan2(x[x.len() - 2])
    }

    /// Undirected neighbour pairs.
    pub fn neighbour_pairs(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self
            .edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        set.into_iter().collect()
    }
}

/// `S^{dx,dk}`, position-like suspensions first.
pub fn make_sphere(dx: usize, dk: usize, resolution: usize) -> Result<MomentumSpace> {
    let mut kinds = vec![AxisKind::Position; dx];
    kinds.extend(std::iter::repeat_n(AxisKind::Momentum, dk));
    MomentumSpace::from_suspensions(&kinds, resolution)
}

/// A discretized classifying map: one subspace per grid point.
#[derive(Clone, Debug)]
pub struct SampledBundle {
    pub space: MomentumSpace,
    pub gens: GeneratorSet,
    pub fibers: Vec<Subspace>,
    /// The anchor `A_*` expected at the base point.
    pub base_fiber: Subspace,
}

impl SampledBundle {
    pub fn new(
        space: MomentumSpace,
        gens: GeneratorSet,
        fibers: Vec<Subspace>,
        base_fiber: Subspace,
    ) -> Result<Self> {
        if fibers.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                found: fibers.len(),
            });
        }
        let d = gens.space().dim();
        if let Some(f) = fibers
            .iter()
            .chain(std::iter::once(&base_fiber))
            .find(|f| f.ambient_dim() != d)
        {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: f.ambient_dim(),
            });
        }
        Ok(Self {
            space,
            gens,
            fibers,
            base_fiber,
        })
    }

    pub fn fiber(&self, i: usize) -> &Subspace {
        &self.fibers[i]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub tol: f64,
    /// Neighbour spectral projector distance above which continuity is flagged.
    pub continuity: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: SUBSPACE_TOL,
            continuity: 0.5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BundleReport {
    pub points: usize,
    /// `max_k ‖Π_{A_{τk}} - Π_{A_k^⊥}‖_F`.
    pub equivariance_residual: f64,
    pub equivariance_failures: Vec<usize>,
    pub membership_residual: f64,
    pub membership_failures: Vec<usize>,
    /// `max ‖Π_A - Π_{A^⊥}‖_F` over τ-fixed points.
    pub fixed_point_residual: f64,
    pub base_residual: f64,
    pub max_neighbour_distance: f64,
    pub continuity_failures: Vec<(usize, usize)>,
    pub base_ok: bool,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        self.equivariance_failures.is_empty()
            && self.membership_failures.is_empty()
            && self.continuity_failures.is_empty()
            && self.base_ok
    }
}

/// Equivariance, membership, base-point anchoring and a continuity proxy.
pub fn check_bundle(b: &SampledBundle) -> BundleReport {
    check_bundle_with(b, &CheckOptions::default())
}

pub fn check_bundle_with(b: &SampledBundle, opts: &CheckOptions) -> BundleReport {
    let sp = b.gens.space();
    let per_point: Vec<(f64, f64)> = b
        .fibers
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let perp = sp.car_annihilator(f);
            let eq = b.fibers[b.space.tau()[i]].distance(&perp);
            let mem = membership_with_tol(f, &b.gens, opts.tol)
                .map(|r| r.max_residual())
                .unwrap_or(f64::INFINITY);
            (eq, mem)
        })
        .collect();
    let pairs = b.space.neighbour_pairs();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| b.fibers[i].spectral_distance(&b.fibers[j]))
        .collect();
    let fixed_point_residual = b
        .space
        .fixed()
        .iter()
        .map(|&i| per_point[i].0)
        .fold(0.0, f64::max);
    let base_residual = b.fibers[b.space.base()].distance(&b.base_fiber);
    BundleReport {
        points: b.space.len(),
        equivariance_residual: per_point.iter().map(|p| p.0).fold(0.0, f64::max),
        equivariance_failures: (0..per_point.len())
            .filter(|&i| per_point[i].0 >= opts.tol)
            .collect(),
        membership_residual: per_point.iter().map(|p| p.1).fold(0.0, f64::max),
        membership_failures: (0..per_point.len())
            .filter(|&i| per_point[i].1 >= opts.tol)
            .collect(),
        fixed_point_residual,
        base_residual,
        max_neighbour_distance: dists.iter().copied().fold(0.0, f64::max),
        continuity_failures: pairs
            .iter()
            .zip(&dists)
            .filter(|(_, d)| **d > opts.continuity)
            .map(|(p, _)| *p)
            .collect(),
        base_ok: base_residual < opts.tol,
    }
}
