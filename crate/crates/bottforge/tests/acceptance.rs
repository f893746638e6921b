//! Acceptance suite: one line per criterion, then a comparison against the recorded
//! known failures. Runs without the libtest harness so the lines always print.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bottforge::bott::squaring_projection_on_geodesic;
use bottforge::clifford::{build_generators, membership, random_member, verify_generator_set};
use bottforge::examples::{build_d_to_diii, build_diii_to_aii, circle_angle, sphere_angles};
use bottforge::invariants::{
    chern_number, diii_spin_sector_invariant, kane_mele_zero_locus, random_gauge,
    winding_of_bundle, QSH_VALENCE_DOWN, QSH_VALENCE_UP,
};
use bottforge::periodicity::four_subspaces;
use bottforge::tables::{
    periodic_table_entry, render_changes_table, render_periodic_table, render_unstable_table,
    stability_bounds, stability_change, unstable_cases, CaseTag, TableFormat,
};
use bottforge::{
    beta, double_11, reduce_11, AxisKind, BottContext, CMat, DoubledContext, MomentumSpace,
    SampledBundle, Sector, Subspace, SymmetryClass, C64,
};
use common::{qsh_block_frame, rectangle_chern};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, with the reason recorded alongside the project notes.
/// 5: the Pfaffian of the generated insulator also vanishes on the meridians `k1 = ±π/2`.
const KNOWN_FAILURES: [usize; 1] = [5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn real_classes() -> impl Iterator<Item = SymmetryClass> {
    (0..8u8).map(SymmetryClass::Real)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for class in real_classes() {
        let m = class.multiplicity();
        for n in [m, 2 * m] {
            match build_generators(class, n) {
                Ok(g) => {
                    let r = verify_generator_set(&g);
                    worst = worst.max(r.max_residual());
                    if !r.passed() || r.max_residual() >= 1e-12 {
                        failures.push(format!("{class} n={n}"));
                    }
                }
                Err(e) => failures.push(format!("{class} n={n}: {e}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 1.0,
        format!("16 sets, max residual {worst:.1e}, {secs:.3} s, failures {failures:?}"),
    )
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut errors = Vec::new();
    for class in SymmetryClass::ALL {
        let mut run = || -> bottforge::Result<()> {
            let small = build_generators(class, class.multiplicity())?;
            let dc = DoubledContext::canonical(&small)?;
            let bc = BottContext::from_doubled(&dc)?;
            let space = bc.gens().space().clone();
            for _ in 0..50 {
                let a = random_member(dc.big(), false, rng);
                let a_perp = space.car_annihilator(&a);
                let mut d = vec![
                    beta(&a, 0.0, &bc)?.distance(bc.e_plus()),
                    beta(&a, 1.0, &bc)?.distance(bc.e_minus()),
                    beta(&a, 0.5, &bc)?.distance(&a),
                ];
                for t in [0.1, 0.3, 0.5] {
                    let lhs = space.car_annihilator(&beta(&a, t, &bc)?);
                    d.push(lhs.distance(&beta(&a_perp, 1.0 - t, &bc)?));
                }
                worst = d.into_iter().fold(worst, f64::max);
                count += 1;
            }
            Ok(())
        };
        if let Err(e) = run() {
            errors.push(format!("{class}: {e}"));
        }
    }
    outcome(
        errors.is_empty() && worst < 1e-10,
        format!("{count} subspaces over 10 classes, max distance {worst:.1e}, errors {errors:?}"),
    )
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut bad_dims = 0;
    let mut errors = Vec::new();
    for class in SymmetryClass::ALL {
        let mut run = || -> bottforge::Result<()> {
            let small = build_generators(class, class.multiplicity())?;
            let dc = DoubledContext::canonical(&small)?;
            let n = small.n();
            for _ in 0..50 {
                let a = random_member(&small, false, rng);
                if !membership(&a, &small)?.in_cs {
                    return Err(bottforge::Error::Membership("small input".into()));
                }
                worst = worst.max(reduce_11(&double_11(&a, &dc)?, &dc)?.distance(&a));
                let big_a = random_member(dc.big(), false, rng);
                if !membership(&big_a, dc.big())?.in_cs {
                    return Err(bottforge::Error::Membership("big input".into()));
                }
                worst = worst.max(double_11(&reduce_11(&big_a, &dc)?, &dc)?.distance(&big_a));
                let dims: usize = four_subspaces(&big_a, &dc).iter().map(Subspace::dim).sum();
                if dims != 4 * n {
                    bad_dims += 1;
                }
                count += 2;
            }
            Ok(())
        };
        if let Err(e) = run() {
            errors.push(format!("{class}: {e}"));
        }
    }
    outcome(
        errors.is_empty() && worst < 1e-9 && bad_dims == 0,
        format!(
            "{count} round trips, max distance {worst:.1e}, dimension mismatches {bad_dims}, errors {errors:?}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let run = || -> bottforge::Result<(f64, Option<bool>)> {
        let ex = build_d_to_diii(32)?;
        let inv = diii_spin_sector_invariant(&ex.bundle)?;
        Ok((ex.closed_form_residual(), inv.z2()))
    };
    match run() {
        Ok((res, z2)) => outcome(
            res < 1e-10 && z2 == Some(true),
            format!("closed-form distance {res:.1e}, spin-sector Z2 nontrivial = {z2:?}"),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn criterion_5() -> Outcome {
    let run = || -> bottforge::Result<Outcome> {
        let ex = build_diii_to_aii(32)?;
        let b = &ex.bundle;
        let km = kane_mele_zero_locus(b)?;
        let cell = PI / b.space.t_steps() as f64;
        let off_pole: Vec<usize> = km
            .points
            .iter()
            .copied()
            .filter(|&i| (sphere_angles(&b.space, i).0.abs() - FRAC_PI_2).abs() > cell + 1e-9)
            .collect();
        let locus_ok = !km.points.is_empty() && off_pole.is_empty();
        let z2 = km.z2();
        let up = chern_number(b, &Sector::Coordinates(QSH_VALENCE_UP.to_vec()))?.integer();
        let down = chern_number(b, &Sector::Coordinates(QSH_VALENCE_DOWN.to_vec()))?.integer();
        let oracle_up = rectangle_chern(64, 64, |k0, k1| qsh_block_frame(k0, k1, &QSH_VALENCE_UP));
        let oracle_down =
            rectangle_chern(64, 64, |k0, k1| qsh_block_frame(k0, k1, &QSH_VALENCE_DOWN));
        let chern_ok = up == Some(1)
            && down == Some(-1)
            && (oracle_up - 1.0).abs() < 0.05
            && (oracle_down + 1.0).abs() < 0.05;
        Ok(outcome(
            locus_ok && z2 == Some(true) && chern_ok,
            format!(
                "zeros {} ({} farther than one cell from k0 = ±π/2), Z2 nontrivial = {z2:?}, \
                 spin Chern {up:?}/{down:?}, oracle {oracle_up:.3}/{oracle_down:.3}",
                km.points.len(),
                off_pole.len()
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, format!("error: {e}")))
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let mut run = || -> bottforge::Result<f64> {
        let small = build_generators(SymmetryClass::Real(2), 2)?;
        let dc = DoubledContext::canonical(&small)?;
        let bc = BottContext::from_doubled(&dc)?;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let a = random_member(dc.big(), true, rng);
            for t in [0.0, 0.1, 0.25, 0.4, 0.5] {
                let p = squaring_projection_on_geodesic(&a, t, &bc)?;
                worst = worst.max(p.distance(&beta(&a, 2.0 * t, &bc)?));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(w) => outcome(
            w < 1e-10,
            format!("20 subspaces x 5 times, max distance {w:.1e}"),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut used = Vec::new();
    let mut errors = Vec::new();
    for s in 1..8u8 {
        let class = SymmetryClass::Real(s);
        let mut run = |used: &mut Vec<u8>, worst: &mut f64| -> bottforge::Result<()> {
            let g = build_generators(class, class.multiplicity())?;
            let bc = BottContext::new(g.clone(), s as usize - 1)?;
            if bc.kind() != AxisKind::Position {
                return Ok(());
            }
            used.push(s);
            let space = g.space().clone();
            // Lagrangian members (fixed by ⊥) and general members of C_s
            for fermi in [true, false] {
                for _ in 0..20 {
                    let a = random_member(&g, fermi, rng);
                    let a_perp = space.car_annihilator(&a);
                    for t in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
                        let lhs = space.car_annihilator(&beta(&a, t, &bc)?);
                        *worst = worst.max(lhs.distance(&beta(&a_perp, t, &bc)?));
                    }
                }
            }
            Ok(())
        };
        if let Err(e) = run(&mut used, &mut worst) {
            errors.push(format!("{class}: {e}"));
        }
    }
    outcome(
        !used.is_empty() && errors.is_empty() && worst < 1e-10,
        format!("position-like K for s in {used:?}, max distance {worst:.1e}, errors {errors:?}"),
    )
}

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    fs::read_to_string(&p).unwrap_or_default()
}

/// Rows of the stability-bounds table: `(s, C_s(m_s r)_0 as (unitary ranks), d2)` in terms of `r` or `(p, q)`.
/// Even `s`: `d1 = min(2p'+1, 2q'+1)` for `U_{p'+q'}/(U_{p'} × U_{q'})`.
/// Odd `s`: `d1 = 2 × rank` of the unitary group.
fn bounds_row(s: u8, r: usize, p: usize, q: usize) -> (usize, usize, CaseTag) {
    let grass = |a: usize, b: usize| (2 * a + 1).min(2 * b + 1);
    match s {
        0 => (grass(r, r), 2 * r - 1, CaseTag::Ii),
        1 => (2 * (2 * r), 4 * r, CaseTag::Ii),
        2 => (grass(2 * p, 2 * q), (4 * p + 3).min(4 * q + 3), CaseTag::Iv),
        3 => (2 * (2 * r), 4 * r + 2, CaseTag::I),
        4 => (grass(r, r), 2 * r + 1, CaseTag::Iii),
        5 => (2 * r, r, CaseTag::Iii),
        6 => (grass(p, q), p.min(q), CaseTag::Iv),
        7 => (2 * r, r - 1, CaseTag::I),
        _ => unreachable!(),
    }
}

fn criterion_8() -> Outcome {
    let mut problems = Vec::new();
    if render_periodic_table(TableFormat::Txt) != golden("periodic_table.txt") {
        problems.push("periodic table differs from golden".to_string());
    }

    let mut rows = 0;
    for s in 0..8u8 {
        let class = SymmetryClass::Real(s);
        for r in 1..=4usize {
            let n = class.multiplicity() * r;
            let splits: Vec<(usize, usize)> = if s == 2 || s == 6 {
                (1..r).map(|p| (p, r - p)).collect()
            } else {
                vec![(0, 0)]
            };
            for (p, q) in splits {
                let got = if s == 2 || s == 6 {
                    stability_bounds(class, n, Some(p), Some(q))
                } else {
                    stability_bounds(class, n, None, None)
                };
                let (d1, d2, tag) = bounds_row(s, r, p, q);
                match got {
                    Ok(b) if b.d1 == d1 && b.d2 == Some(d2) && b.case_tag == tag => rows += 1,
                    Ok(b) => problems.push(format!(
                        "s={s} r={r} p={p}: got ({}, {:?}, {:?}), expected ({d1}, {d2}, {tag:?})",
                        b.d1, b.d2, b.case_tag
                    )),
                    Err(e) => problems.push(format!("s={s} r={r}: {e}")),
                }
            }
        }
    }
    for n in 1..=4usize {
        for p in 0..=2 * n {
            let q = 2 * n - p;
            match stability_bounds(SymmetryClass::ComplexA, n, Some(p), Some(q)) {
                Ok(b) if b.d1 == (2 * p + 1).min(2 * q + 1) && b.d2.is_none() => rows += 1,
                Ok(b) => problems.push(format!("A n={n} p={p}: d1 {}", b.d1)),
                Err(e) => problems.push(format!("A n={n} p={p}: {e}")),
            }
        }
        match stability_bounds(SymmetryClass::ComplexAIII, n, None, None) {
            Ok(b) if b.d1 == 2 * n && b.d2.is_none() => rows += 1,
            Ok(b) => problems.push(format!("AIII n={n}: d1 {}", b.d1)),
            Err(e) => problems.push(format!("AIII n={n}: {e}")),
        }
    }

    // Unstable-case cells and their annotations, read from the transcribed CSV goldens.
    let t4 = golden("unstable_cases.csv");
    let t5 = golden("stability_changes.csv");
    let t5_rows: Vec<Vec<String>> = t5
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    let mut expected = Vec::new();
    for (row, line) in t4.lines().skip(1).enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let class = cells[1].to_string();
        for (col, (dx, dk)) in bottforge::tables::UNSTABLE_COLUMNS.iter().enumerate() {
            let cell = cells[2 + col];
            if cell.is_empty() {
                continue;
            }
            let ann = if *dx == 0 {
                Some(t5_rows[row][1 + dk].clone()).filter(|a| !a.is_empty())
            } else {
                None
            };
            expected.push((class.clone(), *dx, *dk, cell.to_string(), ann));
        }
    }
    match unstable_cases(3) {
        Ok(cases) => {
            let got: Vec<_> = cases
                .iter()
                .map(|c| {
                    (
                        c.class.clone(),
                        c.dx,
                        c.dk,
                        c.condition(),
                        c.annotation.clone(),
                    )
                })
                .collect();
            let mut a = got.clone();
            let mut b = expected.clone();
            a.sort();
            b.sort();
            if a != b {
                problems.push(format!("unstable cases differ: got {a:?}, expected {b:?}"));
            }
            for c in &cases {
                if c.dx == 0 {
                    let class = SymmetryClass::parse(&c.class).ok();
                    let direct = class.and_then(|cl| stability_change(cl, c.dx, c.dk));
                    if c.annotation.as_deref() != direct {
                        problems.push(format!("{} dk={} annotation mismatch", c.class, c.dk));
                    }
                }
            }
        }
        Err(e) => problems.push(format!("unstable cases: {e}")),
    }
    if render_unstable_table(TableFormat::Txt).ok().as_deref()
        != Some(golden("unstable_cases.txt").as_str())
    {
        problems.push("unstable table differs from golden".into());
    }
    if render_changes_table(TableFormat::Txt) != golden("stability_changes.txt") {
        problems.push("changes table differs from golden".into());
    }

    // Shift rules: one more position coordinate acts like s + 1, one more momentum like s - 1.
    let mut shifts = 0;
    for class in SymmetryClass::ALL {
        let step = |c: SymmetryClass, by: i64| match c {
            SymmetryClass::Real(s) => SymmetryClass::Real((s as i64 + by).rem_euclid(8) as u8),
            SymmetryClass::ComplexA if by.rem_euclid(2) == 1 => SymmetryClass::ComplexAIII,
            SymmetryClass::ComplexAIII if by.rem_euclid(2) == 1 => SymmetryClass::ComplexA,
            other => other,
        };
        for d in 1..=12usize {
            for dx in 0..=d {
                let dk = d - dx;
                let e = periodic_table_entry(class, dx, dk, 1);
                let more_x = periodic_table_entry(class, dx + 1, dk, 1);
                let more_k = periodic_table_entry(class, dx, dk + 1, 1);
                let both = periodic_table_entry(class, dx + 1, dk + 1, 1);
                if more_x != periodic_table_entry(step(class, 1), dx, dk, 1)
                    || more_k != periodic_table_entry(step(class, -1), dx, dk, 1)
                    || both != e
                {
                    problems.push(format!("shift rule fails at {class} ({dx},{dk})"));
                }
                shifts += 1;
            }
        }
    }

    outcome(
        problems.is_empty(),
        format!("{rows} bounds rows, {shifts} shift checks, problems {problems:?}"),
    )
}

/// AIII bundle over the circle with fiber `span{(u, U(k) u)}`, `U(k) = diag(e^{2ik}, 1) e^{iH(k)}`.
fn aiii_bundle(res: usize) -> bottforge::Result<SampledBundle> {
    let space = MomentumSpace::s0().suspend(AxisKind::Momentum, res)?;
    let h = |k: f64| {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(0.3 * k.cos(), 0.0);
        m[(1, 1)] = C64::new(-0.2 * k.sin(), 0.0);
        m[(0, 1)] = C64::new(0.25, 0.1 * k.cos());
        m[(1, 0)] = m[(0, 1)].conj();
        m
    };
    let fibers = (0..space.len())
        .map(|i| {
            let k = circle_angle(&space, i);
            let mut d = CMat::identity(2, 2);
            d[(0, 0)] = C64::from_polar(1.0, 2.0 * k);
            let u = d * (h(k) * C64::new(0.0, 1.0)).exp();
            let mut f = CMat::zeros(4, 2);
            f.view_mut((0, 0), (2, 2)).copy_from(&CMat::identity(2, 2));
            f.view_mut((2, 0), (2, 2)).copy_from(&u);
            Subspace::from_frame(&f)
        })
        .collect::<Vec<_>>();
    let gens = build_generators(SymmetryClass::ComplexAIII, 2)?;
    let base = fibers[space.base()].clone();
    SampledBundle::new(space, gens, fibers, base)
}

type Invariants = Vec<(&'static str, Option<i64>)>;

fn integer_invariants(
    qsh: &SampledBundle,
    kitaev: &SampledBundle,
    aiii: &SampledBundle,
) -> bottforge::Result<Invariants> {
    let z2 = |b: Option<bool>| b.map(i64::from);
    Ok(vec![
        (
            "chern up",
            chern_number(qsh, &Sector::Coordinates(QSH_VALENCE_UP.to_vec()))?.integer(),
        ),
        (
            "chern down",
            chern_number(qsh, &Sector::Coordinates(QSH_VALENCE_DOWN.to_vec()))?.integer(),
        ),
        (
            "chern valence",
            chern_number(qsh, &Sector::Valence)?.integer(),
        ),
        ("kane-mele", z2(kane_mele_zero_locus(qsh)?.z2())),
        ("class-d", z2(diii_spin_sector_invariant(kitaev)?.z2())),
        ("winding", winding_of_bundle(aiii)?.integer()),
    ])
}

fn criterion_9(rng: &mut ChaCha8Rng, suite_start: Instant) -> Outcome {
    let mut run = || -> bottforge::Result<(Invariants, Vec<String>)> {
        let mut sets = Vec::new();
        for res in [16, 32] {
            let qsh = build_diii_to_aii(res)?.bundle;
            let kitaev = build_d_to_diii(res)?.bundle;
            let aiii = aiii_bundle(res)?;
            sets.push(integer_invariants(&qsh, &kitaev, &aiii)?);
            sets.push(integer_invariants(
                &random_gauge(&qsh, rng),
                &random_gauge(&kitaev, rng),
                &random_gauge(&aiii, rng),
            )?);
        }
        let reference = sets[0].clone();
        let mismatches = sets
            .iter()
            .skip(1)
            .flat_map(|s| s.iter().zip(&reference))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| format!("{}: {:?} vs {:?}", a.0, a.1, b.1))
            .collect();
        Ok((reference, mismatches))
    };
    match run() {
        Ok((reference, mismatches)) => {
            let secs = suite_start.elapsed().as_secs_f64();
            let all_defined = reference.iter().all(|(_, v)| v.is_some());
            outcome(
                mismatches.is_empty() && all_defined && secs < 300.0,
                format!("invariants {reference:?}, mismatches {mismatches:?}, suite runtime {secs:.1} s"),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let names = [
        "generator relations",
        "diagonal map",
        "(1,1) doubling",
        "class DIII line",
        "spin Hall insulator",
        "squaring projection",
        "position-like map",
        "tables",
        "gauge and refinement",
    ];
    let results = [
        criterion_1(),
        criterion_2(&mut rng),
        criterion_3(&mut rng),
        criterion_4(),
        criterion_5(),
        criterion_6(&mut rng),
        criterion_7(&mut rng),
        criterion_8(),
        criterion_9(&mut rng, start),
    ];
    let mut failed = Vec::new();
    for (i, (name, r)) in names.iter().zip(&results).enumerate() {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{name}]: {verdict} ({})", i + 1, r.detail);
        if !r.pass {
            failed.push(i + 1);
        }
    }
    let expected = KNOWN_FAILURES.to_vec();
    println!(
        "acceptance: {}/9 passed, failing {failed:?}, known failures {expected:?}, {:.1} s",
        9 - failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == expected {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: outcome differs from the recorded known failures");
        ExitCode::FAILURE
    }
}
