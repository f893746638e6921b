//! Lookup tables: classifying spaces, the periodic table, stability bounds and unstable cases.

use std::fmt;

use serde::Serialize;

use crate::clifford::SymmetryClass;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AbGroupLabel {
    Zero,
    Z2,
    Z,
    Zmod(usize),
    /// A finite set with `m` elements, written `Z_m` (only for `dx = dk = 0`).
    FiniteSet(usize),
}

impl fmt::Display for AbGroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbGroupLabel::Zero => f.write_str("0"),
            AbGroupLabel::Z2 => f.write_str("Z2"),
            AbGroupLabel::Z => f.write_str("Z"),
            AbGroupLabel::Zmod(m) => write!(f, "Z/{m}Z"),
            AbGroupLabel::FiniteSet(m) => write!(f, "Z_{m}"),
        }
    }
}

/// Minimal band multiplicity `m_s`; `m_{s+8} = m_s / 16` beyond the first period.
pub fn m_s(class: SymmetryClass) -> usize {
    class.multiplicity()
}

/// `C_s(n)` and `R_s(n)` as homogeneous spaces.
#[derive(Clone, Debug, Serialize)]
pub struct ClassifyingSpace {
    pub class: String,
    pub n: usize,
    /// Realization with `n = 8r` substituted.
    pub complex_symbolic: String,
    pub real_symbolic: Option<String>,
    pub complex_space: String,
    pub real_space: Option<String>,
    /// Real dimension of the base-point component (balanced split where there is a choice).
    pub complex_dim: usize,
    pub real_dim: Option<usize>,
}

fn dim_u(m: usize) -> usize {
    m * m
}

fn dim_o(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// `Sp_m` inside `U_m` (m even).
fn dim_sp(m: usize) -> usize {
    m * (m + 1) / 2
}

fn balanced(total: usize) -> (usize, usize) {
    (total / 2, total - total / 2)
}

pub fn classifying_space(class: SymmetryClass, n: usize) -> Result<ClassifyingSpace> {
    class.check_bands(n)?;
    let grass = |tot: usize, g: &str| format!("{g}_{tot}/({g}_p x {g}_q) over p+q={tot}");
    let (cs, rs, c, r, cd, rd): (
        &str,
        Option<&str>,
        String,
        Option<String>,
        usize,
        Option<usize>,
    ) = match class {
        SymmetryClass::ComplexA => {
            let (p, q) = balanced(2 * n);
            (
                "U_2n/(U_p x U_q) over p+q=2n",
                None,
                grass(2 * n, "U"),
                None,
                2 * p * q,
                None,
            )
        }
        SymmetryClass::ComplexAIII => (
            "(U_n x U_n)/U_n",
            None,
            format!("(U_{n} x U_{n})/U_{n}"),
            None,
            dim_u(n),
            None,
        ),
        SymmetryClass::Real(s) => match s {
            0 => (
                "U_16r/(U_p x U_q) over p+q=16r",
                Some("O_16r/U_8r"),
                grass(2 * n, "U"),
                Some(format!("O_{}/U_{n}", 2 * n)),
                2 * n * n,
                Some(dim_o(2 * n) - dim_u(n)),
            ),
            1 => (
                "(U_8r x U_8r)/U_8r",
                Some("U_8r/Sp_8r"),
                format!("(U_{n} x U_{n})/U_{n}"),
                Some(format!("U_{n}/Sp_{n}")),
                dim_u(n),
                Some(dim_u(n) - dim_sp(n)),
            ),
            2 => {
                let (p, q) = balanced(n / 2);
                (
                    "U_8r/(U_p x U_q) over p+q=8r",
                    Some("Sp_8r/(Sp_2p x Sp_2q) over p+q=4r"),
                    grass(n, "U"),
                    Some(format!("Sp_{n}/(Sp_2p x Sp_2q) over p+q={}", n / 2)),
                    8 * p * q,
                    Some(4 * p * q),
                )
            }
            3 => {
                let m = n / 2;
                (
                    "(U_4r x U_4r)/U_4r",
                    Some("(Sp_4r x Sp_4r)/Sp_4r"),
                    format!("(U_{m} x U_{m})/U_{m}"),
                    Some(format!("(Sp_{m} x Sp_{m})/Sp_{m}")),
                    dim_u(m),
                    Some(dim_sp(m)),
                )
            }
            4 => {
                let m = n / 4;
                (
                    "U_4r/(U_p x U_q) over p+q=4r",
                    Some("Sp_4r/U_2r"),
                    grass(n / 2, "U"),
                    Some(format!("Sp_{}/U_{m}", n / 2)),
                    2 * m * m,
                    Some(m * m + m),
                )
            }
            5 => {
                let m = n / 4;
                (
                    "(U_2r x U_2r)/U_2r",
                    Some("U_2r/O_2r"),
                    format!("(U_{m} x U_{m})/U_{m}"),
                    Some(format!("U_{m}/O_{m}")),
                    dim_u(m),
                    Some(dim_u(m) - dim_o(m)),
                )
            }
            6 => {
                let (p, q) = balanced(n / 4);
                (
                    "U_2r/(U_p x U_q) over p+q=2r",
                    Some("O_2r/(O_p x O_q) over p+q=2r"),
                    grass(n / 4, "U"),
                    Some(grass(n / 4, "O")),
                    2 * p * q,
                    Some(p * q),
                )
            }
            _ => {
                let m = n / 8;
                (
                    "(U_r x U_r)/U_r",
                    Some("(O_r x O_r)/O_r"),
                    format!("(U_{m} x U_{m})/U_{m}"),
                    Some(format!("(O_{m} x O_{m})/O_{m}")),
                    dim_u(m),
                    Some(dim_o(m)),
                )
            }
        },
    };
    Ok(ClassifyingSpace {
        class: class.cartan_name().to_string(),
        n,
        complex_symbolic: cs.to_string(),
        real_symbolic: rs.map(str::to_string),
        complex_space: c,
        real_space: r,
        complex_dim: cd,
        real_dim: rd,
    })
}

const REAL_SEED: [AbGroupLabel; 8] = [
    AbGroupLabel::Z2,
    AbGroupLabel::Zero,
    AbGroupLabel::Z,
    AbGroupLabel::Zero,
    AbGroupLabel::Zero,
    AbGroupLabel::Zero,
    AbGroupLabel::Z,
    AbGroupLabel::Z2,
];

const COMPLEX_SEED: [AbGroupLabel; 2] = [AbGroupLabel::Z, AbGroupLabel::Zero];

/// `[S^{dx,dk}, C_s(n)]`. For `dx + dk ≥ 1` the value depends only on `s - (dk - dx)`;
/// `n` matters only at `dx = dk = 0`, where the `Z` entries become finite sets.
pub fn periodic_table_entry(class: SymmetryClass, dx: usize, dk: usize, n: usize) -> AbGroupLabel {
    let shift = dk as i64 - dx as i64;
    let entry = match class {
        SymmetryClass::Real(s) => REAL_SEED[(s as i64 - shift).rem_euclid(8) as usize],
        SymmetryClass::ComplexA => COMPLEX_SEED[(-shift).rem_euclid(2) as usize],
        SymmetryClass::ComplexAIII => COMPLEX_SEED[(1 - shift).rem_euclid(2) as usize],
    };
    if dx + dk > 0 {
        return entry;
    }
    match class {
        SymmetryClass::ComplexA => AbGroupLabel::FiniteSet(2 * n + 1),
        SymmetryClass::Real(2) => AbGroupLabel::FiniteSet(n / 2 + 1),
        SymmetryClass::Real(6) => AbGroupLabel::FiniteSet(n / 4 + 1),
        _ => entry,
    }
}

/// Row order of the printed tables: complex classes first.
pub const TABLE_ORDER: [SymmetryClass; 10] = [
    SymmetryClass::ComplexA,
    SymmetryClass::ComplexAIII,
    SymmetryClass::Real(0),
    SymmetryClass::Real(1),
    SymmetryClass::Real(2),
    SymmetryClass::Real(3),
    SymmetryClass::Real(4),
    SymmetryClass::Real(5),
    SymmetryClass::Real(6),
    SymmetryClass::Real(7),
];

fn index_label(class: SymmetryClass) -> String {
    match class {
        SymmetryClass::Real(s) => s.to_string(),
        SymmetryClass::ComplexA => "0".into(),
        SymmetryClass::ComplexAIII => "1".into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    I,
    Ii,
    Iii,
    Iv,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseTag::I => "i",
            CaseTag::Ii => "ii",
            CaseTag::Iii => "iii",
            CaseTag::Iv => "iv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsResult {
    pub class: String,
    pub n: usize,
    pub r: usize,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub d1: usize,
    /// `None` for the complex classes.
    pub d2: Option<usize>,
    pub case_tag: CaseTag,
}

impl BoundsResult {
    /// Bijectivity of adding `m_s` bands on `S^{dx,dk}`, `1 ≤ dx + dk`.
    pub fn stable_on_sphere(&self, dx: usize, dk: usize) -> bool {
        dx + dk < self.d1 && self.d2.is_none_or(|d2| dx < d2)
    }

    /// Surjectivity under the weakened conditions.
    pub fn surjective_on_sphere(&self, dx: usize, dk: usize) -> bool {
        dx + dk <= self.d1 && self.d2.is_none_or(|d2| dx <= d2)
    }
}

/// Classes whose base-point component depends on a band split `p + q`.
pub fn has_band_split(class: SymmetryClass) -> bool {
    matches!(
        class,
        SymmetryClass::ComplexA | SymmetryClass::Real(2) | SymmetryClass::Real(6)
    )
}

/// Connectivity bounds `d1`, `d2` for the inclusion `A ↦ A ⊕ A_0` adding `m_s` bands.
/// For class A `p + q = 2n`; for AII and AI `p + q = r`. A missing split is balanced.
pub fn stability_bounds(
    class: SymmetryClass,
    n: usize,
    p: Option<usize>,
    q: Option<usize>,
) -> Result<BoundsResult> {
    class.check_bands(n)?;
    let r = n / class.multiplicity();
    let split = if has_band_split(class) {
        let total = if class == SymmetryClass::ComplexA {
            2 * n
        } else {
            r
        };
        let (p, q) = match (p, q) {
            (Some(p), Some(q)) if p + q == total => (p, q),
            (Some(p), Some(q)) => {
                return Err(Error::Invalid(format!(
                    "p + q = {} but the class requires p + q = {total}",
                    p + q
                )))
            }
            (Some(p), None) if p <= total => (p, total - p),
            (None, Some(q)) if q <= total => (total - q, q),
            (None, None) => balanced(total),
            _ => return Err(Error::Invalid(format!("p or q exceeds {total}"))),
        };
        Some((p, q))
    } else {
        if p.is_some() || q.is_some() {
            return Err(Error::Invalid(format!(
                "class {class} has no band split; p and q do not apply"
            )));
        }
        None
    };
    let (pp, qq) = split.unwrap_or((0, 0));
    let (d1, d2, case_tag) = match class {
        SymmetryClass::ComplexA => ((2 * pp + 1).min(2 * qq + 1), None, CaseTag::Iv),
        SymmetryClass::ComplexAIII => (2 * r, None, CaseTag::I),
        SymmetryClass::Real(s) => match s {
            0 => (2 * r + 1, Some(2 * r - 1), CaseTag::Ii),
            1 => (4 * r, Some(4 * r), CaseTag::Ii),
            2 => (
                (4 * pp + 1).min(4 * qq + 1),
                Some((4 * pp + 3).min(4 * qq + 3)),
                CaseTag::Iv,
            ),
            3 => (4 * r, Some(4 * r + 2), CaseTag::I),
            4 => (2 * r + 1, Some(2 * r + 1), CaseTag::Iii),
            5 => (2 * r, Some(r), CaseTag::Iii),
            6 => ((2 * pp + 1).min(2 * qq + 1), Some(pp.min(qq)), CaseTag::Iv),
            _ => (2 * r, Some(r - 1), CaseTag::I),
        },
    };
    Ok(BoundsResult {
        class: class.cartan_name().to_string(),
        n,
        r,
        p: split.map(|s| s.0),
        q: split.map(|s| s.1),
        d1,
        d2,
        case_tag,
    })
}

/// Conditions `dim M < dim_lt` and (if present) `dim M^{Z2} < fixed_lt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimConditions {
    pub dim_bound: usize,
    pub fixed_dim_bound: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BandAdditionBounds {
    pub class: String,
    pub q: usize,
    /// Bijective when `dim M < dim_bound` (and `dim M^{Z2} < fixed_dim_bound`).
    pub bijective: DimConditions,
    /// Surjective when `dim M ≤ dim_bound` (and `dim M^{Z2} ≤ fixed_dim_bound`).
    pub surjective: DimConditions,
}

impl BandAdditionBounds {
    pub fn bijective_for(&self, dim: usize, fixed_dim: usize) -> bool {
        dim < self.bijective.dim_bound
            && self.bijective.fixed_dim_bound.is_none_or(|b| fixed_dim < b)
    }
}

/// Conditions for adding one conduction band in classes A, AI, AII.
pub fn band_addition_bounds(class: SymmetryClass, q: usize) -> Result<BandAdditionBounds> {
    let c = match class {
        SymmetryClass::ComplexA => DimConditions {
            dim_bound: 2 * q + 1,
            fixed_dim_bound: None,
        },
        SymmetryClass::Real(6) => DimConditions {
            dim_bound: 2 * q + 1,
            fixed_dim_bound: Some(q),
        },
        SymmetryClass::Real(2) => DimConditions {
            dim_bound: 4 * q + 3,
            fixed_dim_bound: None,
        },
        _ => {
            return Err(Error::Unsupported(format!(
                "band addition bounds exist for A, AI and AII, not {class}"
            )))
        }
    };
    Ok(BandAdditionBounds {
        class: class.cartan_name().to_string(),
        q,
        bijective: c,
        surjective: c,
    })
}

/// Column order of the unstable-case table: `(dx, dk)` with `dk ≤ 3`, `dx < dk`.
pub const UNSTABLE_COLUMNS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnstableCase {
    pub class: String,
    pub dx: usize,
    pub dk: usize,
    /// `r` or `q`.
    pub parameter: char,
    /// Largest parameter value outside the stable regime.
    pub up_to: usize,
    /// Change of the stable classification at parameter 1, when known.
    pub annotation: Option<String>,
}

impl UnstableCase {
    pub fn condition(&self) -> String {
        if self.up_to == 1 {
            format!("{}=1", self.parameter)
        } else {
            format!("{}<={}", self.parameter, self.up_to)
        }
    }
}

/// Transcribed changes to the stable classification for `dx = 0`, parameter 1.
const CHANGES: [(SymmetryClass, usize, &str); 11] = [
    (SymmetryClass::ComplexA, 3, "0->Z"),
    (SymmetryClass::ComplexAIII, 2, "0->0"),
    (SymmetryClass::ComplexAIII, 3, "Z->0"),
    (SymmetryClass::Real(0), 3, "0->0"),
    (SymmetryClass::Real(4), 3, "0->Z2"),
    (SymmetryClass::Real(5), 2, "0->0"),
    (SymmetryClass::Real(5), 3, "Z->0"),
    (SymmetryClass::Real(6), 3, "0->0"),
    (SymmetryClass::Real(7), 1, "Z->Z"),
    (SymmetryClass::Real(7), 2, "0->0"),
    (SymmetryClass::Real(7), 3, "0->0"),
];

pub fn stability_change(class: SymmetryClass, dx: usize, dk: usize) -> Option<&'static str> {
    if dx != 0 {
        return None;
    }
    CHANGES
        .iter()
        .find(|(c, k, _)| *c == class && *k == dk)
        .map(|(_, _, a)| *a)
}

const SCAN_LIMIT: usize = 64;

/// Whether `(class, dx, dk)` is stable at parameter value `v` (`q` for A/AI/AII, else `r`).
fn stable_at(class: SymmetryClass, dx: usize, dk: usize, v: usize) -> Result<bool> {
    if has_band_split(class) {
        Ok(band_addition_bounds(class, v)?.bijective_for(dx + dk, dx))
    } else {
        Ok(stability_bounds(class, class.multiplicity() * v, None, None)?.stable_on_sphere(dx, dk))
    }
}

/// All potentially unstable `(class, dx, dk)` with `dk ≤ max_dk`, `dx < dk`.
pub fn unstable_cases(max_dk: usize) -> Result<Vec<UnstableCase>> {
    let mut out = Vec::new();
    for class in TABLE_ORDER {
        for dk in 1..=max_dk {
            for dx in 0..dk {
                let mut up_to = 0;
                for v in 1..=SCAN_LIMIT {
                    if !stable_at(class, dx, dk, v)? {
                        if up_to + 1 != v {
                            return Err(Error::Invalid(format!(
                                "instability of {class} at ({dx},{dk}) is not monotone"
                            )));
                        }
                        up_to = v;
                    }
                }
                if up_to > 0 {
                    out.push(UnstableCase {
                        class: class.cartan_name().to_string(),
                        dx,
                        dk,
                        parameter: if has_band_split(class) { 'q' } else { 'r' },
                        up_to,
                        annotation: stability_change(class, dx, dk).map(str::to_string),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Txt,
    Csv,
    Json,
}

impl TableFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "txt" | "text" => Ok(TableFormat::Txt),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            _ => Err(Error::Invalid(format!("unknown table format '{s}'"))),
        }
    }
}

fn pad_line(cells: &[(String, usize)]) -> String {
    let mut s = String::new();
    for (c, w) in cells {
        s.push_str(&format!("{c:<w$}"));
    }
    s.trim_end().to_string() + "\n"
}

#[derive(Serialize)]
struct PeriodicRow {
    s: String,
    class: String,
    entries: Vec<String>,
}

#[derive(Serialize)]
struct PeriodicJson {
    columns: Vec<usize>,
    rows: Vec<PeriodicRow>,
}

fn periodic_rows() -> Vec<PeriodicRow> {
    TABLE_ORDER
        .iter()
        .map(|&class| PeriodicRow {
            s: index_label(class),
            class: class.cartan_name().to_string(),
            entries: (0..4)
                .map(|c| periodic_table_entry(class, 1, 1 + c, 1).to_string())
                .collect(),
        })
        .collect()
}

/// The periodic table, columns `dk - dx = 0..3`.
pub fn render_periodic_table(format: TableFormat) -> String {
    let rows = periodic_rows();
    match format {
        TableFormat::Txt => {
            let mut out = String::from("Periodic table [S^(dx,dk), C_s(n)], columns dk-dx\n");
            let head = ["s", "class", "0", "1", "2", "3"];
            let w = [4, 7, 5, 5, 5, 5];
            out += &pad_line(
                &head
                    .iter()
                    .zip(w)
                    .map(|(h, w)| (h.to_string(), w))
                    .collect::<Vec<_>>(),
            );
            for r in &rows {
                let mut cells = vec![(r.s.clone(), 4), (r.class.clone(), 7)];
                cells.extend(r.entries.iter().map(|e| (e.clone(), 5)));
                out += &pad_line(&cells);
            }
            out
        }
        TableFormat::Csv => {
            let mut out = String::from("s,class,0,1,2,3\n");
            for r in &rows {
                out += &format!("{},{},{}\n", r.s, r.class, r.entries.join(","));
            }
            out
        }
        TableFormat::Json => {
            let j = PeriodicJson {
                columns: vec![0, 1, 2, 3],
                rows,
            };
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
    }
}

fn unstable_row_label(class: SymmetryClass) -> String {
    match class {
        SymmetryClass::ComplexA => "even".into(),
        SymmetryClass::ComplexAIII => "odd".into(),
        SymmetryClass::Real(s) => s.to_string(),
    }
}

fn unstable_grid(cases: &[UnstableCase]) -> Vec<(String, String, Vec<String>)> {
    TABLE_ORDER
        .iter()
        .map(|&class| {
            let name = class.cartan_name();
            let cells = UNSTABLE_COLUMNS
                .iter()
                .map(|&(dx, dk)| {
                    cases
                        .iter()
                        .find(|c| c.class == name && c.dx == dx && c.dk == dk)
                        .map(|c| c.condition())
                        .unwrap_or_default()
                })
                .collect();
            (unstable_row_label(class), name.to_string(), cells)
        })
        .collect()
}

#[derive(Serialize)]
struct GridJson {
    columns: Vec<String>,
    rows: Vec<GridRow>,
}

#[derive(Serialize)]
struct GridRow {
    s: String,
    class: String,
    cells: Vec<String>,
}

fn render_grid(
    title: &str,
    head: &[String],
    rows: &[(String, String, Vec<String>)],
    format: TableFormat,
) -> String {
    match format {
        TableFormat::Txt => {
            let mut out = format!("{title}\n");
            let mut hc = vec![("s".to_string(), 6), ("class".to_string(), 7)];
            hc.extend(head.iter().map(|h| (h.clone(), 8)));
            out += &pad_line(&hc);
            for (s, c, cells) in rows {
                let mut line = vec![(s.clone(), 6), (c.clone(), 7)];
                line.extend(cells.iter().map(|e| (e.clone(), 8)));
                out += &pad_line(&line);
            }
            out
        }
        TableFormat::Csv => {
            let mut out = format!("s,class,{}\n", head.join(","));
            for (s, c, cells) in rows {
                out += &format!("{s},{c},{}\n", cells.join(","));
            }
            out
        }
        TableFormat::Json => {
            let j = GridJson {
                columns: head.to_vec(),
                rows: rows
                    .iter()
                    .map(|(s, c, cells)| GridRow {
                        s: s.clone(),
                        class: c.clone(),
                        cells: cells.clone(),
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&j).expect("serializable") + "\n"
        }
    }
}

/// Potentially unstable cases for `dk ≤ 3`, `dx < dk`; columns are `dx/dk`.
pub fn render_unstable_table(format: TableFormat) -> Result<String> {
    let cases = unstable_cases(3)?;
    let head: Vec<String> = UNSTABLE_COLUMNS
        .iter()
        .map(|(x, k)| format!("{x}/{k}"))
        .collect();
    Ok(render_grid(
        "Potentially unstable cases (dk <= 3, dx < dk), columns dx/dk",
        &head,
        &unstable_grid(&cases),
        format,
    ))
}

/// Changes to the stable classification at `dx = 0` and parameter 1.
pub fn render_changes_table(format: TableFormat) -> String {
    let head: Vec<String> = (1..=3).map(|k| format!("dk={k}")).collect();
    let rows: Vec<_> = TABLE_ORDER
        .iter()
        .map(|&class| {
            let cells = (1..=3)
                .map(|dk| stability_change(class, 0, dk).unwrap_or("").to_string())
                .collect();
            (
                unstable_row_label(class),
                class.cartan_name().to_string(),
                cells,
            )
        })
        .collect();
    render_grid(
        "Changes to the stable classification at dx = 0 (r = q = 1)",
        &head,
        &rows,
        format,
    )
}
