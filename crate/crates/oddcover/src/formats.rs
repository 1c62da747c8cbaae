//! JSON and CSV shapes for every subcommand.
//!
//! Permutations are written 1-indexed in one-line form. Complex numbers are
//! `[re, im]` pairs. Exact rationals are `[numerator, denominator]` pairs.

use std::io::Write;

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};

use oddcover_core::covering::CoveringReport;
use oddcover_core::elliptic::EllipticSolution;
use oddcover_core::enumeration::ClassCensus;
use oddcover_core::monodromy::{MonodromyTuple, RamificationProfile};
use oddcover_core::spin::{ResidueQuadric, SpinStructure};
use oddcover_core::{Parity, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationJson {
    pub n: usize,
    pub one_line: Vec<usize>,
}

impl From<&Permutation> for PermutationJson {
    fn from(p: &Permutation) -> Self {
        PermutationJson { n: p.degree(), one_line: p.one_line() }
    }
}

impl PermutationJson {
    pub fn to_permutation(&self) -> Result<Permutation> {
        if self.one_line.len() != self.n {
            return Err(anyhow!("permutation declares n = {} but lists {} images", self.n, self.one_line.len()));
        }
        Ok(Permutation::from_one_line(&self.one_line)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleJson {
    pub g: u32,
    pub tau: Vec<PermutationJson>,
}

impl From<&MonodromyTuple> for TupleJson {
    fn from(t: &MonodromyTuple) -> Self {
        TupleJson { g: t.genus(), tau: t.tau().iter().map(PermutationJson::from).collect() }
    }
}

impl TupleJson {
    pub fn to_tuple(&self) -> Result<MonodromyTuple> {
        let tau = self.tau.iter().map(PermutationJson::to_permutation).collect::<Result<Vec<_>>>()?;
        Ok(MonodromyTuple::new(self.g, tau)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileJson {
    pub g: u32,
    pub n: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<u32>,
}

impl ProfileJson {
    pub fn plain(p: &RamificationProfile) -> Self {
        ProfileJson { g: p.genus(), n: p.multiplicities().to_vec(), parity: None, h0: None }
    }

    pub fn with_spin(p: &RamificationProfile, s: &SpinStructure) -> Self {
        ProfileJson { parity: Some(parity_name(s.parity).into()), h0: Some(s.h0), ..Self::plain(p) }
    }
}

pub fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileListJson {
    pub g: u32,
    pub count: u64,
    pub profiles: Vec<ProfileJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileCsvRow {
    pub g: u32,
    pub profile: String,
    pub parity: String,
    pub h0: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsJson {
    pub three_cycles: bool,
    pub three_cycle_entries: Vec<bool>,
    pub iota_compatible: bool,
    pub infinity_odd: bool,
    pub infinity_cycle_type: Vec<usize>,
    pub profile_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub degree: usize,
    pub all_pass: bool,
    pub conditions: ConditionsJson,
    pub transitive: bool,
    pub genus: Option<i64>,
    pub odd: bool,
    pub profile: Option<Vec<u32>>,
    pub quotient_genus: Option<i64>,
    pub fixed_points_over_infinity: Option<u32>,
    pub b_normalizes_gamma_infinity: bool,
    pub spin_parity: Option<String>,
    pub h0: Option<u32>,
}

impl From<&CoveringReport> for ReportJson {
    fn from(r: &CoveringReport) -> Self {
        let c = &r.conditions;
        ReportJson {
            degree: r.degree,
            all_pass: r.all_pass(),
            conditions: ConditionsJson {
                three_cycles: c.three_cycles,
                three_cycle_entries: c.three_cycle_entries.clone(),
                iota_compatible: c.iota_compatible,
                infinity_odd: c.infinity_odd,
                infinity_cycle_type: c.infinity_cycle_type.parts().to_vec(),
                profile_match: c.profile_match,
            },
            transitive: r.transitive,
            genus: r.genus_upstairs,
            odd: r.odd,
            profile: r.profile.as_ref().map(|p| p.multiplicities().to_vec()),
            quotient_genus: r.quotient_genus(),
            fixed_points_over_infinity: r.fixed_points_over_infinity,
            b_normalizes_gamma_infinity: r.b_normalizes_gamma_infinity,
            spin_parity: r.spin.map(|s| parity_name(s.parity).into()),
            h0: r.spin.map(|s| s.h0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildJson {
    pub tuple: TupleJson,
    pub report: ReportJson,
}

/// Accepts either a bare tuple or the output of `build`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TupleInput {
    Built { tuple: TupleJson },
    Bare(TupleJson),
}

impl TupleInput {
    pub fn into_tuple(self) -> TupleJson {
        match self {
            TupleInput::Built { tuple } | TupleInput::Bare(tuple) => tuple,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyRow {
    pub g: u32,
    pub profile: String,
    pub three_cycles: bool,
    pub iota_compatible: bool,
    pub infinity_odd: bool,
    pub transitive: bool,
    pub all_pass: bool,
    pub genus: Option<i64>,
}

impl VerifyRow {
    pub fn new(g: u32, r: &ReportJson) -> Self {
        VerifyRow {
            g,
            profile: r.profile.as_ref().map(|p| join(p)).unwrap_or_default(),
            three_cycles: r.conditions.three_cycles,
            iota_compatible: r.conditions.iota_compatible,
            infinity_odd: r.conditions.infinity_odd,
            transitive: r.transitive,
            all_pass: r.all_pass,
            genus: r.genus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricJson {
    pub g: u32,
    pub n: Vec<u32>,
    pub rank: usize,
    pub smooth: bool,
    pub coefficients: Vec<[i64; 2]>,
}

impl From<&ResidueQuadric> for QuadricJson {
    fn from(q: &ResidueQuadric) -> Self {
        QuadricJson {
            g: q.profile().genus(),
            n: q.profile().multiplicities().to_vec(),
            rank: q.rank_on_residue_space(),
            smooth: q.is_smooth(),
            coefficients: q.coefficients().iter().map(|w| [*w.numer() as i64, *w.denom() as i64]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricCsvRow {
    pub point: usize,
    pub numerator: i64,
    pub denominator: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub a: [[f64; 2]; 4],
    pub residual: f64,
    pub orbit_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionsJson {
    pub tau: [f64; 2],
    pub solutions: Vec<SolutionJson>,
}

impl SolutionsJson {
    pub fn new(tau: [f64; 2], sols: &[EllipticSolution]) -> Self {
        SolutionsJson {
            tau,
            solutions: sols
                .iter()
                .map(|s| SolutionJson {
                    a: std::array::from_fn(|i| [s.a[i].re, s.a[i].im]),
                    residual: s.residual,
                    orbit_id: s.orbit_id,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionCsvRow {
    pub orbit_id: usize,
    pub residual: f64,
    pub a1_re: f64,
    pub a1_im: f64,
    pub a2_re: f64,
    pub a2_im: f64,
    pub a3_re: f64,
    pub a3_im: f64,
    pub a4_re: f64,
    pub a4_im: f64,
}

impl From<&SolutionJson> for SolutionCsvRow {
    fn from(s: &SolutionJson) -> Self {
        let a = &s.a;
        SolutionCsvRow {
            orbit_id: s.orbit_id,
            residual: s.residual,
            a1_re: a[0][0],
            a1_im: a[0][1],
            a2_re: a[1][0],
            a2_im: a[1][1],
            a3_re: a[2][0],
            a3_im: a[2][1],
            a4_re: a[3][0],
            a4_im: a[3][1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub profile: Vec<u32>,
    pub tuple_count: u64,
    pub class_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusCsvRow {
    pub profile: String,
    pub tuple_count: u64,
    pub class_count: u64,
}

impl From<&CensusRow> for CensusCsvRow {
    fn from(r: &CensusRow) -> Self {
        CensusCsvRow { profile: join(&r.profile), tuple_count: r.tuple_count, class_count: r.class_count }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusJson {
    pub g: u32,
    pub counts: Vec<CensusRow>,
    pub total_tuples: u64,
    pub total_classes: u64,
}

impl From<&ClassCensus> for CensusJson {
    fn from(c: &ClassCensus) -> Self {
        CensusJson {
            g: c.g,
            counts: c
                .counts
                .iter()
                .map(|(k, v)| CensusRow { profile: k.clone(), tuple_count: v.tuple_count, class_count: v.class_count })
                .collect(),
            total_tuples: c.total_tuples(),
            total_classes: c.total_classes(),
        }
    }
}

impl CensusJson {
    pub fn to_census(&self) -> ClassCensus {
        let mut c = ClassCensus::empty(self.g);
        for row in &self.counts {
            let e = c.counts.entry(row.profile.clone()).or_default();
            e.tuple_count += row.tuple_count;
            e.class_count += row.class_count;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointJson {
    pub task_hash: String,
    pub cursor: u32,
    pub partial: CensusJson,
}

/// Space-separated multiplicities, as used in CSV cells.
pub fn join(n: &[u32]) -> String {
    n.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

/// Comma-separated list of non-negative integers, e.g. `1,0,0,0,0,0`.
pub fn parse_profile(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(|x| x.trim().parse::<u32>().with_context(|| format!("bad profile entry {x:?}"))).collect()
}

/// `re,im`.
pub fn parse_complex(s: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(anyhow!("expected re,im but got {s:?}"));
    }
    let re = parts[0].trim().parse::<f64>().with_context(|| format!("bad real part {:?}", parts[0]))?;
    let im = parts[1].trim().parse::<f64>().with_context(|| format!("bad imaginary part {:?}", parts[1]))?;
    Ok([re, im])
}

/// Pretty JSON with a trailing newline; deterministic for identical values.
pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
