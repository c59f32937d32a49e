//! Orchestration: build the tables for one `(q, r)`, run the requested
//! checks, and assemble a JSON report.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::classfun::ClassFunction;
use crate::cyclo::CycloNum;
use crate::dl::{
    classical_dl_level1, dl_character, is_regular_semisimple, regular_ss_value, LiftData,
};
use crate::error::{Error, Result};
use crate::gamma::{gamma_identity_check, gamma_sides};
use crate::green::{
    formula_terms, green_from_characters, inner_product_check, integrality_check,
    product_property_check, summation_check, torus_green, verify_character_formula, GreenTable,
};
use crate::grp::GroupTable;
use crate::rings::{prime_factors, FiniteField, TruncRing};
use crate::tori::{AbelianChar, Phase, TorusData, TorusKind};

const CACHE_FORMAT: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Summation,
    Integrality,
    CharFormula,
    RegularSs,
    ProductProperty,
    InnerProduct,
    Gamma,
    LevelOneCoincidence,
    ClassicalOrthogonality,
}

impl CheckId {
    pub const ALL: [CheckId; 9] = [
        CheckId::Summation,
        CheckId::Integrality,
        CheckId::CharFormula,
        CheckId::RegularSs,
        CheckId::ProductProperty,
        CheckId::InnerProduct,
        CheckId::Gamma,
        CheckId::LevelOneCoincidence,
        CheckId::ClassicalOrthogonality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Summation => "summation",
            CheckId::Integrality => "integrality",
            CheckId::CharFormula => "char_formula",
            CheckId::RegularSs => "regular_ss",
            CheckId::ProductProperty => "product_property",
            CheckId::InnerProduct => "inner_product",
            CheckId::Gamma => "gamma",
            CheckId::LevelOneCoincidence => "level_one_coincidence",
            CheckId::ClassicalOrthogonality => "classical_orthogonality",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown check '{s}'")))
    }
}

/// Parses `all` or a comma-separated list of check names.
pub fn parse_checks(spec: &str) -> Result<Vec<CheckId>> {
    if spec.trim() == "all" {
        return Ok(CheckId::ALL.to_vec());
    }
    let mut out: Vec<CheckId> =
        spec.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn default_checks() -> Vec<CheckId> {
    CheckId::ALL.to_vec()
}

fn default_tori() -> Vec<TorusKind> {
    vec![TorusKind::Split, TorusKind::Nonsplit]
}

fn default_seed() -> u64 {
    2024
}

fn default_n() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub q: u64,
    pub r: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_tori")]
    pub tori: Vec<TorusKind>,
    #[serde(default = "default_checks")]
    pub checks: Vec<CheckId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_tables: Option<PathBuf>,
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(q: u64, r: usize) -> Self {
        ExperimentConfig {
            q,
            r,
            n: 2,
            tori: default_tori(),
            checks: default_checks(),
            out: None,
            cache: None,
            dump_tables: None,
            jobs: 0,
            seed: default_seed(),
        }
    }

    pub fn validate(&self) -> Result<(u32, u32)> {
        if self.n != 2 {
            return Err(Error::Unsupported("only n = 2 is implemented".into()));
        }
        if self.r == 0 || (self.r > 1 && self.r % 2 == 1) {
            return Err(Error::Malformed("r must be 1 or even".into()));
        }
        let q32 = u32::try_from(self.q)
            .map_err(|_| Error::TooLarge(format!("q = {} is too large", self.q)))?;
        let factors = prime_factors(q32);
        if factors.len() != 1 {
            return Err(Error::Malformed(format!("q = {} is not a prime power", self.q)));
        }
        let p = factors[0];
        let mut k = 0;
        let mut m = q32;
        while m > 1 {
            m /= p;
            k += 1;
        }
        let entries = (self.q as f64).powi(4 * self.r as i32);
        if entries > (1u64 << 24) as f64 {
            return Err(Error::TooLarge(format!(
                "q^(4r) = {entries} exceeds the enumeration budget"
            )));
        }
        if self.tori.is_empty() {
            return Err(Error::Malformed("no torus selected".into()));
        }
        Ok((p, k))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: CheckId,
    pub params: Value,
    pub lhs: CycloNum,
    pub rhs: CycloNum,
    /// `"equal"` for identities, `"differ"` for negative controls.
    pub expected: String,
    pub pass: bool,
    pub elapsed_ms: u64,
    pub lhs_pretty: String,
    pub rhs_pretty: String,
}

impl CheckRecord {
    fn new(check: CheckId, params: Value, lhs: CycloNum, rhs: CycloNum, started: Instant) -> Self {
        let pass = lhs == rhs;
        Self::build(check, params, lhs, rhs, "equal", pass, started)
    }

    fn negative_control(
        check: CheckId,
        params: Value,
        lhs: CycloNum,
        rhs: CycloNum,
        started: Instant,
    ) -> Self {
        let pass = lhs != rhs;
        Self::build(check, params, lhs, rhs, "differ", pass, started)
    }

    fn build(
        check: CheckId,
        params: Value,
        lhs: CycloNum,
        rhs: CycloNum,
        expected: &str,
        pass: bool,
        started: Instant,
    ) -> Self {
        CheckRecord {
            check,
            params,
            lhs_pretty: lhs.pretty(),
            rhs_pretty: rhs.pretty(),
            lhs,
            rhs,
            expected: expected.into(),
            pass,
            elapsed_ms: started.elapsed().as_millis() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ExperimentConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    /// sha256 of each serialized character table, keyed by torus kind.
    pub artifacts: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// The report with timing fields zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.records.iter_mut().for_each(|rec| rec.elapsed_ms = 0);
        r
    }

    /// Pass/fail counts per check id.
    pub fn by_check(&self) -> BTreeMap<CheckId, Summary> {
        let mut out: BTreeMap<CheckId, Summary> = BTreeMap::new();
        for rec in &self.records {
            let e = out.entry(rec.check).or_default();
            if rec.pass {
                e.pass += 1;
            } else {
                e.fail += 1;
            }
        }
        out
    }

    /// Human-readable summary table.
    pub fn render_table(&self) -> String {
        let mut s = format!(
            "q={} r={} tori={:?}\n{:<26}{:>8}{:>8}\n",
            self.config.q, self.config.r, self.config.tori, "check", "pass", "fail"
        );
        for (check, sum) in self.by_check() {
            s.push_str(&format!("{:<26}{:>8}{:>8}\n", check.name(), sum.pass, sum.fail));
        }
        s.push_str(&format!(
            "{:<26}{:>8}{:>8}\n",
            "total", self.summary.pass, self.summary.fail
        ));
        s
    }
}

/// Character table of one torus: one DL character per `theta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CachedTable {
    format: u32,
    q: u64,
    r: usize,
    torus: TorusKind,
    class_reps: Vec<usize>,
    characters: Vec<CachedCharacter>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CachedCharacter {
    theta: AbelianChar,
    values: Vec<CycloNum>,
}

/// Everything built for one torus.
pub struct TorusWork {
    pub torus: TorusData,
    pub lift: Option<LiftData>,
    pub characters: Vec<(AbelianChar, ClassFunction)>,
    pub green: GreenTable,
    pub torus_green: GreenTable,
    pub table_hash: String,
}

/// The group for `(q, r)` with all per-torus data.
pub struct Workspace {
    pub table: GroupTable,
    pub tori: Vec<TorusWork>,
}

pub fn build_group(q: u64, r: usize) -> Result<GroupTable> {
    let mut cfg = ExperimentConfig::new(q, r);
    cfg.checks.clear();
    let (p, k) = cfg.validate()?;
    let ring = TruncRing::new(Arc::new(FiniteField::new(p, k)?), r);
    GroupTable::enumerate(2, &ring)
}

fn cache_key(q: u64, r: usize, torus: TorusKind) -> String {
    let canonical = json!({"format": CACHE_FORMAT, "q": q, "r": r, "n": 2, "torus": torus});
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Workspace {
    pub fn build(q: u64, r: usize, kinds: &[TorusKind], cache: Option<&Path>) -> Result<Self> {
        let table = build_group(q, r)?;
        let mut tori = Vec::with_capacity(kinds.len());
        for &kind in kinds {
            tori.push(Self::build_torus(&table, q, r, kind, cache)?);
        }
        Ok(Workspace { table, tori })
    }

    fn build_torus(
        table: &GroupTable,
        q: u64,
        r: usize,
        kind: TorusKind,
        cache: Option<&Path>,
    ) -> Result<TorusWork> {
        let torus = TorusData::build(table, kind)?;
        let lift = if r >= 2 { Some(LiftData::new(table, &torus)?) } else { None };
        let class_reps: Vec<usize> = (0..table.num_classes()).map(|c| table.class_rep(c)).collect();
        let cache_file = cache.map(|dir| dir.join(format!("{}.json", cache_key(q, r, kind))));

        let mut characters = None;
        if let Some(path) = cache_file.as_ref().filter(|p| p.exists()) {
            let cached: CachedTable = serde_json::from_slice(&fs::read(path)?)?;
            let expected_thetas = torus.characters();
            if cached.format == CACHE_FORMAT
                && cached.class_reps == class_reps
                && cached.characters.iter().map(|c| &c.theta).eq(expected_thetas.iter())
            {
                characters = Some(
                    cached
                        .characters
                        .into_iter()
                        .map(|c| Ok((c.theta, ClassFunction::new(table, c.values)?)))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
        }
        let characters = match characters {
            Some(c) => c,
            None => compute_characters(table, &torus, lift.as_ref())?,
        };
        let record = CachedTable {
            format: CACHE_FORMAT,
            q,
            r,
            torus: kind,
            class_reps,
            characters: characters
                .iter()
                .map(|(th, chi)| CachedCharacter { theta: th.clone(), values: chi.values().to_vec() })
                .collect(),
        };
        let bytes = serde_json::to_vec(&record)?;
        if let Some(path) = &cache_file {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, &bytes)?;
        }
        let green = green_from_characters(table, &torus, r / 2, &characters)?;
        let torus_green = torus_green(table, &torus);
        Ok(TorusWork {
            torus,
            lift,
            characters,
            green,
            torus_green,
            table_hash: sha256_hex(&bytes),
        })
    }
}

/// DL characters for every `theta`: induced at even `r`, classical at `r = 1`.
pub fn compute_characters(
    table: &GroupTable,
    torus: &TorusData,
    lift: Option<&LiftData>,
) -> Result<Vec<(AbelianChar, ClassFunction)>> {
    use rayon::prelude::*;
    torus
        .characters()
        .into_par_iter()
        .map(|th| {
            let chi = match lift {
                Some(lift) => dl_character(table, torus, lift, &th)?,
                None => classical_dl_level1(table, torus, &th)?,
            };
            Ok((th, chi))
        })
        .collect()
}

fn int(v: i64) -> CycloNum {
    CycloNum::from_int(1, v)
}

fn theta_params(kind: TorusKind, th: &AbelianChar) -> Value {
    json!({"torus": kind, "theta": th.exponents(), "orders": th.orders()})
}

/// Runs the experiment inside a pool of `config.jobs` threads (0 = default).
pub fn run(config: &ExperimentConfig) -> Result<VerificationReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let report = pool.install(|| run_inner(config))?;
    if let Some(out) = &config.out {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

fn run_inner(config: &ExperimentConfig) -> Result<VerificationReport> {
    let ws = Workspace::build(config.q, config.r, &config.tori, config.cache.as_deref())?;
    if let Some(dir) = &config.dump_tables {
        dump_tables(&ws, config, dir)?;
    }
    let mut records = Vec::new();
    let mut level_one: Option<Workspace> = None;
    for &check in &config.checks {
        for work in &ws.tori {
            let recs = match check {
                CheckId::Summation => check_summation(work),
                CheckId::Integrality => check_integrality(work),
                CheckId::CharFormula => check_char_formula(&ws.table, work)?,
                CheckId::RegularSs => check_regular_ss(&ws.table, work)?,
                CheckId::ProductProperty => check_product(&ws.table, work)?,
                CheckId::InnerProduct => check_inner_product(&ws.table, work)?,
                CheckId::Gamma => check_gamma(&ws.table, work, config.seed)?,
                CheckId::LevelOneCoincidence | CheckId::ClassicalOrthogonality => {
                    if level_one.is_none() {
                        level_one = Some(if config.r == 1 {
                            Workspace::build(config.q, 1, &config.tori, None)?
                        } else {
                            Workspace::build(config.q, 1, &config.tori, config.cache.as_deref())?
                        });
                    }
                    let lw = level_one.as_ref().expect("built above");
                    let lwork = lw
                        .tori
                        .iter()
                        .find(|w| w.torus.kind() == work.torus.kind())
                        .ok_or_else(|| Error::Internal("missing level-one torus".into()))?;
                    if check == CheckId::LevelOneCoincidence {
                        check_level_one(&ws.table, work, &lw.table, lwork)?
                    } else {
                        check_classical_orthogonality(&lw.table, lwork)?
                    }
                }
            };
            records.extend(recs);
        }
    }
    let pass = records.iter().filter(|r| r.pass).count();
    let summary = Summary { pass, fail: records.len() - pass };
    let artifacts = ws
        .tori
        .iter()
        .map(|w| (w.torus.kind().to_string(), w.table_hash.clone()))
        .collect();
    Ok(VerificationReport { config: config.clone(), records, summary, artifacts })
}

fn check_summation(work: &TorusWork) -> Vec<CheckRecord> {
    let started = Instant::now();
    let (total, expected) = summation_check(&work.green);
    vec![CheckRecord::new(
        CheckId::Summation,
        json!({"torus": work.torus.kind()}),
        total,
        int(expected as i64),
        started,
    )]
}

fn check_integrality(work: &TorusWork) -> Vec<CheckRecord> {
    integrality_check(&work.green)
        .into_iter()
        .map(|(u, v, _)| {
            let started = Instant::now();
            let nearest = v
                .as_rational()
                .map(|x| CycloNum::from_rational(1, x.round()))
                .unwrap_or_else(|| CycloNum::zero(1));
            CheckRecord::new(
                CheckId::Integrality,
                json!({"torus": work.torus.kind(), "unipotent": u}),
                v,
                nearest,
                started,
            )
        })
        .collect()
}

/// One record per `theta`: number of classes where the two sides agree
/// against the number of classes; disagreeing classes get their own records.
fn check_char_formula(table: &GroupTable, work: &TorusWork) -> Result<Vec<CheckRecord>> {
    use rayon::prelude::*;
    let terms = formula_terms(table, &work.torus)?;
    let per_theta = work
        .characters
        .par_iter()
        .map(|(th, chi)| {
            let started = Instant::now();
            let checks = verify_character_formula(
                table,
                &work.torus,
                th,
                chi,
                &terms,
                &work.green,
                &work.torus_green,
            )?;
            let mut out = Vec::new();
            let agree = checks.iter().filter(|c| c.pass).count();
            for c in checks.into_iter().filter(|c| !c.pass) {
                let mut params = theta_params(work.torus.kind(), th);
                params["class"] = json!(c.class);
                out.push(CheckRecord::new(CheckId::CharFormula, params, c.lhs, c.rhs, started));
            }
            let mut params = theta_params(work.torus.kind(), th);
            params["classes"] = json!(table.num_classes());
            out.push(CheckRecord::new(
                CheckId::CharFormula,
                params,
                int(agree as i64),
                int(table.num_classes() as i64),
                started,
            ));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_theta.into_iter().flatten().collect())
}

fn regular_classes(table: &GroupTable) -> Vec<usize> {
    (0..table.num_classes())
        .filter(|&c| is_regular_semisimple(table, table.class_rep(c)))
        .collect()
}

fn check_regular_ss(table: &GroupTable, work: &TorusWork) -> Result<Vec<CheckRecord>> {
    let classes = regular_classes(table);
    let mut out = Vec::new();
    for (th, chi) in &work.characters {
        let started = Instant::now();
        let mut agree = 0;
        for &c in &classes {
            let expected = regular_ss_value(table, &work.torus, th, table.class_rep(c))?;
            if *chi.class_value(c) == expected {
                agree += 1;
            } else {
                let mut params = theta_params(work.torus.kind(), th);
                params["class"] = json!(c);
                out.push(CheckRecord::new(
                    CheckId::RegularSs,
                    params,
                    chi.class_value(c).clone(),
                    expected,
                    started,
                ));
            }
        }
        let mut params = theta_params(work.torus.kind(), th);
        params["regular_classes"] = json!(classes.len());
        out.push(CheckRecord::new(
            CheckId::RegularSs,
            params,
            int(agree),
            int(classes.len() as i64),
            started,
        ));
    }
    Ok(out)
}

fn check_product(table: &GroupTable, work: &TorusWork) -> Result<Vec<CheckRecord>> {
    let Some(lift) = &work.lift else {
        return Ok(Vec::new());
    };
    let j = 1;
    let mut out = Vec::new();
    for (th, _) in &work.characters {
        let started = Instant::now();
        let rep = product_property_check(table, &work.torus, lift, th, j)?;
        let agree = rep
            .twisted
            .values()
            .iter()
            .zip(rep.product.values())
            .filter(|(a, b)| a == b)
            .count();
        let mut params = theta_params(work.torus.kind(), th);
        params["det_exponent"] = json!(j);
        out.push(CheckRecord::new(
            CheckId::ProductProperty,
            params,
            int(agree as i64),
            int(table.num_classes() as i64),
            started,
        ));
    }
    Ok(out)
}

fn check_inner_product(table: &GroupTable, work: &TorusWork) -> Result<Vec<CheckRecord>> {
    let Some(lift) = &work.lift else {
        return Ok(Vec::new());
    };
    let j = 1;
    work.characters
        .iter()
        .map(|(th, _)| {
            let started = Instant::now();
            let (lhs, rhs) = inner_product_check(table, &work.torus, lift, th, j)?;
            let mut params = theta_params(work.torus.kind(), th);
            params["det_exponent"] = json!(j);
            Ok(CheckRecord::new(CheckId::InnerProduct, params, lhs, rhs, started))
        })
        .collect()
}

/// `p`-constant test functions: the constant 1, a determinant character,
/// and seeded random extensions from the semisimple classes.
pub fn psi_samples(table: &GroupTable, seed: u64, random: usize) -> Result<Vec<ClassFunction>> {
    let mut out = vec![ClassFunction::one(table), ClassFunction::det_character(table, 1)?];
    let semisimple: Vec<usize> = (0..table.num_classes())
        .filter(|&c| table.is_semisimple(table.class_rep(c)))
        .collect();
    let modulus = ((table.q() - 1) as u32).lcm(&4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let values = semisimple
            .iter()
            .map(|&c| {
                let a = CycloNum::from_int(1, rng.gen_range(-3..=3));
                let b = CycloNum::root_of_unity(modulus, rng.gen_range(0..modulus as i64));
                (c, &a + &b)
            })
            .collect();
        out.push(ClassFunction::p_constant_extend(table, &values)?);
    }
    Ok(out)
}

fn check_gamma(table: &GroupTable, work: &TorusWork, seed: u64) -> Result<Vec<CheckRecord>> {
    let Some(lift) = &work.lift else {
        return Ok(Vec::new());
    };
    let torus = &work.torus;
    let psis = psi_samples(table, seed, 4)?;
    let mut out = Vec::new();
    for (th, _) in &work.characters {
        if !th.is_trivial_on(torus.structure(), torus.pro_part())? {
            continue;
        }
        for (i, psi) in psis.iter().enumerate() {
            let started = Instant::now();
            let (lhs, rhs) = gamma_identity_check(table, torus, lift, th, psi)?;
            let mut params = theta_params(torus.kind(), th);
            params["psi"] = json!(i);
            out.push(CheckRecord::new(CheckId::Gamma, params, lhs, rhs, started));
        }
    }
    // Negative control: theta trivial on T_1 but not on T^1, psi = 1.
    if let Some((th, _)) = work.characters.iter().find(|(th, _)| {
        th.is_trivial_on(torus.structure(), torus.level_one()).unwrap_or(false)
            && !th.is_trivial_on(torus.structure(), torus.pro_part()).unwrap_or(true)
    }) {
        let started = Instant::now();
        let (lhs, rhs) = gamma_sides(table, torus, lift, th, &psis[0])?;
        let mut params = theta_params(torus.kind(), th);
        params["psi"] = json!(0);
        params["control"] = json!("theta not p-constant");
        out.push(CheckRecord::negative_control(CheckId::Gamma, params, lhs, rhs, started));
    }
    Ok(out)
}

/// `theta` restricted to `T_1`, transported to the level-one torus by
/// Teichmüller lifting of constant matrices.
pub fn restrict_to_level_one(
    table: &GroupTable,
    torus: &TorusData,
    theta: &AbelianChar,
    level_one_table: &GroupTable,
    level_one_torus: &TorusData,
) -> Result<AbelianChar> {
    let phases = level_one_torus
        .structure()
        .factors()
        .iter()
        .map(|f| {
            let lifted = level_one_table.matrix(f.generator).lift_constant(table.level());
            let x = table.index_of(&lifted).ok_or(Error::NotMember("group"))?;
            if !torus.level_one().contains(x) {
                return Err(Error::Internal("Teichmüller lift left T_1".into()));
            }
            theta.eval(torus.structure(), x)
        })
        .collect::<Result<Vec<Phase>>>()?;
    AbelianChar::from_generator_phases(level_one_torus.structure(), &phases)
}

fn check_level_one(
    table: &GroupTable,
    work: &TorusWork,
    level_one_table: &GroupTable,
    level_one_work: &TorusWork,
) -> Result<Vec<CheckRecord>> {
    // Regular semisimple classes of G that meet the constant matrices.
    let mut constant_classes = Vec::new();
    for c in regular_classes(table) {
        let x = table.class_rep(c);
        let constant = (0..table.order())
            .map(|h| table.conj(x, h))
            .find(|&y| table.matrix(y).is_constant());
        if let Some(y) = constant {
            constant_classes.push((c, y));
        }
    }
    let mut out = Vec::new();
    for (th, chi) in &work.characters {
        let started = Instant::now();
        let th1 = restrict_to_level_one(
            table,
            &work.torus,
            th,
            level_one_table,
            &level_one_work.torus,
        )?;
        let classical = level_one_work
            .characters
            .iter()
            .find(|(t, _)| *t == th1)
            .map(|(_, c)| c)
            .ok_or_else(|| Error::Internal("restricted character not found".into()))?;
        let mut agree = 0;
        for &(c, y) in &constant_classes {
            let reduced = table.reduce(y, 1)?;
            let y1 = level_one_table.index_of(&reduced).ok_or(Error::NotMember("group"))?;
            let rhs = classical.at(level_one_table, y1);
            if chi.class_value(c) == rhs {
                agree += 1;
            } else {
                let mut params = theta_params(work.torus.kind(), th);
                params["class"] = json!(c);
                out.push(CheckRecord::new(
                    CheckId::LevelOneCoincidence,
                    params,
                    chi.class_value(c).clone(),
                    rhs.clone(),
                    started,
                ));
            }
        }
        let mut params = theta_params(work.torus.kind(), th);
        params["constant_regular_classes"] = json!(constant_classes.len());
        out.push(CheckRecord::new(
            CheckId::LevelOneCoincidence,
            params,
            int(agree),
            int(constant_classes.len() as i64),
            started,
        ));
    }
    Ok(out)
}

fn check_classical_orthogonality(
    table: &GroupTable,
    work: &TorusWork,
) -> Result<Vec<CheckRecord>> {
    work.characters
        .iter()
        .map(|(th, chi)| {
            let started = Instant::now();
            let lhs = chi.inner_product(chi, table)?;
            let stab = work.torus.weyl_stabilizer_size(table, th)?;
            Ok(CheckRecord::new(
                CheckId::ClassicalOrthogonality,
                theta_params(work.torus.kind(), th),
                lhs,
                int(stab as i64),
                started,
            ))
        })
        .collect()
}

#[derive(Serialize)]
struct ClassRecord {
    class: usize,
    rep: usize,
    size: usize,
    matrix: Vec<Vec<Vec<u32>>>,
    unipotent: bool,
    semisimple: bool,
}

#[derive(Serialize)]
struct CharacterRecord<'a> {
    config: Value,
    degree: &'a CycloNum,
    values: BTreeMap<usize, &'a CycloNum>,
}

#[derive(Serialize)]
struct GreenRecord {
    u_class: usize,
    tau_index: usize,
    value: CycloNum,
}

/// Writes class data, DL character tables and Green tables as deterministic JSON.
pub fn dump_tables(ws: &Workspace, config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let table = &ws.table;
    let mut written = Vec::new();
    let classes: Vec<ClassRecord> = (0..table.num_classes())
        .map(|c| {
            let rep = table.class_rep(c);
            let m = table.matrix(rep);
            ClassRecord {
                class: c,
                rep,
                size: table.class_size(c),
                matrix: (0..2)
                    .map(|i| (0..2).map(|j| m.entry(i, j).to_vec()).collect())
                    .collect(),
                unipotent: table.is_unipotent(rep),
                semisimple: table.is_semisimple(rep),
            }
        })
        .collect();
    let path = dir.join(format!("classes_q{}_r{}.json", config.q, config.r));
    fs::write(&path, serde_json::to_string_pretty(&classes)?)?;
    written.push(path);

    for work in &ws.tori {
        let kind = work.torus.kind();
        let id = table.class_of(table.identity());
        let chars: Vec<CharacterRecord> = work
            .characters
            .iter()
            .map(|(th, chi)| CharacterRecord {
                config: json!({"q": config.q, "r": config.r, "torus": kind, "theta": th.exponents(), "orders": th.orders()}),
                degree: chi.class_value(id),
                values: (0..table.num_classes()).map(|c| (c, chi.class_value(c))).collect(),
            })
            .collect();
        let path = dir.join(format!("dl_{kind}_q{}_r{}.json", config.q, config.r));
        fs::write(&path, serde_json::to_string_pretty(&chars)?)?;
        written.push(path);

        let rows: Vec<GreenRecord> = work
            .green
            .rows
            .iter()
            .flat_map(|row| {
                row.values.iter().enumerate().map(move |(i, v)| GreenRecord {
                    u_class: table.class_of(row.rep),
                    tau_index: i,
                    value: v.clone(),
                })
            })
            .collect();
        let green = json!({"torus": kind, "b": work.green.b, "taus": work.green.taus, "rows": rows});
        let path = dir.join(format!("green_{kind}_q{}_r{}.json", config.q, config.r));
        fs::write(&path, serde_json::to_string_pretty(&green)?)?;
        written.push(path);
    }
    Ok(written)
}
