//! Externally tabulated isogeny classes (LMFDB-style JSON records): fixture
//! loading, an opt-in HTTP client with a local cache, and cross-validation
//! of the tabulated ordinariness flags and point counts.
//!
//! Records publish polynomials constant term first; [`ExternalClassRecord::poly`]
//! keeps that order and [`ExternalClassRecord::weil_polynomial`] converts.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::weil::{is_ordinary, point_count, prime_power};

/// Environment variable naming the cache directory for fetched records.
pub const CACHE_DIR_ENV: &str = "CYCLAV_CACHE_DIR";
/// Environment variable naming the default endpoint.
pub const ENDPOINT_ENV: &str = "CYCLAV_ENDPOINT";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalClassRecord {
    pub label: String,
    pub q: u64,
    pub g: usize,
    /// Constant term first, as published.
    pub poly: Vec<BigInt>,
    pub is_ordinary_claimed: Option<bool>,
    pub point_count_claimed: Option<BigInt>,
}

impl ExternalClassRecord {
    pub fn weil_polynomial(&self) -> IntPoly {
        IntPoly::new(self.poly.clone())
    }

    /// `(p, r)` with `q = p^r`; validated on load.
    pub fn prime_power(&self) -> (u64, u32) {
        prime_power(self.q).expect("validated prime power")
    }

    /// One JSON line in the fixture format.
    pub fn to_json_line(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("label".into(), Value::String(self.label.clone()));
        obj.insert("q".into(), Value::from(self.q));
        obj.insert("g".into(), Value::from(self.g));
        obj.insert("poly".into(), Value::Array(self.poly.iter().map(big_to_json).collect()));
        if let Some(o) = self.is_ordinary_claimed {
            obj.insert("is_ordinary_claimed".into(), Value::Bool(o));
        }
        if let Some(n) = &self.point_count_claimed {
            obj.insert("point_count_claimed".into(), big_to_json(n));
        }
        Value::Object(obj).to_string()
    }
}

fn big_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn json_to_big(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse().ok(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

const FIELDS: [&str; 6] = ["label", "q", "g", "poly", "is_ordinary_claimed", "point_count_claimed"];

/// Validate one decoded JSON object.
pub fn record_from_json(v: &Value) -> std::result::Result<ExternalClassRecord, String> {
    let obj = v.as_object().ok_or("record is not a JSON object")?;
    if let Some(extra) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(format!("unknown field `{extra}`"));
    }
    let label = obj.get("label").and_then(Value::as_str).ok_or("missing or non-string `label`")?.to_string();
    let q = obj.get("q").and_then(Value::as_u64).ok_or("missing or non-integer `q`")?;
    if prime_power(q).is_none() {
        return Err(format!("q = {q} is not a prime power"));
    }
    let g = obj.get("g").and_then(Value::as_u64).ok_or("missing or non-integer `g`")?;
    if g == 0 {
        return Err("g must be positive".into());
    }
    let g = usize::try_from(g).map_err(|_| "g out of range")?;
    let poly: Vec<BigInt> = obj
        .get("poly")
        .and_then(Value::as_array)
        .ok_or("missing or non-array `poly`")?
        .iter()
        .map(json_to_big)
        .collect::<Option<_>>()
        .ok_or("non-integer coefficient in `poly`")?;
    if poly.len() != 2 * g + 1 {
        return Err(format!("`poly` has {} coefficients, expected {}", poly.len(), 2 * g + 1));
    }
    if poly.last() != Some(&BigInt::from(1)) {
        return Err("polynomial is not monic".into());
    }
    let is_ordinary_claimed = match obj.get("is_ordinary_claimed") {
        None | Some(Value::Null) => None,
        Some(Value::Bool(b)) => Some(*b),
        Some(_) => return Err("non-boolean `is_ordinary_claimed`".into()),
    };
    let point_count_claimed = match obj.get("point_count_claimed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(json_to_big(v).ok_or("non-integer `point_count_claimed`")?),
    };
    Ok(ExternalClassRecord { label, q, g, poly, is_ordinary_claimed, point_count_claimed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedLine {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fixture {
    pub records: Vec<ExternalClassRecord>,
    pub rejected: Vec<RejectedLine>,
}

/// Parse JSON-lines text; blank lines are skipped, bad lines rejected.
pub fn parse_fixture(text: &str) -> Result<Fixture> {
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<Value>(line)
            .map_err(|e| format!("invalid JSON at column {}: {e}", e.column()))
            .and_then(|v| record_from_json(&v));
        match parsed {
            Ok(r) => records.push(r),
            Err(reason) => rejected.push(RejectedLine { line: i + 1, reason }),
        }
    }
    if records.is_empty() {
        let detail = match rejected.first() {
            Some(r) => format!(" (line {}: {})", r.line, r.reason),
            None => String::new(),
        };
        return Err(Error::Parse(format!("no valid records{detail}")));
    }
    Ok(Fixture { records, rejected })
}

pub fn load_fixture(path: &Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_fixture(&text)
}

/// Fixture text for `records`, one line each, sorted by label.
pub fn render_fixture(records: &[ExternalClassRecord]) -> String {
    let mut sorted: Vec<&ExternalClassRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.poly.cmp(&b.poly)));
    let mut out = String::new();
    for r in sorted {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchConfig {
    pub network_enabled: bool,
    pub endpoint: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub timeout_secs: Option<u64>,
}

impl FetchConfig {
    /// Fill unset fields from the environment.
    pub fn with_env(mut self) -> Self {
        if self.cache_dir.is_none() {
            self.cache_dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
        }
        if self.endpoint.is_none() {
            self.endpoint = std::env::var(ENDPOINT_ENV).ok();
        }
        self
    }

    pub fn cache_path(&self, q: u64, g: usize) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("classes_q{q}_g{g}.jsonl")))
    }
}

/// Decode a response body: a JSON array of records or `{"data": [...]}`.
pub fn parse_remote_body(body: &str) -> Result<Vec<ExternalClassRecord>> {
    let v: Value = serde_json::from_str(body).map_err(|e| {
        Error::Parse(format!("malformed response body at offset {}: {e}", byte_offset(body, e.line(), e.column())))
    })?;
    let items = match &v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("response object has no `data` array".into()))?,
        _ => return Err(Error::Parse("response is neither an array nor an object".into())),
    };
    items
        .iter()
        .enumerate()
        .map(|(i, item)| record_from_json(item).map_err(|e| Error::Parse(format!("record {i}: {e}"))))
        .collect()
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1);
        }
        offset += l.len();
    }
    offset
}

/// Records for `(q, g)` from the configured endpoint, cache first.
///
/// The cache file is written atomically and only after a successful
/// decode, so failed fetches leave it untouched.
pub fn fetch_remote(q: u64, g: usize, config: &FetchConfig) -> Result<Vec<ExternalClassRecord>> {
    if !config.network_enabled {
        return Err(Error::Capability("network access is disabled".into()));
    }
    let cache = config.cache_path(q, g);
    if let Some(path) = cache.as_ref().filter(|p| p.exists()) {
        return Ok(load_fixture(path)?.records);
    }
    let endpoint = config.endpoint.as_deref().ok_or_else(|| Error::InvalidParameter("no endpoint configured".into()))?;
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(config.timeout_secs.unwrap_or(30))))
        .build()
        .into();
    let mut resp = agent
        .get(endpoint)
        .query("q", q.to_string())
        .query("g", g.to_string())
        .call()
        .map_err(|e| Error::Network(e.to_string()))?;
    let status = resp.status().as_u16();
    if status != 200 {
        return Err(Error::Network(format!("HTTP status {status} from {endpoint}")));
    }
    let body = resp.body_mut().read_to_string().map_err(|e| Error::Network(e.to_string()))?;
    let mut records = parse_remote_body(&body)?;
    records.sort_by(|a, b| a.label.cmp(&b.label).then_with(|| a.poly.cmp(&b.poly)));
    if let Some(path) = cache {
        write_atomic(&path, render_fixture(&records).as_bytes())?;
    }
    Ok(records)
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub label: String,
    pub field: String,
    pub claimed: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub records: usize,
    pub compared_fields: usize,
    pub mismatches: Vec<Mismatch>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Plain-text rendering; stable for a fixed input.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "records: {}", self.records);
        let _ = writeln!(s, "compared fields: {}", self.compared_fields);
        let _ = writeln!(s, "mismatches: {}", self.mismatches.len());
        for m in &self.mismatches {
            let _ = writeln!(s, "{}\t{}\tclaimed={}\tcomputed={}", m.label, m.field, m.claimed, m.computed);
        }
        s
    }
}

/// Recompute ordinariness and `f(1)` for every record and compare with
/// the claimed values that are present.
pub fn cross_validate(records: &[ExternalClassRecord]) -> ValidationReport {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for r in records {
        let f = r.weil_polynomial();
        if let Some(claimed) = r.is_ordinary_claimed {
            compared += 1;
            let (p, _) = r.prime_power();
            let computed = is_ordinary(&f, p);
            if computed != claimed {
                mismatches.push(Mismatch {
                    label: r.label.clone(),
                    field: "is_ordinary".into(),
                    claimed: claimed.to_string(),
                    computed: computed.to_string(),
                });
            }
        }
        if let Some(claimed) = &r.point_count_claimed {
            compared += 1;
            let computed = point_count(&f);
            if &computed != claimed {
                mismatches.push(Mismatch {
                    label: r.label.clone(),
                    field: "point_count".into(),
                    claimed: claimed.to_string(),
                    computed: computed.to_string(),
                });
            }
        }
    }
    ValidationReport { records: records.len(), compared_fields: compared, mismatches }
}
