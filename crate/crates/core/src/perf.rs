//! Analytical latency, throughput, area and energy metrics for technology
//! profiles, plus power-capped scaling sweeps.
//!
//! A profile is a JSON object:
//!
//! ```json
//! {
//!   "name": "opt-sram", "tech_node": "28nm",
//!   "frequency_hz": 6.7e9, "area_kge": 63.6,
//!   "energy_nj": 0.456, "energy_rounds": 1,
//!   "cycles_per_round": 564, "bits_per_round": 1088, "parallelism": 4,
//!   "targets": { "latency_ns": 83.6, "throughput_mbps": 52000,
//!                "tput_per_area": 818, "tae": 1800 }
//! }
//! ```
//!
//! `energy_nj` is the energy figure of one engine spread over
//! `energy_rounds` rounds; `targets` is optional and only used to flag
//! deviations in reports.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Directory searched for `<name>.json` profiles before the bundled set.
pub const PROFILE_DIR_ENV: &str = "PIMHASH_PROFILE_DIR";
pub const DEFAULT_PROFILE: &str = "opt-sram";
/// Relative deviation above which a computed metric is flagged.
pub const METRIC_TOLERANCE: f64 = 0.01;
/// TAE targets are printed with two or three significant figures.
pub const TAE_TOLERANCE: f64 = 0.05;

const BUNDLED: [(&str, &str); 4] = [
    ("opt-sram", include_str!("../profiles/opt-sram.json")),
    ("flex-sram", include_str!("../profiles/flex-sram.json")),
    ("opt-reram", include_str!("../profiles/opt-reram.json")),
    ("flex-reram", include_str!("../profiles/flex-reram.json")),
];

#[derive(Debug, Error)]
pub enum PerfError {
    #[error("profile {profile}: {field} must be positive")]
    NonPositive { profile: String, field: &'static str },
    #[error("power cap {cap_w} W is below one engine's {engine_w} W")]
    CapBelowEngine { cap_w: f64, engine_w: f64 },
    #[error("need at least one Keccak permutation")]
    NoKeccaks,
    #[error("unknown profile {0:?}")]
    UnknownProfile(String),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing profile: {0}")]
    Json(#[from] serde_json::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub latency_ns: f64,
    pub throughput_mbps: f64,
    pub tput_per_area: f64,
    pub tae: f64,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechProfile {
    pub name: String,
    pub tech_node: String,
    pub frequency_hz: f64,
    pub area_kge: f64,
    pub energy_nj: f64,
    #[serde(default = "one")]
    pub energy_rounds: u32,
    pub cycles_per_round: u32,
    pub bits_per_round: u32,
    pub parallelism: u32,
    #[serde(default)]
    pub targets: Option<Targets>,
}

impl TechProfile {
    pub fn from_json(text: &str) -> Result<Self, PerfError> {
        let p: TechProfile = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PerfError> {
        let checks = [
            ("frequency_hz", self.frequency_hz),
            ("area_kge", self.area_kge),
            ("energy_nj", self.energy_nj),
            ("energy_rounds", self.energy_rounds as f64),
            ("cycles_per_round", self.cycles_per_round as f64),
            ("bits_per_round", self.bits_per_round as f64),
            ("parallelism", self.parallelism as f64),
        ];
        for (field, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PerfError::NonPositive { profile: self.name.clone(), field });
            }
        }
        Ok(())
    }

    pub fn energy_per_round_nj(&self) -> f64 {
        self.energy_nj / self.energy_rounds as f64
    }
}

pub fn bundled_profiles() -> Vec<TechProfile> {
    BUNDLED.iter().map(|(_, text)| TechProfile::from_json(text).expect("bundled profile is valid")).collect()
}

/// Resolves `spec` as a JSON file path, then `<dir>/<spec>.json` for the
/// given directory, then a bundled profile name (case-insensitive).
pub fn load_profile(spec: &str, dir: Option<&Path>) -> Result<TechProfile, PerfError> {
    let read = |path: &Path| -> Result<TechProfile, PerfError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| PerfError::Io { path: path.to_path_buf(), source })?;
        TechProfile::from_json(&text)
    };
    let as_path = Path::new(spec);
    if spec.ends_with(".json") || as_path.is_file() {
        return read(as_path);
    }
    let key = spec.to_ascii_lowercase();
    if let Some(dir) = dir {
        let candidate = dir.join(format!("{key}.json"));
        if candidate.is_file() {
            return read(&candidate);
        }
    }
    BUNDLED
        .iter()
        .find(|(name, _)| *name == key)
        .map(|(_, text)| TechProfile::from_json(text))
        .unwrap_or_else(|| Err(PerfError::UnknownProfile(spec.to_string())))
}

pub fn round_latency_ns(p: &TechProfile) -> Result<f64, PerfError> {
    p.validate()?;
    Ok(p.cycles_per_round as f64 / p.frequency_hz * 1e9)
}

/// Message bits absorbed per round, across all parallel states of one engine.
pub fn throughput_mbps(p: &TechProfile) -> Result<f64, PerfError> {
    // bits per ns = Gbps; x1000 for Mbps.
    Ok(p.bits_per_round as f64 / round_latency_ns(p)? * 1e3 * p.parallelism as f64)
}

pub fn tput_per_area(p: &TechProfile) -> Result<f64, PerfError> {
    Ok(throughput_mbps(p)? / p.area_kge)
}

/// Throughput per area per energy, against the profile's energy figure.
pub fn tae(p: &TechProfile) -> Result<f64, PerfError> {
    Ok(tput_per_area(p)? / p.energy_nj)
}

/// Average power of one engine running rounds back to back, in watts.
pub fn engine_power_w(p: &TechProfile) -> Result<f64, PerfError> {
    Ok(p.energy_per_round_nj() / round_latency_ns(p)?)
}

/// Engines that fit under `cap_w`.
pub fn engines_allowed(p: &TechProfile, cap_w: f64) -> Result<u64, PerfError> {
    let engine_w = engine_power_w(p)?;
    if cap_w.is_nan() || cap_w < engine_w {
        return Err(PerfError::CapBelowEngine { cap_w, engine_w });
    }
    Ok((cap_w / engine_w).floor() as u64)
}

/// Effective throughput in Mbps for `n_keccaks` parallel permutations.
pub fn scale(p: &TechProfile, n_keccaks: u64, cap_w: Option<f64>) -> Result<f64, PerfError> {
    if n_keccaks == 0 {
        return Err(PerfError::NoKeccaks);
    }
    let needed = n_keccaks.div_ceil(p.parallelism as u64);
    let active = match cap_w {
        Some(cap) => needed.min(engines_allowed(p, cap)?),
        None => needed,
    };
    Ok(active as f64 * throughput_mbps(p)?)
}

/// Smallest permutation count at which the capped curve stops growing.
pub fn saturation_knee(p: &TechProfile, cap_w: f64) -> Result<u64, PerfError> {
    Ok(engines_allowed(p, cap_w)? * p.parallelism as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalePoint {
    pub n: u64,
    pub tput_uncapped: f64,
    pub tput_capped: f64,
}

/// Without a cap both columns are equal.
pub fn sweep(p: &TechProfile, ns: &[u64], cap_w: Option<f64>) -> Result<Vec<ScalePoint>, PerfError> {
    ns.iter()
        .map(|&n| Ok(ScalePoint { n, tput_uncapped: scale(p, n, None)?, tput_capped: scale(p, n, cap_w)? }))
        .collect()
}

pub fn sweep_csv(points: &[ScalePoint]) -> Result<String, PerfError> {
    to_csv(points)
}

fn to_csv<T: Serialize>(items: &[T]) -> Result<String, PerfError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for item in items {
        w.serialize(item)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Powers of two from 1 to `max` inclusive (plus `max` if it is not one).
pub fn default_sweep_points(max: u64) -> Vec<u64> {
    let mut v: Vec<u64> =
        std::iter::successors(Some(1u64), |n| n.checked_mul(2)).take_while(|&n| n <= max).collect();
    if v.last() != Some(&max) && max > 0 {
        v.push(max);
    }
    v
}

/// Table cell that may be a bound or missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    Above(f64),
    Below(f64),
    Absent,
}

impl Cell {
    fn render(&self, num: fn(f64) -> String) -> String {
        match self {
            Cell::Value(v) => num(*v),
            Cell::Above(v) => format!(">{}", num(*v)),
            Cell::Below(v) => format!("<{}", num(*v)),
            Cell::Absent => "-".into(),
        }
    }
}

/// Shortest round-trip form, exponent notation for very small or large values.
impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|v| {
            let a = v.abs();
            if a != 0.0 && !(1e-3..1e7).contains(&a) {
                format!("{v:e}")
            } else {
                format!("{v}")
            }
        }))
    }
}

impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Value(v) => s.serialize_f64(*v),
            Cell::Absent => s.serialize_none(),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if v.fract() == 0.0 && a < 1e7 {
        format!("{v:.0}")
    } else if !(1e-2..1e7).contains(&a) {
        format!("{v:.3e}")
    } else if a >= 100.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Static metrics of a comparison design.
#[derive(Debug, Clone, Copy)]
pub struct BaselineRow {
    pub name: &'static str,
    pub tech_node: &'static str,
    pub frequency_mhz: f64,
    pub area_kge: f64,
    pub latency_cycles: Cell,
    pub latency_ns: Cell,
    pub throughput_mbps: f64,
    pub tput_per_area: f64,
    pub energy_nj: Cell,
    pub tae: Cell,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    name: &'static str,
    tech_node: &'static str,
    frequency_mhz: f64,
    area_kge: f64,
    latency_cycles: Cell,
    latency_ns: Cell,
    throughput_mbps: f64,
    tput_per_area: f64,
    energy_nj: Cell,
    tae: Cell,
) -> BaselineRow {
    BaselineRow {
        name,
        tech_node,
        frequency_mhz,
        area_kge,
        latency_cycles,
        latency_ns,
        throughput_mbps,
        tput_per_area,
        energy_nj,
        tae,
    }
}

use Cell::{Above, Absent, Below, Value as V};

pub const BASELINES: [BaselineRow; 12] = [
    row("SHINE-1-SRAM", "28nm", 6700.0, 494.0, V(264.0), V(39.1), 111e3, 225.0, Absent, Absent),
    row("SHINE-2-SRAM", "28nm", 6700.0, 717.0, V(140.0), V(20.7), 210e3, 293.0, Absent, Absent),
    row("Recryptor", "40nm", 28.8, 600.0, V(139.0), V(4800.0), 226.0, 0.377, V(2.03), V(0.186)),
    row("SHINE-1-ReRAM", "65nm", 2000.0, 494.0, V(264.0), V(132.0), 33e3, 66.8, V(4.13), V(16.2)),
    row("SHINE-2-ReRAM", "65nm", 2000.0, 717.0, V(140.0), V(70.0), 62.2e3, 86.7, V(3.5), V(24.8)),
    row("SHINE-1-ReRAM (projected)", "28nm", 4600.0, 494.0, V(264.0), V(56.9), 76.5e3, 155.0, Absent, Absent),
    row("SHINE-2-ReRAM (projected)", "28nm", 4600.0, 717.0, V(140.0), V(30.2), 144e3, 201.0, Absent, Absent),
    row("Akin", "90nm", 455.0, 10.5e3, V(25.0), V(54.9), 19.8e3, 1.89, Above(43.5), Below(0.043)),
    row("Tillich", "180nm", 488.0, 56.3e3, V(25.0), V(51.2), 21.2e3, 0.377, Above(43.5), Below(0.009)),
    row("Pessl-V1", "130nm", 1.0, 5.5e3, V(10.7e3), V(10.7e6), 0.102, 18.5e-6, Above(43.5), Below(4.25e-7)),
    row("Pessl-V2", "130nm", 1.0, 5.9e3, V(7.4e3), V(7.4e6), 0.147, 24.9e-6, Above(43.5), Below(5.73e-7)),
    row("Wong", "65nm", 1000.0, 105e3, Absent, Absent, 48e3, 0.457, Above(43.5), Below(0.011)),
];

/// Computed value next to its reference, if the profile has one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checked {
    pub value: f64,
    pub target: Option<f64>,
    pub tolerance: f64,
}

impl Checked {
    fn new(value: f64, target: Option<f64>, tolerance: f64) -> Self {
        Checked { value, target, tolerance }
    }

    pub fn deviation(&self) -> Option<f64> {
        self.target.map(|t| (self.value - t).abs() / t.abs())
    }

    pub fn within(&self) -> bool {
        self.deviation().is_none_or(|d| d <= self.tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileMetrics {
    pub name: String,
    pub tech_node: String,
    pub frequency_mhz: f64,
    pub area_kge: f64,
    pub latency_cycles: u32,
    pub latency_ns: Checked,
    pub throughput_mbps: Checked,
    pub tput_per_area: Checked,
    pub energy_nj: f64,
    pub tae: Checked,
    pub engine_power_w: f64,
}

impl ProfileMetrics {
    pub fn compute(p: &TechProfile) -> Result<Self, PerfError> {
        let t = p.targets;
        Ok(ProfileMetrics {
            name: p.name.clone(),
            tech_node: p.tech_node.clone(),
            frequency_mhz: p.frequency_hz / 1e6,
            area_kge: p.area_kge,
            latency_cycles: p.cycles_per_round,
            latency_ns: Checked::new(round_latency_ns(p)?, t.map(|t| t.latency_ns), METRIC_TOLERANCE),
            throughput_mbps: Checked::new(
                throughput_mbps(p)?,
                t.map(|t| t.throughput_mbps),
                METRIC_TOLERANCE,
            ),
            tput_per_area: Checked::new(tput_per_area(p)?, t.map(|t| t.tput_per_area), METRIC_TOLERANCE),
            energy_nj: p.energy_nj,
            tae: Checked::new(tae(p)?, t.map(|t| t.tae), TAE_TOLERANCE),
            engine_power_w: engine_power_w(p)?,
        })
    }

    /// Names of metrics outside tolerance.
    pub fn flags(&self) -> Vec<&'static str> {
        [
            ("latency_ns", &self.latency_ns),
            ("throughput_mbps", &self.throughput_mbps),
            ("tput_per_area", &self.tput_per_area),
            ("tae", &self.tae),
        ]
        .into_iter()
        .filter(|(_, c)| !c.within())
        .map(|(n, _)| n)
        .collect()
    }
}

/// Flat row shared by computed and baseline entries.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub design: String,
    pub source: &'static str,
    pub tech: String,
    pub frequency_mhz: f64,
    pub area_kge: f64,
    pub latency_cycles: Cell,
    pub latency_ns: Cell,
    pub throughput_mbps: f64,
    pub tput_per_area: f64,
    pub energy_nj: Cell,
    pub tae: Cell,
    pub flagged: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub computed: Vec<ProfileMetrics>,
    pub rows: Vec<ReportRow>,
}

pub fn report(profiles: &[TechProfile]) -> Result<Report, PerfError> {
    let computed = profiles.iter().map(ProfileMetrics::compute).collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<ReportRow> = computed
        .iter()
        .map(|m| ReportRow {
            design: m.name.clone(),
            source: "computed",
            tech: m.tech_node.clone(),
            frequency_mhz: m.frequency_mhz,
            area_kge: m.area_kge,
            latency_cycles: Cell::Value(m.latency_cycles as f64),
            latency_ns: Cell::Value(m.latency_ns.value),
            throughput_mbps: m.throughput_mbps.value,
            tput_per_area: m.tput_per_area.value,
            energy_nj: Cell::Value(m.energy_nj),
            tae: Cell::Value(m.tae.value),
            flagged: m.flags().join(";"),
        })
        .collect();
    rows.extend(BASELINES.iter().map(|b| ReportRow {
        design: b.name.to_string(),
        source: "baseline",
        tech: b.tech_node.to_string(),
        frequency_mhz: b.frequency_mhz,
        area_kge: b.area_kge,
        latency_cycles: b.latency_cycles,
        latency_ns: b.latency_ns,
        throughput_mbps: b.throughput_mbps,
        tput_per_area: b.tput_per_area,
        energy_nj: b.energy_nj,
        tae: b.tae,
        flagged: String::new(),
    }));
    Ok(Report { computed, rows })
}

impl Report {
    pub fn any_flagged(&self) -> bool {
        self.computed.iter().any(|m| !m.flags().is_empty())
    }

    pub fn to_csv(&self) -> Result<String, PerfError> {
        to_csv(&self.rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width text table; flagged metrics are marked with `*`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<26} {:>6} {:>9} {:>9} {:>7} {:>11} {:>11} {:>11} {:>8} {:>10}\n",
            "design", "tech", "f(MHz)", "KGE", "cycles", "lat(ns)", "Mbps", "Mbps/KGE", "nJ", "TAE"
        );
        let mark = |c: &Checked| if c.within() { ' ' } else { '*' };
        for (i, r) in self.rows.iter().enumerate() {
            let m = self.computed.get(i);
            let marks = m.map_or([' '; 4], |m| {
                [mark(&m.latency_ns), mark(&m.throughput_mbps), mark(&m.tput_per_area), mark(&m.tae)]
            });
            out += &format!(
                "{:<26} {:>6} {:>9} {:>9} {:>7} {:>10}{} {:>10}{} {:>10}{} {:>8} {:>9}{}\n",
                r.design,
                r.tech,
                fmt_num(r.frequency_mhz),
                fmt_num(r.area_kge),
                r.latency_cycles.render(fmt_num),
                r.latency_ns.render(fmt_num),
                marks[0],
                fmt_num(r.throughput_mbps),
                marks[1],
                fmt_num(r.tput_per_area),
                marks[2],
                r.energy_nj.render(fmt_num),
                r.tae.render(fmt_num),
                marks[3],
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(name: &str) -> TechProfile {
        load_profile(name, None).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn opt_sram_metrics() {
        let p = profile("opt-sram");
        assert!(close(round_latency_ns(&p).unwrap(), 564.0 / 6.7, 1e-12));
        assert!(close(throughput_mbps(&p).unwrap(), 51_703.8, 1e-4));
        let m = ProfileMetrics::compute(&p).unwrap();
        assert!(m.flags().is_empty(), "{:?}", m.flags());
    }

    #[test]
    fn parallelism_is_linear() {
        let mut p = profile("opt-reram");
        let four = throughput_mbps(&p).unwrap();
        p.parallelism = 1;
        assert!(close(throughput_mbps(&p).unwrap() * 4.0, four, 1e-12));
    }

    #[test]
    fn metric_identity() {
        for p in bundled_profiles() {
            let lhs = tae(&p).unwrap() * p.energy_nj * p.area_kge;
            assert!(close(lhs, throughput_mbps(&p).unwrap(), 1e-12));
        }
    }

    #[test]
    fn invalid_profiles() {
        let mut p = profile("opt-sram");
        p.frequency_hz = 0.0;
        assert!(matches!(round_latency_ns(&p), Err(PerfError::NonPositive { field: "frequency_hz", .. })));
        let mut p = profile("opt-sram");
        p.area_kge = 0.0;
        assert!(tput_per_area(&p).is_err());
        assert!(matches!(load_profile("nope", None), Err(PerfError::UnknownProfile(_))));
        assert!(matches!(scale(&profile("opt-sram"), 10, Some(1e-4)), Err(PerfError::CapBelowEngine { .. })));
        assert!(matches!(scale(&profile("opt-sram"), 0, None), Err(PerfError::NoKeccaks)));
    }

    #[test]
    fn capped_saturation() {
        let p = profile("opt-sram");
        let engines = engines_allowed(&p, 75.0).unwrap();
        let expected = (75.0f64 / (0.456 / (564.0 / 6.7))).floor() as u64;
        assert_eq!(engines, expected);
        let knee = saturation_knee(&p, 75.0).unwrap();
        let at = scale(&p, knee, Some(75.0)).unwrap();
        assert_eq!(at, scale(&p, knee, None).unwrap());
        assert_eq!(scale(&p, 4 << 20, Some(75.0)).unwrap(), at);
    }

    #[test]
    fn sweep_csv_header() {
        let p = profile("flex-sram");
        let csv = sweep_csv(&sweep(&p, &[1, 2], None).unwrap()).unwrap();
        assert!(csv.starts_with("n,tput_uncapped,tput_capped\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn report_renders_all_rows() {
        let r = report(&bundled_profiles()).unwrap();
        assert_eq!(r.rows.len(), 4 + BASELINES.len());
        let csv = r.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1 + 4 + BASELINES.len());
        assert!(r.to_text().contains("opt-sram"));
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["rows"][4]["energy_nj"], serde_json::Value::Null);
    }

    #[test]
    fn default_points() {
        assert_eq!(default_sweep_points(5), vec![1, 2, 4, 5]);
        assert_eq!(default_sweep_points(4), vec![1, 2, 4]);
    }
}
