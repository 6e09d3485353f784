//! JSON and CSV records printed by the CLI.

use std::collections::BTreeMap;

use serde::Serialize;

use rectempty::gridded::SpaceReport;
use rectempty::measure::Latency;

/// Disagreements with the oracle. `one_sided` counts false "nonempty"
/// answers on queries above the grid's area threshold, the only error the
/// grid structures may make; everything else is `other`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Mismatches {
    pub one_sided: usize,
    pub other: usize,
}

/// Histograms of per-query probe counts: value -> number of queries.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ProbeHistogram {
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub cells: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub quadrant_probes: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub crossing_probes: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub point_tests: BTreeMap<usize, usize>,
}

pub fn bump(h: &mut BTreeMap<usize, usize>, k: usize) {
    *h.entry(k).or_default() += 1;
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub structure: String,
    pub n: usize,
    pub seed: u64,
    pub exhaustive: bool,
    pub queries: usize,
    pub build_ns: u128,
    pub bytes_estimate: usize,
    pub latency: Option<Latency>,
    pub mismatches: Mismatches,
    pub one_sided_rate: f64,
    pub probe_histogram: ProbeHistogram,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceReport>,
}

impl RunReport {
    pub fn violations(&self) -> usize {
        self.mismatches.other
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub structure: String,
    pub n: usize,
    pub build_ns: u128,
    pub bytes_estimate: usize,
    pub bytes_per_point: f64,
    pub p50_ns: f64,
    pub p99_ns: f64,
    pub mean_ns: f64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "structure,n,build_ns,bytes_estimate,bytes_per_point,p50_ns,p99_ns,mean_ns";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.2},{:.2},{:.2},{:.2}",
            self.structure,
            self.n,
            self.build_ns,
            self.bytes_estimate,
            self.bytes_per_point,
            self.p50_ns,
            self.p99_ns,
            self.mean_ns
        )
    }
}
