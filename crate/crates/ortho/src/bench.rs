//! Batch runs over generated instances with per-stage timings.

use std::fmt::Write;
use std::time::Duration;

use ortho_core::graph::Multigraph;

use crate::error::Stage;
use crate::generate::generate_random_multigraph;
use crate::pipeline::{run_pipeline, PipelineConfig};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// Time per timed stage, in `Stage::TIMED` order.
    pub stages: Vec<Duration>,
    pub total: Duration,
    pub crossings: usize,
    pub bends: usize,
    pub delta_min: f64,
    pub error: Option<String>,
}

pub struct BenchCase {
    pub name: String,
    pub graph: Multigraph,
    pub seed: u64,
}

/// Instances of `sizes` vertices with the given average degree; seeds run
/// from `first_seed` upwards.
pub fn generated_cases(sizes: &[usize], degree: f64, first_seed: u64) -> Result<Vec<BenchCase>, ortho_core::Error> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let seed = first_seed + i as u64;
            Ok(BenchCase { name: format!("n{n}-d{degree}-s{seed}"), graph: generate_random_multigraph(n, degree, seed)?, seed })
        })
        .collect()
}

/// Runs every case; a failing case is recorded and the run continues.
pub fn run_benchmark(cases: &[BenchCase], cfg: &PipelineConfig) -> Vec<BenchRow> {
    cases
        .iter()
        .map(|c| {
            let cfg = PipelineConfig { seed: c.seed, ..cfg.clone() };
            let (n, m) = (c.graph.n(), c.graph.m());
            match run_pipeline(&c.graph, None, &cfg) {
                Ok(out) => BenchRow {
                    name: c.name.clone(),
                    n,
                    m,
                    stages: Stage::TIMED.iter().map(|&s| out.stage_time(s)).collect(),
                    total: out.total,
                    crossings: out.metrics.crossings,
                    bends: out.metrics.bends,
                    delta_min: out.metrics.delta_min,
                    error: None,
                },
                Err(e) => {
                    log::error!("{}: {e}", c.name);
                    BenchRow {
                        name: c.name.clone(),
                        n,
                        m,
                        stages: vec![Duration::ZERO; Stage::TIMED.len()],
                        total: Duration::ZERO,
                        crossings: 0,
                        bends: 0,
                        delta_min: f64::NAN,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect()
}

/// Comma separated table, times in seconds.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from("name,n,m");
    for st in Stage::TIMED {
        let _ = write!(s, ",{}", st.name());
    }
    s.push_str(",total,crossings,bends,delta_min,error\n");
    for r in rows {
        let _ = write!(s, "{},{},{}", r.name, r.n, r.m);
        for d in &r.stages {
            let _ = write!(s, ",{:.6}", d.as_secs_f64());
        }
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(s, ",{:.6},{},{},{},{}", r.total.as_secs_f64(), r.crossings, r.bends, r.delta_min, err);
    }
    s
}
