//! Seeded Hayden–Preskill ensembles, fanned out over seeds with rayon.

use std::io;

use cutlab_core::blackhole::{hp_sample, AliceTiming, SweepRow};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::fmt17;

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    pub n_interior: usize,
    pub m_values: Vec<usize>,
    pub seeds: Vec<u64>,
    pub timing: AliceTiming,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanRow {
    pub m: usize,
    pub trace_distance: f64,
    pub mutual_information_bits: f64,
    pub fidelity: f64,
    pub h_z_given_ra: f64,
    pub h_x_given_rb: f64,
}

pub const CSV_COLUMNS: [&str; 7] =
    ["seed", "m", "trace_distance", "mutual_information_bits", "fidelity", "h_z_given_ra", "h_x_given_rb"];

/// Rows ordered by `m`, then by seed.
pub fn run_sweep(cfg: &SweepConfig) -> cutlab_core::Result<Vec<SweepRow>> {
    let jobs: Vec<(usize, u64)> = cfg.m_values.iter().flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s))).collect();
    jobs.par_iter().map(|&(m, s)| hp_sample(cfg.n_interior, m, s, cfg.timing)).collect()
}

fn mean_of(rows: &[&SweepRow], m: usize) -> MeanRow {
    let n = rows.len().max(1) as f64;
    let avg = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    MeanRow {
        m,
        trace_distance: avg(|r| r.trace_distance),
        mutual_information_bits: avg(|r| r.mutual_information_bits),
        fidelity: avg(|r| r.fidelity),
        h_z_given_ra: avg(|r| r.h_z_given_ra),
        h_x_given_rb: avg(|r| r.h_x_given_rb),
    }
}

pub fn per_m_means(rows: &[SweepRow]) -> Vec<MeanRow> {
    let mut ms: Vec<usize> = rows.iter().map(|r| r.m).collect();
    ms.dedup();
    ms.into_iter()
        .map(|m| {
            let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.m == m).collect();
            mean_of(&sel, m)
        })
        .collect()
}

/// One row per `(seed, m)` and a final `mean` row over all of them.
pub fn write_csv<W: io::Write>(rows: &[SweepRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.seed.to_string(),
            r.m.to_string(),
            fmt17(r.trace_distance),
            fmt17(r.mutual_information_bits),
            fmt17(r.fidelity),
            fmt17(r.h_z_given_ra),
            fmt17(r.h_x_given_rb),
        ])?;
    }
    let all: Vec<&SweepRow> = rows.iter().collect();
    let s = mean_of(&all, 0);
    out.write_record([
        "mean".to_string(),
        "all".to_string(),
        fmt17(s.trace_distance),
        fmt17(s.mutual_information_bits),
        fmt17(s.fidelity),
        fmt17(s.h_z_given_ra),
        fmt17(s.h_x_given_rb),
    ])?;
    out.flush()?;
    Ok(())
}

/// `0..=4`, `0..5`, `0-4`, `2` or `0,2,4`.
pub fn parse_m_range(s: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("cannot read m-range `{s}`");
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let v: Vec<usize> = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else if let Some((a, b)) = s.split_once('-') {
        (num(a)?..=num(b)?).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if v.is_empty() {
        return Err(bad());
    }
    let mut sorted = v.clone();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_range_forms() {
        assert_eq!(parse_m_range("0..=4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_m_range("1..3").unwrap(), vec![1, 2]);
        assert_eq!(parse_m_range("2-4").unwrap(), vec![2, 3, 4]);
        assert_eq!(parse_m_range("4,0,2,2").unwrap(), vec![0, 2, 4]);
        assert_eq!(parse_m_range("3").unwrap(), vec![3]);
        assert!(parse_m_range("3..3").is_err());
        assert!(parse_m_range("a").is_err());
    }

    #[test]
    fn csv_has_summary_row() {
        let cfg = SweepConfig { n_interior: 2, m_values: vec![0, 1], seeds: vec![0, 1, 2], timing: AliceTiming::BeforeScrambling };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.iter().map(|r| (r.m, r.seed)).collect::<Vec<_>>()[..3], [(0, 0), (0, 1), (0, 2)]);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6 + 1);
        assert!(text.lines().last().unwrap().starts_with("mean,all,"));
        let means = per_m_means(&rows);
        assert_eq!(means.len(), 2);
        assert!((means[0].fidelity - 0.25).abs() < 1e-9);
    }
}
