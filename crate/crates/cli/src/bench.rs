//! Benchmark sweeps driven by a `key=value` config file.
//!
//! ```text
//! # comments and blank lines are ignored
//! algo=const
//! algo=eps
//! n=128
//! m=16
//! k=2
//! eps=0.5,0.25
//! kind=planted
//! seeds=0..20
//! noise=1.0
//! mode=idealized
//! ```
//!
//! Keys may repeat, and each value may be a comma-separated list. The sweep
//! runs the cross product of `algo × n × m × k × eps × kind`, each cell over
//! every seed.

use crate::error::CliError;
use batchrec::gen::{generate, InstanceKind, InstanceSpec};
use batchrec::report::{run, AlgorithmChoice, RunParams};
use batchrec::{RecoveryConfig, RecoveryMode};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::str::FromStr;

pub const CSV_HEADER: &str = "algo,n,m,k,eps,kind,mean_ratio,max_ratio,mean_meas,rounds";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algos: Vec<AlgorithmChoice>,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub k: Vec<usize>,
    pub eps: Vec<f64>,
    pub kinds: Vec<InstanceKind>,
    pub seeds: Vec<u64>,
    pub noise: f64,
    pub cap: f64,
    pub mode: RecoveryMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub algo: AlgorithmChoice,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eps: f64,
    pub kind: InstanceKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub mean_meas: f64,
    pub rounds: u64,
}

fn parse_list<T: FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Input(format!("line {line}: invalid {key} value `{v}`")))
        })
        .collect()
}

fn parse_seeds(value: &str, line: usize) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = parse_list("seeds", lo, line)?.pop().unwrap_or(0);
            let hi: u64 = parse_list("seeds", hi, line)?
                .pop()
                .ok_or_else(|| CliError::Input(format!("line {line}: open seed range")))?;
            out.extend(lo..hi);
        } else {
            out.extend(parse_list::<u64>("seeds", part, line)?);
        }
    }
    Ok(out)
}

fn single<T: Copy>(key: &str, values: Vec<T>, line: usize) -> Result<T, CliError> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(CliError::Input(format!(
            "line {line}: `{key}` takes exactly one value"
        ))),
    }
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = BenchConfig {
            algos: Vec::new(),
            n: Vec::new(),
            m: Vec::new(),
            k: Vec::new(),
            eps: Vec::new(),
            kinds: Vec::new(),
            seeds: Vec::new(),
            noise: 1.0,
            cap: 1e-6,
            mode: RecoveryMode::Idealized,
        };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (key, value) = l
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("line {line}: expected key=value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "algo" | "algos" => cfg
                    .algos
                    .extend(parse_list::<AlgorithmChoice>(key, value, line)?),
                "n" => cfg.n.extend(parse_list::<usize>(key, value, line)?),
                "m" => cfg.m.extend(parse_list::<usize>(key, value, line)?),
                "k" => cfg.k.extend(parse_list::<usize>(key, value, line)?),
                "eps" => cfg.eps.extend(parse_list::<f64>(key, value, line)?),
                "kind" => cfg
                    .kinds
                    .extend(parse_list::<InstanceKind>(key, value, line)?),
                "seed" | "seeds" => cfg.seeds.extend(parse_seeds(value, line)?),
                "noise" => cfg.noise = single(key, parse_list(key, value, line)?, line)?,
                "cap" => cfg.cap = single(key, parse_list(key, value, line)?, line)?,
                "mode" => cfg.mode = single(key, parse_list(key, value, line)?, line)?,
                other => {
                    return Err(CliError::Input(format!(
                        "line {line}: unknown key `{other}`"
                    )))
                }
            }
        }
        if cfg.eps.is_empty() {
            cfg.eps.push(0.25);
        }
        if cfg.kinds.is_empty() {
            cfg.kinds.push(InstanceKind::Planted);
        }
        if cfg.seeds.is_empty() {
            cfg.seeds.push(0);
        }
        for (key, empty) in [
            ("algo", cfg.algos.is_empty()),
            ("n", cfg.n.is_empty()),
            ("m", cfg.m.is_empty()),
            ("k", cfg.k.is_empty()),
        ] {
            if empty {
                return Err(CliError::Input(format!("config is missing `{key}`")));
            }
        }
        Ok(cfg)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &algo in &self.algos {
            for &n in &self.n {
                for &m in &self.m {
                    for &k in &self.k {
                        for &eps in &self.eps {
                            for &kind in &self.kinds {
                                cells.push(Cell {
                                    algo,
                                    n,
                                    m,
                                    k,
                                    eps,
                                    kind,
                                });
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

fn run_cell(cfg: &BenchConfig, cell: &Cell) -> Result<CellResult, CliError> {
    let mut ratios = Vec::with_capacity(cfg.seeds.len());
    let mut meas = 0u64;
    let mut rounds = 0u64;
    for &seed in &cfg.seeds {
        let spec = InstanceSpec {
            kind: cell.kind,
            n: cell.n,
            m: cell.m,
            k: cell.k,
            noise: cfg.noise,
            seed,
        };
        let a = generate(&spec)?;
        let eps = if cell.algo == AlgorithmChoice::NoiseCapped {
            cfg.cap
        } else {
            cell.eps
        };
        let params = RunParams {
            algorithm: cell.algo,
            k: cell.k,
            eps,
            config: RecoveryConfig {
                mode: cfg.mode,
                seed,
                ..RecoveryConfig::default()
            },
        };
        let (_, report) = run(&a, &params)?;
        ratios.push(report.ratio_value());
        meas += report.ledger.total;
        rounds = rounds.max(report.rounds);
    }
    let count = ratios.len() as f64;
    Ok(CellResult {
        cell: cell.clone(),
        mean_ratio: ratios.iter().sum::<f64>() / count,
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        mean_meas: meas as f64 / count,
        rounds,
    })
}

/// Runs every cell on the current rayon pool; results keep cell order.
pub fn sweep(cfg: &BenchConfig) -> Result<Vec<CellResult>, CliError> {
    cfg.cells()
        .par_iter()
        .map(|cell| run_cell(cfg, cell))
        .collect()
}

pub fn to_csv(results: &[CellResult]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in results {
        let c = &r.cell;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.algo, c.n, c.m, c.k, c.eps, c.kind, r.mean_ratio, r.max_ratio, r.mean_meas, r.rounds
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_repeated_keys_and_lists() {
        let cfg = BenchConfig::parse("algo=const\nalgo=eps\nn=16,32\nm = 4\nk=1\n# note\n\neps=0.5\neps=0.25\nseeds=3..6,10\n").unwrap();
        assert_eq!(
            cfg.algos,
            vec![AlgorithmChoice::Const, AlgorithmChoice::Eps]
        );
        assert_eq!(cfg.n, vec![16, 32]);
        assert_eq!(cfg.eps, vec![0.5, 0.25]);
        assert_eq!(cfg.seeds, vec![3, 4, 5, 10]);
        assert_eq!(cfg.cells().len(), 2 * 2 * 2);
        assert_eq!(
            cfg.cells()[0],
            Cell {
                algo: AlgorithmChoice::Const,
                n: 16,
                m: 4,
                k: 1,
                eps: 0.5,
                kind: InstanceKind::Planted
            }
        );
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in [
            "n",
            "n=abc",
            "algo=magic",
            "colour=red",
            "noise=1,2",
            "n=4\nm=2\nk=1",
        ] {
            assert!(
                matches!(BenchConfig::parse(bad), Err(CliError::Input(_))),
                "{bad}"
            );
        }
    }
}
