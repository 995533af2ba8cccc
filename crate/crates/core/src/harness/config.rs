//! Experiment configuration.
//!
//! The config is TOML (or a JSON mirror of the same structure when the
//! file name ends in `.json`). Power-like quantities are given in dB at
//! this boundary and converted to linear units once; everything past
//! [`ExperimentConfig::validate`] is linear.
//!
//! ```toml
//! seed = 2024
//! trials = 10
//! objective = "sum_rate"          # sum_rate | min_rate | min_sinr
//! output = "results.csv"
//! record_wall_time = false        # true breaks byte-identical reruns
//!
//! [geometry]                      # one entry per user, or one shared
//! tx_ris_distances = [30.0, 40.0] # meters
//! ris_rx_distances = [20.0, 25.0]
//!
//! [fading]
//! c0_db = -30.0
//! alpha1 = 2.2
//! alpha2 = 2.8
//! wavelength = 0.125
//!
//! [link]
//! noise_power_dbm = -90.0
//!
//! [sweep]
//! elements = [4, 8]
//! users = [2]
//! cells = [[2, 2]]
//! kappa = [4.0]                   # linear Rician factor
//! csi_p_db = []                   # empty: perfect CSI
//! power_dbm = [20.0]
//!
//! [budget]
//! max_evaluations = 4194304
//! max_iterations = 1000
//!
//! [[architectures]]
//! kind = "sris"                   # sris | iris | phase_shifter (+ bits)
//!
//! [[methods]]
//! kind = "exhaustive"             # greedy_flip | block_coordinate |
//!                                 # simulated_annealing (+ params)
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{db_to_linear, CsiNoiseParams, FadingParams, NetworkGeometry};
use crate::error::ValidationIssue;
use crate::metrics::{LinkBudget, ObjectiveKind};
use crate::optimizer::{AnnealingParams, Method, SearchBudget};
use crate::ris::{Architecture, CellShape};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: u64,
    #[serde(default)]
    pub objective: ObjectiveKind,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub record_wall_time: bool,
    pub geometry: GeometryConfig,
    pub fading: FadingConfig,
    pub link: LinkConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub budget: SearchBudget,
    pub architectures: Vec<ArchitectureConfig>,
    pub methods: Vec<MethodConfig>,
}

/// Distances take precedence; positions are only used when the matching
/// distance list is absent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default)]
    pub tx_ris_distances: Option<Vec<f64>>,
    #[serde(default)]
    pub ris_rx_distances: Option<Vec<f64>>,
    #[serde(default)]
    pub ris_position: Option<[f64; 3]>,
    #[serde(default)]
    pub tx_positions: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub rx_positions: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    pub c0_db: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub wavelength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub noise_power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub elements: Vec<usize>,
    pub users: Vec<usize>,
    #[serde(default)]
    pub cells: Vec<[usize; 2]>,
    pub kappa: Vec<f64>,
    #[serde(default)]
    pub csi_p_db: Vec<f64>,
    pub power_dbm: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArchitectureConfig {
    Sris,
    /// Cell shape comes from the `sweep.cells` axis.
    Iris,
    PhaseShifter {
        bits: u32,
    },
}

impl ArchitectureConfig {
    pub fn resolve(&self, cell: CellShape) -> Architecture {
        match *self {
            ArchitectureConfig::Sris => Architecture::SRis,
            ArchitectureConfig::Iris => Architecture::IRis(cell),
            ArchitectureConfig::PhaseShifter { bits } => Architecture::PhaseShifter { bits },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodConfig {
    Exhaustive,
    GreedyFlip,
    BlockCoordinate,
    SimulatedAnnealing(AnnealingParams),
}

impl From<MethodConfig> for Method {
    fn from(m: MethodConfig) -> Self {
        match m {
            MethodConfig::Exhaustive => Method::Exhaustive,
            MethodConfig::GreedyFlip => Method::GreedyFlip,
            MethodConfig::BlockCoordinate => Method::BlockCoordinate,
            MethodConfig::SimulatedAnnealing(p) => Method::SimulatedAnnealing(p),
        }
    }
}

/// One point of the Cartesian sweep, fully resolved to linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub id: u64,
    pub geometry: NetworkGeometry,
    pub cell: CellShape,
    pub fading: FadingParams,
    pub csi_p_db: Option<f64>,
    pub csi: CsiNoiseParams,
    pub link: LinkBudget,
}

impl SweepPoint {
    pub fn elements(&self) -> usize {
        self.geometry.elements()
    }

    pub fn users(&self) -> usize {
        self.geometry.users()
    }
}

/// A config whose every sweep point has passed validation.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
    pub architectures: Vec<ArchitectureConfig>,
    pub methods: Vec<Method>,
}

impl ValidatedConfig {
    pub fn row_count(&self) -> u64 {
        self.points.len() as u64
            * self.config.trials
            * self.architectures.len() as u64
            * self.methods.len() as u64
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
    }
}

fn euclidean(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Per-user list resolved for `users`: a single entry is shared, longer
/// lists are truncated.
fn per_user(list: &[f64], users: usize) -> Option<Vec<f64>> {
    match list.len() {
        1 => Some(vec![list[0]; users]),
        n if n >= users => Some(list[..users].to_vec()),
        _ => None,
    }
}

impl ExperimentConfig {
    fn distance_list(
        &self,
        explicit: &Option<Vec<f64>>,
        positions: &Option<Vec<[f64; 3]>>,
        path: &str,
        issues: &mut Vec<ValidationIssue>,
    ) -> Vec<f64> {
        if let Some(d) = explicit {
            return d.clone();
        }
        match (positions, self.geometry.ris_position) {
            (Some(p), Some(ris)) => p.iter().map(|x| euclidean(*x, ris)).collect(),
            _ => {
                issues.push(ValidationIssue::new(
                    path,
                    "missing: give distances or positions plus geometry.ris_position",
                ));
                Vec::new()
            }
        }
    }

    /// Checks every cross-field constraint and reports all violations at
    /// once. No trial should run unless this succeeds.
    pub fn validate(self) -> Result<ValidatedConfig> {
        let mut issues = Vec::new();
        let mut issue = |path: &str, msg: String| issues.push(ValidationIssue::new(path, msg));

        if self.trials == 0 {
            issue("trials", "must be positive".into());
        }
        let f = &self.fading;
        if !f.c0_db.is_finite() {
            issue("fading.c0_db", "must be finite".into());
        }
        for (path, a) in [("fading.alpha1", f.alpha1), ("fading.alpha2", f.alpha2)] {
            if !(a.is_finite() && a >= 0.0) {
                issue(path, format!("{a} must be non-negative"));
            }
        }
        if !(f.wavelength.is_finite() && f.wavelength > 0.0) {
            issue(
                "fading.wavelength",
                format!("{} must be positive", f.wavelength),
            );
        }
        if !self.link.noise_power_dbm.is_finite() {
            issue("link.noise_power_dbm", "must be finite".into());
        }

        let s = &self.sweep;
        for (path, empty) in [
            ("sweep.elements", s.elements.is_empty()),
            ("sweep.users", s.users.is_empty()),
            ("sweep.kappa", s.kappa.is_empty()),
            ("sweep.power_dbm", s.power_dbm.is_empty()),
            ("architectures", self.architectures.is_empty()),
            ("methods", self.methods.is_empty()),
        ] {
            if empty {
                issue(path, "must not be empty".into());
            }
        }
        for (i, &m) in s.elements.iter().enumerate() {
            if m == 0 {
                issue(&format!("sweep.elements[{i}]"), "must be positive".into());
            }
        }
        for (i, &k) in s.users.iter().enumerate() {
            if k == 0 {
                issue(&format!("sweep.users[{i}]"), "must be positive".into());
            }
        }
        for (i, &k) in s.kappa.iter().enumerate() {
            if !(k.is_finite() && k >= 0.0) {
                issue(
                    &format!("sweep.kappa[{i}]"),
                    format!("{k} must be finite and non-negative"),
                );
            }
        }
        for (i, &p) in s.csi_p_db.iter().enumerate() {
            if !p.is_finite() {
                issue(&format!("sweep.csi_p_db[{i}]"), "must be finite".into());
            }
        }
        for (i, &p) in s.power_dbm.iter().enumerate() {
            if !p.is_finite() {
                issue(&format!("sweep.power_dbm[{i}]"), "must be finite".into());
            }
        }

        let has_iris = self
            .architectures
            .iter()
            .any(|a| matches!(a, ArchitectureConfig::Iris));
        let cells: Vec<[usize; 2]> = if s.cells.is_empty() {
            if has_iris {
                issue("sweep.cells", "required by the iris architecture".into());
            }
            vec![[1, 1]]
        } else {
            s.cells.clone()
        };
        let mut shapes = Vec::new();
        for (i, &[r, c]) in cells.iter().enumerate() {
            match CellShape::new(r, c) {
                Ok(shape) => shapes.push(shape),
                Err(e) => issue(&format!("sweep.cells[{i}]"), e.to_string()),
            }
        }

        for (i, a) in self.architectures.iter().enumerate() {
            if let ArchitectureConfig::PhaseShifter { bits } = a {
                if *bits == 0 || *bits > 16 {
                    issue(
                        &format!("architectures[{i}].bits"),
                        format!("{bits} must be in 1..=16"),
                    );
                }
            }
        }
        if self.budget.max_evaluations == 0 {
            issue("budget.max_evaluations", "must be positive".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if let MethodConfig::SimulatedAnnealing(p) = m {
                if let Err(e) = p.validate() {
                    issue(&format!("methods[{i}]"), e.to_string());
                }
            }
        }
        let has_block = self
            .methods
            .iter()
            .any(|m| matches!(m, MethodConfig::BlockCoordinate));
        if has_block {
            let cap = self.budget.cell_enumeration_bits;
            for (i, shape) in shapes.iter().enumerate() {
                let bits = shape.size() * shape.size();
                if has_iris && bits > cap as usize {
                    issue(
                        &format!("sweep.cells[{i}]"),
                        format!(
                            "block_coordinate needs 2^{bits} patterns per cell, cap is 2^{cap}"
                        ),
                    );
                }
            }
            for (i, a) in self.architectures.iter().enumerate() {
                if let ArchitectureConfig::PhaseShifter { bits } = a {
                    if *bits > cap {
                        issue(
                            &format!("architectures[{i}].bits"),
                            format!("block_coordinate needs 2^{bits} levels per element, cap is 2^{cap}"),
                        );
                    }
                }
            }
        }

        let tx = self.distance_list(
            &self.geometry.tx_ris_distances,
            &self.geometry.tx_positions,
            "geometry.tx_ris_distances",
            &mut issues,
        );
        let rx = self.distance_list(
            &self.geometry.ris_rx_distances,
            &self.geometry.rx_positions,
            "geometry.ris_rx_distances",
            &mut issues,
        );
        for (path, list) in [
            ("geometry.tx_ris_distances", &tx),
            ("geometry.ris_rx_distances", &rx),
        ] {
            for (i, d) in list.iter().enumerate() {
                if !(d.is_finite() && *d > 0.0) {
                    issues.push(ValidationIssue::new(
                        format!("{path}[{i}]"),
                        format!("distance {d} must be positive"),
                    ));
                }
            }
        }

        let mut points = Vec::new();
        let csi_axis: Vec<Option<f64>> = if s.csi_p_db.is_empty() {
            vec![None]
        } else {
            s.csi_p_db.iter().copied().map(Some).collect()
        };
        let c0 = db_to_linear(f.c0_db);
        let noise = dbm_to_watts(self.link.noise_power_dbm);
        for &m in &s.elements {
            for &k in &s.users {
                let (Some(tx_k), Some(rx_k)) = (per_user(&tx, k), per_user(&rx, k)) else {
                    if !tx.is_empty() && !rx.is_empty() {
                        issues.push(ValidationIssue::new(
                            "geometry",
                            format!(
                                "K = {k} users but only {} / {} distances",
                                tx.len(),
                                rx.len()
                            ),
                        ));
                    }
                    continue;
                };
                for (ci, &shape) in shapes.iter().enumerate() {
                    if has_iris && m > 0 && m % shape.size() != 0 {
                        issues.push(ValidationIssue::new(
                            format!("sweep.cells[{ci}]"),
                            format!("M = {m} not divisible by cd = {}", shape.size()),
                        ));
                        continue;
                    }
                    for &kappa in &s.kappa {
                        for &p_db in &csi_axis {
                            for &power in &s.power_dbm {
                                let geometry = NetworkGeometry::new(m, tx_k.clone(), rx_k.clone());
                                let fading = FadingParams {
                                    kappa,
                                    c0,
                                    alpha1: f.alpha1,
                                    alpha2: f.alpha2,
                                    wavelength: f.wavelength,
                                };
                                let csi = match p_db {
                                    Some(db) => CsiNoiseParams::with_snr_db(db),
                                    None => Ok(CsiNoiseParams::perfect()),
                                };
                                let link = LinkBudget::uniform(k, dbm_to_watts(power), noise);
                                match (geometry, fading.validate(), csi, link) {
                                    (Ok(geometry), Ok(()), Ok(csi), Ok(link)) => {
                                        points.push(SweepPoint {
                                            id: points.len() as u64,
                                            geometry,
                                            cell: shape,
                                            fading,
                                            csi_p_db: p_db,
                                            csi,
                                            link,
                                        })
                                    }
                                    // component errors are reported by the field checks above
                                    _ => continue,
                                }
                            }
                        }
                    }
                }
            }
        }

        if !issues.is_empty() {
            issues.dedup();
            return Err(Error::Validation(issues));
        }
        let methods = self.methods.iter().map(|&m| m.into()).collect();
        Ok(ValidatedConfig {
            architectures: self.architectures.clone(),
            methods,
            points,
            config: self,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"
        seed = 7
        trials = 2
        [geometry]
        tx_ris_distances = [30.0]
        ris_rx_distances = [20.0, 25.0]
        [fading]
        c0_db = -30.0
        alpha1 = 2.0
        alpha2 = 2.5
        wavelength = 0.125
        [link]
        noise_power_dbm = -90.0
        [sweep]
        elements = [32]
        users = [2]
        cells = [[2, 2]]
        kappa = [4.0]
        power_dbm = [20.0]
        [[architectures]]
        kind = "sris"
        [[architectures]]
        kind = "iris"
        [[methods]]
        kind = "greedy_flip"
        [[methods]]
        kind = "simulated_annealing"
        cooling = 0.9
    "#;

    fn sample() -> ExperimentConfig {
        toml::from_str(SAMPLE).unwrap()
    }

    fn issues(cfg: ExperimentConfig) -> Vec<ValidationIssue> {
        match cfg.validate() {
            Err(Error::Validation(v)) => v,
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn thirty_two_elements_in_four_element_cells_is_valid() {
        let v = sample().validate().unwrap();
        assert_eq!(v.points.len(), 1);
        assert_eq!(v.row_count(), 2 * 2 * 2);
        let p = &v.points[0];
        assert_eq!(p.geometry.tx_ris_distances(), &[30.0, 30.0]);
        assert!((p.link.powers()[0] - 0.1).abs() < 1e-15);
        assert!((p.link.noise_power() - 1e-12).abs() < 1e-25);
        assert!((p.fading.c0 - 1e-3).abs() < 1e-18);
        assert!(matches!(
            v.methods[1],
            Method::SimulatedAnnealing(AnnealingParams { cooling, .. }) if cooling == 0.9
        ));
    }

    #[test]
    fn indivisible_cells_rejected() {
        let mut cfg = sample();
        cfg.sweep.elements = vec![10];
        let found = issues(cfg);
        assert!(found
            .iter()
            .any(|i| i.message.contains("M = 10 not divisible by cd = 4")));
    }

    #[test]
    fn negative_distance_rejected() {
        let mut cfg = sample();
        cfg.geometry.tx_ris_distances = Some(vec![-5.0]);
        let found = issues(cfg);
        assert!(found
            .iter()
            .any(|i| i.path == "geometry.tx_ris_distances[0]"));
    }

    #[test]
    fn errors_are_reported_together() {
        let mut cfg = sample();
        cfg.trials = 0;
        cfg.sweep.kappa = vec![-1.0];
        cfg.sweep.elements = vec![6];
        let found = issues(cfg);
        let paths: Vec<_> = found.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"trials"));
        assert!(paths.contains(&"sweep.kappa[0]"));
        assert!(paths.contains(&"sweep.cells[0]"));
    }

    #[test]
    fn too_few_distances_for_users() {
        let mut cfg = sample();
        cfg.sweep.users = vec![3];
        assert!(issues(cfg).iter().any(|i| i.path == "geometry"));
    }

    #[test]
    fn positions_give_distances() {
        let mut cfg = sample();
        cfg.geometry = GeometryConfig {
            ris_position: Some([0.0, 0.0, 0.0]),
            tx_positions: Some(vec![[3.0, 4.0, 0.0], [0.0, 6.0, 8.0]]),
            ris_rx_distances: Some(vec![7.0]),
            ..Default::default()
        };
        let v = cfg.validate().unwrap();
        assert_eq!(v.points[0].geometry.tx_ris_distances(), &[5.0, 10.0]);
    }

    #[test]
    fn oversized_cells_rejected_for_block_search() {
        let mut cfg = sample();
        cfg.sweep.cells = vec![[1, 5]];
        cfg.sweep.elements = vec![10];
        cfg.methods = vec![MethodConfig::BlockCoordinate];
        assert!(issues(cfg)
            .iter()
            .any(|i| i.message.contains("block_coordinate")));
    }

    #[test]
    fn json_mirror_parses() {
        let cfg = sample();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = SAMPLE.replace("seed = 7", "seed = 7\nsede = 3");
        assert!(toml::from_str::<ExperimentConfig>(&bad).is_err());
    }
}
