use std::io::Write;

use sha2::{Digest, Sha256};

use crate::channel::ChannelRealization;
use crate::Result;

/// Column order of the result file.
pub const CSV_HEADER: [&str; 22] = [
    "point_id",
    "M",
    "K",
    "c",
    "d",
    "kappa",
    "csi_p_db",
    "sigma2",
    "powers",
    "trial",
    "seed",
    "arch",
    "method",
    "objective",
    "obj_est",
    "obj_true",
    "sinrs",
    "pattern",
    "evaluations",
    "wall_ms",
    "truth_hash",
    "refused",
];

/// One (sweep point, trial, architecture, method) row.
///
/// Refused rows (search space over the cap) leave the objective, SINR and
/// pattern fields empty. `csi_p_db` is empty for perfect CSI and `wall_ms`
/// is empty unless wall-clock recording is enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub point_id: u64,
    pub elements: usize,
    pub users: usize,
    pub cell_rows: usize,
    pub cell_cols: usize,
    pub kappa: f64,
    pub csi_p_db: Option<f64>,
    pub sigma2: f64,
    pub powers: Vec<f64>,
    pub trial: u64,
    pub seed: u64,
    pub arch: String,
    pub method: String,
    pub objective: String,
    pub obj_est: Option<f64>,
    pub obj_true: Option<f64>,
    pub sinrs: Vec<f64>,
    pub pattern: Option<String>,
    pub evaluations: u64,
    pub wall_ms: Option<f64>,
    pub truth_hash: String,
    pub refused: bool,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| format_float(x))
        .collect::<Vec<_>>()
        .join(";")
}

impl ResultRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        vec![
            self.point_id.to_string(),
            self.elements.to_string(),
            self.users.to_string(),
            self.cell_rows.to_string(),
            self.cell_cols.to_string(),
            format_float(self.kappa),
            opt(self.csi_p_db),
            format_float(self.sigma2),
            format_list(&self.powers),
            self.trial.to_string(),
            self.seed.to_string(),
            self.arch.clone(),
            self.method.clone(),
            self.objective.clone(),
            opt(self.obj_est),
            opt(self.obj_true),
            format_list(&self.sinrs),
            self.pattern.clone().unwrap_or_default(),
            self.evaluations.to_string(),
            opt(self.wall_ms),
            self.truth_hash.clone(),
            self.refused.to_string(),
        ]
    }
}

pub fn write_records<W: Write>(out: W, records: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// First 64 bits of SHA-256 over the dimensions and the little-endian
/// bytes of every true channel entry (all `h`, then all `g`), as hex.
pub fn truth_hash(real: &ChannelRealization) -> String {
    let mut hasher = Sha256::new();
    hasher.update((real.users() as u64).to_le_bytes());
    hasher.update((real.elements() as u64).to_le_bytes());
    for z in real.h().iter().chain(real.g()).flat_map(|v| v.iter()) {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    format!("{:016x}", u64::from_be_bytes(head))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use num_complex::Complex64;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn hash_tracks_channel_bytes() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = ChannelRealization::from_truth(vec![array![c(1.0)]], vec![array![c(2.0)]]).unwrap();
        let b = ChannelRealization::from_truth(vec![array![c(1.0)]], vec![array![c(2.5)]]).unwrap();
        assert_eq!(truth_hash(&a), truth_hash(&a.clone()));
        assert_ne!(truth_hash(&a), truth_hash(&b));
        assert_eq!(truth_hash(&a).len(), 16);
    }
}
