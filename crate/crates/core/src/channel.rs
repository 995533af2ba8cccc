//! Network geometry, fading draws and CSI estimation error.
//!
//! The Tx→RIS link is Rician, the RIS→Rx link Rayleigh, both with a
//! `C0 · d^-alpha` path-loss profile. `CN(0, s2)` always means the
//! circular convention: real and imaginary parts are independent
//! `N(0, s2 / 2)`.

use std::f64::consts::PI;

use ndarray::Array1;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{StreamKind, TrialStreams};
use crate::{Error, Result};

/// Distances of every user pair to the RIS.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGeometry {
    elements: usize,
    tx_ris_distances: Vec<f64>,
    ris_rx_distances: Vec<f64>,
}

impl NetworkGeometry {
    /// The user count K is the length of the distance lists, which must agree.
    pub fn new(
        elements: usize,
        tx_ris_distances: Vec<f64>,
        ris_rx_distances: Vec<f64>,
    ) -> Result<Self> {
        if elements == 0 {
            return Err(Error::Domain("RIS element count must be positive".into()));
        }
        if tx_ris_distances.is_empty() {
            return Err(Error::Domain("user count must be positive".into()));
        }
        if tx_ris_distances.len() != ris_rx_distances.len() {
            return Err(Error::Dimension {
                expected: tx_ris_distances.len(),
                found: ris_rx_distances.len(),
            });
        }
        if let Some(d) = tx_ris_distances
            .iter()
            .chain(&ris_rx_distances)
            .find(|d| !(d.is_finite() && **d > 0.0))
        {
            return Err(Error::Domain(format!("distance {d} must be positive")));
        }
        Ok(Self {
            elements,
            tx_ris_distances,
            ris_rx_distances,
        })
    }

    pub fn users(&self) -> usize {
        self.tx_ris_distances.len()
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn tx_ris_distances(&self) -> &[f64] {
        &self.tx_ris_distances
    }

    pub fn ris_rx_distances(&self) -> &[f64] {
        &self.ris_rx_distances
    }

    /// Distance d_{1,j}, 1-based `j`.
    pub fn tx_ris_distance(&self, j: usize) -> Result<f64> {
        check_user(j, self.users()).map(|i| self.tx_ris_distances[i])
    }

    /// Distance d_{2,k}, 1-based `k`.
    pub fn ris_rx_distance(&self, k: usize) -> Result<f64> {
        check_user(k, self.users()).map(|i| self.ris_rx_distances[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    /// Rician factor, linear.
    pub kappa: f64,
    /// Path gain at the 1 m reference distance, linear.
    pub c0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
}

impl FadingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::Domain(format!(
                "Rician factor {} must be finite and non-negative",
                self.kappa
            )));
        }
        if !(self.c0.is_finite() && self.c0 > 0.0) {
            return Err(Error::Domain(format!("C0 {} must be positive", self.c0)));
        }
        for (name, a) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::Domain(format!("{name} {a} must be non-negative")));
            }
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::Domain(format!(
                "wavelength {} must be positive",
                self.wavelength
            )));
        }
        Ok(())
    }
}

/// Estimation error model. When enabled, each estimated entry is the true
/// entry plus `CN(0, 1/p)` noise, with `p` the estimation SNR (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiNoiseParams {
    pub enabled: bool,
    pub p: f64,
}

impl CsiNoiseParams {
    pub fn perfect() -> Self {
        Self {
            enabled: false,
            p: f64::INFINITY,
        }
    }

    pub fn with_snr(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::Domain(format!(
                "estimation SNR {p} must be positive"
            )));
        }
        Ok(Self { enabled: true, p })
    }

    pub fn with_snr_db(p_db: f64) -> Result<Self> {
        Self::with_snr(db_to_linear(p_db))
    }

    fn error_variance(&self) -> f64 {
        1.0 / self.p
    }
}

/// One coherence-time draw of every channel in the network.
///
/// `h[j]` is the Tx_j→RIS column vector and `g[k]` the RIS→Rx_k row
/// vector (both stored 0-based). Estimates are only stored when CSI noise
/// is enabled; otherwise the estimate accessors alias the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: Vec<Array1<Complex64>>,
    g: Vec<Array1<Complex64>>,
    h_est: Option<Vec<Array1<Complex64>>>,
    g_est: Option<Vec<Array1<Complex64>>>,
}

/// Which copy of the channels a computation sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsiView {
    Truth,
    Estimate,
}

impl ChannelRealization {
    /// Perfect-CSI realization from explicit channel vectors.
    pub fn from_truth(h: Vec<Array1<Complex64>>, g: Vec<Array1<Complex64>>) -> Result<Self> {
        Self::check_shapes(&h, &g)?;
        Ok(Self {
            h,
            g,
            h_est: None,
            g_est: None,
        })
    }

    pub fn with_estimates(
        h: Vec<Array1<Complex64>>,
        g: Vec<Array1<Complex64>>,
        h_est: Vec<Array1<Complex64>>,
        g_est: Vec<Array1<Complex64>>,
    ) -> Result<Self> {
        Self::check_shapes(&h, &g)?;
        Self::check_shapes(&h_est, &g_est)?;
        if h_est.len() != h.len() {
            return Err(Error::Dimension {
                expected: h.len(),
                found: h_est.len(),
            });
        }
        if h_est[0].len() != h[0].len() {
            return Err(Error::Dimension {
                expected: h[0].len(),
                found: h_est[0].len(),
            });
        }
        Ok(Self {
            h,
            g,
            h_est: Some(h_est),
            g_est: Some(g_est),
        })
    }

    fn check_shapes(h: &[Array1<Complex64>], g: &[Array1<Complex64>]) -> Result<()> {
        if h.is_empty() {
            return Err(Error::Domain("realization needs at least one user".into()));
        }
        if g.len() != h.len() {
            return Err(Error::Dimension {
                expected: h.len(),
                found: g.len(),
            });
        }
        let m = h[0].len();
        if m == 0 {
            return Err(Error::Domain("channel vectors must be non-empty".into()));
        }
        if let Some(v) = h.iter().chain(g).find(|v| v.len() != m) {
            return Err(Error::Dimension {
                expected: m,
                found: v.len(),
            });
        }
        if h.iter()
            .chain(g)
            .flat_map(|v| v.iter())
            .any(|z| !z.is_finite())
        {
            return Err(Error::Domain("channel entries must be finite".into()));
        }
        Ok(())
    }

    pub fn users(&self) -> usize {
        self.h.len()
    }

    pub fn elements(&self) -> usize {
        self.h[0].len()
    }

    pub fn has_estimates(&self) -> bool {
        self.h_est.is_some()
    }

    pub fn h(&self) -> &[Array1<Complex64>] {
        &self.h
    }

    pub fn g(&self) -> &[Array1<Complex64>] {
        &self.g
    }

    pub fn h_est(&self) -> &[Array1<Complex64>] {
        self.h_est.as_deref().unwrap_or(&self.h)
    }

    pub fn g_est(&self) -> &[Array1<Complex64>] {
        self.g_est.as_deref().unwrap_or(&self.g)
    }

    /// `(h, g)` as seen through `view`.
    pub fn channels(&self, view: CsiView) -> (&[Array1<Complex64>], &[Array1<Complex64>]) {
        match view {
            CsiView::Truth => (self.h(), self.g()),
            CsiView::Estimate => (self.h_est(), self.g_est()),
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Large-scale gain `c0 · d^-alpha`.
pub fn path_loss(c0: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::Domain(format!(
            "reference gain {c0} must be positive"
        )));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("distance {d} must be positive")));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Domain(format!(
            "path-loss exponent {alpha} must be non-negative"
        )));
    }
    Ok(c0 * d.powf(-alpha))
}

/// One `CN(0, variance)` draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// Deterministic line-of-sight term `sqrt(C0 d^-alpha1) · exp(-i 2π d / λ)`.
pub fn line_of_sight(d: f64, fading: &FadingParams) -> Result<Complex64> {
    let gain = path_loss(fading.c0, d, fading.alpha1)?;
    Ok(Complex64::from_polar(
        gain.sqrt(),
        -2.0 * PI * d / fading.wavelength,
    ))
}

/// Rician Tx_j→RIS vector `h^j` for 1-based user `j`.
pub fn sample_tx_ris_channel<R: Rng + ?Sized>(
    j: usize,
    geom: &NetworkGeometry,
    fading: &FadingParams,
    rng: &mut R,
) -> Result<Array1<Complex64>> {
    fading.validate()?;
    let d = geom.tx_ris_distance(j)?;
    let variance = path_loss(fading.c0, d, fading.alpha1)?;
    let los = line_of_sight(d, fading)?;
    let w_nlos = (1.0 / (1.0 + fading.kappa)).sqrt();
    let w_los = (fading.kappa / (1.0 + fading.kappa)).sqrt();
    Ok(Array1::from_shape_fn(geom.elements(), |_| {
        w_nlos * complex_gaussian(rng, variance) + w_los * los
    }))
}

/// Rayleigh RIS→Rx_k row vector `g^k` for 1-based receiver `k`.
pub fn sample_ris_rx_channel<R: Rng + ?Sized>(
    k: usize,
    geom: &NetworkGeometry,
    fading: &FadingParams,
    rng: &mut R,
) -> Result<Array1<Complex64>> {
    fading.validate()?;
    let d = geom.ris_rx_distance(k)?;
    let variance = path_loss(fading.c0, d, fading.alpha2)?;
    Ok(Array1::from_shape_fn(geom.elements(), |_| {
        complex_gaussian(rng, variance)
    }))
}

/// Adds `CN(0, 1/p)` estimation error to every entry. Disabled noise is a
/// pass-through.
pub fn apply_csi_noise<R: Rng + ?Sized>(
    truth: &Array1<Complex64>,
    noise: &CsiNoiseParams,
    rng: &mut R,
) -> Array1<Complex64> {
    if !noise.enabled {
        return truth.clone();
    }
    let variance = noise.error_variance();
    truth.mapv(|z| z + complex_gaussian(rng, variance))
}

/// Draws all channels of one trial from per-(direction, user) substreams.
pub fn sample_network_realization(
    geom: &NetworkGeometry,
    fading: &FadingParams,
    noise: &CsiNoiseParams,
    streams: &TrialStreams,
) -> Result<ChannelRealization> {
    fading.validate()?;
    let users = 1..=geom.users();
    let h = users
        .clone()
        .map(|j| {
            let mut rng = streams.stream(StreamKind::TxRis, j as u32);
            sample_tx_ris_channel(j, geom, fading, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let g = users
        .clone()
        .map(|k| {
            let mut rng = streams.stream(StreamKind::RisRx, k as u32);
            sample_ris_rx_channel(k, geom, fading, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    if !noise.enabled {
        return ChannelRealization::from_truth(h, g);
    }
    let h_est = h
        .iter()
        .zip(users.clone())
        .map(|(v, j)| {
            apply_csi_noise(
                v,
                noise,
                &mut streams.stream(StreamKind::TxRisEstimate, j as u32),
            )
        })
        .collect();
    let g_est = g
        .iter()
        .zip(users)
        .map(|(v, k)| {
            apply_csi_noise(
                v,
                noise,
                &mut streams.stream(StreamKind::RisRxEstimate, k as u32),
            )
        })
        .collect();
    ChannelRealization::with_estimates(h, g, h_est, g_est)
}

fn check_user(index: usize, users: usize) -> Result<usize> {
    if index == 0 || index > users {
        return Err(Error::IndexOutOfRange {
            what: "user",
            index,
            max: users,
        });
    }
    Ok(index - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use rand::SeedableRng;

    const SAMPLES: usize = 100_000;

    fn geometry(m: usize, d1: f64, d2: f64) -> NetworkGeometry {
        NetworkGeometry::new(m, vec![d1, d1 * 1.5], vec![d2, d2 * 2.0]).unwrap()
    }

    fn fading(kappa: f64) -> FadingParams {
        FadingParams {
            kappa,
            c0: 1e-3,
            alpha1: 2.0,
            alpha2: 3.0,
            wavelength: 0.125,
        }
    }

    fn mean_and_power(samples: &[Complex64]) -> (Complex64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<Complex64>() / n;
        let power = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
        (mean, power)
    }

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss(1e-3, 1.0, 2.0).unwrap(), 1e-3);
        assert!((path_loss(1e-3, 10.0, 2.0).unwrap() - 1e-5).abs() < 1e-20);
        assert_eq!(path_loss(1.0, 5.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn path_loss_rejects_bad_domain() {
        assert!(matches!(path_loss(1e-3, 0.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss(1e-3, -1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss(0.0, 1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(path_loss(-1.0, 1.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn geometry_invariants() {
        assert!(NetworkGeometry::new(4, vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(NetworkGeometry::new(4, vec![-1.0], vec![1.0]).is_err());
        assert!(NetworkGeometry::new(0, vec![1.0], vec![1.0]).is_err());
        let g = geometry(4, 10.0, 20.0);
        assert_eq!(g.users(), 2);
        assert!(matches!(
            g.tx_ris_distance(0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(g.tx_ris_distance(3).is_err());
        assert_eq!(g.tx_ris_distance(2).unwrap(), 15.0);
    }

    #[test]
    fn huge_kappa_is_pure_line_of_sight() {
        // sqrt(1/(1+1e40)) = 1e-20 puts the scattered part far below one ulp.
        let geom = geometry(16, 10.3, 5.0);
        let f = fading(1e40);
        let mut rng = SimRng::seed_from_u64(3);
        let h = sample_tx_ris_channel(1, &geom, &f, &mut rng).unwrap();
        let los = line_of_sight(10.3, &f).unwrap();
        assert!(los.re.abs() > 1e-4 && los.im.abs() > 1e-4);
        for z in h.iter() {
            assert_eq!(*z, los);
        }
    }

    #[test]
    fn rayleigh_tx_ris_variance_at_zero_kappa() {
        let geom = geometry(1, 10.0, 5.0);
        let f = fading(0.0);
        let mut rng = SimRng::seed_from_u64(11);
        let samples: Vec<_> = (0..SAMPLES)
            .map(|_| sample_tx_ris_channel(1, &geom, &f, &mut rng).unwrap()[0])
            .collect();
        let (mean, power) = mean_and_power(&samples);
        let expected = 1e-5;
        assert!(mean.norm() < 3.0 * (expected / SAMPLES as f64).sqrt());
        assert!((power - expected).abs() / expected < 0.05, "power {power}");
    }

    #[test]
    fn second_moment_conserved_for_any_kappa() {
        let geom = geometry(1, 10.0, 5.0);
        for (seed, kappa) in [0.5, 1.0, 4.0, 10.0, 100.0].into_iter().enumerate() {
            let f = fading(kappa);
            let mut rng = SimRng::seed_from_u64(seed as u64);
            let samples: Vec<_> = (0..SAMPLES)
                .map(|_| sample_tx_ris_channel(1, &geom, &f, &mut rng).unwrap()[0])
                .collect();
            let (_, power) = mean_and_power(&samples);
            assert!((power - 1e-5).abs() / 1e-5 < 0.05, "kappa {kappa}: {power}");
        }
    }

    #[test]
    fn ris_rx_moments() {
        let geom = geometry(1, 10.0, 5.0);
        let f = fading(4.0);
        let variance = 1e-3 * 5f64.powf(-3.0);
        let mut rng = SimRng::seed_from_u64(5);
        let samples: Vec<_> = (0..SAMPLES)
            .map(|_| sample_ris_rx_channel(1, &geom, &f, &mut rng).unwrap()[0])
            .collect();
        let (mean, power) = mean_and_power(&samples);
        assert!(mean.norm() < 3.0 * (variance / SAMPLES as f64).sqrt());
        assert!((power - variance).abs() / variance < 0.05);
    }

    #[test]
    fn ris_rx_reference_distance_has_variance_c0() {
        let geom = NetworkGeometry::new(1, vec![3.0], vec![1.0]).unwrap();
        let f = FadingParams {
            alpha2: 3.7,
            ..fading(1.0)
        };
        let mut rng = SimRng::seed_from_u64(8);
        let samples: Vec<_> = (0..SAMPLES)
            .map(|_| sample_ris_rx_channel(1, &geom, &f, &mut rng).unwrap()[0])
            .collect();
        let (_, power) = mean_and_power(&samples);
        assert!((power - 1e-3).abs() / 1e-3 < 0.05);
    }

    #[test]
    fn csi_noise_examples() {
        let mut rng = SimRng::seed_from_u64(1);
        let truth = Array1::from_vec(vec![Complex64::new(0.3, -0.2); 8]);
        let exact = CsiNoiseParams::with_snr(f64::INFINITY).unwrap();
        assert_eq!(apply_csi_noise(&truth, &exact, &mut rng), truth);
        assert_eq!(
            apply_csi_noise(&truth, &CsiNoiseParams::perfect(), &mut rng),
            truth
        );

        for (p, expected) in [(1.0, 1.0), (4.0, 0.25)] {
            let noise = CsiNoiseParams::with_snr(p).unwrap();
            let zero = Array1::from_elem(SAMPLES, Complex64::new(0.0, 0.0));
            let out = apply_csi_noise(&zero, &noise, &mut rng);
            let (_, power) = mean_and_power(out.as_slice().unwrap());
            assert!((power - expected).abs() / expected < 0.05, "p {p}: {power}");
        }
        assert!(CsiNoiseParams::with_snr(0.0).is_err());
        assert!((CsiNoiseParams::with_snr_db(10.0).unwrap().p - 10.0).abs() < 1e-12);
    }

    #[test]
    fn csi_error_uncorrelated_with_truth() {
        let geom = geometry(1, 10.0, 5.0);
        let f = fading(0.0);
        let noise = CsiNoiseParams::with_snr(1e5).unwrap();
        let (mut cross, mut pt, mut pe) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for t in 0..10_000u64 {
            let r = sample_network_realization(&geom, &f, &noise, &TrialStreams::new(t)).unwrap();
            let truth = r.g()[0][0];
            let err = r.g_est()[0][0] - truth;
            cross += truth * err.conj();
            pt += truth.norm_sqr();
            pe += err.norm_sqr();
        }
        assert!(cross.norm() / (pt * pe).sqrt() < 0.05);
    }

    #[test]
    fn perfect_csi_aliases_truth() {
        let geom = NetworkGeometry::new(1, vec![2.0], vec![3.0]).unwrap();
        let r = sample_network_realization(
            &geom,
            &fading(1.0),
            &CsiNoiseParams::perfect(),
            &TrialStreams::new(4),
        )
        .unwrap();
        assert!(!r.has_estimates());
        assert_eq!(r.h_est(), r.h());
        assert_eq!(r.g_est(), r.g());
    }

    #[test]
    fn realization_is_deterministic_per_seed() {
        let geom = geometry(8, 10.0, 5.0);
        let noise = CsiNoiseParams::with_snr_db(20.0).unwrap();
        let a = sample_network_realization(&geom, &fading(2.0), &noise, &TrialStreams::new(9));
        let b = sample_network_realization(&geom, &fading(2.0), &noise, &TrialStreams::new(9));
        assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn adding_users_keeps_existing_draws() {
        let f = fading(2.0);
        let small = NetworkGeometry::new(4, vec![10.0], vec![5.0]).unwrap();
        let large = NetworkGeometry::new(4, vec![10.0, 12.0], vec![5.0, 6.0]).unwrap();
        let s = TrialStreams::new(21);
        let a = sample_network_realization(&small, &f, &CsiNoiseParams::perfect(), &s).unwrap();
        let b = sample_network_realization(&large, &f, &CsiNoiseParams::perfect(), &s).unwrap();
        assert_eq!(a.h()[0], b.h()[0]);
        assert_eq!(a.g()[0], b.g()[0]);
    }

    fn normalized_correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<Complex64>() / n;
        let mb = b.iter().sum::<Complex64>() / n;
        let cross: Complex64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb).conj())
            .sum();
        let va: f64 = a.iter().map(|x| (x - ma).norm_sqr()).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).norm_sqr()).sum();
        cross.norm() / (va * vb).sqrt()
    }

    #[test]
    fn users_and_elements_are_independent() {
        let geom = geometry(2, 10.0, 5.0);
        let f = fading(1.0);
        let mut h1 = Vec::new();
        let mut h2 = Vec::new();
        let mut g1 = Vec::new();
        let mut g2 = Vec::new();
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for t in 0..10_000u64 {
            let r = sample_network_realization(
                &geom,
                &f,
                &CsiNoiseParams::perfect(),
                &TrialStreams::new(t),
            )
            .unwrap();
            h1.push(r.h()[0][0]);
            h2.push(r.h()[1][0]);
            g1.push(r.g()[0][0]);
            g2.push(r.g()[1][0]);
            e1.push(r.h()[0][0]);
            e2.push(r.h()[0][1]);
        }
        assert!(normalized_correlation(&h1, &h2) < 0.05);
        assert!(normalized_correlation(&g1, &g2) < 0.05);
        assert!(normalized_correlation(&e1, &e2) < 0.05);
        assert!(normalized_correlation(&h1, &g1) < 0.05);
    }
}
