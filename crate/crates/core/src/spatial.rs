//! Exact Born-rule oracle for local projective measurements on the full
//! state vector.

use crate::config::TOL;
use crate::mps::GenerationSequence;
use crate::numerics::register::{apply_single, sites_for_len};
use crate::numerics::{norm, CMatrix, C64};
use crate::par::Exec;
use crate::{Error, Result};

/// A rank-1 projective measurement on one site.
///
/// For qubits, `Bloch { theta, phi }` selects the basis
/// `|+⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` (outcome index 0, value +1) and
/// `|−⟩ = e^{−iφ} sin(θ/2)|0⟩ − cos(θ/2)|1⟩` (outcome index 1, value −1).
/// `Basis(V)` gives the basis as the columns of a unitary `V`.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementSetting {
    Bloch { theta: f64, phi: f64 },
    Basis(CMatrix),
}

impl MeasurementSetting {
    pub fn z() -> Self {
        Self::Bloch { theta: 0.0, phi: 0.0 }
    }

    pub fn x() -> Self {
        Self::Bloch {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn y() -> Self {
        Self::Bloch {
            theta: std::f64::consts::FRAC_PI_2,
            phi: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Setting whose `+1` eigenvector has the given Bloch vector.
    pub fn from_bloch_vector(m: [f64; 3]) -> Result<Self> {
        let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
        if (n - 1.0).abs() > TOL.normalization {
            return Err(Error::NonUnitVector { norm: n });
        }
        Ok(Self::Bloch {
            theta: m[2].clamp(-1.0, 1.0).acos(),
            phi: m[1].atan2(m[0]),
        })
    }

    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        match *self {
            Self::Bloch { theta, phi } => Some([
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ]),
            Self::Basis(_) => None,
        }
    }

    pub fn site_dim(&self) -> usize {
        match self {
            Self::Bloch { .. } => 2,
            Self::Basis(v) => v.rows(),
        }
    }

    /// Unitary whose columns are the measurement basis vectors.
    pub fn basis(&self) -> Result<CMatrix> {
        match *self {
            Self::Bloch { theta, phi } => {
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::InvalidArgument("non-finite angle".into()));
                }
                let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let e = C64::from_polar(1.0, phi);
                Ok(CMatrix::from_rows(&[
                    vec![C64::new(co, 0.0), e.conj() * si],
                    vec![e * si, C64::new(-co, 0.0)],
                ])?)
            }
            Self::Basis(ref v) => {
                let deviation = v.unitarity_error();
                if deviation > TOL.unitary {
                    return Err(Error::NotUnitary { deviation });
                }
                Ok(v.clone())
            }
        }
    }
}

/// Joint outcome distribution of `n_sites` sites with `site_dim` outcomes
/// each. `probs` is indexed by the outcome tuple in mixed radix, site 0 most
/// significant; outcome index 0 precedes 1, so for qubits `+1` precedes `−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    site_dim: usize,
    n_sites: usize,
    settings: Option<Vec<MeasurementSetting>>,
    probs: Vec<f64>,
}

impl CorrelationTable {
    pub(crate) fn from_probs(
        site_dim: usize,
        n_sites: usize,
        settings: Option<Vec<MeasurementSetting>>,
        probs: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(probs.len(), site_dim.pow(n_sites as u32));
        Self {
            site_dim,
            n_sites,
            settings,
            probs,
        }
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn settings(&self) -> Option<&[MeasurementSetting]> {
        self.settings.as_deref()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn outcome_tuple(&self, index: usize) -> Vec<usize> {
        let mut t = vec![0; self.n_sites];
        let mut x = index;
        for k in (0..self.n_sites).rev() {
            t[k] = x % self.site_dim;
            x /= self.site_dim;
        }
        t
    }

    pub fn probability(&self, outcomes: &[usize]) -> Option<f64> {
        if outcomes.len() != self.n_sites || outcomes.iter().any(|&o| o >= self.site_dim) {
            return None;
        }
        let idx = outcomes.iter().fold(0, |acc, &o| acc * self.site_dim + o);
        Some(self.probs[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.outcome_tuple(i), p))
    }

    /// Expectation of the product of `±1` outcome values; qubits only.
    pub fn correlation(&self) -> Result<f64> {
        if self.site_dim != 2 {
            return Err(Error::NotQubits(self.site_dim));
        }
        Ok(self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| if i.count_ones() % 2 == 0 { p } else { -p })
            .sum())
    }

    /// Largest per-tuple probability difference.
    pub fn max_abs_diff(&self, other: &CorrelationTable) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Total-variation distance `½ Σ |p − q|`.
    pub fn statistical_distance(&self, other: &CorrelationTable) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    fn check_compatible(&self, other: &CorrelationTable) -> Result<()> {
        if (self.site_dim, self.n_sites) != (other.site_dim, other.n_sites) {
            return Err(Error::DimensionMismatch(format!(
                "tables over {}^{} and {}^{} outcomes",
                self.site_dim, self.n_sites, other.site_dim, other.n_sites
            )));
        }
        Ok(())
    }
}

/// Runs a generation staircase.
pub fn apply_sequence(seq: &GenerationSequence) -> Vec<C64> {
    seq.apply()
}

fn common_dim(settings: &[MeasurementSetting]) -> Result<usize> {
    let d = settings
        .first()
        .map(MeasurementSetting::site_dim)
        .ok_or_else(|| Error::InvalidArgument("no settings".into()))?;
    if settings.iter().any(|s| s.site_dim() != d) {
        return Err(Error::DimensionMismatch("settings of mixed dimension".into()));
    }
    Ok(d)
}

/// `P(i₁…i_N) = |⟨v_{i₁} ⊗ … ⊗ v_{i_N}|ψ⟩|²`.
pub fn joint_distribution(psi: &[C64], settings: &[MeasurementSetting]) -> Result<CorrelationTable> {
    let d = common_dim(settings)?;
    let n = settings.len();
    sites_for_len(psi.len(), d, n).map_err(|_| {
        Error::DimensionMismatch(format!(
            "{n} settings for a state of length {}",
            psi.len()
        ))
    })?;
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > TOL.normalization {
        return Err(Error::NotNormalized { norm: nrm });
    }
    let mut amp = psi.to_vec();
    for (site, s) in settings.iter().enumerate() {
        apply_single(&mut amp, d, n, site, &s.basis()?.adjoint());
    }
    Ok(CorrelationTable::from_probs(
        d,
        n,
        Some(settings.to_vec()),
        amp.iter().map(|a| a.norm_sqr()).collect(),
    ))
}

/// Expectation of the product of `±1` outcomes; qubits only.
pub fn spatial_correlation(psi: &[C64], settings: &[MeasurementSetting]) -> Result<f64> {
    let d = common_dim(settings)?;
    if d != 2 {
        return Err(Error::NotQubits(d));
    }
    joint_distribution(psi, settings)?.correlation()
}

/// Correlations for many setting lists, evaluated with `exec`.
pub fn correlation_sweep(
    psi: &[C64],
    setting_lists: &[Vec<MeasurementSetting>],
    exec: Exec,
) -> Result<Vec<f64>> {
    exec.map(setting_lists, |s| spatial_correlation(psi, s))
        .into_iter()
        .collect()
}
