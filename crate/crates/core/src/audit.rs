//! Empirical invariance audits.
//!
//! Each trial draws a local transformation from the chosen group, applies it, and
//! recomputes the audited quantities. Trial `t` uses [`trial_rng`]`(seed, t)`, so
//! serial and parallel runs produce identical reports.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{apply_local_state, gell_mann_bases, represent_with, BlochBasis, GroupTag, State};
use crate::error::{invalid, Result};
use crate::hyperdet::HdetConfig;
use crate::invariants::{fingerprint_with_bases, pure_fingerprint, DEVIATION_FLOOR};
use crate::sampling::{
    random_bloch_rotation, random_chain, random_density, rng_from_seed, trial_rng, DEFAULT_COND_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Group {
    /// Local unitaries `U(d_1) ⊗ ⋯ ⊗ U(d_n)`.
    Lu,
    /// `SL(d_1) ⊗ ⋯ ⊗ SL(d_n)`, condition-capped.
    Slocc,
    /// A shared `1 ⊕ SO(d² − 1)` rotation of the Bloch basis per local dimension.
    BasisRotation,
    /// The identity chain; every deviation is exactly zero.
    Identity,
}

/// What to recompute per trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Every entry of the state's invariant fingerprint.
    Fingerprint,
    /// One named fingerprint entry.
    Entry(String),
    /// A single Bloch coefficient; a deliberately non-invariant probe.
    BlochEntry(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    pub group: Group,
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
    pub cond_cap: f64,
    pub hdet: HdetConfig,
}

impl AuditConfig {
    pub fn new(group: Group, trials: usize, tol: f64, seed: u64) -> Self {
        Self { group, trials, tol, seed, cond_cap: DEFAULT_COND_CAP, hdet: HdetConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AuditVerdict {
    Invariant,
    NotInvariant,
    Inconclusive,
}

impl AuditVerdict {
    pub fn from_deviations(max: f64, median: f64, tol: f64) -> Self {
        if max < tol {
            AuditVerdict::Invariant
        } else if median > 100.0 * tol {
            AuditVerdict::NotInvariant
        } else {
            AuditVerdict::Inconclusive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub invariant: String,
    pub group: Group,
    pub trials: usize,
    pub max_relative_deviation: f64,
    pub median_relative_deviation: f64,
    pub verdict: AuditVerdict,
    pub tol: f64,
    pub seed: u64,
    /// Condition-number cap on SLOCC draws; absent for other groups.
    pub cond_cap: Option<f64>,
    /// SLOCC draws rejected by the cap, summed over trials.
    pub resamples: usize,
}

/// `|v′ − v| / max(|v|, 1e-12)`.
pub fn audit_deviation(before: Complex64, after: Complex64) -> f64 {
    (after - before).norm() / before.norm().max(DEVIATION_FLOOR)
}

fn measure(
    state: &State,
    bases: &[BlochBasis],
    quantities: &[Quantity],
    hdet: &HdetConfig,
) -> Result<Vec<(String, Complex64)>> {
    let fp = match state {
        State::Density(rho) => fingerprint_with_bases(rho, bases, hdet),
        State::Pure(phi) => pure_fingerprint(phi),
    };
    let mut out = Vec::new();
    for q in quantities {
        match q {
            Quantity::Fingerprint => {
                out.extend(fp.as_ref().map_err(Clone::clone)?.entries.iter().map(|e| (e.name.clone(), e.value)))
            }
            Quantity::Entry(name) => {
                let fp = fp.as_ref().map_err(Clone::clone)?;
                match fp.get(name) {
                    Some(v) => out.push((name.clone(), v)),
                    None => return invalid(format!("fingerprint has no entry {name}")),
                }
            }
            Quantity::BlochEntry(idx) => {
                let rho = match state {
                    State::Density(rho) => rho.clone(),
                    State::Pure(phi) => phi.to_density(),
                };
                let a = represent_with(&rho, bases)?;
                let label = idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
                out.push((format!("bloch.a[{label}]"), a.get(idx)?));
            }
        }
    }
    Ok(out)
}

fn rotated_bases<R: rand::Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Vec<BlochBasis>> {
    let mut distinct: Vec<usize> = dims.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut per_dim = Vec::with_capacity(distinct.len());
    for &d in &distinct {
        let r = random_bloch_rotation(d, rng);
        per_dim.push((d, BlochBasis::gell_mann(d)?.rotate(&r)?));
    }
    Ok(dims.iter().map(|d| per_dim.iter().find(|(k, _)| k == d).unwrap().1.clone()).collect())
}

struct Trial {
    deviations: Vec<f64>,
    resamples: usize,
}

fn run_trial(
    state: &State,
    baseline: &[(String, Complex64)],
    quantities: &[Quantity],
    cfg: &AuditConfig,
    t: usize,
) -> Result<Trial> {
    let mut rng = trial_rng(cfg.seed, t as u64);
    let dims = state.dims().to_vec();
    let (moved, bases, resamples) = match cfg.group {
        Group::Identity => (state.clone(), gell_mann_bases(&dims)?, 0),
        Group::Lu | Group::Slocc => {
            let tag = if cfg.group == Group::Lu { GroupTag::Unitary } else { GroupTag::SpecialLinear };
            let (chain, resamples) = random_chain(&dims, tag, &mut rng, cfg.cond_cap)?;
            (apply_local_state(state, &chain)?, gell_mann_bases(&dims)?, resamples)
        }
        Group::BasisRotation => {
            if matches!(state, State::Pure(_)) {
                return invalid("basis rotations act on Bloch representations; pure-state invariants do not use one");
            }
            (state.clone(), rotated_bases(&dims, &mut rng)?, 0)
        }
    };
    let after = measure(&moved, &bases, quantities, &cfg.hdet)?;
    let deviations = baseline.iter().zip(&after).map(|((_, v), (_, w))| audit_deviation(*v, *w)).collect();
    Ok(Trial { deviations, resamples })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    match n {
        0 => 0.0,
        _ if n % 2 == 1 => xs[n / 2],
        _ => 0.5 * (xs[n / 2 - 1] + xs[n / 2]),
    }
}

/// One report per audited value.
pub fn audit(state: &State, quantities: &[Quantity], cfg: &AuditConfig) -> Result<Vec<AuditReport>> {
    if cfg.trials == 0 {
        return invalid("at least one trial is required");
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return invalid(format!("tolerance must be positive, got {}", cfg.tol));
    }
    let baseline = measure(state, &gell_mann_bases(state.dims())?, quantities, &cfg.hdet)?;
    let trials: Vec<Result<Trial>> = if cfg.hdet.parallel {
        (0..cfg.trials).into_par_iter().map(|t| run_trial(state, &baseline, quantities, cfg, t)).collect()
    } else {
        (0..cfg.trials).map(|t| run_trial(state, &baseline, quantities, cfg, t)).collect()
    };
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;
    let resamples = trials.iter().map(|t| t.resamples).sum();
    let cond_cap = (cfg.group == Group::Slocc).then_some(cfg.cond_cap);
    Ok(baseline
        .iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let devs: Vec<f64> = trials.iter().map(|t| t.deviations[k]).collect();
            let max = devs.iter().cloned().fold(0.0, f64::max);
            let med = median(devs);
            AuditReport {
                invariant: name.clone(),
                group: cfg.group,
                trials: cfg.trials,
                max_relative_deviation: max,
                median_relative_deviation: med,
                verdict: AuditVerdict::from_deviations(max, med, cfg.tol),
                tol: cfg.tol,
                seed: cfg.seed,
                cond_cap,
                resamples,
            }
        })
        .collect())
}

/// One audited claim: the state it was probed on and the resulting reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimStudy {
    pub claim: String,
    pub state: String,
    pub reports: Vec<AuditReport>,
}

/// The standing experiment on the coefficients that are claimed, but not implied
/// by determinant multiplicativity, to be invariant. Its output documents what
/// happens; it is not a pass/fail gate.
pub fn claims_experiment(seed: u64, trials: usize, tol: f64, hdet: &HdetConfig) -> Result<Vec<ClaimStudy>> {
    let mut rng = rng_from_seed(seed);
    let two_qubit = State::Density(random_density(&[2, 2], 4, &mut rng)?);
    let four_qubit = State::Density(random_density(&[2, 2, 2, 2], 2, &mut rng)?);
    let cases = [
        ("bipartite characteristic coefficients under LU", "random 2-qubit density, full rank", &two_qubit, Group::Lu),
        (
            "bipartite characteristic coefficients under SLOCC",
            "random 2-qubit density, full rank",
            &two_qubit,
            Group::Slocc,
        ),
        ("hyper-characteristic coefficients under LU", "random 4-qubit density, rank 2", &four_qubit, Group::Lu),
        ("hyper-characteristic coefficients under SLOCC", "random 4-qubit density, rank 2", &four_qubit, Group::Slocc),
    ];
    let mut out = Vec::with_capacity(cases.len());
    for (claim, label, state, group) in cases {
        let cfg = AuditConfig { hdet: *hdet, ..AuditConfig::new(group, trials, tol, seed) };
        out.push(ClaimStudy {
            claim: claim.to_string(),
            state: label.to_string(),
            reports: audit(state, &[Quantity::Fingerprint], &cfg)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::PureState;
    use crate::c64;
    use crate::sampling::random_pure;

    fn ghz() -> State {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![c64(0.0, 0.0); 8];
        v[0] = c64(s, 0.0);
        v[7] = c64(s, 0.0);
        State::Pure(PureState::new(vec![2, 2, 2], v).unwrap())
    }

    #[test]
    fn verdict_rule() {
        assert_eq!(AuditVerdict::from_deviations(1e-12, 1e-13, 1e-9), AuditVerdict::Invariant);
        assert_eq!(AuditVerdict::from_deviations(1.0, 1e-3, 1e-9), AuditVerdict::NotInvariant);
        assert_eq!(AuditVerdict::from_deviations(1e-8, 1e-8, 1e-9), AuditVerdict::Inconclusive);
    }

    #[test]
    fn identity_has_zero_deviation() {
        let rho = State::Density(random_density(&[2, 2], 3, &mut rng_from_seed(1)).unwrap());
        let reports = audit(&rho, &[Quantity::Fingerprint], &AuditConfig::new(Group::Identity, 1, 1e-9, 0)).unwrap();
        assert!(reports.iter().all(|r| r.max_relative_deviation == 0.0 && r.verdict == AuditVerdict::Invariant));
    }

    #[test]
    fn ghz_det222_under_slocc() {
        let cfg = AuditConfig::new(Group::Slocc, 50, 1e-9, 7);
        let reports = audit(&ghz(), &[Quantity::Entry("pure.det222@v1".into())], &cfg).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].verdict, AuditVerdict::Invariant);
        assert_eq!(reports[0].cond_cap, Some(DEFAULT_COND_CAP));
    }

    #[test]
    fn bloch_probe_is_not_invariant() {
        let rho = State::Density(random_density(&[2, 2], 2, &mut rng_from_seed(2)).unwrap());
        let cfg = AuditConfig::new(Group::Lu, 20, 1e-9, 3);
        let reports = audit(&rho, &[Quantity::BlochEntry(vec![0, 1])], &cfg).unwrap();
        assert_eq!(reports[0].verdict, AuditVerdict::NotInvariant);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let phi = State::Pure(random_pure(&[3, 3], &mut rng_from_seed(4)).unwrap());
        let par = AuditConfig::new(Group::Slocc, 8, 1e-9, 11);
        let ser = AuditConfig { hdet: HdetConfig::default().serial(), ..par.clone() };
        assert_eq!(
            audit(&phi, &[Quantity::Fingerprint], &par).unwrap(),
            audit(&phi, &[Quantity::Fingerprint], &ser).unwrap()
        );
    }

    #[test]
    fn basis_rotation_keeps_fingerprint() {
        let rho = State::Density(random_density(&[3, 3], 5, &mut rng_from_seed(5)).unwrap());
        let cfg = AuditConfig::new(Group::BasisRotation, 5, 1e-8, 6);
        let reports = audit(&rho, &[Quantity::Fingerprint], &cfg).unwrap();
        assert!(reports.iter().all(|r| r.verdict == AuditVerdict::Invariant), "{reports:?}");
        assert!(audit(&ghz(), &[Quantity::Fingerprint], &cfg).is_err());
    }

    #[test]
    fn bad_config() {
        assert!(audit(&ghz(), &[Quantity::Fingerprint], &AuditConfig::new(Group::Lu, 0, 1e-9, 0)).is_err());
        assert!(audit(&ghz(), &[Quantity::Entry("nope".into())], &AuditConfig::new(Group::Lu, 1, 1e-9, 0)).is_err());
    }
}
