//! Single-site Metropolis sampling of the interacting frequency measure.
//!
//! The |ωᵢ − ωⱼ| term is not differentiable, so the sampler is a plain
//! random walk: Gaussian proposals per site, width tuned towards 40 %
//! acceptance during burn-in and then frozen.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::gibbs::GibbsEnergy;
use crate::error::{Error, Result};
use crate::model::rng::{stream_rng, streams};
use crate::model::{DisorderRealization, FrequencyField, McmcSection, Method, ModelConfig};
use crate::stats::integrated_autocorr_time;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub burn_in_sweeps: usize,
    pub sweeps: usize,
    pub thin: usize,
    /// Burn-in sweeps between proposal-width adjustments.
    pub tune_interval: usize,
    /// Keep every proposal (site, ΔE, uniform, accepted) of the production phase.
    pub record_proposals: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            burn_in_sweeps: 2_000,
            sweeps: 20_000,
            thin: 10,
            tune_interval: 50,
            record_proposals: false,
        }
    }
}

impl From<&McmcSection> for ChainOptions {
    fn from(s: &McmcSection) -> Self {
        ChainOptions {
            burn_in_sweeps: s.burn_in_sweeps,
            sweeps: s.sweeps,
            thin: s.thin,
            ..ChainOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProposalRecord {
    pub site: usize,
    pub delta_e: f64,
    pub uniform: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct McmcRun {
    pub fields: Vec<FrequencyField>,
    pub acceptance_rate: f64,
    pub proposal_width: f64,
    /// Integrated autocorrelation time of the mean frequency, in sweeps.
    pub tau_mean_frequency: f64,
    pub proposals: Vec<ProposalRecord>,
}

pub fn sample_mcmc(
    realization: &DisorderRealization,
    config: &ModelConfig,
    options: &ChainOptions,
    seed: u64,
) -> Result<McmcRun> {
    if options.thin == 0 || options.sweeps == 0 {
        return Err(Error::InvalidInput(
            "sweeps and thin must be positive".into(),
        ));
    }
    let energy = GibbsEnergy::new(realization, config)?;
    let n = realization.len();
    let mut rng = stream_rng(seed, streams::MCMC);
    let mut omega = realization.splittings.clone();
    let mut width = (config.temperature() * config.mean_splitting()).sqrt();

    let mut window_accepted = 0usize;
    let mut window_proposed = 0usize;
    for sweep in 0..options.burn_in_sweeps {
        window_accepted += metropolis_sweep(&energy, &mut omega, width, &mut rng, None, sweep)?;
        window_proposed += n;
        if options.tune_interval > 0 && (sweep + 1) % options.tune_interval == 0 {
            let rate = window_accepted as f64 / window_proposed as f64;
            if !(0.3..=0.5).contains(&rate) {
                width *= (rate / 0.4).clamp(0.5, 2.0);
            }
            window_accepted = 0;
            window_proposed = 0;
        }
    }

    let mut accepted = 0usize;
    let mut proposals = Vec::new();
    let mut mean_series = Vec::with_capacity(options.sweeps);
    let mut fields = Vec::with_capacity(options.sweeps / options.thin + 1);
    for sweep in 0..options.sweeps {
        let log = options.record_proposals.then_some(&mut proposals);
        accepted += metropolis_sweep(
            &energy,
            &mut omega,
            width,
            &mut rng,
            log,
            options.burn_in_sweeps + sweep,
        )?;
        mean_series.push(omega.iter().sum::<f64>() / n as f64);
        if (sweep + 1) % options.thin == 0 {
            fields.push(FrequencyField::new(
                omega.clone(),
                Method::Mcmc,
                realization,
            )?);
        }
    }
    let acceptance_rate = accepted as f64 / (options.sweeps * n) as f64;
    if !(0.05..=0.95).contains(&acceptance_rate) {
        return Err(Error::Tuning {
            acceptance: acceptance_rate,
        });
    }
    Ok(McmcRun {
        fields,
        acceptance_rate,
        proposal_width: width,
        tau_mean_frequency: integrated_autocorr_time(&mean_series),
        proposals,
    })
}

fn metropolis_sweep<R: Rng>(
    energy: &GibbsEnergy,
    omega: &mut [f64],
    width: f64,
    rng: &mut R,
    mut log: Option<&mut Vec<ProposalRecord>>,
    sweep: usize,
) -> Result<usize> {
    let mut accepted = 0;
    for site in 0..omega.len() {
        let z: f64 = StandardNormal.sample(rng);
        let proposed = omega[site] + width * z;
        let delta_e = energy.local_delta(omega, site, proposed);
        if !delta_e.is_finite() {
            return Err(Error::NonFiniteEnergy { sweep });
        }
        let uniform: f64 = rng.random();
        let ok = delta_e <= 0.0 || uniform < (-delta_e).exp();
        if ok {
            omega[site] = proposed;
            accepted += 1;
        }
        if let Some(log) = log.as_deref_mut() {
            log.push(ProposalRecord {
                site,
                delta_e,
                uniform,
                accepted: ok,
            });
        }
    }
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_config, RawParams};
    use crate::stats::{mean_stderr_correlated, variance};

    fn short() -> ChainOptions {
        ChainOptions {
            burn_in_sweeps: 500,
            sweeps: 4_000,
            thin: 1,
            tune_interval: 50,
            record_proposals: true,
        }
    }

    #[test]
    fn acceptance_follows_metropolis_rule() {
        let cfg = make_config(&RawParams::dimensionless(6, 0.05, 0.03, 0.1)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 3);
        let run = sample_mcmc(&real, &cfg, &short(), 5).unwrap();
        assert!(!run.proposals.is_empty());
        for p in &run.proposals {
            let prob = (-p.delta_e).exp().min(1.0);
            assert_eq!(p.accepted, p.uniform < prob || p.delta_e <= 0.0, "{p:?}");
        }
    }

    #[test]
    fn tuned_acceptance_lands_near_target() {
        let cfg = make_config(&RawParams::dimensionless(16, 0.05, 0.05, 0.1)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 3);
        let run = sample_mcmc(&real, &cfg, &short(), 5).unwrap();
        assert!(
            (0.25..=0.55).contains(&run.acceptance_rate),
            "{}",
            run.acceptance_rate
        );
        assert!(run.tau_mean_frequency >= 1.0);
    }

    #[test]
    fn same_seed_same_chain() {
        let cfg = make_config(&RawParams::dimensionless(4, 0.05, 0.03, 0.1)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 3);
        let mut o = short();
        o.record_proposals = false;
        let a = sample_mcmc(&real, &cfg, &o, 9).unwrap();
        let b = sample_mcmc(&real, &cfg, &o, 9).unwrap();
        assert_eq!(a.fields.last(), b.fields.last());
    }

    #[test]
    fn zero_coupling_sites_are_uncorrelated() {
        let cfg = make_config(&RawParams::dimensionless(3, 0.05, 0.0, 0.1)).unwrap();
        let real = crate::model::sample_disorder(&cfg, 2);
        let o = ChainOptions {
            burn_in_sweeps: 1_000,
            sweeps: 100_000,
            thin: 1,
            tune_interval: 50,
            record_proposals: false,
        };
        let run = sample_mcmc(&real, &cfg, &o, 1).unwrap();
        let x: Vec<f64> = run.fields.iter().map(|f| f.frequencies[0]).collect();
        let y: Vec<f64> = run.fields.iter().map(|f| f.frequencies[1]).collect();
        let mx = crate::stats::mean(&x);
        let my = crate::stats::mean(&y);
        let prod: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).collect();
        let c = mean_stderr_correlated(&prod);
        let corr = c.mean / (variance(&x) * variance(&y)).sqrt();
        let se = c.stderr / (variance(&x) * variance(&y)).sqrt();
        assert!(corr.abs() <= 3.0 * se, "corr {corr} ± {se}");
    }

    #[test]
    fn exchange_symmetry() {
        let cfg = make_config(&RawParams::dimensionless(2, 0.05, 0.05, 0.1)).unwrap();
        let a = DisorderRealization::from_splittings(&cfg, vec![0.95, 1.1], 0).unwrap();
        let b = DisorderRealization::from_splittings(&cfg, vec![1.1, 0.95], 0).unwrap();
        let o = ChainOptions {
            burn_in_sweeps: 1_000,
            sweeps: 100_000,
            thin: 1,
            tune_interval: 50,
            record_proposals: false,
        };
        let ra = sample_mcmc(&a, &cfg, &o, 10).unwrap();
        let rb = sample_mcmc(&b, &cfg, &o, 11).unwrap();
        let site = |r: &McmcRun, i: usize| -> Vec<f64> {
            r.fields.iter().map(|f| f.frequencies[i]).collect()
        };
        let a0 = mean_stderr_correlated(&site(&ra, 0));
        let b1 = mean_stderr_correlated(&site(&rb, 1));
        let a1 = mean_stderr_correlated(&site(&ra, 1));
        let b0 = mean_stderr_correlated(&site(&rb, 0));
        assert!((a0.mean - b1.mean).abs() <= 3.0 * a0.stderr.hypot(b1.stderr));
        assert!((a1.mean - b0.mean).abs() <= 3.0 * a1.stderr.hypot(b0.stderr));
    }
}
