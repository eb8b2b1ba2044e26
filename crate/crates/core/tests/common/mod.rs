//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use isoshrink::model::{
    sample_joint_prior, sample_observations, ChainState, GibbsSampler, ModelConfig, PriorFamily,
    SeriesData,
};
use isoshrink::rng_dist::RngStream;

/// One test function compared by the joint-distribution check.
#[derive(Debug, Clone)]
pub struct Moment {
    pub name: String,
    pub prior_mean: f64,
    pub chain_mean: f64,
    pub z: f64,
}

type TestFunction = (&'static str, fn(&ChainState) -> f64);

fn test_functions(prior: PriorFamily) -> Vec<TestFunction> {
    let mut fs: Vec<TestFunction> = vec![
        ("log eta2", |s| s.eta[1].ln()),
        ("log^2 eta2", |s| s.eta[1].ln().powi(2)),
        ("log tau1", |s| s.tau[0].ln()),
        ("log lambda", |s| s.lambda.ln()),
        ("log^2 lambda", |s| s.lambda.ln().powi(2)),
        ("sigma2", |s| s.sigma2),
        ("log sigma2", |s| s.sigma2.ln()),
        ("log^2 sigma2", |s| s.sigma2.ln().powi(2)),
    ];
    if prior != PriorFamily::HalfNormal {
        fs.push(("log tau2", |s| s.tau[1].ln()));
        fs.push(("log^2 tau2", |s| s.tau[1].ln().powi(2)));
    }
    fs
}

/// Compare moments of iid joint-prior draws with states of Gibbs chains that
/// alternate `y ~ p(y | params)` and one sweep.
///
/// Each of the `chains` chains starts from its own exact joint draw, so
/// every state it visits is again an exact joint draw when every full
/// conditional is right, and a wrong conditional pulls the states toward a
/// different distribution. Chains are independent, so the standard error of
/// the chain average comes from the spread of per-chain means and needs no
/// mixing assumption. The total budget is `chains * chain_len` sweeps,
/// matched by as many prior draws.
pub fn joint_distribution_check(
    locations: Vec<f64>,
    config: &ModelConfig,
    chains: usize,
    chain_len: usize,
    seed: u64,
) -> Vec<Moment> {
    let n = locations.len();
    let series = SeriesData::new(locations, vec![0.0; n]).unwrap();
    let fs = test_functions(config.prior);
    let total = chains * chain_len;

    let mut rng = RngStream::new(seed, 0);
    let mut prior_vals = vec![Vec::with_capacity(total); fs.len()];
    for _ in 0..total {
        let s = sample_joint_prior(&series, config, &mut rng).unwrap();
        for (k, (_, f)) in fs.iter().enumerate() {
            prior_vals[k].push(f(&s));
        }
    }

    let mut gibbs = GibbsSampler::new(&series, config).unwrap();
    let mut chain_means = vec![Vec::with_capacity(chains); fs.len()];
    for c in 0..chains {
        let mut rng = RngStream::new(seed, 1 + c as u64);
        let mut state = sample_joint_prior(&series, config, &mut rng).unwrap();
        let mut sums = vec![0.0; fs.len()];
        for it in 0..chain_len {
            let y = sample_observations(&state, &mut rng);
            gibbs.set_values(&y);
            gibbs
                .sweep(&mut state, &mut rng)
                .unwrap_or_else(|e| panic!("chain {c} sweep {it}: {e}"));
            for (k, (_, f)) in fs.iter().enumerate() {
                sums[k] += f(&state);
            }
        }
        for k in 0..fs.len() {
            chain_means[k].push(sums[k] / chain_len as f64);
        }
    }

    let mean_var = |xs: &[f64]| {
        let m = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / m;
        (
            mean,
            xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0),
        )
    };
    fs.iter()
        .enumerate()
        .map(|(k, (name, _))| {
            let (pm, pv) = mean_var(&prior_vals[k]);
            let (cm, cv) = mean_var(&chain_means[k]);
            let se = (pv / total as f64 + cv / chains as f64).sqrt();
            Moment {
                name: name.to_string(),
                prior_mean: pm,
                chain_mean: cm,
                z: (pm - cm) / se,
            }
        })
        .collect()
}
