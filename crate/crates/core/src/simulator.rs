//! Replicates of the connected triple `(i,j), (k,j), (i,ℓ)`.
//!
//! Streams: every latent component has its own ChaCha20 stream, seeded from
//! the run seed and selected by [`LatentComponent::stream`]. Draw `m` of a
//! component is the `m`-th value of its stream, so replicates do not depend on
//! scheduling and adding a component never shifts another's draws.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ComponentDist, DistKind, ModelConfig, SampleSet, TripleSample};

/// The seven jointly independent latent draws of one replicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatentComponent {
    AlphaI,
    AlphaK,
    EtaJ,
    EtaL,
    EpsIj,
    EpsKj,
    EpsIl,
}

impl LatentComponent {
    pub const ALL: [LatentComponent; 7] = [
        LatentComponent::AlphaI,
        LatentComponent::AlphaK,
        LatentComponent::EtaJ,
        LatentComponent::EtaL,
        LatentComponent::EpsIj,
        LatentComponent::EpsKj,
        LatentComponent::EpsIl,
    ];

    pub fn stream(self) -> u64 {
        self as u64
    }

    fn law(self, config: &ModelConfig) -> ComponentDist {
        match self {
            LatentComponent::AlphaI | LatentComponent::AlphaK => config.alpha,
            LatentComponent::EtaJ | LatentComponent::EtaL => config.eta,
            _ => config.epsilon,
        }
    }
}

/// Generator for one latent component's stream.
pub fn component_rng(seed: u64, component: LatentComponent) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(component.stream());
    rng
}

/// One draw from a zero-mean component law.
pub fn draw<R: Rng + ?Sized>(dist: &ComponentDist, rng: &mut R) -> f64 {
    let a = dist.scale();
    if dist.is_degenerate() {
        return 0.0;
    }
    match dist.kind() {
        DistKind::Normal => Normal::new(0.0, a).expect("positive sd").sample(rng),
        DistKind::Laplace => {
            // Inverse CDF on u in (-1/2, 1/2).
            let u: f64 = rng.gen::<f64>() - 0.5;
            -a * u.signum() * (1.0 - 2.0 * u.abs()).ln()
        }
        DistKind::UniformSymmetric => rng.gen_range(-a..a),
        DistKind::TwoPointSymmetric => {
            if rng.gen::<bool>() {
                a
            } else {
                -a
            }
        }
        DistKind::ShiftedExponential => Exp::new(1.0 / a).expect("positive rate").sample(rng) - a,
    }
}

fn draw_stream(dist: &ComponentDist, n: usize, seed: u64, component: LatentComponent) -> Vec<f64> {
    let mut rng = component_rng(seed, component);
    (0..n).map(|_| draw(dist, &mut rng)).collect()
}

/// Simulates `n` replicates of `(y_ij, y_kj, y_il)` under
/// `y = c + α + η + ε`, sharing α_i between `y_ij, y_il` and η_j between
/// `y_ij, y_kj`.
pub fn sample_components(config: &ModelConfig, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::param("n", "number of replicates must be at least 1"));
    }
    let draws: Vec<Vec<f64>> = LatentComponent::ALL
        .par_iter()
        .map(|&comp| draw_stream(&comp.law(config), n, seed, comp))
        .collect();
    let [alpha_i, alpha_k, eta_j, eta_l, eps_ij, eps_kj, eps_il] = &draws[..] else {
        unreachable!("seven latent streams")
    };
    let c = config.c;
    let triples = (0..n)
        .map(|m| TripleSample {
            y_ij: c + alpha_i[m] + eta_j[m] + eps_ij[m],
            y_kj: c + alpha_k[m] + eta_j[m] + eps_kj[m],
            y_il: c + alpha_i[m] + eta_l[m] + eps_il[m],
        })
        .collect();
    SampleSet::new(triples, seed, Some(*config))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Column;

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn cov(x: &[f64], y: &[f64]) -> f64 {
        let (mx, my) = (mean(x), mean(y));
        x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() - 1) as f64
    }

    /// Standard error of the sample covariance of independent-pair products.
    fn cov_se(x: &[f64], y: &[f64]) -> f64 {
        let (mx, my) = (mean(x), mean(y));
        let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
        let mp = mean(&prods);
        let var = prods.iter().map(|p| (p - mp).powi(2)).sum::<f64>() / (prods.len() - 1) as f64;
        (var / prods.len() as f64).sqrt()
    }

    #[test]
    fn rejects_zero_replicates() {
        let err = sample_components(&ModelConfig::standard_normal(), 0, 1).unwrap_err();
        assert!(err.to_string().contains("`n`"));
    }

    #[test]
    fn degenerate_components_give_the_intercept() {
        let d = ComponentDist::degenerate(DistKind::Normal);
        let cfg = ModelConfig::new(5.0, d, d, d);
        let s = sample_components(&cfg, 50, 3).unwrap();
        assert!(s.triples().iter().all(|t| *t
            == TripleSample {
                y_ij: 5.0,
                y_kj: 5.0,
                y_il: 5.0
            }));
    }

    #[test]
    fn two_point_support() {
        let d = ComponentDist::two_point_symmetric(1.0).unwrap();
        let mut rng = component_rng(9, LatentComponent::AlphaI);
        assert!((0..10_000).all(|_| {
            let x = draw(&d, &mut rng);
            x == 1.0 || x == -1.0
        }));
    }

    #[test]
    fn uniform_mean_clt_bound() {
        let d = ComponentDist::uniform_symmetric(1.0).unwrap();
        let xs = draw_stream(&d, 1_000_000, 11, LatentComponent::EtaJ);
        assert!(mean(&xs).abs() <= 0.005);
        assert!(xs.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn shifted_exponential_support_and_mean() {
        let d = ComponentDist::shifted_exponential(2.0).unwrap();
        let xs = draw_stream(&d, 1_000_000, 12, LatentComponent::EpsIl);
        assert!(mean(&xs).abs() <= 0.01, "{}", mean(&xs));
        assert!(xs.iter().cloned().fold(f64::INFINITY, f64::min) > -2.0);
    }

    #[test]
    fn laplace_variance() {
        let d = ComponentDist::laplace(1.5).unwrap();
        let xs = draw_stream(&d, 400_000, 13, LatentComponent::AlphaK);
        let v = cov(&xs, &xs);
        assert!((v - d.variance()).abs() / d.variance() < 0.02, "{v}");
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = ModelConfig::standard_normal();
        let a = sample_components(&cfg, 1000, 77).unwrap();
        let b = sample_components(&cfg, 1000, 77).unwrap();
        let c = sample_components(&cfg, 1000, 78).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // A longer run extends the shorter one: streams are per component.
        let long = sample_components(&cfg, 2000, 77).unwrap();
        assert_eq!(&long.triples()[..1000], a.triples());
    }

    #[test]
    fn variance_and_shared_effect_covariance() {
        let cfg = ModelConfig::standard_normal();
        let s = sample_components(&cfg, 100_000, 2024).unwrap();
        let yij = s.column(Column::Yij);
        let ykj = s.column(Column::Ykj);
        let var = cov(&yij, &yij);
        assert!((var - 3.0).abs() / 3.0 < 0.05, "{var}");
        let c = cov(&yij, &ykj);
        assert!((c - 1.0).abs() <= 5.0 * cov_se(&yij, &ykj), "{c}");
    }

    #[test]
    fn cross_covariance_structure() {
        let alpha = ComponentDist::laplace(1.0).unwrap();
        let eta = ComponentDist::uniform_symmetric(1.5).unwrap();
        let eps = ComponentDist::normal(0.7).unwrap();
        let cfg = ModelConfig::new(-2.0, alpha, eta, eps);
        let s = sample_components(&cfg, 200_000, 5).unwrap();
        let (yij, ykj, yil) = (
            s.column(Column::Yij),
            s.column(Column::Ykj),
            s.column(Column::Yil),
        );
        let checks = [
            (cov(&yij, &yil), alpha.variance(), cov_se(&yij, &yil)),
            (cov(&yij, &ykj), eta.variance(), cov_se(&yij, &ykj)),
            (cov(&ykj, &yil), 0.0, cov_se(&ykj, &yil)),
        ];
        for (got, want, se) in checks {
            assert!((got - want).abs() <= 5.0 * se, "{got} vs {want} (se {se})");
        }
        let sd = cov(&yij, &yij).sqrt();
        assert!((mean(&yij) - cfg.c).abs() <= 5.0 * sd / (yij.len() as f64).sqrt());
    }
}
