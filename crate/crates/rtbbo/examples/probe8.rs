use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rtbbo::adaptation::IncentiveConfig;
use rtbbo::ising::SbConfig;
use rtbbo::optimizer::{Codec, EncodingPenaltyConfig, Optimizer, OptimizerConfig};
use rtbbo::surrogate::TrainConfig;

fn main() {
    let factor: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.1);
    let cycles: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(4000);
    // Static stub: independent biased spins (fields only), no drift.
    let kind: String = std::env::args().nth(3).unwrap_or_else(|| "fields".into());
    let mut pooled_in = 0u64;
    let mut pooled_n = 0u64;
    for seed in 0..5u64 {
        let reward_model = {
            use rand::Rng;
            use rtbbo::ising::IsingModel;
            let mut mrng = ChaCha8Rng::seed_from_u64(777);
            let mut m = IsingModel::zeros(50);
            if kind == "fields" {
                for i in 0..50 {
                    let g: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut mrng);
                    m.set_field(i, g);
                }
            } else {
                for i in 0..50 {
                    for j in (i + 1)..50 {
                        m.set_coupling(i, j, mrng.random_range(-1.0..1.0)).unwrap();
                    }
                }
            }
            m
        };
        let cfg = OptimizerConfig {
            n_rewards: 1,
            reward_weights: None,
            window_capacity: Some(50),
            incentive_enabled: true,
            train: TrainConfig {
                lr_v: std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(0.01),
                lr_w: std::env::args().nth(5).and_then(|s| s.parse().ok()).unwrap_or(0.01),
                ..TrainConfig::default()
            },
            sb: SbConfig::default(),
            incentive: IncentiveConfig { adjust_factor: factor, ..IncentiveConfig::default() },
            penalty: EncodingPenaltyConfig::default(),
        };
        let mut opt = Optimizer::new(Codec::Spins { n: 50 }, cfg, seed).unwrap();
        let mut in_band = 0u64;
        let mut n = 0u64;
        let (mut below, mut above, mut late_n) = (0u64, 0u64, 0u64);
        let mut trace = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed); let _ = &mut rng;
        for t in 0..cycles {
            let r: f64 = -reward_model.energy(opt.current_spins()).unwrap();
            let stats = opt.observe(&[r]).unwrap();
            if t >= 2000 {
                n += 1;
                if (100.0..=200.0).contains(&stats.mean_counter) { in_band += 1; }
            }
            if t >= cycles / 2 {
                if stats.mean_counter < 100.0 { below += 1; }
                if stats.mean_counter > 200.0 { above += 1; }
                late_n += 1;
            }
            if t % 100 == 0 { trace.push(format!("t{t}:{:.0}/{:.1e}", stats.mean_counter, stats.c_exploration)); }
        }
        pooled_in += in_band; pooled_n += n;
        println!(
            "seed {seed}: in-band {:.1}%  late-half: below {:.1}% above {:.1}%",
            100.0 * in_band as f64 / n as f64,
            100.0 * below as f64 / late_n as f64,
            100.0 * above as f64 / late_n as f64
        );
        let _ = trace;
    }
    println!("pooled in-band: {:.2}%", 100.0 * pooled_in as f64 / pooled_n as f64);
}
