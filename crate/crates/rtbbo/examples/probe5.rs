use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rtbbo::adaptation::{assemble_acquisition, integrate_multi, SlidingWindow};
use rtbbo::envs::{SyntheticConfig, SyntheticDynamicEnv};
use rtbbo::ising::{sb_solve, SbConfig, SpinVector};
use rtbbo::surrogate::{train_cycle, Surrogate, TrainConfig};

fn main() {
    let trial: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let scale: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let cycles: u64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let env = SyntheticDynamicEnv::generate(SyntheticConfig::default(), 777).unwrap();
    let n = env.n_spins();
    let mut window = SlidingWindow::new(50, 1).unwrap();
    let mut sur = Surrogate::new(n, 6).unwrap();
    let train = TrainConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(trial);
    let mut current = SpinVector::random(n, &mut rng);
    let wb = env.whitebox_reference(0, &SbConfig { restarts: 10, ..SbConfig::default() });
    let mut distinct = std::collections::HashSet::new();
    for t in 0..cycles {
        let r: f64 = env.step(&current, t).unwrap().iter().sum();
        window.push(current.clone(), vec![r * scale]).unwrap();
        let mut trng = ChaCha8Rng::seed_from_u64(1_000_000 + trial * 10_000 + t);
        train_cycle(&mut sur, &window, 0, &train, t == 0, &mut trng).unwrap();
        let integrated = integrate_multi(std::slice::from_ref(&sur.params), &[1.0]).unwrap();
        let acq = assemble_acquisition(&integrated, &vec![0.0; n], None).unwrap();
        let raw = sb_solve(&acq, &SbConfig { seed: 2_000_000 + trial * 10_000 + t, ..SbConfig::default() });
        let flips = raw.iter().zip(current.iter()).filter(|(a, b)| a != b).count();
        distinct.insert(raw.clone());
        if t % 100 == 0 {
            let sigma = integrated.coupling_rms();
            let wmax = sur.params.w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            println!("t={t:5} rel={:.3} sigma_J={sigma:.4} max|w|={wmax:.3} w0={:.2} flips={flips} distinct={}",
                r / wb, sur.params.w0, distinct.len());
        }
        current = raw;
    }
}
