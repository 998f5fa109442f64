use super::{InstanceError, StopInstance};

/// SplitMix64 (Steele, Lea and Flood, 2014). Fixed here so that generated
/// instances are reproducible in any implementation.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish index in `0..bound` by reduction modulo `bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }
}

/// Make `⌊fraction · |P|⌋` profitable vertices mandatory.
///
/// The profitable vertices are listed in increasing index order and the first
/// `k` slots of a Fisher–Yates shuffle driven by [`SplitMix64`] are taken:
/// slot `i` swaps with `i + next_u64() mod (|P| − i)`.
pub fn generate_stop(base: &StopInstance, fraction: f64, seed: u64) -> Result<StopInstance, InstanceError> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(InstanceError::BadFraction(fraction));
    }
    if !base.mandatory().is_empty() {
        return Err(InstanceError::AlreadyMandatory);
    }
    let mut pool = base.profitable();
    // The guard keeps products such as 0.29 · 100 from flooring to 28.
    let k = (fraction * pool.len() as f64 + 1e-9).floor() as usize;
    let mut rng = SplitMix64::new(seed);
    for i in 0..k {
        let j = i + rng.below(pool.len() - i);
        pool.swap(i, j);
    }
    let mut chosen = pool[..k].to_vec();
    chosen.sort_unstable();
    base.clone().with_mandatory(&chosen)
}

/// Random complete Euclidean instance on `n` vertices in a 10 × 10 square.
/// Scores are integers in 1..=9; the time limit is the direct origin-destination
/// distance plus a random slack in [4, 20). Roughly `mandatory_per_mille / 1000`
/// of the customers are mandatory, so some instances are infeasible.
pub fn random_euclidean(seed: u64, n: usize, fleet: usize, mandatory_per_mille: u64) -> StopInstance {
    let mut rng = SplitMix64::new(seed);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let points: Vec<(f64, f64)> = (0..n).map(|_| (10.0 * unit(), 10.0 * unit())).collect();
    let scores: Vec<f64> = (0..n).map(|v| if v == 0 || v + 1 == n { 0.0 } else { (1.0 + 9.0 * unit()).floor() }).collect();
    let direct = (points[0].0 - points[n - 1].0).hypot(points[0].1 - points[n - 1].1);
    let tmax = direct + 4.0 + 16.0 * unit();
    let mandatory: Vec<usize> = (1..n - 1).filter(|_| (unit() * 1000.0) < mandatory_per_mille as f64).collect();
    StopInstance::euclidean(&points, &scores, fleet, tmax)
        .and_then(|inst| inst.with_mandatory(&mandatory))
        .expect("needs n ≥ 2 and fleet ≥ 1")
        .with_name(format!("rand-s{seed}-n{n}-m{fleet}"))
}
