//! Bundled example models and a seeded generator of small random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mdp::{default_action_name, Dist, Mdp};
use crate::model::{parse_model, Model};
use crate::rational::ratio;
use crate::support::SupportSet;

const FIGURE1: &str = include_str!("../../../models/figure1.json");
const FIGURE2: &str = include_str!("../../../models/figure2.json");
const FIGURE3: &str = include_str!("../../../models/figure3.json");
const FIGURE4: &str = include_str!("../../../models/figure4.json");

fn bundled(text: &str) -> Model {
    parse_model(text).expect("bundled model is valid")
}

/// Two states; `q0` leaks half its mass to the absorbing `q1`.
pub fn figure1() -> Model {
    bundled(FIGURE1)
}

/// Limit-sure but not almost-sure eventually synchronizing in `{q2}`.
pub fn figure2() -> Model {
    bundled(FIGURE2)
}

/// Almost-sure weakly synchronizing in `{q2}`.
pub fn figure3() -> Model {
    bundled(FIGURE3)
}

/// Two out-of-phase 2-cycles.
pub fn figure4() -> Model {
    bundled(FIGURE4)
}

pub fn figures() -> Vec<(&'static str, Model)> {
    vec![
        ("figure1", figure1()),
        ("figure2", figure2()),
        ("figure3", figure3()),
        ("figure4", figure4()),
    ]
}

/// A model together with the target set under study.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub model: Model,
    pub target: SupportSet,
}

/// The figure models with their first named target.
pub fn figure_instances() -> Vec<Instance> {
    figures()
        .into_iter()
        .map(|(name, model)| {
            let target = model.targets[0].1.clone();
            Instance {
                name: name.to_string(),
                model,
                target,
            }
        })
        .collect()
}

/// Shape of generated instances.
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_actions: usize,
    /// Largest denominator of any probability.
    pub max_denominator: u32,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_states: 5,
            max_actions: 2,
            max_denominator: 4,
        }
    }
}

/// Splits `1` into `parts` positive multiples of `1/den`, spread over
/// distinct states picked from `0..n`.
fn random_dist(rng: &mut ChaCha8Rng, n: usize, max_den: u32) -> Dist {
    let den = rng.gen_range(1..=max_den);
    let parts = rng.gen_range(1..=(den as usize).min(n));
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    states.truncate(parts);
    let mut units = vec![1u32; parts];
    for _ in parts as u32..den {
        units[rng.gen_range(0..parts)] += 1;
    }
    let pairs = states
        .into_iter()
        .zip(units)
        .map(|(q, u)| (q, ratio(u as i64, den as i64)));
    Dist::from_pairs(n, pairs).expect("units sum to the denominator")
}

pub fn random_instance(seed: u64, shape: RandomShape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=shape.max_states);
    let k = rng.gen_range(1..=shape.max_actions);
    let delta = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| random_dist(&mut rng, n, shape.max_denominator))
                .collect()
        })
        .collect();
    let states = (0..n).map(|q| format!("q{q}")).collect();
    let actions = (0..k).map(default_action_name).collect();
    let mdp = Mdp::new(states, actions, delta).expect("generated model is valid");
    let initial = random_dist(&mut rng, n, shape.max_denominator);
    let target = SupportSet::from_states(n, (0..n).filter(|_| rng.gen_bool(0.5)));
    let model = Model {
        mdp,
        initial,
        targets: vec![("goal".to_string(), target.clone())],
    };
    Instance {
        name: format!("random-{seed}"),
        model,
        target,
    }
}

/// `count` instances from consecutive seeds starting at `seed`.
pub fn random_corpus(count: usize, seed: u64, shape: RandomShape) -> Vec<Instance> {
    (0..count as u64)
        .map(|i| random_instance(seed.wrapping_add(i), shape))
        .collect()
}
