//! Concrete environments: the turtle grid world and seeded random MDPs.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::dist::Dist;
use crate::error::Result;
use crate::fnspace::ValueFn;
use crate::mdp::{DiscountedProblem, Mdp};

/// The generator behind every seeded construction in this module.
///
/// SplitMix64 has a 64-bit state advanced by a fixed odd constant, so a seed
/// yields the same stream on every platform.
pub type MdpRng = SplitMix64;

pub fn rng(seed: u64) -> MdpRng {
    SplitMix64::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Red,
    Green,
    Star,
}

impl Cell {
    /// Reward for entering the cell.
    pub fn reward(self) -> f64 {
        match self {
            Cell::Empty => 0.0,
            Cell::Red => -10.0,
            Cell::Green => 2.0,
            Cell::Star => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurtleAction {
    Up,
    Down,
    Left,
    Right,
}

impl TurtleAction {
    pub const ALL: [TurtleAction; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    pub fn label(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Left => "left",
            Self::Right => "right",
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Self::Up => Self::Down,
            Self::Down => Self::Up,
            Self::Left => Self::Right,
            Self::Right => Self::Left,
        }
    }

    fn delta(self) -> (i64, i64) {
        match self {
            Self::Up => (0, -1),
            Self::Down => (0, 1),
            Self::Left => (-1, 0),
            Self::Right => (1, 0),
        }
    }
}

/// Layout of a turtle grid world.
///
/// Coordinates are `(x, y)`, 1-based, with `(1, 1)` the top-left corner;
/// `up` decreases `y`. The turtle moves in the chosen direction with
/// probability `1 - slip` and in the opposite direction otherwise. Moves off
/// the grid leave it in place. Entering a cell earns that cell's reward; the
/// green cell is absorbing and pays nothing once reached.
#[derive(Debug, Clone, PartialEq)]
pub struct TurtleSpec {
    pub width: usize,
    pub height: usize,
    /// Row-major, `cells[(y - 1) * width + (x - 1)]`.
    pub cells: Vec<Cell>,
    pub slip: f64,
}

impl Default for TurtleSpec {
    fn default() -> Self {
        let (width, height) = (5, 5);
        let mut cells = vec![Cell::Empty; width * height];
        let mut put = |x: usize, y: usize, c: Cell| cells[(y - 1) * width + (x - 1)] = c;
        put(1, 4, Cell::Green);
        put(4, 2, Cell::Star);
        put(3, 3, Cell::Star);
        for (x, y) in [(1, 2), (2, 2), (3, 2), (4, 3), (2, 4), (4, 5)] {
            put(x, y, Cell::Red);
        }
        Self {
            width,
            height,
            cells,
            slip: 0.25,
        }
    }
}

impl TurtleSpec {
    pub fn state_index(&self, x: usize, y: usize) -> usize {
        assert!((1..=self.width).contains(&x) && (1..=self.height).contains(&y));
        (y - 1) * self.width + (x - 1)
    }

    pub fn coords(&self, s: usize) -> (usize, usize) {
        (s % self.width + 1, s / self.width + 1)
    }

    pub fn cell(&self, x: usize, y: usize) -> Cell {
        self.cells[self.state_index(x, y)]
    }

    pub fn green_state(&self) -> Option<usize> {
        self.cells.iter().position(|&c| c == Cell::Green)
    }

    fn step(&self, s: usize, action: TurtleAction) -> usize {
        let (x, y) = self.coords(s);
        let (dx, dy) = action.delta();
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        if nx < 1 || ny < 1 || nx > self.width as i64 || ny > self.height as i64 {
            s
        } else {
            self.state_index(nx as usize, ny as usize)
        }
    }

    pub fn to_mdp(&self) -> Result<Mdp> {
        let n = self.width * self.height;
        let green = self.green_state();
        let transitions = (0..n)
            .map(|s| {
                TurtleAction::ALL
                    .iter()
                    .map(|&a| {
                        if Some(s) == green {
                            Dist::ret(s, n)
                        } else {
                            Dist::new(
                                n,
                                vec![
                                    (1.0 - self.slip, self.step(s, a)),
                                    (self.slip, self.step(s, a.opposite())),
                                ],
                            )
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mdp = Mdp::from_reward_fn(transitions, |s, _, sp| {
            if Some(s) == green {
                0.0
            } else {
                self.cells[sp].reward()
            }
        })?;
        let states = (0..n)
            .map(|s| {
                let (x, y) = self.coords(s);
                format!("({x},{y})")
            })
            .collect();
        let actions = vec![TurtleAction::ALL.iter().map(|a| a.label().to_string()).collect(); n];
        mdp.with_labels(states, actions)
    }
}

/// The default turtle world as a discounted problem.
pub fn turtle_mdp(gamma: f64) -> Result<DiscountedProblem> {
    DiscountedProblem::new(TurtleSpec::default().to_mdp()?, gamma)
}

/// Shape of a random MDP.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMdp {
    pub n_states: usize,
    pub actions_per_state: Vec<usize>,
    pub reward_range: (f64, f64),
}

impl RandomMdp {
    pub fn new(n_states: usize, actions_per_state: Vec<usize>, reward_range: (f64, f64)) -> Self {
        assert!(n_states >= 1 && actions_per_state.len() == n_states);
        assert!(actions_per_state.iter().all(|&a| a >= 1));
        assert!(reward_range.0 <= reward_range.1);
        Self {
            n_states,
            actions_per_state,
            reward_range,
        }
    }

    /// Draws `|S|` in `1..=max_states` and each `|A(s)|` in `1..=max_actions`
    /// from `rng`.
    pub fn sized(rng: &mut MdpRng, max_states: usize, max_actions: usize, reward_range: (f64, f64)) -> Self {
        let n = rng.gen_range(1..=max_states);
        let actions = (0..n).map(|_| rng.gen_range(1..=max_actions)).collect();
        Self::new(n, actions, reward_range)
    }

    pub fn generate(&self, seed: u64) -> Mdp {
        self.generate_with(&mut rng(seed))
    }

    /// Transition rows are normalized positive draws; rewards are uniform
    /// over the range.
    pub fn generate_with(&self, rng: &mut MdpRng) -> Mdp {
        let n = self.n_states;
        let transitions = self
            .actions_per_state
            .iter()
            .map(|&k| (0..k).map(|_| random_dist(rng, n)).collect())
            .collect();
        let (lo, hi) = self.reward_range;
        let rewards = self
            .actions_per_state
            .iter()
            .map(|&k| (0..k).map(|_| (0..n).map(|_| uniform(rng, lo, hi)).collect()).collect())
            .collect();
        Mdp::new(transitions, rewards).expect("generated model is valid")
    }
}

fn uniform(rng: &mut MdpRng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// A dense distribution with every outcome positive.
pub fn random_dist(rng: &mut MdpRng, n: usize) -> Dist {
    // 1 - U[0,1) lies in (0, 1]
    let draws: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let total: f64 = draws.iter().sum();
    Dist::from_weights(&draws.iter().map(|d| d / total).collect::<Vec<_>>()).expect("normalized")
}

pub fn random_value_fn(rng: &mut MdpRng, n: usize, scale: f64) -> ValueFn {
    ValueFn::from_fn(n, |_| uniform(rng, -scale, scale)).expect("finite draws")
}
