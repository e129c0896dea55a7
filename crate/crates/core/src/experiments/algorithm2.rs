//! Random-order filling of the hard-square lattice.
//!
//! Every node draws a uniform time `t ∈ [0, 1)` and nodes are visited by
//! increasing `t`. A node with a neighbor already at 1 becomes 0; any other
//! node becomes 1 with probability `q(t)`, the charging profile. With
//! `a(t)` the probability that a node visited at `t` is still free, the
//! entropy per node is
//!
//! ```text
//! H_q = ∫₀¹ a(t) h(q(t)) dt
//! ```

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{Estimate, ExperimentError};
use crate::lattice::{thermalize, Boundary, Grid, LatticeModel, ThermalConfig};
use crate::rng::SplitMix64;
use crate::spectral::kmodel::binary_entropy;

pub const PROFILE_DEGREE: usize = 4;
pub const DEFAULT_BINS: usize = 50;

/// Degree-4 polynomial in `t`, clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargingProfile {
    coeffs: [f64; PROFILE_DEGREE + 1],
}

impl ChargingProfile {
    pub fn constant(q: f64) -> Self {
        ChargingProfile::polynomial([q, 0.0, 0.0, 0.0, 0.0])
    }

    /// Coefficients from the constant term up.
    pub fn polynomial(coeffs: [f64; PROFILE_DEGREE + 1]) -> Self {
        ChargingProfile { coeffs }
    }

    pub fn coefficients(&self) -> [f64; PROFILE_DEGREE + 1] {
        self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c).clamp(0.0, 1.0)
    }

    /// Weighted least-squares fit to `(t, q, weight)` points.
    pub fn fit(points: &[(f64, f64, f64)]) -> Result<Self, ExperimentError> {
        const N: usize = PROFILE_DEGREE + 1;
        let mut ts: Vec<f64> = points.iter().filter(|p| p.2 > 0.0).map(|p| p.0).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts.len() < N {
            return Err(ExperimentError::InvalidParameter("too few distinct points to fit a profile".into()));
        }
        let mut a = [[0.0f64; N + 1]; N];
        for &(t, q, w) in points {
            let mut pow = [1.0f64; N];
            for k in 1..N {
                pow[k] = pow[k - 1] * t;
            }
            for i in 0..N {
                for j in 0..N {
                    a[i][j] += w * pow[i] * pow[j];
                }
                a[i][N] += w * pow[i] * q;
            }
        }
        for col in 0..N {
            let pivot = (col..N).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).expect("nonempty");
            a.swap(col, pivot);
            for row in 0..N {
                if row != col {
                    let f = a[row][col] / a[col][col];
                    for k in col..=N {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
        let mut coeffs = [0.0; N];
        for i in 0..N {
            coeffs[i] = a[i][N] / a[i][i];
        }
        Ok(ChargingProfile { coeffs })
    }
}

impl fmt::Display for ChargingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("{c:.15e}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Up to five comma-separated coefficients, constant term first.
impl FromStr for ChargingProfile {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| ExperimentError::Parse(format!("bad coefficient `{p}`"))))
            .collect::<Result<_, _>>()?;
        if vals.is_empty() || vals.len() > PROFILE_DEGREE + 1 || vals.iter().any(|v| !v.is_finite()) {
            return Err(ExperimentError::Parse(format!("profile needs 1..={} finite coefficients", PROFILE_DEGREE + 1)));
        }
        let mut coeffs = [0.0; PROFILE_DEGREE + 1];
        coeffs[..vals.len()].copy_from_slice(&vals);
        Ok(ChargingProfile { coeffs })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Algorithm2Config {
    pub side: usize,
    pub trials: usize,
    pub bins: usize,
    pub boundary: Boundary,
}

impl Algorithm2Config {
    /// Torus of the given side with [`DEFAULT_BINS`] time bins.
    pub fn new(side: usize, trials: usize) -> Self {
        Algorithm2Config { side, trials, bins: DEFAULT_BINS, boundary: Boundary::Cyclic }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.side < 2 || self.trials == 0 || self.bins == 0 {
            return Err(ExperimentError::InvalidParameter(format!(
                "side {} trials {} bins {}",
                self.side, self.trials, self.bins
            )));
        }
        Ok(())
    }
}

/// Per-bin tallies over visited nodes.
#[derive(Clone, Debug, Default, PartialEq)]
struct Tally {
    visits: Vec<u64>,
    free: Vec<u64>,
    ones: Vec<u64>,
}

impl Tally {
    fn new(bins: usize) -> Self {
        Tally { visits: vec![0; bins], free: vec![0; bins], ones: vec![0; bins] }
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in [(&mut self.visits, &other.visits), (&mut self.free, &other.free), (&mut self.ones, &other.ones)] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    fn a(&self) -> Vec<f64> {
        self.visits.iter().zip(&self.free).map(|(&v, &f)| if v > 0 { f as f64 / v as f64 } else { f64::NAN }).collect()
    }

    fn q(&self) -> Vec<f64> {
        self.free.iter().zip(&self.ones).map(|(&f, &o)| if f > 0 { o as f64 / f as f64 } else { f64::NAN }).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Algorithm2Report {
    pub config: Algorithm2Config,
    pub profile: ChargingProfile,
    pub seed: u64,
    /// Bin midpoints.
    pub t: Vec<f64>,
    /// Fraction of nodes still free when visited.
    pub a: Vec<f64>,
    /// Fraction of free nodes set to 1.
    pub q: Vec<f64>,
    /// Nodes visited per bin over all trials.
    pub visits: Vec<u64>,
    /// Free nodes per bin over all trials.
    pub free: Vec<u64>,
    /// Trapezoid rule on the measured `a` and the profile.
    pub integral: Estimate,
    /// `h(q(t))` summed over the free nodes, per node.
    pub direct: Estimate,
    /// Fraction of nodes at 1.
    pub density: Estimate,
}

impl Algorithm2Report {
    /// `H − direct`.
    pub fn delta_h(&self) -> Estimate {
        Estimate { mean: crate::HARD_SQUARE_ENTROPY - self.direct.mean, ..self.direct }
    }

    /// `a(0)`, linearly extrapolated from the first two bins.
    pub fn a_start(&self) -> Estimate {
        extrapolate(&self.a, &self.visits, 0, 1, self.config.trials)
    }

    /// `a(1)`, linearly extrapolated from the last two bins.
    pub fn a_end(&self) -> Estimate {
        let k = self.a.len() - 1;
        extrapolate(&self.a, &self.visits, k, k.saturating_sub(1), self.config.trials)
    }

    /// Measured `q(0)`, extrapolated like [`Algorithm2Report::a_start`].
    pub fn q_start(&self) -> Estimate {
        extrapolate(&self.q, &self.free, 0, 1, self.config.trials)
    }

    /// CSV `t,a,q,visits` rows.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("t,a,q,visits\n");
        for k in 0..self.t.len() {
            out.push_str(&format!("{:.6},{:.15e},{:.15e},{}\n", self.t[k], self.a[k], self.q[k], self.visits[k]));
        }
        out
    }
}

/// `1.5 y[near] − 0.5 y[far]` with binomial errors; a single bin is
/// returned as is.
fn extrapolate(y: &[f64], n: &[u64], near: usize, far: usize, trials: usize) -> Estimate {
    let se = |k: usize| y[k] * (1.0 - y[k]) / n[k].max(1) as f64;
    if near == far || far >= y.len() {
        return Estimate { mean: y[near], stderr: se(near).sqrt(), samples: trials };
    }
    Estimate { mean: 1.5 * y[near] - 0.5 * y[far], stderr: (2.25 * se(near) + 0.25 * se(far)).sqrt(), samples: trials }
}

/// Neighbor indices of each cell of a `side × side` grid.
fn neighbors(side: usize, boundary: Boundary) -> Vec<Vec<usize>> {
    let s = side as i64;
    let at = |r: i64, c: i64| -> Option<usize> {
        match boundary {
            Boundary::Cyclic => Some((r.rem_euclid(s) * s + c.rem_euclid(s)) as usize),
            _ if (0..s).contains(&r) && (0..s).contains(&c) => Some((r * s + c) as usize),
            _ => None,
        }
    };
    (0..s * s)
        .map(|i| {
            let (r, c) = (i / s, i % s);
            let mut v: Vec<usize> = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)].into_iter().filter_map(|(r, c)| at(r, c)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

fn bin_of(t: f64, bins: usize) -> usize {
    ((t * bins as f64) as usize).min(bins - 1)
}

/// Uniform visiting times and the node order they induce.
fn random_order(n: usize, rng: &mut SplitMix64) -> (Vec<f64>, Vec<usize>) {
    let t: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&x, &y| t[x].total_cmp(&t[y]));
    (t, order)
}

struct Trial {
    tally: Tally,
    direct: f64,
    density: f64,
    grid: Grid,
}

fn run_trial(config: &Algorithm2Config, nbrs: &[Vec<usize>], profile: &ChargingProfile, rng: &mut SplitMix64) -> Trial {
    let n = config.side * config.side;
    let (t, order) = random_order(n, rng);
    let mut cells = vec![0u8; n];
    let mut tally = Tally::new(config.bins);
    let mut bits = 0.0;
    for i in order {
        let b = bin_of(t[i], config.bins);
        tally.visits[b] += 1;
        if nbrs[i].iter().any(|&j| cells[j] == 1) {
            continue;
        }
        tally.free[b] += 1;
        let q = profile.eval(t[i]);
        bits += binary_entropy(q);
        if rng.bernoulli(q) {
            cells[i] = 1;
            tally.ones[b] += 1;
        }
    }
    let density = cells.iter().filter(|&&c| c == 1).count() as f64 / n as f64;
    let grid = Grid::from_cells(2, config.side, config.side, 2, cells).expect("binary cells");
    Trial { tally, direct: bits / n as f64, density, grid }
}

/// `∫₀¹ a(t) h(q(t)) dt` by the trapezoid rule on bin midpoints, holding
/// the end bins' `a` constant out to 0 and 1.
fn entropy_integral(a: &[f64], profile: &ChargingProfile) -> f64 {
    let bins = a.len();
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(bins + 2);
    let y = |t: f64, a: f64| if a.is_nan() { 0.0 } else { a * binary_entropy(profile.eval(t)) };
    pts.push((0.0, y(0.0, a[0])));
    for (k, &ak) in a.iter().enumerate() {
        let t = (k as f64 + 0.5) / bins as f64;
        pts.push((t, y(t, ak)));
    }
    pts.push((1.0, y(1.0, a[bins - 1])));
    pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1)).sum()
}

/// Runs `trials` independent orders and valuations; trials run in
/// parallel from derived seeds.
pub fn algorithm2_simulate(config: &Algorithm2Config, profile: &ChargingProfile, seed: u64) -> Result<Algorithm2Report, ExperimentError> {
    Ok(algorithm2_run(config, profile, seed, false)?.0)
}

/// As [`algorithm2_simulate`], also returning every generated lattice.
pub fn algorithm2_samples(config: &Algorithm2Config, profile: &ChargingProfile, seed: u64) -> Result<(Algorithm2Report, Vec<Grid>), ExperimentError> {
    algorithm2_run(config, profile, seed, true)
}

fn algorithm2_run(config: &Algorithm2Config, profile: &ChargingProfile, seed: u64, keep: bool) -> Result<(Algorithm2Report, Vec<Grid>), ExperimentError> {
    config.validate()?;
    let nbrs = neighbors(config.side, config.boundary);
    let trials: Vec<Trial> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, &nbrs, profile, &mut SplitMix64::derive(seed, i as u64)))
        .collect();
    let mut tally = Tally::new(config.bins);
    trials.iter().for_each(|t| tally.merge(&t.tally));
    let integrals: Vec<f64> = trials.iter().map(|t| entropy_integral(&t.tally.a(), profile)).collect();
    let direct: Vec<f64> = trials.iter().map(|t| t.direct).collect();
    let density: Vec<f64> = trials.iter().map(|t| t.density).collect();
    let report = Algorithm2Report {
        config: *config,
        profile: *profile,
        seed,
        t: (0..config.bins).map(|k| (k as f64 + 0.5) / config.bins as f64).collect(),
        a: tally.a(),
        q: tally.q(),
        visits: tally.visits.clone(),
        free: tally.free.clone(),
        integral: Estimate::from_samples(&integrals),
        direct: Estimate::from_samples(&direct),
        density: Estimate::from_samples(&density),
    };
    let grids = if keep { trials.into_iter().map(|t| t.grid).collect() } else { Vec::new() };
    Ok((report, grids))
}

/// Profile measured on (approximately) uniform valuations.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileFit {
    pub profile: ChargingProfile,
    pub t: Vec<f64>,
    /// `P(node = 1 | free when visited)` per bin.
    pub q: Vec<f64>,
    /// `P(free when visited)` per bin.
    pub a: Vec<f64>,
    pub samples: usize,
}

/// Thermalizes `samples` hard-square valuations of the configured square,
/// visits each under `orders` random orders, and fits the profile to the
/// measured `q(t)` weighted by the number of free nodes per bin.
pub fn fit_charging_profile(config: &Algorithm2Config, samples: usize, orders: usize, seed: u64) -> Result<ProfileFit, ExperimentError> {
    config.validate()?;
    let hs = LatticeModel::hard_square();
    let thermal = ThermalConfig { boundary: config.boundary, ..ThermalConfig::default() };
    let grids = thermalize(&hs, config.side, config.side, thermal, samples, seed)?;
    let nbrs = neighbors(config.side, config.boundary);
    let tallies: Vec<Tally> = grids
        .par_iter()
        .enumerate()
        .map(|(g, grid)| {
            let mut rng = SplitMix64::derive(seed ^ 0x5eed, g as u64);
            let mut tally = Tally::new(config.bins);
            let cells = grid.cells();
            for _ in 0..orders {
                let (t, _) = random_order(cells.len(), &mut rng);
                for i in 0..cells.len() {
                    let b = bin_of(t[i], config.bins);
                    tally.visits[b] += 1;
                    if nbrs[i].iter().any(|&j| cells[j] == 1 && t[j] < t[i]) {
                        continue;
                    }
                    tally.free[b] += 1;
                    tally.ones[b] += cells[i] as u64;
                }
            }
            tally
        })
        .collect();
    let mut tally = Tally::new(config.bins);
    tallies.iter().for_each(|t| tally.merge(t));
    let t: Vec<f64> = (0..config.bins).map(|k| (k as f64 + 0.5) / config.bins as f64).collect();
    let q = tally.q();
    let points: Vec<(f64, f64, f64)> =
        (0..config.bins).filter(|&k| tally.free[k] > 0).map(|k| (t[k], q[k], tally.free[k] as f64)).collect();
    Ok(ProfileFit { profile: ChargingProfile::fit(&points)?, t, q, a: tally.a(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_clamps() {
        let p = ChargingProfile::polynomial([-0.5, 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.eval(0.0), 0.0);
        assert_eq!(p.eval(1.0), 1.0);
        assert!((p.eval(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_polynomial() {
        let truth = ChargingProfile::polynomial([0.3, -0.2, 0.4, 0.1, -0.05]);
        let pts: Vec<_> = (0..40).map(|k| k as f64 / 39.0).map(|t| (t, truth.eval(t), 1.0 + t)).collect();
        let fit = ChargingProfile::fit(&pts).unwrap();
        for (a, b) in fit.coefficients().iter().zip(truth.coefficients()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(ChargingProfile::fit(&pts[..3]).is_err());
    }

    #[test]
    fn profile_text_roundtrip() {
        let p: ChargingProfile = "0.25, -0.1".parse().unwrap();
        assert_eq!(p.coefficients(), [0.25, -0.1, 0.0, 0.0, 0.0]);
        assert_eq!(p.to_string().parse::<ChargingProfile>().unwrap(), p);
        assert!("".parse::<ChargingProfile>().is_err());
        assert!("1,2,3,4,5,6".parse::<ChargingProfile>().is_err());
    }

    #[test]
    fn torus_neighbors() {
        let n = neighbors(3, Boundary::Cyclic);
        assert_eq!(n[0], vec![1, 2, 3, 6]);
        let f = neighbors(3, Boundary::Free);
        assert_eq!(f[0], vec![1, 3]);
        assert_eq!(neighbors(2, Boundary::Cyclic)[0], vec![1, 2]);
    }

    #[test]
    fn trapezoid_of_constant() {
        let p = ChargingProfile::constant(0.5);
        assert!((entropy_integral(&[1.0; 10], &p) - 1.0).abs() < 1e-15);
    }
}
