//! Smart-order-routing instances.
//!
//! A trader splits `S` shares across `d` venues each round. Venue `i` earns
//! an average price `p_i` per share and adds `sigma2_i` per share to the
//! reward variance, so an allocation `v` (scaled to `v / S`) is a linear
//! action with `theta* = p` and `phi* = sigma2`. Coefficient vectors are
//! kept sorted as (market, dark pools..., lit pools...): market orders have
//! the worst price and the least uncertainty, lit limit orders the best
//! price and the most.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::model::{ActionSet, MVInstance, NORM_TOL};

/// Largest action set [`enumerate_allocations`] will build.
pub const DEFAULT_ACTION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SorSpec {
    pub d: usize,
    /// Shares per round.
    pub shares: u32,
    /// Average execution price per venue, ascending.
    pub price: Vec<f64>,
    /// Per-share variance contribution per venue, ascending.
    pub variance: Vec<f64>,
    pub omega: f64,
    pub rho: f64,
    pub label: String,
    /// Lit and dark pool counts `(J, N)` when known; metadata only.
    pub split: Option<(usize, usize)>,
}

impl SorSpec {
    /// Checks the venue ordering constraints; lists every violated one.
    pub fn validate(&self) -> Result<()> {
        let mut v: Vec<String> = Vec::new();
        let d = self.d;
        if d == 0 {
            v.push("d must be >= 1".into());
        }
        if self.shares == 0 {
            v.push("shares must be >= 1".into());
        }
        if self.price.len() != d {
            v.push(format!("price has {} entries, expected {d}", self.price.len()));
        }
        if self.variance.len() != d {
            v.push(format!("variance has {} entries, expected {d}", self.variance.len()));
        }
        if !(self.omega >= 0.0) {
            v.push(format!("omega {} < 0", self.omega));
        }
        if !(self.rho >= 0.0) {
            v.push(format!("rho {} < 0", self.rho));
        }
        if !v.is_empty() {
            return Err(Error::InvalidSpec(v));
        }
        if let Some((j, n)) = self.split {
            if j + n + 1 != d {
                v.push(format!("J + N + 1 = {} != d = {d}", j + n + 1));
            }
        }
        check_chain("p", &self.price, &mut v);
        check_chain("sigma2", &self.variance, &mut v);
        if self.variance.first().is_some_and(|s| !(*s > 0.0)) {
            v.push(format!("0 < sigma2[0] violated: {}", self.variance[0]));
        }
        if let Some((j, n)) = self.split.filter(|(j, n)| j + n + 1 == d) {
            // dark block is [1, 1 + n), lit block is [1 + n, d)
            if n > 0 && j > 0 {
                if !(self.price[n] < self.price[n + 1]) {
                    v.push(format!("max dark p {} < min lit p {} violated", self.price[n], self.price[n + 1]));
                }
                if !(self.variance[n] < self.variance[n + 1]) {
                    v.push(format!(
                        "max dark sigma2 {} < min lit sigma2 {} violated",
                        self.variance[n],
                        self.variance[n + 1]
                    ));
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }
}

/// Ascending with a strictly smallest first entry.
fn check_chain(name: &str, xs: &[f64], out: &mut Vec<String>) {
    if xs.iter().any(|x| !x.is_finite()) {
        out.push(format!("{name} has non-finite entries"));
        return;
    }
    for i in 1..xs.len() {
        if i == 1 && !(xs[0] < xs[1]) {
            out.push(format!("{name}[0] < {name}[1] violated ({} vs {})", xs[0], xs[1]));
        } else if !(xs[i - 1] <= xs[i]) {
            out.push(format!("{name} not ascending at {i} ({} > {})", xs[i - 1], xs[i]));
        }
    }
}

/// `C(n, k)` in `u128`, saturating.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(x) => x / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of allocations of `shares` identical shares to `d` venues.
pub fn allocation_count(d: usize, shares: u32) -> u128 {
    binomial(shares as u64 + d as u64 - 1, d as u64 - 1)
}

/// All `v in Z>=0^d` with `sum v = shares`, in lexicographic order.
pub fn allocations(d: usize, shares: u32, cap: usize) -> Result<Vec<Vec<u32>>> {
    if d == 0 || shares == 0 {
        return Err(Error::InvalidSpec(vec![format!("need d >= 1 and S >= 1, got d={d}, S={shares}")]));
    }
    let count = allocation_count(d, shares);
    if count > cap as u128 {
        return Err(Error::CapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0u32; d];
    cur[d - 1] = shares;
    loop {
        out.push(cur.clone());
        // next composition in lexicographic order: bump the rightmost
        // position (before the last) that still has shares to its right
        let Some(i) = (0..d - 1).rev().find(|&i| cur[i + 1..].iter().any(|&x| x > 0)) else {
            break;
        };
        let tail: u32 = cur[i + 1..].iter().sum();
        cur[i] += 1;
        cur[i + 1..].iter_mut().for_each(|x| *x = 0);
        cur[d - 1] = tail - 1;
    }
    Ok(out)
}

/// Scaled allocations `v / S` as an action set (`K = C(S+d-1, d-1)`).
pub fn enumerate_allocations(d: usize, shares: u32) -> Result<ActionSet> {
    enumerate_allocations_capped(d, shares, DEFAULT_ACTION_CAP)
}

pub fn enumerate_allocations_capped(d: usize, shares: u32, cap: usize) -> Result<ActionSet> {
    let all = allocations(d, shares, cap)?;
    let s = shares as f64;
    let mut data = Vec::with_capacity(all.len() * d);
    for v in &all {
        data.extend(v.iter().map(|&x| x as f64 / s));
    }
    ActionSet::from_flat(d, data)
}

/// Built-in scenarios `I` (d = 4), `II` (d = 5) and `III` (d = 6).
pub fn load_scenario(name: &str) -> Result<SorSpec> {
    let (label, price, variance): (&str, &[f64], &[f64]) = match name.trim().to_ascii_uppercase().as_str() {
        "I" => ("I", &[0.1316, 0.3218, 0.5800, 0.7367], &[0.2506, 0.2902, 0.5090, 0.7706]),
        "II" => (
            "II",
            &[0.1121, 0.2742, 0.4942, 0.5232, 0.6278],
            &[0.2318, 0.2685, 0.3798, 0.4709, 0.7129],
        ),
        "III" => (
            "III",
            &[0.1081, 0.2641, 0.2645, 0.4767, 0.5047, 0.6055],
            &[0.1631, 0.1889, 0.2672, 0.3313, 0.5015, 0.7106],
        ),
        _ => return Err(Error::UnknownScenario(name.to_string())),
    };
    Ok(SorSpec {
        d: price.len(),
        shares: 4,
        price: price.to_vec(),
        variance: variance.to_vec(),
        omega: 1.0,
        rho: 2.0,
        label: label.to_string(),
        split: None,
    })
}

/// Common divisor applied to both coefficient vectors so that
/// `|theta*| <= 1` and `|phi*| <= omega`; `1.0` when they already fit.
pub fn rescale_factor(spec: &SorSpec) -> f64 {
    let pn = norm2(&spec.price);
    let sn = norm2(&spec.variance);
    if pn <= 1.0 + NORM_TOL && sn <= spec.omega + NORM_TOL {
        return 1.0;
    }
    let by_var = if spec.omega > 0.0 { sn / spec.omega } else { f64::INFINITY };
    pn.max(by_var).max(1.0)
}

/// Bandit instance over all allocations of `shares` shares.
pub fn to_instance(spec: &SorSpec, shares: u32) -> Result<MVInstance> {
    spec.validate()?;
    let actions = enumerate_allocations(spec.d, shares)?;
    let c = rescale_factor(spec);
    let theta: Vec<f64> = spec.price.iter().map(|p| p / c).collect();
    let phi: Vec<f64> = spec.variance.iter().map(|s| s / c).collect();
    Ok(MVInstance::new(actions, theta, phi, spec.omega, spec.rho)?
        .with_label(format!("{}/S={shares}", spec.label)))
}

/// Sampling ranges for [`sample_random_spec_in`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecRanges {
    pub price: (f64, f64),
    pub variance: (f64, f64),
}

impl Default for SpecRanges {
    fn default() -> Self {
        Self { price: (0.0, 1.0), variance: (0.0, 1.0) }
    }
}

pub fn sample_random_spec(d: usize, lit: usize, dark: usize, seed: u64) -> Result<SorSpec> {
    sample_random_spec_in(d, lit, dark, seed, &SpecRanges::default())
}

/// Draws both coefficient vectors uniformly, sorts them into
/// (market, dark, lit) order and redraws in the measure-zero event that a
/// strict inequality ends up tied.
pub fn sample_random_spec_in(d: usize, lit: usize, dark: usize, seed: u64, ranges: &SpecRanges) -> Result<SorSpec> {
    if lit + dark + 1 != d {
        return Err(Error::InvalidSpec(vec![format!("J + N + 1 = {} != d = {d}", lit + dark + 1)]));
    }
    let mk = |(lo, hi): (f64, f64)| {
        Uniform::new(lo, hi).map_err(|e| Error::InvalidSpec(vec![format!("bad range [{lo}, {hi}): {e}")]))
    };
    let (pu, su) = (mk(ranges.price)?, mk(ranges.variance)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut price: Vec<f64> = (0..d).map(|_| pu.sample(&mut rng)).collect();
        let mut variance: Vec<f64> = (0..d).map(|_| su.sample(&mut rng)).collect();
        price.sort_by(f64::total_cmp);
        variance.sort_by(f64::total_cmp);
        let spec = SorSpec {
            d,
            shares: 1,
            price,
            variance,
            omega: 1.0,
            rho: 2.0,
            label: format!("random-{seed}"),
            split: Some((lit, dark)),
        };
        if spec.validate().is_ok() {
            return Ok(spec);
        }
    }
}
