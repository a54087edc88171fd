//! Minimum and maximum statistical complexity as a function of normalized entropy.
//!
//! The envelope is traced by one-parameter families `P(p, m)` over `M` states:
//! `m` components are zero, one component equals `p`, and the remaining
//! `k = M - m - 1` components share `1 - p` equally. For every family the map
//! `p -> H` is increasing on `[0, 1/(k+1)]` (the rising branch) and decreasing
//! on `[1/(k+1), 1]` (the falling branch). At each output entropy the branch
//! parameter is recovered by bisection and the extremes of `C` across all
//! branches become `c_min` and `c_max`.
//!
//! Because a family has only three distinct probability values, `H` and `C`
//! are evaluated in closed form, so the cost per point does not grow with `M`.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infomeasures::q0;
use crate::scalar::{xlogx, Float};

pub const DEFAULT_RESOLUTION: usize = 512;
pub const MIN_RESOLUTION: usize = 100;
pub const DEFAULT_SWEEP: usize = 1 << 12;

const BISECTION_STEPS: usize = 200;

/// A member of the extremal family: `zeros` null components and one component `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyPoint<T> {
    pub zeros: usize,
    pub p: T,
}

impl<T: Float> FamilyPoint<T> {
    /// Materializes the probability vector over `states` components.
    pub fn distribution(&self, states: usize) -> Vec<T> {
        let k = states - self.zeros - 1;
        let mut out = vec![T::zero(); states];
        out[0] = self.p;
        if k > 0 {
            let q = (T::one() - self.p) / T::of_usize(k);
            for v in &mut out[1..=k] {
                *v = q;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSample<T> {
    pub h: T,
    pub c_min: T,
    pub c_max: T,
    pub min_at: FamilyPoint<T>,
    pub max_at: FamilyPoint<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityEnvelope<T> {
    pub states: usize,
    /// Ascending in `h`, from `0` to `1` inclusive.
    pub samples: Vec<EnvelopeSample<T>>,
}

impl<T: Float> ComplexityEnvelope<T> {
    /// Linearly interpolated `(c_min, c_max)` at `h`, for plotting.
    pub fn bounds_at(&self, h: T) -> Result<(T, T)> {
        check_entropy(h)?;
        let s = &self.samples;
        let hi = s.partition_point(|x| x.h < h).clamp(1, s.len() - 1);
        let (a, b) = (&s[hi - 1], &s[hi]);
        let t = ((h - a.h) / (b.h - a.h)).max(T::zero()).min(T::one());
        Ok((a.c_min + t * (b.c_min - a.c_min), a.c_max + t * (b.c_max - a.c_max)))
    }
}

fn check_entropy<T: Float>(h: T) -> Result<()> {
    if h >= T::zero() && h <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("entropy {h} outside [0, 1]")))
    }
}

/// Whether `(h, c)` lies within the envelope widened by `eps`.
///
/// The extremes are evaluated directly at `h` rather than read off the grid:
/// chords undercut the concave arcs of `c_max` and cut across the cusps of
/// `c_min`, both by far more than any useful `eps`.
pub fn contains<T: Float>(env: &ComplexityEnvelope<T>, h: T, c: T, eps: T) -> Result<bool> {
    let exact = exact_bounds(env.states, h)?;
    Ok(c >= exact.c_min - eps && c <= exact.c_max + eps)
}

/// Closed-form evaluator for one family over `states` components.
struct Family<T> {
    states: usize,
    zeros: usize,
    others: usize,
    ln_m: T,
    q0: T,
}

impl<T: Float> Family<T> {
    fn new(states: usize, zeros: usize) -> Self {
        let m = T::of_usize(states);
        Self {
            states,
            zeros,
            others: states - zeros - 1,
            ln_m: m.ln(),
            q0: q0(states).expect("states >= 2"),
        }
    }

    fn share(&self, p: T) -> T {
        ((T::one() - p) / T::of_usize(self.others)).max(T::zero())
    }

    fn entropy(&self, p: T) -> T {
        let s = -xlogx(p) - T::of_usize(self.others) * xlogx(self.share(p));
        (s / self.ln_m).max(T::zero()).min(T::one())
    }

    fn complexity(&self, p: T) -> T {
        let h = self.entropy(p);
        if h == T::zero() {
            return T::zero();
        }
        let two = T::of(2.0);
        let u = T::one() / T::of_usize(self.states);
        // Jensen-Shannon divergence to the uniform vector, grouped by value
        let term = |a: T| {
            let mix = a + u;
            let left = if a > T::zero() { a * (two * a / mix).ln() } else { T::zero() };
            left + u * (two * u / mix).ln()
        };
        let total = T::of_usize(self.zeros) * term(T::zero()) + term(p) + T::of_usize(self.others) * term(self.share(p));
        self.q0 * (total / two).max(T::zero()) * h
    }

    fn peak(&self) -> T {
        T::one() / T::of_usize(self.others + 1)
    }

    fn point(&self, p: T) -> FamilyPoint<T> {
        FamilyPoint { zeros: self.zeros, p }
    }

    /// Parameter on `[lo, hi]` where the monotone entropy equals `target`.
    fn solve(&self, target: T, mut lo: T, mut hi: T) -> T {
        let rising = self.entropy(lo) <= self.entropy(hi);
        for _ in 0..BISECTION_STEPS {
            let mid = (lo + hi) / T::of(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.entropy(mid) < target) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (el, eh) = (self.entropy(lo), self.entropy(hi));
        if (el - target).abs() <= (eh - target).abs() {
            lo
        } else {
            hi
        }
    }
}

/// All families over `states` components.
struct Tracer<T> {
    families: Vec<Family<T>>,
    /// Entropy of the uniform distribution on `j` states at index `j - 1`.
    uniform_h: Vec<T>,
}

impl<T: Float> Tracer<T> {
    fn new(states: usize) -> Self {
        let families: Vec<Family<T>> = (0..states - 1).map(|z| Family::new(states, z)).collect();
        let uniform_h = (1..=states).map(|j| T::of_usize(j).ln() / families[0].ln_m).collect();
        Self { families, uniform_h }
    }

    fn sample(&self, h: T) -> EnvelopeSample<T> {
        let mut best_min: Option<(T, FamilyPoint<T>)> = None;
        let mut best_max: Option<(T, FamilyPoint<T>)> = None;
        let mut consider = |c: T, at: FamilyPoint<T>| {
            if best_min.is_none_or(|(v, _)| c < v) {
                best_min = Some((c, at));
            }
            if best_max.is_none_or(|(v, _)| c > v) {
                best_max = Some((c, at));
            }
        };
        for fam in &self.families {
            let k = fam.others;
            let (h_lo, h_peak) = (self.uniform_h[k - 1], self.uniform_h[k]);
            if h <= h_peak {
                let p = fam.solve(h, fam.peak(), T::one());
                consider(fam.complexity(p), fam.point(p));
                if h >= h_lo {
                    let p = fam.solve(h, T::zero(), fam.peak());
                    consider(fam.complexity(p), fam.point(p));
                }
            }
        }
        let (c_min, min_at) = best_min.expect("the zero-null family covers every entropy");
        let (c_max, max_at) = best_max.expect("the zero-null family covers every entropy");
        EnvelopeSample { h, c_min, c_max, min_at, max_at }
    }
}

/// Envelope extremes evaluated directly at `h`, without a grid.
pub fn exact_bounds<T: Float>(states: usize, h: T) -> Result<EnvelopeSample<T>> {
    if states < 2 {
        return Err(Error::TooFewStates(states));
    }
    check_entropy(h)?;
    Ok(Tracer::new(states).sample(h))
}

/// Samples the envelope at `resolution + 1` evenly spaced entropies.
pub fn envelope<T: Float>(states: usize, resolution: usize) -> Result<ComplexityEnvelope<T>> {
    if states < 2 {
        return Err(Error::TooFewStates(states));
    }
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!("resolution {resolution} below {MIN_RESOLUTION}")));
    }
    let tracer = Tracer::<T>::new(states);
    let grid = T::of_usize(resolution);
    let samples = (0..=resolution)
        .into_par_iter()
        .map(|j| {
            let h = T::of_usize(j) / grid;
            if j == 0 || j == resolution {
                let p = if j == 0 { T::one() } else { T::one() / T::of_usize(states) };
                let at = FamilyPoint { zeros: 0, p };
                return EnvelopeSample { h, c_min: T::zero(), c_max: T::zero(), min_at: at, max_at: at };
            }
            tracer.sample(h)
        })
        .collect();
    Ok(ComplexityEnvelope { states, samples })
}

/// Raw family members on an even parameter grid of `points` values per family,
/// as `(member, h, c)`.
pub fn family_sweep<T: Float>(states: usize, points: usize) -> Result<Vec<(FamilyPoint<T>, T, T)>> {
    if states < 2 {
        return Err(Error::TooFewStates(states));
    }
    if points < 2 {
        return Err(Error::InvalidArgument("sweep needs at least two points".into()));
    }
    let step = T::one() / T::of_usize(points - 1);
    Ok((0..states - 1)
        .into_par_iter()
        .flat_map_iter(|z| {
            let fam = Family::<T>::new(states, z);
            (0..points).map(move |i| {
                let p = T::of_usize(i) * step;
                (fam.point(p), fam.entropy(p), fam.complexity(p))
            })
        })
        .collect())
}

type CacheKey = (TypeId, usize, usize);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<dyn Any + Send + Sync>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<dyn Any + Send + Sync>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`envelope`], memoized per `(scalar type, states, resolution)` for the process lifetime.
pub fn cached_envelope<T: Float>(states: usize, resolution: usize) -> Result<Arc<ComplexityEnvelope<T>>> {
    let key = (TypeId::of::<T>(), states, resolution);
    if let Some(hit) = cache().lock().expect("envelope cache poisoned").get(&key) {
        return Ok(Arc::clone(hit).downcast().expect("cache keyed by type"));
    }
    let env = Arc::new(envelope::<T>(states, resolution)?);
    cache().lock().expect("envelope cache poisoned").insert(key, env.clone() as Arc<dyn Any + Send + Sync>);
    Ok(env)
}
