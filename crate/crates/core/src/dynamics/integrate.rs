use super::state::State;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Short trajectory recorded at a few time stamps from one initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst<S, T> {
    pub snapshots: Vec<S>,
    pub times: Vec<T>,
    pub burst_id: usize,
}

impl<S: State<T>, T: Real> Burst<S, T> {
    pub fn new(snapshots: Vec<S>, times: Vec<T>, burst_id: usize) -> Result<Self> {
        if snapshots.is_empty() || snapshots.len() != times.len() {
            return Err(Error::InsufficientData(format!(
                "{} snapshots for {} time stamps",
                snapshots.len(),
                times.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "time stamps must be strictly increasing".into(),
            ));
        }
        if snapshots.iter().any(|s| !s.same_shape(&snapshots[0])) {
            return Err(Error::Dimension("snapshots differ in shape".into()));
        }
        Ok(Self {
            snapshots,
            times,
            burst_id,
        })
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Spacing between the first two recorded stamps.
    pub fn dt_record(&self) -> Option<T> {
        (self.times.len() >= 2).then(|| self.times[1] - self.times[0])
    }
}

/// Forward Euler from `t = 0`, recording the state at each of `record_times`.
///
/// Every record time must be a nonnegative multiple of `dt_fine` (relative
/// tolerance `1e-6` of a step).
pub fn integrate<S, T, F>(rhs: F, state0: S, dt_fine: T, record_times: &[T]) -> Result<Burst<S, T>>
where
    S: State<T>,
    T: Real,
    F: Fn(&S) -> Result<S>,
{
    if !(dt_fine > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt_fine}"
        )));
    }
    if record_times.is_empty() {
        return Err(Error::InvalidParameter("no record times".into()));
    }
    let dt = dt_fine.as_f64();
    let mut targets = Vec::with_capacity(record_times.len());
    for &t in record_times {
        let t = t.as_f64();
        let steps = (t / dt).round();
        if t < 0.0 || (steps * dt - t).abs() > 1e-6 * dt {
            return Err(Error::InvalidParameter(format!(
                "record time {t} is not a nonnegative multiple of {dt}"
            )));
        }
        let steps = steps as usize;
        if targets.last().is_some_and(|&last| steps <= last) {
            return Err(Error::InvalidParameter(
                "record times must be increasing".into(),
            ));
        }
        targets.push(steps);
    }

    let mut state = state0;
    let mut snapshots = Vec::with_capacity(targets.len());
    let mut step = 0usize;
    for &target in &targets {
        while step < target {
            let d = rhs(&state)?;
            state.add_scaled(dt_fine, &d);
            step += 1;
            if !state.all_finite() {
                return Err(Error::Divergence {
                    step,
                    time: step as f64 * dt,
                });
            }
        }
        snapshots.push(state.clone());
    }
    Burst::new(snapshots, record_times.to_vec(), 0)
}

/// Forward-difference velocity `(u(t_{k+1}) − u(t_k)) / (t_{k+1} − t_k)` for
/// each consecutive pair of recorded snapshots.
pub fn approximate_velocity<S: State<T>, T: Real>(burst: &Burst<S, T>) -> Result<Vec<S>> {
    if burst.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "velocity needs at least 2 snapshots, burst has {}",
            burst.len()
        )));
    }
    Ok(burst
        .snapshots
        .windows(2)
        .zip(burst.times.windows(2))
        .map(|(s, t)| {
            let inv = T::one() / (t[1] - t[0]);
            let mut v = s[1].clone();
            v.add_scaled(-T::one(), &s[0]);
            v.map_in_place(|x| x * inv);
            v
        })
        .collect())
}
