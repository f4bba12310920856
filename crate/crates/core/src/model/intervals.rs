//! Temperature-interval partitioning on the hot temperature scale.

use super::{heat_load, ModelError, Side, Stream, TemperatureInterval, Utility};
use crate::scalar::{is_negative, is_positive, min_of, Scalar};

/// Interval boundaries plus the loads every stream contributes to it and the
/// utilities assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalLoads<S> {
    pub interval: TemperatureInterval<S>,
    pub hot: Vec<(String, S)>,
    pub cold: Vec<(String, S)>,
    pub hot_utilities: Vec<String>,
    pub cold_utilities: Vec<String>,
}

/// Span of a stream on the hot scale (cold temperatures shifted up by `dt_min`).
fn shifted_span<S: Scalar>(s: &Stream<S>, dt_min: &S) -> Result<(S, S), ModelError> {
    let (t_in, t_out) = match (&s.t_in, &s.t_out) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(ModelError::MissingTemperatures(s.id.clone())),
    };
    Ok(match s.side {
        Side::Hot => (t_in, t_out),
        Side::Cold => (t_out + dt_min.clone(), t_in + dt_min.clone()),
    })
}

/// Partitions the temperature scale at every stream endpoint (cold endpoints
/// shifted up by `dt_min`), hottest interval first. Each stream contributes
/// `FCp · overlap` to every interval it covers. The hottest hot utility goes
/// to the top interval and the coldest cold utility to the bottom one; any
/// other utility goes to the hottest (hot) or coldest (cold) interval its
/// temperature admits.
pub fn build_intervals<S: Scalar>(
    streams: &[Stream<S>],
    utilities: &[Utility<S>],
    dt_min: &S,
) -> Result<Vec<IntervalLoads<S>>, ModelError> {
    if streams.is_empty() {
        return Err(ModelError::NoStreams);
    }
    if is_negative(dt_min) {
        return Err(ModelError::NegativeApproach);
    }
    let spans = streams
        .iter()
        .map(|s| shifted_span(s, dt_min))
        .collect::<Result<Vec<_>, _>>()?;

    let mut bounds: Vec<S> = Vec::new();
    for (hi, lo) in &spans {
        for t in [hi, lo] {
            if !bounds.iter().any(|b| crate::scalar::approx_eq(b, t)) {
                bounds.push(t.clone());
            }
        }
    }
    bounds.sort_by(|a, b| b.partial_cmp(a).expect("temperatures are comparable"));

    let mut out = Vec::with_capacity(bounds.len().saturating_sub(1));
    for (k, pair) in bounds.windows(2).enumerate() {
        let interval = TemperatureInterval::new(k + 1, pair[0].clone(), pair[1].clone())?;
        out.push(IntervalLoads {
            interval,
            hot: Vec::new(),
            cold: Vec::new(),
            hot_utilities: Vec::new(),
            cold_utilities: Vec::new(),
        });
    }

    for (s, (hi, lo)) in streams.iter().zip(&spans) {
        let mut covered = false;
        for iv in out.iter_mut() {
            let top = min_of(hi, &iv.interval.t_hi);
            let bottom = if *lo > iv.interval.t_lo {
                lo.clone()
            } else {
                iv.interval.t_lo.clone()
            };
            let overlap = top - bottom;
            if !is_positive(&overlap) {
                continue;
            }
            covered = true;
            let q = heat_load(&s.fcp, &overlap)?;
            if !is_positive(&q) {
                continue;
            }
            match s.side {
                Side::Hot => iv.hot.push((s.id.clone(), q)),
                Side::Cold => iv.cold.push((s.id.clone(), q)),
            }
        }
        if !covered {
            return Err(ModelError::SpansNoInterval(s.id.clone()));
        }
    }

    place_utilities(&mut out, utilities, dt_min);
    Ok(out)
}

fn place_utilities<S: Scalar>(out: &mut [IntervalLoads<S>], utilities: &[Utility<S>], dt_min: &S) {
    if out.is_empty() {
        return;
    }
    let last = out.len() - 1;
    let hottest = utilities
        .iter()
        .filter(|u| u.side == Side::Hot)
        .max_by(|a, b| cmp_opt(&a.temperature, &b.temperature));
    let coldest = utilities
        .iter()
        .filter(|u| u.side == Side::Cold)
        .min_by(|a, b| cmp_opt(&a.temperature, &b.temperature));

    for u in utilities {
        let slot = match u.side {
            Side::Hot if Some(u) == hottest => 0,
            Side::Cold if Some(u) == coldest => last,
            Side::Hot => match &u.temperature {
                Some(t) => out.iter().position(|iv| iv.interval.t_hi <= *t).unwrap_or(last),
                None => 0,
            },
            Side::Cold => match &u.temperature {
                Some(t) => {
                    let shifted = t.clone() + dt_min.clone();
                    out.iter().rposition(|iv| iv.interval.t_lo >= shifted).unwrap_or(0)
                }
                None => last,
            },
        };
        match u.side {
            Side::Hot => out[slot].hot_utilities.push(u.id.clone()),
            Side::Cold => out[slot].cold_utilities.push(u.id.clone()),
        }
    }
}

// Missing temperatures sort below any given one.
fn cmp_opt<S: Scalar>(a: &Option<S>, b: &Option<S>) -> std::cmp::Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal),
        (Some(_), None) => std::cmp::Ordering::Greater,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (None, None) => std::cmp::Ordering::Equal,
    }
}
