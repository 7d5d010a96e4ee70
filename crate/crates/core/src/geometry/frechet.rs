use super::{check_unit_interval, GeodesicSpace, WeightedDataset};
use crate::error::{GeoError, Result};

/// `sum_i w_i d(x_i, z)^2`.
pub fn frechet_functional<S: GeodesicSpace>(
    space: &S,
    data: &WeightedDataset<S::Point>,
    z: &S::Point,
) -> Result<f64> {
    if data.is_empty() {
        return Err(GeoError::domain("empty dataset"));
    }
    Ok(data
        .iter()
        .map(|(x, w)| {
            let d = space.distance(x, z);
            w * d * d
        })
        .sum())
}

/// Exhaustive minimisation of the Fréchet functional over `candidates`.
///
/// Ties keep the first candidate in iteration order.
pub fn brute_force_frechet_mean<'a, S, I>(
    space: &S,
    data: &WeightedDataset<S::Point>,
    candidates: I,
) -> Result<(S::Point, f64)>
where
    S: GeodesicSpace,
    S::Point: 'a,
    I: IntoIterator<Item = &'a S::Point>,
{
    let mut best: Option<(&S::Point, f64)> = None;
    for c in candidates {
        let value = frechet_functional(space, data, c)?;
        match best {
            Some((_, v)) if v <= value => {}
            _ => best = Some((c, value)),
        }
    }
    best.map(|(p, v)| (p.clone(), v))
        .ok_or_else(|| GeoError::domain("empty candidate set"))
}

/// Slack of the CAT(0) inequality,
/// `(1-t) d(x,z)^2 + t d(y,z)^2 - t(1-t) d(x,y)^2 - d([x,y]_t, z)^2`.
///
/// Nonnegative in a Hadamard space and zero in a flat one.
pub fn cat0_slack<S: GeodesicSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
    t: f64,
) -> Result<f64> {
    check_unit_interval(t)?;
    let dxz = space.distance(x, z);
    let dyz = space.distance(y, z);
    let dxy = space.distance(x, y);
    let m = space.interpolate(x, y, t);
    let dmz = space.distance(&m, z);
    Ok((1.0 - t) * dxz * dxz + t * dyz * dyz - t * (1.0 - t) * dxy * dxy - dmz * dmz)
}

/// `(1-t) d(x,w) + t d(y,z) - d([x,y]_t, [w,z]_t)`; nonnegative in Hadamard spaces.
pub fn pair_convexity_gap<S: GeodesicSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    w: &S::Point,
    z: &S::Point,
    t: f64,
) -> Result<f64> {
    check_unit_interval(t)?;
    let a = space.interpolate(x, y, t);
    let b = space.interpolate(w, z, t);
    Ok((1.0 - t) * space.distance(x, w) + t * space.distance(y, z) - space.distance(&a, &b))
}

/// Fréchet mean of a finitely supported law, minimised over `candidates`.
pub fn conditional_frechet_mean_discrete<'a, S, I>(
    space: &S,
    support: &[S::Point],
    probs: &[f64],
    candidates: I,
) -> Result<S::Point>
where
    S: GeodesicSpace,
    S::Point: 'a,
    I: IntoIterator<Item = &'a S::Point>,
{
    if probs.iter().any(|p| *p < 0.0) {
        return Err(GeoError::domain("negative probability"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(GeoError::domain(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    let data = WeightedDataset::new(support.to_vec(), probs.to_vec())?;
    brute_force_frechet_mean(space, &data, candidates).map(|(p, _)| p)
}
