//! Distance and geodesics on any rooted metric tree.
//!
//! A point is stored as the vertex directly below it together with its
//! distance `up` towards that vertex's parent. Its height is the distance
//! from the root. Two points meet at the deepest point common to both root
//! paths, and every formula below is expressed through that meeting height.

/// Vertex arithmetic a rooted tree has to provide.
pub(crate) trait Rooted {
    type V: Clone + PartialEq;

    fn root_dist(&self, v: &Self::V) -> f64;
    fn parent(&self, v: &Self::V) -> Option<Self::V>;
    /// `a` lies on the root path of `b` (or equals it).
    fn is_ancestor(&self, a: &Self::V, b: &Self::V) -> bool;
    fn lca(&self, a: &Self::V, b: &Self::V) -> Self::V;
}

/// Snap threshold for positions that land on a vertex.
pub(crate) const SNAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Anchored<V> {
    pub below: V,
    pub up: f64,
}

impl<V> Anchored<V> {
    pub fn vertex(v: V) -> Self {
        Anchored { below: v, up: 0.0 }
    }
}

pub(crate) fn height<T: Rooted>(tree: &T, p: &Anchored<T::V>) -> f64 {
    tree.root_dist(&p.below) - p.up
}

pub(crate) fn meet_height<T: Rooted>(tree: &T, a: &Anchored<T::V>, b: &Anchored<T::V>) -> f64 {
    let ha = height(tree, a);
    let hb = height(tree, b);
    if a.below == b.below {
        ha.min(hb)
    } else if tree.is_ancestor(&a.below, &b.below) {
        ha
    } else if tree.is_ancestor(&b.below, &a.below) {
        hb
    } else {
        tree.root_dist(&tree.lca(&a.below, &b.below))
    }
}

pub(crate) fn distance<T: Rooted>(tree: &T, a: &Anchored<T::V>, b: &Anchored<T::V>) -> f64 {
    let hm = meet_height(tree, a, b);
    (height(tree, a) + height(tree, b) - 2.0 * hm).max(0.0)
}

/// The point at height `h` on the root path of `v`, for `h <= root_dist(v)`.
pub(crate) fn point_at_height<T: Rooted>(tree: &T, v: &T::V, h: f64) -> Anchored<T::V> {
    let mut cur = v.clone();
    loop {
        let r = tree.root_dist(&cur);
        if r - h <= SNAP {
            return Anchored::vertex(cur);
        }
        match tree.parent(&cur) {
            Some(p) if tree.root_dist(&p) >= h => cur = p,
            Some(_) => {
                return Anchored {
                    below: cur,
                    up: r - h,
                }
            }
            None => return Anchored::vertex(cur),
        }
    }
}

/// The point at arc length `t d(a, b)` from `a` towards `b`.
pub(crate) fn interpolate<T: Rooted>(
    tree: &T,
    a: &Anchored<T::V>,
    b: &Anchored<T::V>,
    t: f64,
) -> Anchored<T::V> {
    if t <= 0.0 {
        return a.clone();
    }
    if t >= 1.0 {
        return b.clone();
    }
    let ha = height(tree, a);
    let hb = height(tree, b);
    let hm = meet_height(tree, a, b);
    let s = t * (ha + hb - 2.0 * hm);
    let climb = ha - hm;
    if s <= climb {
        point_at_height(tree, &a.below, ha - s)
    } else {
        point_at_height(tree, &b.below, hm + (s - climb))
    }
}
