//! Spatial maps that weight the filter before it meets the training samples.
//!
//! Every map is laid out with the target centre at the grid origin. A cell
//! with wrapped signed offset `p` lies inside a centred extent `E` (in cells)
//! when `-E/2 <= p < E/2`, so an integer extent always covers exactly `E`
//! cells and a map of extent equal to the target reproduces its area.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spectral::{signed_offset, RealPlane};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Binary,
    Rquadratic,
    Ours,
    Custom,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Binary => "binary",
            MapKind::Rquadratic => "rquadratic",
            MapKind::Ours => "ours",
            MapKind::Custom => "custom",
        })
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binary" => Ok(MapKind::Binary),
            "rquadratic" => Ok(MapKind::Rquadratic),
            "ours" | "our_map" => Ok(MapKind::Ours),
            other => Err(Error::config(format!("unknown map kind `{other}` (binary|rquadratic|ours)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapParams {
    pub nu: f64,
    pub delta: f64,
    pub expansion: f64,
}

impl Default for MapParams {
    fn default() -> Self {
        Self { nu: 0.2, delta: 3.0, expansion: 1.6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpatialMap {
    plane: RealPlane,
    kind: MapKind,
    params: Option<MapParams>,
}

impl SpatialMap {
    /// Wraps an arbitrary finite plane as a map.
    pub fn custom(plane: RealPlane) -> Result<Self> {
        if !plane.is_finite() {
            return Err(Error::invalid("spatial map contains non-finite values"));
        }
        Ok(Self { plane, kind: MapKind::Custom, params: None })
    }

    pub fn plane(&self) -> &RealPlane {
        &self.plane
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn params(&self) -> Option<MapParams> {
        self.params
    }

    pub fn dims(&self) -> (usize, usize) {
        self.plane.dims()
    }

    /// Builds one of the built-in variants.
    pub fn build(kind: MapKind, grid: (usize, usize), target: (f64, f64), params: MapParams) -> Result<Self> {
        match kind {
            MapKind::Binary => binary_map(grid, target),
            MapKind::Rquadratic => rquadratic_map(grid, target, params.nu, params.delta),
            MapKind::Ours => our_map(grid, target, params.nu, params.delta, params.expansion),
            MapKind::Custom => Err(Error::invalid("custom maps are built with SpatialMap::custom")),
        }
    }
}

#[inline]
fn inside(offset: isize, extent: f64) -> bool {
    let p = offset as f64;
    -extent / 2.0 <= p && p < extent / 2.0
}

fn check_dims(grid: (usize, usize), target: (f64, f64)) -> Result<()> {
    if grid.0 == 0 || grid.1 == 0 {
        return Err(Error::invalid("map grid must be non-empty"));
    }
    if !(target.0 > 0.0 && target.1 > 0.0) || !target.0.is_finite() || !target.1.is_finite() {
        return Err(Error::invalid(format!("target dims must be positive, got {target:?}")));
    }
    Ok(())
}

/// 1 on the centred target rectangle, 0 elsewhere. `grid` and `target` are
/// (rows, cols) in cells.
pub fn binary_map(grid: (usize, usize), target: (f64, f64)) -> Result<SpatialMap> {
    check_dims(grid, target)?;
    if target.0 > grid.0 as f64 || target.1 > grid.1 as f64 {
        return Err(Error::invalid(format!("target {target:?} larger than grid {grid:?}")));
    }
    let plane = RealPlane::from_fn(grid.0, grid.1, |r, c| {
        let hit = inside(signed_offset(r, grid.0), target.0) && inside(signed_offset(c, grid.1), target.1);
        if hit {
            1.0
        } else {
            0.0
        }
    });
    Ok(SpatialMap { plane, kind: MapKind::Binary, params: None })
}

fn rquadratic_plane(grid: (usize, usize), target: (f64, f64), nu: f64, delta: f64) -> Result<RealPlane> {
    check_dims(grid, target)?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("delta must be non-negative, got {delta}")));
    }
    let (height, width) = target;
    Ok(RealPlane::from_fn(grid.0, grid.1, |r, c| {
        let q = signed_offset(r, grid.0) as f64 / height;
        let p = signed_offset(c, grid.1) as f64 / width;
        1.0 / (nu + delta * p * p + delta * q * q)
    }))
}

/// `c(p, q) = 1 / (nu + delta (p/W)^2 + delta (q/H)^2)` with `p` the column
/// and `q` the row offset from the target centre, `W x H` the target size in
/// cells.
pub fn rquadratic_map(grid: (usize, usize), target: (f64, f64), nu: f64, delta: f64) -> Result<SpatialMap> {
    let plane = rquadratic_plane(grid, target, nu, delta)?;
    Ok(SpatialMap { plane, kind: MapKind::Rquadratic, params: Some(MapParams { nu, delta, expansion: f64::INFINITY }) })
}

/// The inverse-quadratic map truncated to zero outside a centred rectangle
/// `expansion` times the target size.
pub fn our_map(grid: (usize, usize), target: (f64, f64), nu: f64, delta: f64, expansion: f64) -> Result<SpatialMap> {
    if !(expansion > 0.0) {
        return Err(Error::invalid(format!("expansion must be positive, got {expansion}")));
    }
    let mut plane = rquadratic_plane(grid, target, nu, delta)?;
    let (er, ec) = (target.0 * expansion, target.1 * expansion);
    for r in 0..grid.0 {
        for c in 0..grid.1 {
            if !(inside(signed_offset(r, grid.0), er) && inside(signed_offset(c, grid.1), ec)) {
                plane.set(r, c, 0.0);
            }
        }
    }
    Ok(SpatialMap { plane, kind: MapKind::Ours, params: Some(MapParams { nu, delta, expansion }) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_full_coverage() {
        let m = binary_map((6, 5), (6.0, 5.0)).unwrap();
        assert!(m.plane().as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn binary_area() {
        let m = binary_map((8, 8), (2.0, 2.0)).unwrap();
        assert_eq!(m.plane().sum(), 4.0);
        for &(r, c) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert_eq!(m.plane().get(r, c), 1.0);
        }
        assert!(binary_map((8, 8), (9.0, 2.0)).is_err());
    }

    #[test]
    fn rquadratic_values() {
        let m = rquadratic_map((10, 10), (2.0, 4.0), 0.2, 3.0).unwrap();
        assert_eq!(m.plane().get(0, 0), 1.0 / 0.2);
        // p = W (four columns right), q = 0
        assert!((m.plane().get(0, 4) - 1.0 / 3.2).abs() < 1e-15);
        let m = rquadratic_map((10, 10), (2.0, 2.0), 0.5, 3.0).unwrap();
        assert!((m.plane().get(0, 2) - 1.0 / 3.5).abs() < 1e-15);
        let flat = rquadratic_map((7, 9), (2.0, 2.0), 0.25, 0.0).unwrap();
        assert!(flat.plane().as_slice().iter().all(|&v| v == 4.0));
        assert!(rquadratic_map((4, 4), (1.0, 1.0), 0.0, 1.0).is_err());
        assert!(rquadratic_map((4, 4), (1.0, 1.0), -1.0, 1.0).is_err());
    }

    #[test]
    fn our_map_truncates_outside_expanded_rectangle() {
        let (grid, target) = ((20, 20), (5.0, 5.0));
        let rq = rquadratic_map(grid, target, 0.2, 3.0).unwrap();
        let ours = our_map(grid, target, 0.2, 3.0, 1.6).unwrap();
        for r in 0..20 {
            for c in 0..20 {
                let (pr, pc) = (signed_offset(r, 20), signed_offset(c, 20));
                let within = (-4..4).contains(&pr) && (-4..4).contains(&pc);
                if within {
                    assert_eq!(ours.plane().get(r, c), rq.plane().get(r, c));
                } else {
                    assert_eq!(ours.plane().get(r, c), 0.0, "({r},{c})");
                }
            }
        }
    }

    #[test]
    fn large_expansion_is_untruncated() {
        let rq = rquadratic_map((12, 10), (3.0, 2.0), 0.2, 3.0).unwrap();
        let ours = our_map((12, 10), (3.0, 2.0), 0.2, 3.0, 5.0).unwrap();
        assert_eq!(rq.plane(), ours.plane());
    }

    #[test]
    fn map_kind_parsing() {
        assert_eq!("binary".parse::<MapKind>().unwrap(), MapKind::Binary);
        assert_eq!("Rquadratic".parse::<MapKind>().unwrap(), MapKind::Rquadratic);
        assert_eq!("ours".parse::<MapKind>().unwrap(), MapKind::Ours);
        assert!("gauss".parse::<MapKind>().is_err());
    }

    fn mirrored(p: &RealPlane) -> RealPlane {
        let (m, n) = p.dims();
        RealPlane::from_fn(m, n, |r, c| p.get((m - r) % m, (n - c) % n))
    }

    proptest! {
        #[test]
        fn binary_is_ours_with_unit_params(m in 1usize..16, n in 1usize..16, th in 0.5f64..1.0, tw in 0.5f64..1.0) {
            let target = ((m as f64 * th).max(0.5), (n as f64 * tw).max(0.5));
            let b = binary_map((m, n), target).unwrap();
            let o = our_map((m, n), target, 1.0, 0.0, 1.0).unwrap();
            prop_assert_eq!(b.plane(), o.plane());
        }

        #[test]
        fn binary_area_matches_integer_target(m in 1usize..16, n in 1usize..16, th in 1usize..16, tw in 1usize..16) {
            let (th, tw) = (th.min(m), tw.min(n));
            let b = binary_map((m, n), (th as f64, tw as f64)).unwrap();
            prop_assert_eq!(b.plane().sum(), (th * tw) as f64);
        }

        #[test]
        fn rquadratic_is_mirror_symmetric(m in 1usize..16, n in 1usize..16, th in 0.5f64..6.0, tw in 0.5f64..6.0) {
            let rq = rquadratic_map((m, n), (th, tw), 0.2, 3.0).unwrap();
            prop_assert_eq!(rq.plane(), &mirrored(rq.plane()));
        }

        #[test]
        fn odd_extent_maps_are_mirror_symmetric(m in 1usize..16, n in 1usize..16, th in 0usize..4, tw in 0usize..4) {
            let target = ((2 * th + 1) as f64, (2 * tw + 1) as f64);
            prop_assume!(target.0 <= m as f64 && target.1 <= n as f64);
            let b = binary_map((m, n), target).unwrap();
            prop_assert_eq!(b.plane(), &mirrored(b.plane()));
            let o = our_map((m, n), target, 0.2, 3.0, 1.0).unwrap();
            prop_assert_eq!(o.plane(), &mirrored(o.plane()));
        }

        #[test]
        fn our_map_support_is_bounded(m in 1usize..32, n in 1usize..32, th in 0.5f64..8.0, tw in 0.5f64..8.0) {
            let o = our_map((m, n), (th, tw), 0.2, 3.0, 1.6).unwrap();
            let nonzero = o.plane().as_slice().iter().filter(|&&v| v != 0.0).count();
            let bound = (1.6 * th).ceil() * (1.6 * tw).ceil();
            prop_assert!(nonzero as f64 <= bound);
            prop_assert!(o.plane().as_slice().iter().all(|&v| v >= 0.0 && v.is_finite()));
        }
    }
}
