//! Spherical geometry on the WGS84 mean-radius sphere.

use serde::{Deserialize, Serialize};

/// WGS84 mean earth radius in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// A WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

impl LatLon {
    pub fn new(lat: f64, lon: f64) -> Self {
        LatLon { lat, lon }
    }
}

/// Great-circle distance in metres between two coordinates.
pub fn haversine(a: LatLon, b: LatLon) -> f64 {
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();

    let s = (dphi / 2.0).sin().powi(2)
        + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * s.sqrt().asin()
}

/// Point a fraction `f` of the way along the great circle from `a` to `b`.
///
/// Spherical linear interpolation, so the arc from `a` to the result is
/// exactly `f` times the arc from `a` to `b`.
pub fn intermediate_point(a: LatLon, b: LatLon, f: f64) -> LatLon {
    let phi1 = a.lat.to_radians();
    let lam1 = a.lon.to_radians();
    let phi2 = b.lat.to_radians();
    let lam2 = b.lon.to_radians();

    let delta = haversine(a, b) / EARTH_RADIUS_M;
    if delta < 1e-15 {
        return a;
    }
    let sin_delta = delta.sin();
    let ca = ((1.0 - f) * delta).sin() / sin_delta;
    let cb = (f * delta).sin() / sin_delta;

    let x = ca * phi1.cos() * lam1.cos() + cb * phi2.cos() * lam2.cos();
    let y = ca * phi1.cos() * lam1.sin() + cb * phi2.cos() * lam2.sin();
    let z = ca * phi1.sin() + cb * phi2.sin();

    LatLon {
        lat: z.atan2((x * x + y * y).sqrt()).to_degrees(),
        lon: y.atan2(x).to_degrees(),
    }
}

/// Total arc length of a polyline in metres.
pub fn polyline_length(vertices: &[LatLon]) -> f64 {
    vertices
        .windows(2)
        .map(|w| haversine(w[0], w[1]))
        .sum()
}

/// Point at arc-length `distance_m` along a polyline; clamps to the ends.
pub fn point_along_polyline(vertices: &[LatLon], distance_m: f64) -> LatLon {
    debug_assert!(vertices.len() >= 2);
    if distance_m <= 0.0 {
        return vertices[0];
    }
    let mut remaining = distance_m;
    for w in vertices.windows(2) {
        let seg = haversine(w[0], w[1]);
        if seg >= remaining {
            return intermediate_point(w[0], w[1], remaining / seg);
        }
        remaining -= seg;
    }
    *vertices.last().unwrap()
}

/// Even-odd (ray casting) point-in-polygon test across all rings.
///
/// Rings use [lon, lat] vertex order internally stored as [`LatLon`];
/// points falling exactly on an edge are resolved by the half-open rule.
pub fn point_in_rings(point: LatLon, rings: &[Vec<LatLon>]) -> bool {
    let mut inside = false;
    for ring in rings {
        // ignore the closing vertex so each edge is counted once
        let n = if ring.len() > 1 && ring[0] == ring[ring.len() - 1] {
            ring.len() - 1
        } else {
            ring.len()
        };
        let mut j = n - 1;
        for i in 0..n {
            let (xi, yi) = (ring[i].lon, ring[i].lat);
            let (xj, yj) = (ring[j].lon, ring[j].lat);
            if ((yi > point.lat) != (yj > point.lat))
                && point.lon < (xj - xi) * (point.lat - yi) / (yj - yi) + xi
            {
                inside = !inside;
            }
            j = i;
        }
    }
    inside
}

/// Area of one closed ring on the sphere, in km², by the
/// Chamberlain–Duquette line integral. Sign follows winding order.
pub fn ring_area_km2(ring: &[LatLon]) -> f64 {
    let n = if ring.len() > 1 && ring[0] == ring[ring.len() - 1] {
        ring.len() - 1
    } else {
        ring.len()
    };
    if n < 3 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let lo = ring[(i + n - 1) % n];
        let hi = ring[(i + 1) % n];
        total += (hi.lon - lo.lon).to_radians() * ring[i].lat.to_radians().sin();
    }
    total * EARTH_RADIUS_M * EARTH_RADIUS_M / 2.0 / 1e6
}

/// Net unsigned area of a set of rings in km². With GeoJSON winding
/// (exterior counter-clockwise, holes clockwise) holes subtract.
pub fn rings_area_km2(rings: &[Vec<LatLon>]) -> f64 {
    rings.iter().map(|r| ring_area_km2(r)).sum::<f64>().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ll(lat: f64, lon: f64) -> LatLon {
        LatLon::new(lat, lon)
    }

    #[test]
    fn haversine_identity_is_zero() {
        assert_eq!(haversine(ll(12.5, -70.25), ll(12.5, -70.25)), 0.0);
    }

    #[test]
    fn haversine_small_longitude_arc() {
        // arc length oracle: R * delta_lambda along the equator
        let expected = EARTH_RADIUS_M * 0.001_f64.to_radians();
        let got = haversine(ll(0.0, 0.0), ll(0.0, 0.001));
        assert_relative_eq!(got, expected, max_relative = 1e-9);
        assert_relative_eq!(got, 111.19508023353291, max_relative = 1e-9);
    }

    #[test]
    fn haversine_symmetric() {
        let pairs = [
            (ll(51.5, -0.1), ll(48.85, 2.35)),
            (ll(-33.9, 151.2), ll(35.7, 139.7)),
            (ll(0.001, 0.0), ll(-0.001, 0.0)),
        ];
        for (a, b) in pairs {
            assert_eq!(haversine(a, b), haversine(b, a));
        }
    }

    #[test]
    fn intermediate_point_splits_arc_proportionally() {
        let a = ll(10.0, 20.0);
        let b = ll(10.5, 20.7);
        let total = haversine(a, b);
        for f in [0.0, 0.25, 0.5, 0.8, 1.0] {
            let p = intermediate_point(a, b, f);
            assert_relative_eq!(haversine(a, p), f * total, epsilon = 1e-7);
        }
    }

    #[test]
    fn point_along_polyline_walks_segments() {
        // two segments of ~111.19 m each along the equator
        let line = vec![ll(0.0, 0.0), ll(0.0, 0.001), ll(0.0, 0.002)];
        let total = polyline_length(&line);
        let mid = point_along_polyline(&line, total / 2.0);
        assert_relative_eq!(mid.lon, 0.001, epsilon = 1e-9);
        let past = point_along_polyline(&line, total * 2.0);
        assert_eq!(past, ll(0.0, 0.002));
    }

    #[test]
    fn point_in_rings_even_odd() {
        let square = vec![vec![
            ll(0.0, 0.0),
            ll(0.0, 1.0),
            ll(1.0, 1.0),
            ll(1.0, 0.0),
            ll(0.0, 0.0),
        ]];
        assert!(point_in_rings(ll(0.5, 0.5), &square));
        assert!(!point_in_rings(ll(1.5, 0.5), &square));
        assert!(!point_in_rings(ll(-0.5, 0.5), &square));

        // square with a hole: even-odd flips twice
        let with_hole = vec![
            square[0].clone(),
            vec![
                ll(0.25, 0.25),
                ll(0.25, 0.75),
                ll(0.75, 0.75),
                ll(0.75, 0.25),
                ll(0.25, 0.25),
            ],
        ];
        assert!(!point_in_rings(ll(0.5, 0.5), &with_hole));
        assert!(point_in_rings(ll(0.1, 0.1), &with_hole));
    }

    #[test]
    fn ring_area_matches_planar_approximation() {
        // 0.1 x 0.1 degree square at latitude 45: planar area with
        // metric scaling cos(45.05 deg), good to ~0.1% at this size
        let lat0: f64 = 45.0;
        let ring = vec![
            ll(lat0, 0.0),
            ll(lat0, 0.1),
            ll(lat0 + 0.1, 0.1),
            ll(lat0 + 0.1, 0.0),
            ll(lat0, 0.0),
        ];
        let deg_m = EARTH_RADIUS_M * 1.0_f64.to_radians();
        let expected =
            (0.1 * deg_m) * (0.1 * deg_m * (lat0 + 0.05).to_radians().cos()) / 1e6;
        let got = rings_area_km2(&[ring]);
        assert_relative_eq!(got, expected, max_relative = 2e-3);
    }

    #[test]
    fn ring_area_winding_cancels_holes() {
        let outer = vec![
            ll(0.0, 0.0),
            ll(0.0, 1.0),
            ll(1.0, 1.0),
            ll(1.0, 0.0),
            ll(0.0, 0.0),
        ];
        // hole wound the opposite way
        let hole: Vec<LatLon> = vec![
            ll(0.25, 0.25),
            ll(0.75, 0.25),
            ll(0.75, 0.75),
            ll(0.25, 0.75),
            ll(0.25, 0.25),
        ];
        let full = rings_area_km2(&[outer.clone()]);
        let with_hole = rings_area_km2(&[outer, hole.clone()]);
        let hole_area = rings_area_km2(&[hole]);
        assert_relative_eq!(with_hole, full - hole_area, max_relative = 1e-9);
    }
}
