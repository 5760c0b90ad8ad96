//! Great-circle helpers.

use core::fmt;

use serde::{Deserialize, Serialize};

/// Mean earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// A WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLng {
    pub lat: f64,
    pub lng: f64,
}

impl LatLng {
    pub const fn new(lat: f64, lng: f64) -> Self {
        Self { lat, lng }
    }

    /// True when both components are finite and inside their ranges.
    pub fn is_valid(&self) -> bool {
        self.lat.is_finite()
            && self.lng.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lng)
    }
}

impl fmt::Display for LatLng {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lat, self.lng)
    }
}

/// Haversine distance in meters.
pub fn haversine(a: LatLng, b: LatLng) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlng = (b.lng - a.lng).to_radians();

    let s_lat = libm::sin(dlat / 2.0);
    let s_lng = libm::sin(dlng / 2.0);
    let h = s_lat * s_lat + libm::cos(lat1) * libm::cos(lat2) * s_lng * s_lng;

    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h.clamp(0.0, 1.0)))
}

/// Point reached by travelling `distance_m` from `from` along the initial
/// `bearing_deg` (clockwise from north) on the sphere.
pub fn destination(from: LatLng, bearing_deg: f64, distance_m: f64) -> LatLng {
    let delta = distance_m / EARTH_RADIUS_M;
    let theta = bearing_deg.to_radians();
    let lat1 = from.lat.to_radians();
    let lng1 = from.lng.to_radians();

    let sin_lat2 =
        libm::sin(lat1) * libm::cos(delta) + libm::cos(lat1) * libm::sin(delta) * libm::cos(theta);
    let lat2 = libm::asin(sin_lat2.clamp(-1.0, 1.0));
    let lng2 = lng1
        + libm::atan2(
            libm::sin(theta) * libm::sin(delta) * libm::cos(lat1),
            libm::cos(delta) - libm::sin(lat1) * sin_lat2,
        );

    LatLng {
        lat: lat2.to_degrees(),
        lng: wrap_longitude(lng2.to_degrees()),
    }
}

/// Euclidean remainder for positive `m`: the result lies in [0, m].
pub(crate) fn rem_euclid(x: f64, m: f64) -> f64 {
    let r = libm::fmod(x, m);
    if r < 0.0 {
        r + m
    } else {
        r
    }
}

/// Wraps a longitude into [-180, 180).
pub fn wrap_longitude(lng: f64) -> f64 {
    let w = rem_euclid(lng + 180.0, 360.0) - 180.0;
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Signed change from heading `from` to heading `to`, in [-180, 180).
pub fn heading_change(from: f64, to: f64) -> f64 {
    let d = rem_euclid(to - from + 180.0, 360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if d >= 180.0 {
        d - 360.0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_points_are_zero_apart() {
        let p = LatLng::new(39.96, -83.0);
        assert_eq!(haversine(p, p), 0.0);
    }

    #[test]
    fn one_degree_of_longitude_on_the_equator() {
        // R * pi / 180
        let expected = EARTH_RADIUS_M * core::f64::consts::PI / 180.0;
        let d = haversine(LatLng::new(0.0, 0.0), LatLng::new(0.0, 1.0));
        assert!((d - expected).abs() < 1e-6, "{d} vs {expected}");
        assert!((d - 111_195.0).abs() < 10.0);
    }

    #[test]
    fn heading_wraps_through_north() {
        assert_eq!(heading_change(350.0, 10.0), 20.0);
        assert_eq!(heading_change(10.0, 350.0), -20.0);
        assert_eq!(heading_change(0.0, 180.0), -180.0);
        assert_eq!(heading_change(90.0, 90.0), 0.0);
    }

    #[test]
    fn destination_inverts_haversine() {
        let start = LatLng::new(39.96, -83.0);
        for bearing in [0.0, 45.0, 133.0, 270.0] {
            let end = destination(start, bearing, 250.0);
            assert!((haversine(start, end) - 250.0).abs() < 1e-6);
        }
    }

    fn coord() -> impl Strategy<Value = LatLng> {
        (-89.0f64..89.0, -179.9f64..179.9).prop_map(|(lat, lng)| LatLng::new(lat, lng))
    }

    proptest! {
        #[test]
        fn symmetric_and_non_negative(a in coord(), b in coord()) {
            let ab = haversine(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, haversine(b, a));
        }

        #[test]
        fn triangle_inequality(a in coord(), b in coord(), c in coord()) {
            let ac = haversine(a, c);
            let bound = haversine(a, b) + haversine(b, c);
            prop_assert!(ac <= bound * (1.0 + 1e-6) + 1e-6, "{} > {}", ac, bound);
        }

        #[test]
        fn heading_change_in_range(a in 0.0f64..360.0, b in 0.0f64..360.0) {
            let d = heading_change(a, b);
            prop_assert!((-180.0..180.0).contains(&d));
            let back = (a + d).rem_euclid(360.0);
            prop_assert!(heading_change(back, b).abs() < 1e-9);
        }
    }
}
