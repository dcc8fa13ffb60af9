#![allow(dead_code)]

use invis_core::body::{build_invisible_body, Body2D};
use invis_core::conics::make_confocal_pair;
use proptest::prelude::*;

pub fn canonical() -> Body2D<f64> {
    build_invisible_body(&make_confocal_pair(2.0, 3f64.sqrt()).unwrap(), 0.8).unwrap()
}

/// `φ_B` a fraction `frac` of the way from `φ_H` to the asymptote.
pub fn body_from(a: f64, ratio: f64, frac: f64) -> Body2D<f64> {
    let pair = make_confocal_pair(a, a * ratio).unwrap();
    let phi_b = pair.phi_h() + frac * (pair.asymptote_angle() - pair.phi_h());
    build_invisible_body(&pair, phi_b).unwrap()
}

pub fn bodies() -> impl Strategy<Value = Body2D<f64>> {
    (1.0f64..10.0, 0.2f64..0.95, 0.1f64..0.9).prop_map(|(a, r, f)| body_from(a, r, f))
}

/// Focal radii about the left focus, written out from the polar equations
/// of the two conics rather than taken from the library.
pub struct Polar {
    pub a: f64,
    pub b: f64,
}

impl Polar {
    fn c(&self) -> f64 {
        (self.a * self.a - self.b * self.b).sqrt()
    }

    pub fn ellipse(&self, theta: f64) -> f64 {
        let e = self.c() / self.a;
        self.b * self.b / self.a / (1.0 - e * theta.cos())
    }

    pub fn hyperbola(&self, theta: f64) -> f64 {
        let c = self.c();
        let alpha = c * c / self.a;
        let beta = self.b * c / self.a;
        let e = c / alpha;
        let d = e * theta.cos() - 1.0;
        if d > 0.0 {
            beta * beta / alpha / d
        } else {
            f64::INFINITY
        }
    }

    /// Signed clearance of a point (given in polar form about `F1`) inside
    /// the closed triangle pair scaled by `s`: positive inside.
    pub fn clearance(&self, rho: f64, theta: f64, phi_h: f64, phi_b: f64, s: f64) -> f64 {
        let t = theta.abs();
        let angular = (t - phi_h).min(phi_b - t) * rho;
        angular
            .min(rho - s * self.ellipse(t))
            .min(s * self.hyperbola(t) - rho)
    }
}
