//! Open domains `Omega in C^d` with a distance-to-complement oracle in the
//! sup norm `|z|_inf = max_k |z_k|`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// An open subset of `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarDomain {
    Entire,
    /// `re z > a`.
    HalfPlane { a: f64 },
    /// `|z - c| > r`.
    DiscComplement { c: Complex64, r: f64 },
    /// `r1 < |z| < r2`.
    Annulus { r1: f64, r2: f64 },
    /// `|z - c| < r`.
    Disc { c: Complex64, r: f64 },
}

impl ScalarDomain {
    /// Distance from `z` to `C \ Omega`; nonpositive outside, infinite for `C`.
    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            ScalarDomain::Entire => f64::INFINITY,
            ScalarDomain::HalfPlane { a } => z.re - a,
            ScalarDomain::DiscComplement { c, r } => (z - c).norm() - r,
            ScalarDomain::Annulus { r1, r2 } => (z.norm() - r1).min(r2 - z.norm()),
            ScalarDomain::Disc { c, r } => r - (z - c).norm(),
        }
    }

    /// Parses `entire`, `halfplane A`, `disc_complement RE IM R`,
    /// `annulus R1 R2`, `disc RE IM R`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut it = s.split_whitespace();
        let kind = it.next().unwrap_or("");
        let nums: Vec<f64> = it
            .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidParameter(format!("bad number {t:?} in domain {s:?}"))))
            .collect::<Result<_>>()?;
        let want = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("domain {kind:?} takes {n} numbers, got {}", nums.len())))
            }
        };
        let d = match kind {
            "entire" => {
                want(0)?;
                ScalarDomain::Entire
            }
            "halfplane" => {
                want(1)?;
                ScalarDomain::HalfPlane { a: nums[0] }
            }
            "disc_complement" => {
                want(3)?;
                ScalarDomain::DiscComplement { c: Complex64::new(nums[0], nums[1]), r: nums[2] }
            }
            "annulus" => {
                want(2)?;
                ScalarDomain::Annulus { r1: nums[0], r2: nums[1] }
            }
            "disc" => {
                want(3)?;
                ScalarDomain::Disc { c: Complex64::new(nums[0], nums[1]), r: nums[2] }
            }
            _ => return Err(Error::InvalidParameter(format!("unknown domain {s:?}"))),
        };
        Ok(d)
    }
}

type Predicate = Arc<dyn Fn(&[Complex64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum Domain {
    /// `Omega_1 x ... x Omega_d`.
    Product(Vec<ScalarDomain>),
    /// `C^d` minus the closed polydisc of radius `r` around `center`.
    PolydiscComplement { center: Vec<Complex64>, r: f64 },
    /// Membership test only; the distance is found by radial bisection.
    /// Limited to `d = 1`.
    Custom { arity: usize, contains: Predicate, search_radius: f64 },
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Product(p) => f.debug_tuple("Product").field(p).finish(),
            Domain::PolydiscComplement { center, r } => {
                f.debug_struct("PolydiscComplement").field("center", center).field("r", r).finish()
            }
            Domain::Custom { arity, search_radius, .. } => {
                f.debug_struct("Custom").field("arity", arity).field("search_radius", search_radius).finish()
            }
        }
    }
}

const DIRECTIONS: usize = 64;
const BISECTION_TOL: f64 = 1e-9;

impl Domain {
    pub fn entire(d: usize) -> Self {
        Domain::Product(vec![ScalarDomain::Entire; d])
    }

    pub fn custom<F>(contains: F, search_radius: f64) -> Self
    where
        F: Fn(&[Complex64]) -> bool + Send + Sync + 'static,
    {
        Domain::Custom { arity: 1, contains: Arc::new(contains), search_radius }
    }

    pub fn arity(&self) -> usize {
        match self {
            Domain::Product(p) => p.len(),
            Domain::PolydiscComplement { center, .. } => center.len(),
            Domain::Custom { arity, .. } => *arity,
        }
    }

    pub fn is_entire(&self) -> bool {
        matches!(self, Domain::Product(p) if p.iter().all(|d| *d == ScalarDomain::Entire))
    }

    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            Domain::Custom { contains, .. } => contains(z),
            _ => self.distance(z) > 0.0,
        }
    }

    /// Sup-norm distance from `z` to `C^d \ Omega`.
    pub fn distance(&self, z: &[Complex64]) -> f64 {
        match self {
            // the complement is the union of {w : w_k not in Omega_k}
            Domain::Product(p) => p.iter().zip(z).map(|(d, &zk)| d.distance(zk)).fold(f64::INFINITY, f64::min),
            Domain::PolydiscComplement { center, r } => {
                center.iter().zip(z).map(|(c, zk)| (zk - c).norm() - r).fold(f64::NEG_INFINITY, f64::max)
            }
            Domain::Custom { contains, search_radius, .. } => {
                if !contains(z) {
                    return 0.0;
                }
                radial_distance(&|w| contains(&[w]), z[0], *search_radius)
            }
        }
    }
}

/// First exit along the ray `z + t e^{i phi}`, or `limit` if none is found.
fn exit_along(contains: &dyn Fn(Complex64) -> bool, z: Complex64, phi: f64, limit: f64) -> f64 {
    let dir = Complex64::from_polar(1.0, phi);
    let mut inside = 0.0;
    let mut t = limit * 1e-6;
    while t < limit {
        if !contains(z + dir * t) {
            let mut outside = t;
            while outside - inside > BISECTION_TOL * outside.max(1.0) {
                let mid = 0.5 * (inside + outside);
                if contains(z + dir * mid) {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            return 0.5 * (inside + outside);
        }
        inside = t;
        t *= 1.25;
    }
    limit
}

/// Radial bisection over evenly spaced directions, then golden-section
/// refinement around the closest one.
fn radial_distance(contains: &dyn Fn(Complex64) -> bool, z: Complex64, limit: f64) -> f64 {
    let step = TAU / DIRECTIONS as f64;
    let (best_j, best) = (0..DIRECTIONS)
        .map(|j| (j, exit_along(contains, z, j as f64 * step, limit)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if best >= limit {
        return f64::INFINITY;
    }
    let f = |phi: f64| exit_along(contains, z, phi, limit);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((best_j as f64 - 1.0) * step, (best_j as f64 + 1.0) * step);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-7 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    best.min(fc).min(fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_distances() {
        assert_eq!(ScalarDomain::HalfPlane { a: 1.0 }.distance(c(3.0, 7.0)), 2.0);
        assert_eq!(ScalarDomain::DiscComplement { c: c(0.0, 0.0), r: 0.5 }.distance(c(1.0, 0.0)), 0.5);
        assert_eq!(ScalarDomain::Annulus { r1: 1.0, r2: 4.0 }.distance(c(0.0, 2.0)), 1.0);
        assert!(ScalarDomain::Disc { c: c(1.0, 0.0), r: 1.0 }.distance(c(3.0, 0.0)) < 0.0);
        assert_eq!(ScalarDomain::Entire.distance(c(1e9, 0.0)), f64::INFINITY);
    }

    #[test]
    fn product_and_polydisc() {
        let d = Domain::Product(vec![ScalarDomain::HalfPlane { a: 0.0 }, ScalarDomain::DiscComplement { c: c(0.0, 0.0), r: 1.0 }]);
        assert_eq!(d.distance(&[c(5.0, 0.0), c(3.0, 0.0)]), 2.0);
        let p = Domain::PolydiscComplement { center: vec![c(0.0, 0.0); 2], r: 1.0 };
        assert_eq!(p.distance(&[c(0.5, 0.0), c(3.0, 0.0)]), 2.0);
        assert!(!p.contains(&[c(0.5, 0.0), c(0.2, 0.0)]));
        assert!(Domain::entire(2).is_entire());
    }

    #[test]
    fn parse_library_domains() {
        assert_eq!(ScalarDomain::parse("halfplane 0.5").unwrap(), ScalarDomain::HalfPlane { a: 0.5 });
        assert_eq!(ScalarDomain::parse("disc_complement 0 0 0.5").unwrap(), ScalarDomain::DiscComplement { c: c(0.0, 0.0), r: 0.5 });
        assert_eq!(ScalarDomain::parse("annulus 1 2").unwrap(), ScalarDomain::Annulus { r1: 1.0, r2: 2.0 });
        assert!(ScalarDomain::parse("annulus 1").is_err());
        assert!(ScalarDomain::parse("strip 1 2").is_err());
    }

    #[test]
    fn custom_disc_matches_closed_form() {
        let d = Domain::custom(|z| z[0].norm() > 0.5, 100.0);
        for z in [c(1.0, 0.0), c(0.3, -0.9), c(-2.0, 1.0)] {
            let exact = z.norm() - 0.5;
            assert!((d.distance(&[z]) - exact).abs() < 1e-6, "{z}");
        }
        assert_eq!(d.distance(&[c(0.1, 0.0)]), 0.0);
        assert_eq!(Domain::custom(|_| true, 10.0).distance(&[c(0.0, 0.0)]), f64::INFINITY);
    }

    #[test]
    fn star_shaped_bisection_matches_dense_boundary() {
        let rho = |t: f64| 1.0 + 0.3 * (3.0 * t).cos();
        let d = Domain::custom(move |z| z[0].norm() < rho(z[0].arg()), 10.0);
        let boundary: Vec<Complex64> = (0..200_000)
            .map(|j| {
                let t = TAU * j as f64 / 200_000.0;
                Complex64::from_polar(rho(t), t)
            })
            .collect();
        for z in [c(0.0, 0.0), c(0.4, 0.1), c(-0.3, 0.5), c(0.9, 0.0)] {
            let oracle = boundary.iter().map(|b| (b - z).norm()).fold(f64::INFINITY, f64::min);
            let got = d.distance(&[z]);
            assert!((got - oracle).abs() < 1e-5, "{z}: {got} vs {oracle}");
        }
    }
}
