//! The planar circular restricted 3-body problem in the co-rotating frame.
//!
//! The effective potential (with primaries of mass `1 - mu` at `(-mu, 0)`
//! and `mu` at `(1 - mu, 0)`) is
//! `V = -(x^2 + y^2)/2 - (1 - mu)/r1 - mu/r2`.
//! Its five critical points are the equilibria: the three collinear saddles
//! `L1` (between the primaries), `L2` (beyond the smaller), `L3` (beyond
//! the larger), and the triangular maxima `L4`, `L5` at distance one from
//! both primaries.

use crate::levelset::grid::GridField;

use super::MechanicsError;

pub fn rtbp_potential_value(mu: f64, x: f64, y: f64) -> f64 {
    let r1 = ((x + mu).powi(2) + y * y).sqrt();
    let r2 = ((x - 1.0 + mu).powi(2) + y * y).sqrt();
    -(x * x + y * y) / 2.0 - (1.0 - mu) / r1 - mu / r2
}

fn v_x(mu: f64, x: f64) -> f64 {
    // dV/dx on the axis y = 0
    let d1 = x + mu;
    let d2 = x - 1.0 + mu;
    -x + (1.0 - mu) * d1 / d1.abs().powi(3) + mu * d2 / d2.abs().powi(3)
}

/// Analytic Hessian of V.
fn hessian(mu: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let centers = [(-mu, 0.0, 1.0 - mu), (1.0 - mu, 0.0, mu)];
    let mut vxx = -1.0;
    let mut vyy = -1.0;
    let mut vxy = 0.0;
    for (cx, cy, m) in centers {
        let dx = x - cx;
        let dy = y - cy;
        let r2 = dx * dx + dy * dy;
        let r5 = r2.powf(2.5);
        vxx -= m * (3.0 * dx * dx - r2) / r5;
        vyy -= m * (3.0 * dy * dy - r2) / r5;
        vxy -= m * 3.0 * dx * dy / r5;
    }
    (vxx, vyy, vxy)
}

fn index_at(mu: f64, x: f64, y: f64) -> usize {
    let (vxx, vyy, vxy) = hessian(mu, x, y);
    let det = vxx * vyy - vxy * vxy;
    if det < 0.0 {
        1
    } else if vxx < 0.0 {
        2
    } else {
        0
    }
}

fn bisect(mu: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = v_x(mu, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = v_x(mu, mid);
        if (fmid > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// An equilibrium point with its analytically refined position.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub name: &'static str,
    pub location: (f64, f64),
    pub value: f64,
    pub index: usize,
}

#[derive(Debug)]
pub struct RtbpScenario {
    pub mu: f64,
    pub grid: GridField,
    pub equilibria: Vec<Equilibrium>,
    pub warnings: Vec<String>,
    /// Exclusion radius of the collision mask around each primary.
    pub mask_radius: f64,
}

impl RtbpScenario {
    /// Regular thresholds interleaving the distinct critical values, one
    /// below everything and one above everything.
    pub fn suggested_levels(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.equilibria.iter().map(|e| e.value).collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut levels = vec![values[0] - 0.1];
        for w in values.windows(2) {
            levels.push(0.5 * (w[0] + w[1]));
        }
        levels.push(values[values.len() - 1] + 0.1);
        levels
    }
}

/// Masked grid samples of the effective potential plus the five refined
/// equilibria. The mask removes points within two grid spacings of either
/// primary. Warns when the window misses an equilibrium.
pub fn rtbp_scenario(
    mu: f64,
    window: ((f64, f64), (f64, f64)),
    resolution: usize,
) -> Result<RtbpScenario, MechanicsError> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(MechanicsError::BadMassRatio(mu));
    }
    if resolution < 8 {
        return Err(MechanicsError::BadGrid(format!(
            "resolution {resolution} below 8"
        )));
    }
    let ((x0, x1), (y0, y1)) = window;
    if !(x1 > x0 && y1 > y0) {
        return Err(MechanicsError::BadGrid("window is empty".into()));
    }
    let n = resolution;
    let spacing = ((x1 - x0) / (n - 1) as f64, (y1 - y0) / (n - 1) as f64);
    let exclusion = 2.0 * spacing.0.max(spacing.1);
    let centers = [(-mu, 0.0), (1.0 - mu, 0.0)];
    let grid = GridField::sample(
        n,
        n,
        (x0, y0),
        spacing,
        |x, y| rtbp_potential_value(mu, x, y),
        |x, y| {
            centers
                .iter()
                .any(|&(cx, cy)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() < exclusion)
        },
    );

    // collinear points by bisection on the axis, staying off the primaries
    let eps = 1e-6;
    let l1x = bisect(mu, -mu + eps, 1.0 - mu - eps);
    let l2x = bisect(mu, 1.0 - mu + eps, 3.0);
    let l3x = bisect(mu, -4.0, -mu - eps);
    let tri = (0.5 - mu, (3.0f64).sqrt() / 2.0);
    let mut equilibria = vec![
        Equilibrium {
            name: "L1",
            location: (l1x, 0.0),
            value: rtbp_potential_value(mu, l1x, 0.0),
            index: index_at(mu, l1x, 0.0),
        },
        Equilibrium {
            name: "L2",
            location: (l2x, 0.0),
            value: rtbp_potential_value(mu, l2x, 0.0),
            index: index_at(mu, l2x, 0.0),
        },
        Equilibrium {
            name: "L3",
            location: (l3x, 0.0),
            value: rtbp_potential_value(mu, l3x, 0.0),
            index: index_at(mu, l3x, 0.0),
        },
        Equilibrium {
            name: "L4",
            location: tri,
            value: rtbp_potential_value(mu, tri.0, tri.1),
            index: index_at(mu, tri.0, tri.1),
        },
        Equilibrium {
            name: "L5",
            location: (tri.0, -tri.1),
            value: rtbp_potential_value(mu, tri.0, -tri.1),
            index: index_at(mu, tri.0, -tri.1),
        },
    ];
    equilibria.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut warnings = Vec::new();
    for e in &equilibria {
        let (x, y) = e.location;
        if x < x0 || x > x1 || y < y0 || y > y1 {
            warnings.push(format!("{} at ({x:.4}, {y:.4}) lies outside the window", e.name));
        }
    }
    Ok(RtbpScenario {
        mu,
        grid,
        equilibria,
        warnings,
        mask_radius: exclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_masses_have_symmetric_triangular_points() {
        let s = rtbp_scenario(0.5, ((-2.0, 2.0), (-2.0, 2.0)), 64).unwrap();
        let l4 = s.equilibria.iter().find(|e| e.name == "L4").unwrap();
        let l5 = s.equilibria.iter().find(|e| e.name == "L5").unwrap();
        assert!((l4.location.0 - l5.location.0).abs() < 1e-12);
        assert!((l4.location.1 + l5.location.1).abs() < 1e-12);
        assert!((l4.value - l5.value).abs() < 1e-12);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn indices_are_one_one_one_two_two() {
        let s = rtbp_scenario(0.2, ((-2.0, 2.0), (-2.0, 2.0)), 64).unwrap();
        for e in &s.equilibria {
            let expected = if e.name == "L4" || e.name == "L5" { 2 } else { 1 };
            assert_eq!(e.index, expected, "{}", e.name);
        }
        // the collinear values come first, the triangular maxima last
        let names: Vec<&str> = s.equilibria.iter().map(|e| e.name).collect();
        assert_eq!(&names[3..], &["L4", "L5"]);
    }

    #[test]
    fn gradient_vanishes_at_refined_points() {
        let mu = 0.2;
        let s = rtbp_scenario(mu, ((-2.0, 2.0), (-2.0, 2.0)), 64).unwrap();
        for e in &s.equilibria {
            if e.location.1 == 0.0 {
                assert!(v_x(mu, e.location.0).abs() < 1e-9, "{}", e.name);
            }
        }
    }

    #[test]
    fn small_window_warns() {
        let s = rtbp_scenario(0.2, ((-0.5, 0.5), (-0.5, 0.5)), 32).unwrap();
        assert!(!s.warnings.is_empty());
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(rtbp_scenario(0.0, ((-2.0, 2.0), (-2.0, 2.0)), 64).is_err());
        assert!(rtbp_scenario(0.2, ((-2.0, 2.0), (-2.0, 2.0)), 4).is_err());
    }
}
