//! The quadratic spherical pendulum: `H = |p|^2/2 + V(z)` on `T*S^2` with
//! `V(z) = z^2 - z/2`.
//!
//! The Hill region `{V <= h}` on the sphere is controlled by the quadratic
//! in `z` alone: a band around the minimum circle, a disk once the lower
//! maximum (the north pole, `z = 1`) is passed, and the whole sphere above
//! the global maximum (the south pole, `z = -1`). The corresponding energy
//! levels are modeled as a collapsed circle bundle over the band or disk
//! and as the Euler-number-2 circle bundle over the sphere.

use num_rational::BigRational;

use crate::chaincore::CellComplex;
use crate::morserules::{BundleContext, CriticalPointRecord, LevelPassQuery};

use super::{
    circle_bundle, collapsed_circle_bundle, surfaces, MechanicsError,
};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `V(z) = z^2 - z/2` evaluated exactly.
pub fn pendulum_potential(z: &BigRational) -> BigRational {
    z * z - z / rat(2, 1)
}

/// The three critical values of `V` on the sphere, computed from the
/// polynomial: the interior minimum circle at `z = 1/4`, the lower maximum
/// at the pole `z = 1`, the global maximum at the pole `z = -1`.
pub fn pendulum_critical_values() -> [BigRational; 3] {
    // V'(z) = 2z - 1/2 vanishes at z = 1/4, which lies inside (-1, 1)
    let z_min = rat(1, 4);
    let v_min = pendulum_potential(&z_min);
    let v_north = pendulum_potential(&rat(1, 1));
    let v_south = pendulum_potential(&rat(-1, 1));
    debug_assert!(v_min < v_north && v_north < v_south);
    [v_min, v_north, v_south]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PendulumRegime {
    /// Below the minimum of V: the level set is empty.
    Empty,
    /// Hill region is a band around the minimum circle: level is S^2 x S^1.
    Band,
    /// Hill region is a disk containing the north pole: level is S^3.
    Disk,
    /// Hill region is the whole sphere: level is the e = chi(S^2) = 2
    /// bundle, RP^3.
    Full,
}

#[derive(Debug)]
pub struct PendulumScenario {
    pub h: BigRational,
    pub regime: PendulumRegime,
    /// Chain-level model of the energy level `H^-1(h)`.
    pub level_model: CellComplex,
    /// The pass through the lower (non-global) maximum.
    pub lower_max_query: LevelPassQuery,
    /// The pass through the global maximum.
    pub upper_max_query: LevelPassQuery,
}

/// Builds the level model and the two maximum-pass queries for a regular
/// energy `h`. Critical energies are rejected with the offending value.
pub fn pendulum_scenario(h: &BigRational) -> Result<PendulumScenario, MechanicsError> {
    let [v_min, v_north, v_south] = pendulum_critical_values();
    for c in [&v_min, &v_north, &v_south] {
        if h == c {
            return Err(MechanicsError::CriticalEnergy(c.to_string()));
        }
    }
    let base_sphere = surfaces::sphere_octahedron();
    // cotangent bundle: euler number = euler characteristic of the base
    let euler = base_sphere.complex.to_cell_complex().euler_characteristic();
    let (regime, level_model) = if *h < v_min {
        (PendulumRegime::Empty, CellComplex::empty())
    } else if *h < v_north {
        (
            PendulumRegime::Band,
            collapsed_circle_bundle(&surfaces::annulus(3, 8))?,
        )
    } else if *h < v_south {
        (
            PendulumRegime::Disk,
            collapsed_circle_bundle(&surfaces::disk(6))?,
        )
    } else {
        (PendulumRegime::Full, circle_bundle(&base_sphere, euler)?)
    };
    let bundle = BundleContext {
        rank: 2,
        base_closed: true,
        base_orientable: true,
        bundle_orientable: true,
        euler_number: Some(euler),
        trivial_outside_disk: true,
        is_cotangent: true,
    };
    let value_of = |v: &BigRational| crate::levelset::rational_to_f64(v);
    let lower_max_query = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(value_of(&v_north), 2).global_max(false)],
    )
    .with_bundle(bundle.clone());
    let upper_max_query = LevelPassQuery::new(
        4,
        vec![CriticalPointRecord::new(value_of(&v_south), 2).global_max(true)],
    )
    .with_bundle(bundle);
    Ok(PendulumScenario {
        h: h.clone(),
        regime,
        level_model,
        lower_max_query,
        upper_max_query,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values_are_the_expected_rationals() {
        let [v_min, v_north, v_south] = pendulum_critical_values();
        assert_eq!(v_min, rat(-1, 16));
        assert_eq!(v_north, rat(1, 2));
        assert_eq!(v_south, rat(3, 2));
    }

    #[test]
    fn regimes_by_energy() {
        assert_eq!(
            pendulum_scenario(&rat(-1, 1)).unwrap().regime,
            PendulumRegime::Empty
        );
        assert_eq!(
            pendulum_scenario(&rat(0, 1)).unwrap().regime,
            PendulumRegime::Band
        );
        assert_eq!(
            pendulum_scenario(&rat(1, 1)).unwrap().regime,
            PendulumRegime::Disk
        );
        assert_eq!(
            pendulum_scenario(&rat(2, 1)).unwrap().regime,
            PendulumRegime::Full
        );
    }

    #[test]
    fn critical_energy_is_rejected_with_the_value() {
        let err = pendulum_scenario(&rat(1, 2)).unwrap_err();
        match err {
            MechanicsError::CriticalEnergy(v) => assert_eq!(v, "1/2"),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
