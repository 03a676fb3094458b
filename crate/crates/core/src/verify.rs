//! Exact decision procedures for network behavior on a box: equality with
//! the coordinate maximum, equality between two networks, homogeneity
//! spot-checks, and one-sided directional derivative probes.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constructions::max_oracle;
use crate::domain::BoxDomain;
use crate::lp::{feasible, Inequality, LinearSystem};
use crate::network::ReluNetwork;
use crate::rational::{rint, Rational};
use crate::regions::{walk_regions, Walk};
use crate::sampling::{rng_from_seed, sample_point, sample_rational};
use crate::{Error, Result};

/// Default cap on visited activation regions.
pub const DEFAULT_REGION_BUDGET: u64 = 1_000_000;

/// Outcome of an exact equality check on a box.
///
/// A counterexample re-evaluates to exactly the stated values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Equal,
    Counterexample {
        #[serde(with = "crate::rational::serde_string_vec")]
        point: Vec<Rational>,
        #[serde(with = "crate::rational::serde_string")]
        net_value: Rational,
        #[serde(with = "crate::rational::serde_string")]
        target_value: Rational,
    },
    BudgetExceeded {
        regions_visited: u64,
    },
}

fn difference_witness(
    dim: usize,
    base: &[Inequality],
    lhs_coeffs: &[Rational],
    lhs_const: &Rational,
    rhs_coeffs: &[Rational],
    rhs_const: &Rational,
    domain: &BoxDomain,
) -> Result<Option<Vec<Rational>>> {
    let diff: Vec<Rational> = lhs_coeffs
        .iter()
        .zip(rhs_coeffs)
        .map(|(a, b)| a - b)
        .collect();
    let diff_const = lhs_const - rhs_const;
    if diff.iter().all(Rational::is_zero) && diff_const.is_zero() {
        return Ok(None);
    }
    for sign in [1i64, -1] {
        let mut constraints = base.to_vec();
        constraints.push(Inequality::gt(
            diff.iter().map(|c| c * rint(sign)).collect(),
            &diff_const * rint(sign),
        ));
        let system = LinearSystem::new(dim, constraints)?;
        if let Some(w) = feasible(&system, domain)? {
            return Ok(Some(w));
        }
    }
    // The affine forms differ but agree on the whole region: impossible on
    // a full-dimensional region, kept for defensive completeness.
    Ok(None)
}

/// Decides whether `net` equals the coordinate maximum everywhere on `domain`.
///
/// Every full-dimensional region is intersected with every full-dimensional
/// ordering piece `{x_i > x_j for all j}` and the affine restriction is
/// compared to the coordinate projection. Lower-dimensional intersections
/// are skipped: equality extends to them by continuity of both sides.
pub fn equals_max_on_box(
    net: &ReluNetwork,
    domain: &BoxDomain,
    budget: u64,
) -> Result<Verdict> {
    let dim = net.input_dim();
    if dim != domain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "network has {dim} inputs, box has {}",
            domain.dim()
        )));
    }
    let mut counter = 0u64;
    let mut failure: Result<()> = Ok(());
    let walk = walk_regions(net, domain, &[], budget, &mut counter, &mut |region| {
        for i in 0..dim {
            let mut piece = region.system.inequalities.clone();
            for j in 0..dim {
                if j != i {
                    let mut coeffs = vec![Rational::zero(); dim];
                    coeffs[i] = rint(1);
                    coeffs[j] = rint(-1);
                    piece.push(Inequality::gt(coeffs, Rational::zero()));
                }
            }
            let piece_system = match LinearSystem::new(dim, piece.clone()) {
                Ok(s) => s,
                Err(e) => {
                    failure = Err(e);
                    return Some(Verdict::Equal); // sentinel, surfaced below
                }
            };
            let piece_witness = match feasible(&piece_system, domain) {
                Ok(w) => w,
                Err(e) => {
                    failure = Err(e);
                    return Some(Verdict::Equal);
                }
            };
            if piece_witness.is_none() {
                continue;
            }
            // target on this piece is the projection onto coordinate i
            let mut target_coeffs = vec![Rational::zero(); dim];
            target_coeffs[i] = rint(1);
            let mismatch = difference_witness(
                dim,
                &piece,
                &region.affine_coeffs,
                &region.affine_constant,
                &target_coeffs,
                &Rational::zero(),
                domain,
            );
            match mismatch {
                Err(e) => {
                    failure = Err(e);
                    return Some(Verdict::Equal);
                }
                Ok(None) => continue,
                Ok(Some(point)) => {
                    let net_value = match net.eval(&point) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Err(e);
                            return Some(Verdict::Equal);
                        }
                    };
                    let target_value = max_oracle(&point);
                    debug_assert_ne!(net_value, target_value);
                    return Some(Verdict::Counterexample {
                        point,
                        net_value,
                        target_value,
                    });
                }
            }
        }
        None
    })?;
    failure?;
    Ok(match walk {
        Walk::Found(v) => v,
        Walk::Done => Verdict::Equal,
        Walk::Budget { regions } => Verdict::BudgetExceeded {
            regions_visited: regions,
        },
    })
}

/// Decides exact functional equality of two networks on a box by joint
/// region refinement. The budget counts refined (joint) regions.
pub fn equals_network_on_box(
    a: &ReluNetwork,
    b: &ReluNetwork,
    domain: &BoxDomain,
    budget: u64,
) -> Result<Verdict> {
    let dim = a.input_dim();
    if dim != b.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "networks have {dim} and {} inputs",
            b.input_dim()
        )));
    }
    if dim != domain.dim() {
        return Err(Error::DimensionMismatch(format!(
            "networks have {dim} inputs, box has {}",
            domain.dim()
        )));
    }
    let mut counter = 0u64;
    let mut failure: Result<()> = Ok(());
    let outer_budget = u64::MAX; // inner walk enforces the shared budget
    let mut outer_counter = 0u64;
    let walk = walk_regions(
        a,
        domain,
        &[],
        outer_budget,
        &mut outer_counter,
        &mut |region_a| {
            let inner = walk_regions(
                b,
                domain,
                &region_a.system.inequalities,
                budget,
                &mut counter,
                &mut |region_b| {
                    let mismatch = difference_witness(
                        dim,
                        &region_b.system.inequalities,
                        &region_a.affine_coeffs,
                        &region_a.affine_constant,
                        &region_b.affine_coeffs,
                        &region_b.affine_constant,
                        domain,
                    );
                    match mismatch {
                        Err(e) => {
                            failure = Err(e);
                            Some(Verdict::Equal)
                        }
                        Ok(None) => None,
                        Ok(Some(point)) => {
                            let (net_value, target_value) =
                                match (a.eval(&point), b.eval(&point)) {
                                    (Ok(x), Ok(y)) => (x, y),
                                    (Err(e), _) | (_, Err(e)) => {
                                        failure = Err(e);
                                        return Some(Verdict::Equal);
                                    }
                                };
                            debug_assert_ne!(net_value, target_value);
                            Some(Verdict::Counterexample {
                                point,
                                net_value,
                                target_value,
                            })
                        }
                    }
                },
            );
            match inner {
                Err(e) => {
                    failure = Err(e);
                    Some(Verdict::Equal)
                }
                Ok(Walk::Found(v)) => Some(v),
                Ok(Walk::Done) => None,
                Ok(Walk::Budget { regions }) => Some(Verdict::BudgetExceeded {
                    regions_visited: regions,
                }),
            }
        },
    )?;
    failure?;
    Ok(match walk {
        Walk::Found(v) => v,
        Walk::Done => Verdict::Equal,
        Walk::Budget { regions } => Verdict::BudgetExceeded {
            regions_visited: regions,
        },
    })
}

/// First violation of positive homogeneity found by seeded sampling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityViolation {
    #[serde(with = "crate::rational::serde_string")]
    pub scale: Rational,
    #[serde(with = "crate::rational::serde_string_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "crate::rational::serde_string")]
    pub value_at_scaled: Rational,
    #[serde(with = "crate::rational::serde_string")]
    pub scaled_value: Rational,
}

/// Tests `net(c x) == c net(x)` exactly on seeded rational pairs with
/// `c > 0`. Returns the first violating pair, or `None` if all pass.
pub fn homogeneity_check(
    net: &ReluNetwork,
    samples: u32,
    seed: u64,
) -> Result<Option<HomogeneityViolation>> {
    let mut rng = rng_from_seed(seed);
    let domain = BoxDomain::symmetric(net.input_dim(), rint(10));
    for _ in 0..samples {
        let x = sample_point(&mut rng, &domain, 64);
        let c = sample_rational(&mut rng, &rat_eps(), &rint(4), 8);
        let scaled: Vec<Rational> = x.iter().map(|xi| xi * &c).collect();
        let value_at_scaled = net.eval(&scaled)?;
        let scaled_value = &c * net.eval(&x)?;
        if value_at_scaled != scaled_value {
            return Ok(Some(HomogeneityViolation {
                scale: c,
                point: x,
                value_at_scaled,
                scaled_value,
            }));
        }
    }
    Ok(None)
}

fn rat_eps() -> Rational {
    Rational::new(1.into(), 8.into())
}

/// Spot check of `|net(x) - net(y)| <= max_i |x_i - y_i|` on seeded pairs,
/// a property any network equal to the coordinate maximum on the box must
/// have. Returns the first violating pair, or `None` if all pass.
pub fn one_lipschitz_check(
    net: &ReluNetwork,
    domain: &BoxDomain,
    samples: u32,
    seed: u64,
) -> Result<Option<(Vec<Rational>, Vec<Rational>)>> {
    let mut rng = rng_from_seed(seed);
    for _ in 0..samples {
        let x = sample_point(&mut rng, domain, 64);
        let y = sample_point(&mut rng, domain, 64);
        let diff = (net.eval(&x)? - net.eval(&y)?).abs();
        let inf_norm = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .max()
            .expect("nonempty input");
        if diff > inf_norm {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

/// Exact one-sided directional derivatives at `point` along `direction`,
/// evaluated at a step strictly below the first breakpoint of the line
/// restriction on each side. Returns true iff the two derivatives differ.
pub fn directional_nondiff_probe(
    net: &ReluNetwork,
    point: &[Rational],
    direction: &[Rational],
) -> Result<bool> {
    if direction.iter().all(Rational::is_zero) {
        return Err(Error::InvalidInput("direction must be nonzero".into()));
    }
    if point.len() != net.input_dim() || direction.len() != net.input_dim() {
        return Err(Error::DimensionMismatch(
            "point and direction must match the input dimension".into(),
        ));
    }
    let cuts = line_breakpoints(net, point, direction, &rint(-1), &rint(1));
    let half = Rational::new(1.into(), 2.into());
    let t_plus = cuts
        .iter()
        .filter(|t| t.is_positive())
        .min()
        .map(|t| t * &half)
        .unwrap_or_else(|| half.clone());
    let t_minus = cuts
        .iter()
        .filter(|t| t.is_negative())
        .max()
        .map(|t| -(t * &half))
        .unwrap_or(half);
    let at = |t: &Rational| -> Result<Rational> {
        let shifted: Vec<Rational> = point
            .iter()
            .zip(direction)
            .map(|(p, d)| p + d * t)
            .collect();
        net.eval(&shifted)
    };
    let f0 = at(&Rational::zero())?;
    let d_plus = (at(&t_plus)? - &f0) / &t_plus;
    let d_minus = (f0 - at(&(-t_minus.clone()))?) / &t_minus;
    Ok(d_plus != d_minus)
}

/// Parameters `t` in `(t_lo, t_hi)` at which some neuron of the line
/// restriction `t -> net(point + t direction)` changes activation. The
/// output function is affine between consecutive cuts.
fn line_breakpoints(
    net: &ReluNetwork,
    point: &[Rational],
    direction: &[Rational],
    t_lo: &Rational,
    t_hi: &Rational,
) -> Vec<Rational> {
    // (slope, intercept) pairs per coordinate, per segment
    type Forms = Vec<(Rational, Rational)>;
    let mut segments: Vec<(Rational, Rational, Forms)> = vec![(
        t_lo.clone(),
        t_hi.clone(),
        direction
            .iter()
            .zip(point)
            .map(|(d, p)| (d.clone(), p.clone()))
            .collect(),
    )];
    let mut all_cuts: Vec<Rational> = Vec::new();

    for layer in net.hidden() {
        let mut next_segments: Vec<(Rational, Rational, Forms)> = Vec::new();
        for (lo, hi, forms) in segments {
            // affine image of the forms
            let mapped: Forms = (0..layer.out_dim())
                .map(|i| {
                    let mut slope = Rational::zero();
                    let mut intercept = layer.bias(i).clone();
                    for (w, (s, c)) in layer.row(i).iter().zip(&forms) {
                        if !w.is_zero() {
                            slope += w * s;
                            intercept += w * c;
                        }
                    }
                    (slope, intercept)
                })
                .collect();
            // zeros strictly inside the segment cut it
            let mut cuts: Vec<Rational> = mapped
                .iter()
                .filter(|(s, _)| !s.is_zero())
                .map(|(s, c)| -(c / s))
                .filter(|t| &lo < t && t < &hi)
                .collect();
            cuts.sort();
            cuts.dedup();
            let mut bounds = vec![lo.clone()];
            bounds.extend(cuts.iter().cloned());
            bounds.push(hi.clone());
            all_cuts.extend(cuts);
            for pair in bounds.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                let mid = (a + b) / rint(2);
                let rectified: Forms = mapped
                    .iter()
                    .map(|(s, c)| {
                        let v = s * &mid + c;
                        if v.is_negative() {
                            (Rational::zero(), Rational::zero())
                        } else {
                            (s.clone(), c.clone())
                        }
                    })
                    .collect();
                next_segments.push((a.clone(), b.clone(), rectified));
            }
        }
        segments = next_segments;
    }
    all_cuts.sort();
    all_cuts.dedup();
    all_cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::AffineMap;
    use crate::constructions::{max2_gadget, tournament_max};
    use crate::rational::rat;

    #[test]
    fn tournament_max3_is_equal_on_unit_cube() {
        let net = tournament_max(3).unwrap();
        let verdict = equals_max_on_box(&net, &BoxDomain::unit(3), 10_000).unwrap();
        assert_eq!(verdict, Verdict::Equal);
    }

    #[test]
    fn constant_zero_net_fails_against_max3() {
        let hidden = AffineMap::from_rows(
            vec![vec![rint(0), rint(0), rint(0)]],
            vec![rint(0)],
        )
        .unwrap();
        let output = AffineMap::from_rows(vec![vec![rint(0)]], vec![rint(0)]).unwrap();
        let net = ReluNetwork::new(3, vec![hidden], output).unwrap();
        match equals_max_on_box(&net, &BoxDomain::unit(3), 10_000).unwrap() {
            Verdict::Counterexample {
                point,
                net_value,
                target_value,
            } => {
                assert_eq!(net_value, rint(0));
                assert_eq!(net.eval(&point).unwrap(), net_value);
                assert_eq!(max_oracle(&point), target_value);
                assert_ne!(net_value, target_value);
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn identity_pair_equals_max1() {
        let hidden = AffineMap::from_rows(
            vec![vec![rint(1)], vec![rint(-1)]],
            vec![rint(0), rint(0)],
        )
        .unwrap();
        let output =
            AffineMap::from_rows(vec![vec![rint(1), rint(-1)]], vec![rint(0)]).unwrap();
        let net = ReluNetwork::new(1, vec![hidden], output).unwrap();
        let verdict = equals_max_on_box(&net, &BoxDomain::unit(1), 100).unwrap();
        assert_eq!(verdict, Verdict::Equal);
    }

    #[test]
    fn network_equals_itself() {
        let net = tournament_max(3).unwrap();
        let verdict =
            equals_network_on_box(&net, &net, &BoxDomain::unit(3), 100_000).unwrap();
        assert_eq!(verdict, Verdict::Equal);
    }

    #[test]
    fn gadget_equals_tournament_on_symmetric_box() {
        let a = max2_gadget();
        let b = tournament_max(2).unwrap();
        let domain = BoxDomain::symmetric(2, rint(5));
        assert_eq!(
            equals_network_on_box(&a, &b, &domain, 100_000).unwrap(),
            Verdict::Equal
        );
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let net = tournament_max(3).unwrap();
        match equals_max_on_box(&net, &BoxDomain::unit(3), 1).unwrap() {
            Verdict::BudgetExceeded { regions_visited } => assert_eq!(regions_visited, 1),
            other => panic!("expected budget signal, got {other:?}"),
        }
    }

    #[test]
    fn homogeneity_of_zero_bias_nets() {
        let net = tournament_max(4).unwrap();
        assert_eq!(homogeneity_check(&net, 100, 5).unwrap(), None);
    }

    #[test]
    fn homogeneity_violated_by_output_bias() {
        let hidden = AffineMap::from_rows(vec![vec![rint(1)]], vec![rint(0)]).unwrap();
        let output = AffineMap::from_rows(vec![vec![rint(1)]], vec![rint(3)]).unwrap();
        let net = ReluNetwork::new(1, vec![hidden], output).unwrap();
        let violation = homogeneity_check(&net, 100, 5).unwrap();
        assert!(violation.is_some());
        let v = violation.unwrap();
        assert_eq!(net.eval(&v.point.iter().map(|x| x * &v.scale).collect::<Vec<_>>()).unwrap(), v.value_at_scaled);
    }

    #[test]
    fn probe_detects_the_diagonal_kink() {
        let net = max2_gadget();
        let p = vec![rat(1, 2), rat(1, 2)];
        assert!(directional_nondiff_probe(&net, &p, &[rint(1), rint(-1)]).unwrap());
    }

    #[test]
    fn probe_smooth_off_the_diagonal() {
        let net = max2_gadget();
        let p = vec![rat(3, 4), rat(1, 4)];
        assert!(!directional_nondiff_probe(&net, &p, &[rint(1), rint(0)]).unwrap());
    }

    #[test]
    fn probe_along_the_kink_hyperplane_is_smooth() {
        // On the diagonal the function is non-differentiable, but the probe
        // direction (1,1) lies inside the kink hyperplane: the restriction
        // t -> max(-1/4 + t, -1/4 + t) is linear.
        let net = max2_gadget();
        let p = vec![rat(-1, 4), rat(-1, 4)];
        assert!(!directional_nondiff_probe(&net, &p, &[rint(1), rint(1)]).unwrap());
        assert!(directional_nondiff_probe(&net, &p, &[rint(1), rint(-1)]).unwrap());
    }

    #[test]
    fn lipschitz_check_accepts_max_and_flags_steep_nets() {
        let net = tournament_max(3).unwrap();
        let domain = BoxDomain::symmetric(3, rint(10));
        assert_eq!(one_lipschitz_check(&net, &domain, 200, 7).unwrap(), None);
        // a steep affine net: 3 * x1
        let output = AffineMap::from_rows(vec![vec![rint(3)]], vec![rint(0)]).unwrap();
        let steep = ReluNetwork::new(1, vec![], output).unwrap();
        let violation = one_lipschitz_check(&steep, &BoxDomain::unit(1), 200, 7).unwrap();
        assert!(violation.is_some());
    }

    #[test]
    fn probe_rejects_zero_direction() {
        let net = max2_gadget();
        assert!(directional_nondiff_probe(&net, &[rint(0), rint(0)], &[rint(0), rint(0)]).is_err());
    }
}
