//! Deciding whether a 0/1 word is a factor of a quadratic-phase sequence.
//!
//! A word `w` of length `l` occurs at position `n0` iff the shifted window
//! `alpha m^2 + beta m + gamma` (with `beta = 2 alpha n0 + beta0`,
//! `gamma = alpha n0^2 + beta0 n0 + gamma0`, both mod 1) lands in the arc
//! exactly at the positions `m < l` where `w(m) = 1`. Conversely every
//! non-empty open set of `(beta, gamma)` in the unit square is visited by some
//! `n0` (equidistribution of the pair for irrational `alpha`), so `w` is a
//! factor iff the strict system has a solution in `[0, 1]^2`.
//!
//! Fixing the integer part `k_m` of each position turns the mod-1 condition
//! into two strict linear inequalities. The search below walks positions in
//! increasing order, tries `k_m` in increasing order, clips the closed versions
//! of the constraints and prunes as soon as the area drops to zero. A convex
//! polygon of positive area inside every closed half-plane has interior points
//! in every open half-plane, so positive area is exactly strict feasibility.

mod common;
mod phase;
mod region;

pub use common::{common_factors, common_factors_brute, common_windows, CommonFactorReport, Level};
pub use phase::{in_arc, PhaseError, QuadraticPhase};
pub use region::{FeasRegion, HalfPlane, Point};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::quadfield::QuadExt;
use crate::words::Word;

/// Integer part chosen for each position of the word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FloorAssignment(pub Vec<BigInt>);

/// The open band `(k + lower, k + upper)` required of position `m`, as two
/// closed half-planes in `(beta, gamma)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub k: BigInt,
    pub above: HalfPlane,
    pub below: HalfPlane,
}

impl Band {
    pub fn half_planes(&self) -> [&HalfPlane; 2] {
        [&self.above, &self.below]
    }
}

impl QuadraticPhase {
    /// Offsets of the allowed band relative to `k`: the arc for symbol 1, the
    /// gap between consecutive arcs for symbol 0.
    fn band_offsets(&self, symbol: u8) -> (BigRational, BigRational) {
        let (lo, hi) = self.arc();
        if symbol == 1 {
            (lo.clone(), hi.clone())
        } else {
            (hi.clone(), lo + BigRational::from_integer(1.into()))
        }
    }

    /// Every `k` whose band meets the range `[alpha m^2, alpha m^2 + m + 1]`
    /// swept by `alpha m^2 + beta m + gamma` over the unit square, with its
    /// constraints.
    pub fn bands(&self, m: usize, symbol: u8) -> Vec<Band> {
        let (lower, upper) = self.band_offsets(symbol);
        let mm = QuadExt::integer(m as u64);
        let base = self.alpha() * &(&mm * &mm);
        let lower_q = QuadExt::rational(lower);
        let upper_q = QuadExt::rational(upper);
        // k + upper > base  and  k + lower < base + m + 1
        let k_min = (&base - &upper_q).floor() + BigInt::one();
        let top = &(&base + &QuadExt::integer(m as u64 + 1)) - &lower_q;
        let k_max = -(-top).floor() - BigInt::one();
        let mut out = Vec::new();
        let mut k = k_min;
        while k <= k_max {
            let kq = QuadExt::integer(k.clone());
            // m beta + gamma + (base - k - lower) >= 0
            let above = HalfPlane::new(mm.clone(), QuadExt::one(), &(&base - &kq) - &lower_q);
            // -m beta - gamma + (k + upper - base) >= 0
            let below = HalfPlane::new(-&mm, QuadExt::integer(-1), &(&kq + &upper_q) - &base);
            out.push(Band {
                k: k.clone(),
                above,
                below,
            });
            k += BigInt::one();
        }
        out
    }

    /// All convex systems for `w`: the cartesian product of the admissible
    /// bands per position, in lexicographic order of the assignment.
    pub fn constraint_systems(
        &self,
        w: &Word,
    ) -> Result<impl Iterator<Item = (FloorAssignment, Vec<HalfPlane>)>, crate::Error> {
        check_binary(w)?;
        let per_position: Vec<Vec<Band>> = w
            .symbols()
            .iter()
            .enumerate()
            .map(|(m, &s)| self.bands(m, s))
            .collect();
        let mut odometer = vec![0usize; per_position.len()];
        let mut done = per_position.iter().any(Vec::is_empty);
        Ok(std::iter::from_fn(move || {
            if done {
                return None;
            }
            let chosen: Vec<&Band> = odometer
                .iter()
                .zip(&per_position)
                .map(|(&i, bands)| &bands[i])
                .collect();
            let item = (
                FloorAssignment(chosen.iter().map(|b| b.k.clone()).collect()),
                chosen
                    .iter()
                    .flat_map(|b| [b.above.clone(), b.below.clone()])
                    .collect(),
            );
            done = true;
            for pos in (0..odometer.len()).rev() {
                odometer[pos] += 1;
                if odometer[pos] < per_position[pos].len() {
                    done = false;
                    break;
                }
                odometer[pos] = 0;
            }
            Some(item)
        }))
    }

    /// Decides whether `w` is a factor of the sequence.
    pub fn decide_factor(&self, w: &Word) -> Result<Decision, crate::Error> {
        check_binary(w)?;
        let mut search = Search {
            phase: self,
            word: w,
            assignment: Vec::with_capacity(w.len()),
            branches: 0,
        };
        let found = search.run(0, FeasRegion::unit_square());
        Ok(Decision {
            accepted: found.is_some(),
            witness: found,
            branches: search.branches,
        })
    }
}

fn check_binary(w: &Word) -> Result<(), crate::Error> {
    match w.symbols().iter().position(|&s| s > 1) {
        Some(pos) => Err(crate::Error::NonBinarySymbol {
            pos,
            symbol: w.symbols()[pos],
        }),
        None => Ok(()),
    }
}

/// Outcome of [`QuadraticPhase::decide_factor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub accepted: bool,
    /// Lexicographically least accepting assignment with an interior point.
    pub witness: Option<Witness>,
    /// Number of clipped branches explored.
    pub branches: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub beta: QuadExt,
    pub gamma: QuadExt,
    pub assignment: FloorAssignment,
    pub region: FeasRegion,
}

impl Witness {
    /// Whether every band of the assignment holds strictly at `(beta, gamma)`.
    pub fn check_strict(&self, phase: &QuadraticPhase, w: &Word) -> bool {
        let point = (self.beta.clone(), self.gamma.clone());
        w.symbols().iter().enumerate().all(|(m, &s)| {
            phase
                .bands(m, s)
                .iter()
                .find(|b| b.k == self.assignment.0[m])
                .is_some_and(|b| b.half_planes().iter().all(|h| h.side(&point) > 0))
        })
    }
}

struct Search<'a> {
    phase: &'a QuadraticPhase,
    word: &'a Word,
    assignment: Vec<BigInt>,
    branches: u64,
}

impl Search<'_> {
    fn run(&mut self, m: usize, region: FeasRegion) -> Option<Witness> {
        if m == self.word.len() {
            let (beta, gamma) = region.vertex_centroid()?;
            return Some(Witness {
                beta,
                gamma,
                assignment: FloorAssignment(self.assignment.clone()),
                region,
            });
        }
        for band in self.phase.bands(m, self.word.symbols()[m]) {
            self.branches += 1;
            let clipped = region.intersect(&band.above);
            if !clipped.has_positive_area() {
                continue;
            }
            let clipped = clipped.intersect(&band.below);
            if !clipped.has_positive_area() {
                continue;
            }
            self.assignment.push(band.k);
            if let Some(w) = self.run(m + 1, clipped) {
                return Some(w);
            }
            self.assignment.pop();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper() -> QuadraticPhase {
        QuadraticPhase::sqrt2_quarter_arc()
    }

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn bands_at_origin() {
        let p = paper();
        let ks: Vec<_> = p.bands(0, 1).into_iter().map(|b| b.k).collect();
        assert_eq!(ks, [BigInt::from(0), BigInt::from(1)]);
        let ks: Vec<_> = p.bands(0, 0).into_iter().map(|b| b.k).collect();
        assert_eq!(ks, [BigInt::from(0)]);
        // range width m + 1 plus arc width
        for m in [5usize, 10, 20] {
            let n = p.bands(m, 1).len();
            assert!((m + 1..=m + 3).contains(&n), "m = {m}: {n}");
        }
    }

    #[test]
    fn constraint_systems_enumerate_product() {
        let p = paper();
        let systems: Vec<_> = p.constraint_systems(&word("10")).unwrap().collect();
        let expected = p.bands(0, 1).len() * p.bands(1, 0).len();
        assert_eq!(systems.len(), expected);
        assert!(systems.windows(2).all(|s| s[0].0 < s[1].0));
        assert!(systems.iter().all(|(_, hs)| hs.len() == 4));
        let empty: Vec<_> = p.constraint_systems(&Word::empty()).unwrap().collect();
        assert_eq!(empty.len(), 1);
        assert!(p.constraint_systems(&word("012")).is_err());
    }

    #[test]
    fn decisions() {
        let p = paper();
        assert!(p.decide_factor(&Word::empty()).unwrap().accepted);
        for w in ["001011010", "110100101", "10100110010"] {
            let d = p.decide_factor(&word(w)).unwrap();
            assert!(d.accepted, "{w}");
            let wit = d.witness.unwrap();
            assert!(wit.check_strict(&p, &word(w)));
        }
        assert!(matches!(
            p.decide_factor(&word("0120")),
            Err(crate::Error::NonBinarySymbol { pos: 2, symbol: 2 })
        ));
    }

    #[test]
    fn decision_agrees_with_system_enumeration() {
        // brute force over every convex system for short words
        let p = paper();
        for len in 0..=4usize {
            for bits in 0..(1u32 << len) {
                let w = Word::new((0..len).map(|i| ((bits >> i) & 1) as u8).collect());
                let brute = p.constraint_systems(&w).unwrap().any(|(_, hs)| {
                    hs.iter()
                        .fold(FeasRegion::unit_square(), |r, h| r.intersect(h))
                        .has_positive_area()
                });
                assert_eq!(p.decide_factor(&w).unwrap().accepted, brute, "{w}");
            }
        }
    }
}
