//! Two-reservoir molecule bookkeeping.
//!
//! The transmitter stores two chemical species (i1 and i2) in two finite
//! reservoirs, L and H. Every release of information molecules is paired
//! with internal transfers that keep the reservoirs usable, so the state
//! type tracks exact per-species counts rather than concentrations.
//!
//! Concentrations come in two flavors and the difference matters:
//!
//! * [`ConcentrationConvention::FixedDenominator`] divides a count by the
//!   reservoir's design size. This is the convention the closed-form cost
//!   and error expressions are written in. It can leave [0,1] once many
//!   molecules have moved, which callers see via [`Concentration::in_regime`].
//! * [`ConcentrationConvention::CurrentTotal`] divides by the molecules
//!   actually present, which is what a sampling receiver would experience.
//!
//! The closed-form expressions additionally treat the two species as
//! complements of one i2 share per reservoir: any batch of either species
//! entering or leaving shifts that share by the batch fraction, and the i1
//! share is its complement. [`ReservoirPair::linearized_c2`] evaluates that
//! share exactly from integer counts; it is the concentration the transfer
//! cost law and the analytic error evaluators consume.

use crate::error::{Error, Result};

/// The two molecule types handled by the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    I1,
    I2,
}

impl Species {
    /// The other species.
    pub fn other(self) -> Species {
        match self {
            Species::I1 => Species::I2,
            Species::I2 => Species::I1,
        }
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Species::I1 => write!(f, "i1"),
            Species::I2 => write!(f, "i2"),
        }
    }
}

/// The two reservoirs. Bit 0 is emitted from L, bit 1 from H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reservoir {
    Low,
    High,
}

impl Reservoir {
    /// The other reservoir.
    pub fn other(self) -> Reservoir {
        match self {
            Reservoir::Low => Reservoir::High,
            Reservoir::High => Reservoir::Low,
        }
    }
}

impl std::fmt::Display for Reservoir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reservoir::Low => write!(f, "L"),
            Reservoir::High => write!(f, "H"),
        }
    }
}

/// How a concentration is normalized. See the module docs for why both exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConcentrationConvention {
    /// Count divided by the reservoir's design size.
    FixedDenominator,
    /// Count divided by the molecules currently present.
    CurrentTotal,
}

/// A concentration value plus a validity flag.
///
/// `in_regime` is false when the fixed-denominator value has left [0,1],
/// which happens once a reservoir has absorbed more molecules than its
/// design size. The value is still reported so sweeps can show where the
/// closed forms break down instead of silently clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration {
    pub value: f64,
    pub in_regime: bool,
}

/// One planned movement: a batch of `species` leaves `from` and enters `to`.
/// The batch size is supplied by whoever executes the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferStep {
    pub species: Species,
    pub from: Reservoir,
    pub to: Reservoir,
}

/// Exact per-species molecule counts for the L/H reservoir pair.
///
/// Design sizes are recorded separately from live counts because the
/// fixed-denominator convention and the cost law both normalize by the
/// size the reservoir was built with, not by what it currently holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReservoirPair {
    pub i1_low: u64,
    pub i2_low: u64,
    pub i1_high: u64,
    pub i2_high: u64,
    pub n_low_design: u64,
    pub n_high_design: u64,
}

impl ReservoirPair {
    /// Builds the standard initial state: `n_total` molecules split evenly
    /// between the reservoirs, each holding the fraction `c2_init` of i2
    /// (rounded to the nearest count, halves up) and the rest i1.
    ///
    /// Rejects odd totals and any `c2_init` that would leave a species
    /// with zero molecules.
    pub fn new_state(n_total: u64, c2_init: f64) -> Result<Self> {
        if !n_total.is_multiple_of(2) {
            return Err(Error::OddTotal(n_total));
        }
        let n_low = n_total / 2;
        if n_low == 0 {
            return Err(Error::ZeroDesignSize);
        }
        if !(c2_init.is_finite() && 0.0 < c2_init && c2_init < 1.0) {
            return Err(Error::DegenerateSplit { c2: c2_init, n_low });
        }
        let i2 = (n_low as f64 * c2_init).round() as u64;
        if i2 == 0 || i2 >= n_low {
            return Err(Error::DegenerateSplit { c2: c2_init, n_low });
        }
        Ok(ReservoirPair {
            i1_low: n_low - i2,
            i2_low: i2,
            i1_high: n_low - i2,
            i2_high: i2,
            n_low_design: n_low,
            n_high_design: n_low,
        })
    }

    /// Builds a state from explicit counts, for resuming a run or setting
    /// up a scenario that `new_state` cannot express.
    pub fn from_counts(
        i1_low: u64,
        i2_low: u64,
        i1_high: u64,
        i2_high: u64,
        n_low_design: u64,
        n_high_design: u64,
    ) -> Result<Self> {
        if n_low_design == 0 || n_high_design == 0 {
            return Err(Error::ZeroDesignSize);
        }
        if i1_low == 0 && i2_low == 0 && i1_high == 0 && i2_high == 0 {
            return Err(Error::EmptyReservoir(Reservoir::Low));
        }
        Ok(ReservoirPair {
            i1_low,
            i2_low,
            i1_high,
            i2_high,
            n_low_design,
            n_high_design,
        })
    }

    /// Live count of one species in one reservoir.
    pub fn count(&self, species: Species, reservoir: Reservoir) -> u64 {
        match (species, reservoir) {
            (Species::I1, Reservoir::Low) => self.i1_low,
            (Species::I2, Reservoir::Low) => self.i2_low,
            (Species::I1, Reservoir::High) => self.i1_high,
            (Species::I2, Reservoir::High) => self.i2_high,
        }
    }

    /// Molecules currently present in a reservoir, both species.
    pub fn total(&self, reservoir: Reservoir) -> u64 {
        match reservoir {
            Reservoir::Low => self.i1_low + self.i2_low,
            Reservoir::High => self.i1_high + self.i2_high,
        }
    }

    /// The size the reservoir was designed for.
    pub fn design(&self, reservoir: Reservoir) -> u64 {
        match reservoir {
            Reservoir::Low => self.n_low_design,
            Reservoir::High => self.n_high_design,
        }
    }

    /// Combined design size of both reservoirs.
    pub fn design_total(&self) -> u64 {
        self.n_low_design + self.n_high_design
    }

    /// Total count of one species across both reservoirs.
    pub fn global_count(&self, species: Species) -> u64 {
        match species {
            Species::I1 => self.i1_low + self.i1_high,
            Species::I2 => self.i2_low + self.i2_high,
        }
    }

    fn slot_mut(&mut self, species: Species, reservoir: Reservoir) -> &mut u64 {
        match (species, reservoir) {
            (Species::I1, Reservoir::Low) => &mut self.i1_low,
            (Species::I2, Reservoir::Low) => &mut self.i2_low,
            (Species::I1, Reservoir::High) => &mut self.i1_high,
            (Species::I2, Reservoir::High) => &mut self.i2_high,
        }
    }

    /// Returns the state after moving `count` molecules of `species` from
    /// one reservoir to the other. Refuses (leaving `self` untouched) if
    /// the source lacks the molecules, the count is zero, or source and
    /// destination coincide. Total counts per species are conserved.
    pub fn apply_transfer(
        &self,
        species: Species,
        from: Reservoir,
        to: Reservoir,
        count: u64,
    ) -> Result<Self> {
        if from == to {
            return Err(Error::SameReservoir);
        }
        if count == 0 {
            return Err(Error::ZeroTransferCount);
        }
        let have = self.count(species, from);
        if have < count {
            return Err(Error::InsufficientSource {
                species,
                reservoir: from,
                have,
                need: count,
            });
        }
        let mut next = *self;
        *next.slot_mut(species, from) -= count;
        *next.slot_mut(species, to) += count;
        Ok(next)
    }

    /// Concentration of one species in one reservoir under the chosen
    /// convention. Fixed-denominator values are reported as-is even when
    /// they leave [0,1]; the flag says whether they are still in regime.
    pub fn concentration(
        &self,
        species: Species,
        reservoir: Reservoir,
        convention: ConcentrationConvention,
    ) -> Result<Concentration> {
        let count = self.count(species, reservoir) as f64;
        match convention {
            ConcentrationConvention::FixedDenominator => {
                let value = count / self.design(reservoir) as f64;
                Ok(Concentration {
                    value,
                    in_regime: (0.0..=1.0).contains(&value),
                })
            }
            ConcentrationConvention::CurrentTotal => {
                let total = self.total(reservoir);
                if total == 0 {
                    return Err(Error::EmptyReservoir(reservoir));
                }
                Ok(Concentration {
                    value: count / total as f64,
                    in_regime: true,
                })
            }
        }
    }

    /// Concentration ratio i1/i2 in a reservoir. The normalization cancels,
    /// so both conventions yield the same number; the parameter is kept for
    /// symmetry with [`ReservoirPair::concentration`]. A reservoir with no
    /// i2 left gets a distinct error rather than an infinity.
    pub fn ratio_i1_over_i2(
        &self,
        reservoir: Reservoir,
        convention: ConcentrationConvention,
    ) -> Result<f64> {
        if convention == ConcentrationConvention::CurrentTotal && self.total(reservoir) == 0 {
            return Err(Error::EmptyReservoir(reservoir));
        }
        let i2 = self.count(Species::I2, reservoir);
        if i2 == 0 {
            return Err(Error::PureI1(reservoir));
        }
        Ok(self.count(Species::I1, reservoir) as f64 / i2 as f64)
    }

    /// The linearized i2 share of a reservoir: the fixed-denominator i2
    /// concentration under the complement-coupled accounting used by the
    /// closed-form cost and error expressions (every batch of either
    /// species shifts this share by the batch fraction, i1 is implied as
    /// the complement).
    ///
    /// Evaluated from integer counts as
    /// `(n_r * total_i1 + T * (i2_r - i1_r)) / (T * n_r)`,
    /// where `n_r` is the reservoir's design size and `T` the global
    /// molecule total. The products are formed in exact integer arithmetic
    /// and rounding only enters at the final conversion and division. On a
    /// freshly built pair this equals the realized initial i2 fraction,
    /// and moving molecules in batches of `b` shifts it by exactly
    /// `b / n_r` per batch. It can leave [0,1] when the linearized regime
    /// has broken down; callers decide how to treat that.
    pub fn linearized_c2(&self, reservoir: Reservoir) -> f64 {
        let n_r = self.design(reservoir) as i128;
        let total = (self.total(Reservoir::Low) + self.total(Reservoir::High)) as i128;
        let total_i1 = self.global_count(Species::I1) as i128;
        let balance =
            self.count(Species::I2, reservoir) as i128 - self.count(Species::I1, reservoir) as i128;
        let num = n_r * total_i1 + total * balance;
        let den = total * n_r;
        num as f64 / den as f64
    }

    /// Linearized concentration of either species; see
    /// [`ReservoirPair::linearized_c2`]. The i1 value is the complement of
    /// the i2 share.
    pub fn linearized_concentration(&self, species: Species, reservoir: Reservoir) -> f64 {
        match species {
            Species::I2 => self.linearized_c2(reservoir),
            Species::I1 => 1.0 - self.linearized_c2(reservoir),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_state_splits_evenly() {
        let s = ReservoirPair::new_state(800_000_000, 0.7).unwrap();
        assert_eq!(s.i2_low, 280_000_000);
        assert_eq!(s.i1_low, 120_000_000);
        assert_eq!(s.i2_high, 280_000_000);
        assert_eq!(s.i1_high, 120_000_000);
        assert_eq!(s.n_low_design, 400_000_000);
        assert_eq!(s.n_high_design, 400_000_000);
    }

    #[test]
    fn new_state_rounds_half_up() {
        // 4 * 0.625 = 2.5 exactly; nearest-with-halves-up gives 3.
        let s = ReservoirPair::new_state(8, 0.625).unwrap();
        assert_eq!(s.i2_low, 3);
        assert_eq!(s.i1_low, 1);
    }

    #[test]
    fn new_state_rejects_bad_input() {
        assert!(matches!(
            ReservoirPair::new_state(9, 0.6),
            Err(Error::OddTotal(9))
        ));
        assert!(matches!(
            ReservoirPair::new_state(100, 0.0),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(matches!(
            ReservoirPair::new_state(100, 1.0),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(matches!(
            ReservoirPair::new_state(100, f64::NAN),
            Err(Error::DegenerateSplit { .. })
        ));
        // Rounding to a count of n_low leaves no i1.
        assert!(matches!(
            ReservoirPair::new_state(4, 0.9),
            Err(Error::DegenerateSplit { .. })
        ));
    }

    #[test]
    fn transfer_moves_counts_and_conserves_totals() {
        let s = ReservoirPair::new_state(200, 0.6).unwrap();
        let t = s
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 20)
            .unwrap();
        assert_eq!(t.i2_low, 40);
        assert_eq!(t.i2_high, 80);
        assert_eq!(t.i1_low, 40);
        assert_eq!(t.i1_high, 40);
        assert_eq!(
            t.global_count(Species::I2),
            s.global_count(Species::I2)
        );
        assert_eq!(
            t.global_count(Species::I1),
            s.global_count(Species::I1)
        );
    }

    #[test]
    fn transfer_refusals() {
        let s = ReservoirPair::new_state(200, 0.6).unwrap();
        assert!(matches!(
            s.apply_transfer(Species::I2, Reservoir::Low, Reservoir::Low, 5),
            Err(Error::SameReservoir)
        ));
        assert!(matches!(
            s.apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 0),
            Err(Error::ZeroTransferCount)
        ));
        assert!(matches!(
            s.apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 61),
            Err(Error::InsufficientSource { have: 60, need: 61, .. })
        ));
    }

    #[test]
    fn concentration_conventions_diverge_after_transfers() {
        let s = ReservoirPair::new_state(200, 0.6)
            .unwrap()
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 20)
            .unwrap();
        let fixed = s
            .concentration(
                Species::I2,
                Reservoir::Low,
                ConcentrationConvention::FixedDenominator,
            )
            .unwrap();
        assert_eq!(fixed.value, 0.4);
        assert!(fixed.in_regime);
        let live = s
            .concentration(
                Species::I2,
                Reservoir::Low,
                ConcentrationConvention::CurrentTotal,
            )
            .unwrap();
        assert_eq!(live.value, 0.5);
        let fixed_h = s
            .concentration(
                Species::I2,
                Reservoir::High,
                ConcentrationConvention::FixedDenominator,
            )
            .unwrap();
        assert_eq!(fixed_h.value, 0.8);
        let live_h = s
            .concentration(
                Species::I2,
                Reservoir::High,
                ConcentrationConvention::CurrentTotal,
            )
            .unwrap();
        assert!((live_h.value - 80.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn concentration_flags_out_of_regime() {
        // The high reservoir has absorbed more than its design size.
        let s = ReservoirPair::from_counts(40, 40, 40, 120, 100, 100).unwrap();
        let c = s
            .concentration(
                Species::I2,
                Reservoir::High,
                ConcentrationConvention::FixedDenominator,
            )
            .unwrap();
        assert_eq!(c.value, 1.2);
        assert!(!c.in_regime);
        // The live-fraction view is always a proper fraction.
        let live = s
            .concentration(
                Species::I2,
                Reservoir::High,
                ConcentrationConvention::CurrentTotal,
            )
            .unwrap();
        assert_eq!(live.value, 0.75);
        assert!(live.in_regime);
    }

    #[test]
    fn ratio_starts_at_shared_value_and_tracks_transfers() {
        let s = ReservoirPair::new_state(200, 0.6).unwrap();
        for r in [Reservoir::Low, Reservoir::High] {
            for conv in [
                ConcentrationConvention::FixedDenominator,
                ConcentrationConvention::CurrentTotal,
            ] {
                let ratio = s.ratio_i1_over_i2(r, conv).unwrap();
                assert!((ratio - (1.0 / 0.6 - 1.0)).abs() < 1e-12);
            }
        }
        let t = s
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 20)
            .unwrap();
        let ratio_low = t
            .ratio_i1_over_i2(Reservoir::Low, ConcentrationConvention::FixedDenominator)
            .unwrap();
        assert_eq!(ratio_low, 1.0);
        let ratio_high = t
            .ratio_i1_over_i2(Reservoir::High, ConcentrationConvention::FixedDenominator)
            .unwrap();
        assert_eq!(ratio_high, 0.5);
    }

    #[test]
    fn ratio_without_i2_is_a_distinct_outcome() {
        let s = ReservoirPair::from_counts(40, 0, 40, 120, 100, 100).unwrap();
        assert!(matches!(
            s.ratio_i1_over_i2(Reservoir::Low, ConcentrationConvention::FixedDenominator),
            Err(Error::PureI1(Reservoir::Low))
        ));
    }

    #[test]
    fn linearized_share_matches_batch_accounting() {
        // Balance the low reservoir, then walk two alternating round trips
        // and check the share after every step against the batch rule.
        let eq = ReservoirPair::new_state(200, 0.6)
            .unwrap()
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 20)
            .unwrap();
        assert!((eq.linearized_c2(Reservoir::Low) - 0.4).abs() < 1e-15);
        assert!((eq.linearized_c2(Reservoir::High) - 0.8).abs() < 1e-15);
        assert!(
            (eq.linearized_concentration(Species::I1, Reservoir::High) - 0.2).abs() < 1e-15
        );

        let s1 = eq
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 1)
            .unwrap();
        // i2 arriving in H displaces the i1 share there.
        assert!(
            (s1.linearized_concentration(Species::I1, Reservoir::High) - 0.19).abs() < 1e-15
        );
        let s2 = s1
            .apply_transfer(Species::I1, Reservoir::High, Reservoir::Low, 1)
            .unwrap();
        // i1 arriving in L displaces the i2 share there.
        assert!((s2.linearized_c2(Reservoir::Low) - 0.38).abs() < 1e-15);
        let s3 = s2
            .apply_transfer(Species::I2, Reservoir::Low, Reservoir::High, 1)
            .unwrap();
        let s4 = s3
            .apply_transfer(Species::I1, Reservoir::High, Reservoir::Low, 1)
            .unwrap();
        let _ = s4;
        assert!(
            (s3.linearized_concentration(Species::I1, Reservoir::High) - 0.17).abs() < 1e-15
        );
    }

    #[test]
    fn linearized_share_is_plain_fraction_on_fresh_state() {
        let s = ReservoirPair::new_state(800_000_000, 0.7).unwrap();
        assert_eq!(s.linearized_c2(Reservoir::Low), 0.7);
        assert_eq!(s.linearized_c2(Reservoir::High), 0.7);
    }
}
