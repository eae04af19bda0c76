use std::collections::BTreeMap;

use super::CharClassError;

/// Which integral cohomology groups `H^i(V; Z)` vanish. Explicit flags take
/// precedence over `zero_above`; groups above `dim` vanish.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CohomologyData {
    /// degree -> group is zero
    pub flags: BTreeMap<usize, bool>,
    /// every degree above this one is zero unless flagged otherwise
    pub zero_above: Option<usize>,
    pub dim: Option<usize>,
}

impl CohomologyData {
    /// Records a group from a descriptor such as `0`, `Z`, `Z^2`, `Z/2` or
    /// `Z+Z/3`.
    pub fn set_group(&mut self, degree: usize, descriptor: &str) -> Result<(), CharClassError> {
        let d = descriptor.trim();
        let zero = match d {
            "0" => true,
            _ if d.chars().all(|c| c.is_ascii_alphanumeric() || "^/+ ".contains(c)) && !d.is_empty() => false,
            _ => return Err(CharClassError::InvalidArgument(format!("unrecognised group `{descriptor}`"))),
        };
        self.flags.insert(degree, zero);
        Ok(())
    }

    fn is_zero(&self, i: usize) -> Option<bool> {
        if let Some(&z) = self.flags.get(&i) {
            return Some(z);
        }
        if self.zero_above.is_some_and(|z| i > z) || self.dim.is_some_and(|d| i > d) {
            return Some(true);
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaefligerReason {
    /// `H^i ≠ 0` for this `i > q + 1`.
    Nonzero(usize),
    /// Nothing is known about `H^i` for this `i > q + 1`.
    Unknown(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaefligerVerdict {
    /// `H^i(V; Z) = 0` for all `i > q + 1`: every codimension-q distribution
    /// is homotopic to a foliation.
    Applies,
    DoesNotApply(HaefligerReason),
}

impl HaefligerVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            HaefligerVerdict::Applies => "Applies",
            HaefligerVerdict::DoesNotApply(_) => "DoesNotApply",
        }
    }
}

pub fn haefliger_corollary_check(data: &CohomologyData, q: usize) -> HaefligerVerdict {
    let first = q + 2;
    if let Some((&i, _)) = data.flags.range(first..).find(|(_, &z)| !z) {
        return HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(i));
    }
    let mut i = first;
    loop {
        match data.is_zero(i) {
            Some(true) => {}
            Some(false) => return HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(i)),
            None => return HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(i)),
        }
        let bound = [data.zero_above, data.dim].into_iter().flatten().min();
        match bound {
            Some(b) if i > b => {
                // everything above is zero unless explicitly flagged, and
                // nonzero flags were handled first
                return HaefligerVerdict::Applies;
            }
            _ => i += 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table() {
        let d = CohomologyData {
            zero_above: Some(1),
            ..Default::default()
        };
        assert_eq!(haefliger_corollary_check(&d, 1), HaefligerVerdict::Applies);

        let mut cp5c = CohomologyData {
            dim: Some(12),
            ..Default::default()
        };
        for i in 0..=12 {
            cp5c.set_group(i, if i % 2 == 0 && i <= 10 { "Z" } else { "0" }).unwrap();
        }
        assert_eq!(
            haefliger_corollary_check(&cp5c, 2),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(4))
        );

        assert_eq!(
            haefliger_corollary_check(&CohomologyData::default(), 2),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(4))
        );

        let mut over = CohomologyData {
            zero_above: Some(3),
            ..Default::default()
        };
        over.flags.insert(4, false);
        assert_eq!(
            haefliger_corollary_check(&over, 2),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Nonzero(4))
        );
    }

    #[test]
    fn partial_flags_leave_gaps_unknown() {
        let mut d = CohomologyData::default();
        d.flags.insert(4, true);
        assert_eq!(
            haefliger_corollary_check(&d, 2),
            HaefligerVerdict::DoesNotApply(HaefligerReason::Unknown(5))
        );
        d.dim = Some(4);
        assert_eq!(haefliger_corollary_check(&d, 2), HaefligerVerdict::Applies);
    }
}
