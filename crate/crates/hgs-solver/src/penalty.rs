const PENALTY_MIN: f64 = 1.0;
const PENALTY_MAX: f64 = 1e6;

/// New capacity-penalty weight after observing `feasible_fraction` of
/// offspring feasible over the last adaptation window.
pub fn adapt_penalty(weight: f64, feasible_fraction: f64, target: f64) -> f64 {
    let next = if feasible_fraction < target {
        weight * 1.2
    } else if feasible_fraction > target {
        weight * 0.85
    } else {
        weight
    };
    next.clamp(PENALTY_MIN, PENALTY_MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_feasible_raises_weight() {
        assert_eq!(adapt_penalty(100.0, 0.0, 0.4), 120.0);
    }

    #[test]
    fn all_feasible_lowers_weight() {
        assert_eq!(adapt_penalty(100.0, 1.0, 0.4), 85.0);
    }

    #[test]
    fn clamped_at_both_ends() {
        assert_eq!(adapt_penalty(1e6, 0.0, 0.4), 1e6);
        assert_eq!(adapt_penalty(1.0, 1.0, 0.4), 1.0);
        assert_eq!(adapt_penalty(50.0, 0.4, 0.4), 50.0);
    }
}
