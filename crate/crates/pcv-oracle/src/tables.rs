//! Reference truth tables for the tri-valued algebra and the difference
//! operator, generated from their defining formulas.

use pcv_model::spl::TriValue;

/// The 9-row tri-logical conjunction table `(x, y, x ⊗ y)`.
pub fn tri_and_table() -> Vec<(TriValue, TriValue, TriValue)> {
    let mut out = Vec::with_capacity(9);
    for x in TriValue::ALL {
        for y in TriValue::ALL {
            out.push((x, y, x.and(y)));
        }
    }
    out
}

/// The 9-row tri-logical disjunction table.
pub fn tri_or_table() -> Vec<(TriValue, TriValue, TriValue)> {
    let mut out = Vec::with_capacity(9);
    for x in TriValue::ALL {
        for y in TriValue::ALL {
            out.push((x, y, x.or(y)));
        }
    }
    out
}

/// The 16-row difference table over ground `(D1, A1, D2, A2)`:
/// `(D1 xor D2) ∨ ((D1∧A1) xor (D2∧A2))`.
pub fn diff_table() -> Vec<((bool, bool, bool, bool), bool)> {
    let mut out = Vec::with_capacity(16);
    for d1 in [false, true] {
        for a1 in [false, true] {
            for d2 in [false, true] {
                for a2 in [false, true] {
                    let differs = (d1 != d2) || ((d1 && a1) != (d2 && a2));
                    out.push(((d1, a1, d2, a2), differs));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::verdicts_differ;
    use super::*;
    use pcv_model::spl::TriValue::*;

    #[test]
    fn conjunction_table_highlights() {
        let table = tri_and_table();
        let lookup = |x, y| table.iter().find(|(a, b, _)| *a == x && *b == y).unwrap().2;
        assert_eq!(lookup(Allow, Deny), Deny);
        assert_eq!(lookup(Allow, NotApply), Allow);
        assert_eq!(lookup(NotApply, NotApply), NotApply);
        for v in TriValue::ALL {
            assert_eq!(lookup(Deny, v), Deny);
        }
    }

    #[test]
    fn diff_table_is_the_allow_partition_when_domains_match() {
        for ((d1, a1, d2, a2), differs) in diff_table() {
            let v1 = TriValue::from_pair(d1, a1);
            let v2 = TriValue::from_pair(d2, a2);
            assert_eq!(differs, verdicts_differ(v1, v2));
            if d1 == d2 {
                // deny and not-apply are indistinguishable here
                let allow1 = v1 == Allow;
                let allow2 = v2 == Allow;
                assert_eq!(differs, allow1 != allow2);
            }
        }
        // both never applicable: never different
        let row = diff_table().into_iter().find(|((d1, a1, d2, a2), _)| {
            !(*d1) && *a1 && !(*d2) && !(*a2)
        });
        assert!(!row.unwrap().1);
    }
}
