use serde::Serialize;

use crate::error::{PathError, Result};
use crate::path::{partial_le, FamilySpec};

use super::{all_words, FamilyEnumeration, UNPRUNED_MAX_N};

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub holds: bool,
    /// Words `(R, S, T)` with members `R ⪯ S ⪯ T` but `S` outside the family.
    pub witness: Option<(String, String, String)>,
}

/// Checks `(R, T members, R ⪯ S ⪯ T) ⇒ S member` over all words `S`.
pub fn sandwich_closure_check(spec: &FamilySpec, enumeration: &FamilyEnumeration) -> Result<SandwichReport> {
    if spec.n() > UNPRUNED_MAX_N {
        return Err(PathError::SizeGuard {
            what: "word count 2^n",
            count: 2f64.powi(spec.n() as i32),
            limit: 2f64.powi(UNPRUNED_MAX_N as i32),
        });
    }
    let members = enumeration.members();
    for s in all_words(spec) {
        if enumeration.index_of(&s).is_some() {
            continue;
        }
        let below = members.iter().find(|r| partial_le(r, &s));
        let above = members.iter().find(|t| partial_le(&s, t));
        if let (Some(r), Some(t)) = (below, above) {
            return Ok(SandwichReport {
                holds: false,
                witness: Some((r.word_string(), s.word_string(), t.word_string())),
            });
        }
    }
    Ok(SandwichReport {
        holds: true,
        witness: None,
    })
}
