//! Small hand-checkable instances shared by tests, the `check` command and docs.

use crate::model::{FeasibleSetSpec, Instance, LinearConstraint, UncertaintyModel};

/// Selection of 2 out of 3 items.
pub const TOY3_JSON: &str = r#"{
  "n": 3,
  "constraints": [
    {
      "coeffs": {
        "0": "1",
        "1": "1",
        "2": "1"
      },
      "sense": "=",
      "rhs": "2"
    }
  ],
  "equal_cardinality": 2,
  "integral_polytope": true,
  "C": [
    "1",
    "2",
    "3"
  ],
  "nominal": [
    "2",
    "1",
    "4"
  ],
  "deviation": [
    "3",
    "3",
    "0"
  ],
  "budget": "3",
  "extra_constraints": [],
  "alpha": "0.5"
}
"#;

pub fn toy3() -> Instance {
    Instance {
        feasible: FeasibleSetSpec {
            n: 3,
            constraints: vec![LinearConstraint::eq([(0, 1.0), (1, 1.0), (2, 1.0)], 2.0)],
            equal_cardinality: Some(2),
            integral_polytope: true,
        },
        first_stage: vec![1.0, 2.0, 3.0],
        uncertainty: UncertaintyModel {
            nominal: vec![2.0, 1.0, 4.0],
            deviation: vec![3.0, 3.0, 0.0],
            budget: 3.0,
            extra: Vec::new(),
        },
        alpha: 0.5,
    }
}

/// `x1 + x2 = 1`, zero costs, unit deviations sharing a unit budget, full recovery.
/// Its adversarial optimum sits at the interior scenario (0.5, 0.5), not at a vertex.
pub fn counterexample() -> Instance {
    Instance {
        feasible: FeasibleSetSpec {
            n: 2,
            constraints: vec![LinearConstraint::eq([(0, 1.0), (1, 1.0)], 1.0)],
            equal_cardinality: Some(1),
            integral_polytope: true,
        },
        first_stage: vec![0.0, 0.0],
        uncertainty: UncertaintyModel {
            nominal: vec![0.0, 0.0],
            deviation: vec![1.0, 1.0],
            budget: 1.0,
            extra: Vec::new(),
        },
        alpha: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy3_text_is_canonical() {
        assert_eq!(toy3().to_json(), TOY3_JSON);
        assert!(crate::model::validate(&counterexample()).is_empty());
    }
}
