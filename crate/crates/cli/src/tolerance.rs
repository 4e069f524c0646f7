use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Upper bounds used by the checks. Lower bounds (witness gaps) are fixed
/// by the checks themselves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckTolerances {
    /// Per-tuple |P_temporal − P_spatial|.
    pub equivalence: f64,
    /// |simulated − closed form| for projective chains.
    pub factorization: f64,
    /// Entrywise error of the closed-form instruments.
    pub closed_form: f64,
    pub completeness: f64,
    /// 1 − fidelity of corrected MBQC outputs.
    pub fidelity: f64,
    /// Conditional-distribution gap of projective chains.
    pub decorrelation: f64,
    /// Order-1 vs order-2 distributions for commuting lattices.
    pub commuting_orders: f64,
}

impl Default for CheckTolerances {
    fn default() -> Self {
        Self {
            equivalence: 1e-9,
            factorization: 1e-10,
            closed_form: 1e-14,
            completeness: 1e-10,
            fidelity: 1e-9,
            decorrelation: 1e-10,
            commuting_orders: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceProfile {
    #[default]
    Default,
    /// Ten times tighter, except the closed-form bound which is already at
    /// rounding level.
    Strict,
    /// A hundred times looser.
    Loose,
}

impl ToleranceProfile {
    pub fn tolerances(self) -> CheckTolerances {
        let base = CheckTolerances::default();
        // Divide rather than multiply by 0.1 so strict bounds stay round.
        let scale = |f: &dyn Fn(f64) -> f64, keep_closed: bool| CheckTolerances {
            equivalence: f(base.equivalence),
            factorization: f(base.factorization),
            closed_form: if keep_closed { base.closed_form } else { f(base.closed_form) },
            completeness: f(base.completeness),
            fidelity: f(base.fidelity),
            decorrelation: f(base.decorrelation),
            commuting_orders: f(base.commuting_orders),
        };
        match self {
            Self::Default => base,
            Self::Strict => scale(&|t| t / 10.0, true),
            Self::Loose => scale(&|t| t * 100.0, false),
        }
    }
}

/// Field-by-field overrides from a scenario file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub equivalence: Option<f64>,
    pub factorization: Option<f64>,
    pub closed_form: Option<f64>,
    pub completeness: Option<f64>,
    pub fidelity: Option<f64>,
    pub decorrelation: Option<f64>,
    pub commuting_orders: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, mut t: CheckTolerances) -> CheckTolerances {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        set(&mut t.equivalence, self.equivalence);
        set(&mut t.factorization, self.factorization);
        set(&mut t.closed_form, self.closed_form);
        set(&mut t.completeness, self.completeness);
        set(&mut t.fidelity, self.fidelity);
        set(&mut t.decorrelation, self.decorrelation);
        set(&mut t.commuting_orders, self.commuting_orders);
        t
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        [
            self.equivalence,
            self.factorization,
            self.closed_form,
            self.completeness,
            self.fidelity,
            self.decorrelation,
            self.commuting_orders,
        ]
        .into_iter()
        .flatten()
    }
}
