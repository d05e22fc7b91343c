use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence { routine: &'static str, iterations: usize },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("budget {budget} does not exceed the fixed cost {fixed_cost}")]
    BudgetBelowFixedCost { budget: f64, fixed_cost: f64 },

    #[error("no feasible design point for budget {budget}")]
    AllInfeasible { budget: f64 },

    #[error("empty power curve")]
    EmptyCurve,

    #[error("truncation needs about {expected_atoms:.0} atoms, above the budget of {atom_budget}")]
    TruncationFailed { expected_atoms: f64, atom_budget: usize },

    #[error("inconsistent shapes: {0}")]
    ShapeMismatch(&'static str),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain { name, value, reason }
    }
}
