//! Ring flags, lattice arguments and number formatting shared by the subcommands.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ramified_kr::lattice::dsl::parse_gram;
use ramified_kr::lattice::{std_lattice, StdLattice};
use ramified_kr::{Gram, RingConfig, Twist, Q};

/// Environment variable overriding the oracle work budget.
pub const BUDGET_ENV: &str = "KRCHECK_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TwistArg {
    /// `π₀ = p`.
    One,
    /// `π₀ = s·p` with `s` the least non-residue.
    Nonresidue,
}

impl TwistArg {
    pub fn twist(self) -> Twist {
        match self {
            TwistArg::One => Twist::One,
            TwistArg::Nonresidue => Twist::NonResidue,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TwistArg::One => "one",
            TwistArg::Nonresidue => "nonresidue",
        }
    }
}

pub fn ring(q: u64, twist: TwistArg) -> Result<RingConfig> {
    RingConfig::new(q, twist.twist()).with_context(|| format!("bad ring parameters q={q}"))
}

/// Work budget from the environment, if set.
pub fn budget_override() -> Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => {
            let n = v.trim().parse().with_context(|| format!("{BUDGET_ENV}={v} is not an unsigned integer"))?;
            Ok(Some(n))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{BUDGET_ENV}: {e}"),
    }
}

fn int_field(field: &str, what: &str) -> Result<i64> {
    field.parse().with_context(|| format!("parse error at `{field}`: expected {what}"))
}

/// A lattice given either as `I:n:eps`, `H`, `Hodd:e`, `Hni:n:i:eps`, or in the Gram DSL.
pub fn lattice(cfg: &RingConfig, text: &str) -> Result<Gram> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let kind = match parts.as_slice() {
        ["I", n, eps] => StdLattice::I { n: int_field(n, "a rank")? as usize, eps: int_field(eps, "a sign")? as i8 },
        ["Hodd", e] => StdLattice::Hodd(int_field(e, "an odd exponent")?),
        ["Hni", n, i, eps] => StdLattice::Hni {
            n: int_field(n, "a rank")? as usize,
            i: int_field(i, "an index")? as usize,
            eps: int_field(eps, "a sign")? as i8,
        },
        [_] => return parse_gram(cfg, text).map_err(anyhow::Error::new),
        _ => bail!("parse error at `{text}`: unknown named lattice"),
    };
    Ok(std_lattice(cfg, &kind)?)
}

/// Exact rational as `num/den`.
pub fn rat(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
