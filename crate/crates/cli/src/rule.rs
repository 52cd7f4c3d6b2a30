use anyhow::{bail, Context, Result};

use padic_ds::constructions::{
    psi_prime_transform, real_prime_psi, theorem1_psi, theorem2_psi, theorem2_tables, PsiRule, SpectrumDigits,
};
use padic_ds::rational::{self, Rational};

use crate::{Place, RuleArgs, RuleName};

pub fn parse_rational(s: &str) -> Result<Rational> {
    rational::parse(s).with_context(|| format!("{s:?} is not a rational of the form num/den"))
}

fn target(args: &RuleArgs) -> Result<Rational> {
    let s = args.x.as_deref().context("--x is required for this rule")?;
    parse_rational(s)
}

/// The approximation function selected on the command line.
pub fn build(args: &RuleArgs) -> Result<PsiRule> {
    let rule = match (args.rule, args.p) {
        (RuleName::Zero, _) => PsiRule::Zero,
        (RuleName::RealPrime, Place::Infinite) => real_prime_psi(target(args)?)?,
        (RuleName::RealPrime, Place::Prime(_)) => bail!("real-prime needs --p inf"),
        (_, Place::Infinite) => bail!("rule {:?} needs a finite prime", args.rule),
        (RuleName::Theorem1, Place::Prime(p)) => {
            let digits = args.digits.as_deref().context("--digits is required for theorem1")?;
            theorem1_psi(p, SpectrumDigits::parse(p, digits)?)?
        }
        (RuleName::Theorem2, Place::Prime(p)) => {
            let x = target(args)?;
            if x == Rational::from_integer(1.into()) {
                PsiRule::Theorem2Full { p }
            } else {
                theorem2_psi(theorem2_tables(p, &x, args.depth)?, args.prime_cap)
            }
        }
    };
    Ok(match (args.primed, args.p) {
        (true, Place::Prime(p)) => psi_prime_transform(rule, p),
        (true, Place::Infinite) => bail!("--primed needs a finite prime"),
        (false, _) => rule,
    })
}
