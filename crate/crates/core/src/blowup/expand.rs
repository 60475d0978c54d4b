//! Printable expansions of the formulas in the tautological class `z`.

use std::fmt;
use std::str::FromStr;

use super::{
    default_trunc, difflp_operator, main_normal_chern, newnormal_chern, oldrec_operator, porteous_alpha_in,
    universal_bundle, Twist,
};
use crate::error::{Error, Result};

/// Largest codimension accepted by [`expand_text`].
pub const MAX_EXPAND_CODIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    Porteous,
    Oldrec,
    Main,
    Difflp,
    Simlem,
    Newnormal,
}

impl Formula {
    pub const ALL: [Formula; 6] =
        [Formula::Porteous, Formula::Oldrec, Formula::Main, Formula::Difflp, Formula::Simlem, Formula::Newnormal];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Porteous => "porteous",
            Formula::Oldrec => "oldrec",
            Formula::Main => "main",
            Formula::Difflp => "difflp",
            Formula::Simlem => "simlem",
            Formula::Newnormal => "newnormal",
        }
    }

    fn takes_excess(self) -> bool {
        matches!(self, Formula::Main | Formula::Simlem | Formula::Newnormal)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown formula `{s}`")))
    }
}

/// `alpha = ...` for the classical formula; otherwise the full expansion, its
/// `z`-free part `F0`, the rest `F+` and the form reduced by the Grothendieck
/// relation of the normal bundle, one per line.
pub fn expand_text(
    formula: Formula,
    codim: usize,
    excess: usize,
    twist: Option<Twist>,
    max_degree: Option<u32>,
) -> Result<String> {
    if codim > MAX_EXPAND_CODIM {
        return Err(Error::Unsupported(format!("codimension {codim} exceeds {MAX_EXPAND_CODIM}")));
    }
    if codim == 0 && formula != Formula::Newnormal {
        return Err(Error::Unsupported(format!("{formula} needs a positive codimension")));
    }
    if excess > 0 && !formula.takes_excess() {
        return Err(Error::Unsupported(format!("{formula} takes no excess bundle")));
    }
    if excess > MAX_EXPAND_CODIM {
        return Err(Error::Unsupported(format!("excess {excess} exceeds {MAX_EXPAND_CODIM}")));
    }
    if twist.is_some() && formula != Formula::Newnormal {
        return Err(Error::Unsupported(format!("{formula} takes no twist")));
    }
    if max_degree == Some(0) {
        return Err(Error::Unsupported("truncation degree must be positive".into()));
    }
    let bound = default_trunc(codim + excess, max_degree);
    let op = match formula {
        Formula::Porteous => {
            let alpha = porteous_alpha_in(&universal_bundle(codim, bound)?)?;
            return Ok(format!("alpha = {alpha}\n"));
        }
        Formula::Oldrec => oldrec_operator(codim, bound)?,
        // the complete-intersection form has the same expansion, read with
        // globally defined bundles
        Formula::Main | Formula::Simlem => main_normal_chern(codim, excess, bound)?,
        Formula::Difflp => difflp_operator(codim, bound)?,
        Formula::Newnormal => newnormal_chern(codim, excess, twist.unwrap_or_default(), bound)?,
    };
    Ok(format!(
        "expr = {}\nF0 = {}\nF+ = {}\nreduced = {}\n",
        op.expr(),
        op.f0(),
        op.fplus(),
        op.reduced()?
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Formula::ALL {
            assert_eq!(f.to_string().parse::<Formula>().unwrap(), f);
        }
        assert!("nope".parse::<Formula>().is_err());
    }

    #[test]
    fn small_expansions() {
        assert_eq!(expand_text(Formula::Porteous, 2, 0, None, None).unwrap(), "alpha = -1 + z\n");
        assert_eq!(expand_text(Formula::Porteous, 1, 0, None, None).unwrap(), "alpha = 0\n");
        let difflp = expand_text(Formula::Difflp, 1, 0, None, None).unwrap();
        assert!(difflp.ends_with("reduced = 1\n"), "{difflp}");
        let main = expand_text(Formula::Main, 1, 0, None, Some(2)).unwrap();
        assert_eq!(main.lines().next().unwrap(), "expr = 1 + n1 + z + n1*z + z^2");
    }

    #[test]
    fn rejects_unsupported_combinations() {
        assert!(matches!(expand_text(Formula::Main, 0, 0, None, None), Err(Error::Unsupported(_))));
        assert!(matches!(expand_text(Formula::Oldrec, 2, 1, None, None), Err(Error::Unsupported(_))));
        assert!(matches!(
            expand_text(Formula::Main, 2, 0, Some(Twist::PlusExceptional), None),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(expand_text(Formula::Porteous, 9, 0, None, None), Err(Error::Unsupported(_))));
        assert!(expand_text(Formula::Newnormal, 0, 2, None, None).is_ok());
    }
}
