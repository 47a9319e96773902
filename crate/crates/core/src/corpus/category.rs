//! Structured reading of category labels such as `can+past` or
//! `will+progressive+perfect`.
//!
//! Learners treat labels as opaque strings; this is an optional validation
//! layer over the label grammar: any subset of the twelve auxiliaries,
//! combined with at most one tense marker and the progressive and perfect
//! flags, or the lone `imperative` category.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Auxiliary {
    BeAbleTo,
    BeGoingTo,
    Can,
    HaveTo,
    HadBetter,
    May,
    Must,
    Need,
    Ought,
    Shall,
    UsedTo,
    Will,
}

impl Auxiliary {
    pub const ALL: [Auxiliary; 12] = [
        Auxiliary::BeAbleTo,
        Auxiliary::BeGoingTo,
        Auxiliary::Can,
        Auxiliary::HaveTo,
        Auxiliary::HadBetter,
        Auxiliary::May,
        Auxiliary::Must,
        Auxiliary::Need,
        Auxiliary::Ought,
        Auxiliary::Shall,
        Auxiliary::UsedTo,
        Auxiliary::Will,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Auxiliary::BeAbleTo => "be-able-to",
            Auxiliary::BeGoingTo => "be-going-to",
            Auxiliary::Can => "can",
            Auxiliary::HaveTo => "have-to",
            Auxiliary::HadBetter => "had-better",
            Auxiliary::May => "may",
            Auxiliary::Must => "must",
            Auxiliary::Need => "need",
            Auxiliary::Ought => "ought",
            Auxiliary::Shall => "shall",
            Auxiliary::UsedTo => "used-to",
            Auxiliary::Will => "will",
        }
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Tense {
    #[default]
    Present,
    Past,
}

/// A parsed category. The auxiliary set is a 12-bit mask in
/// [`Auxiliary::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CategorySpec {
    auxiliaries: u16,
    pub tense: Tense,
    pub progressive: bool,
    pub perfect: bool,
    pub imperative: bool,
}

impl CategorySpec {
    pub fn imperative() -> Self {
        Self {
            imperative: true,
            ..Self::default()
        }
    }

    pub fn auxiliaries(&self) -> impl Iterator<Item = Auxiliary> + '_ {
        Auxiliary::ALL
            .into_iter()
            .filter(|aux| self.auxiliaries & aux.bit() != 0)
    }

    pub fn has(&self, aux: Auxiliary) -> bool {
        self.auxiliaries & aux.bit() != 0
    }

    pub fn with_auxiliary(mut self, aux: Auxiliary) -> Self {
        self.auxiliaries |= aux.bit();
        self
    }
}

pub fn parse_category_descriptor(label: &str) -> Result<CategorySpec> {
    let err = |message: String| Error::Descriptor {
        label: label.to_owned(),
        message,
    };
    if label.is_empty() {
        return Err(err("empty descriptor".into()));
    }
    let mut spec = CategorySpec::default();
    let mut tense: Option<Tense> = None;
    let mut count = 0;
    for token in label.split('+') {
        count += 1;
        let duplicate = || err(format!("`{token}` appears more than once"));
        match token {
            "present" | "past" => {
                if tense.is_some() {
                    return Err(err("more than one tense marker".into()));
                }
                tense = Some(if token == "past" {
                    Tense::Past
                } else {
                    Tense::Present
                });
            }
            "progressive" => {
                if spec.progressive {
                    return Err(duplicate());
                }
                spec.progressive = true;
            }
            "perfect" => {
                if spec.perfect {
                    return Err(duplicate());
                }
                spec.perfect = true;
            }
            "imperative" => spec.imperative = true,
            other => {
                let aux = Auxiliary::ALL
                    .into_iter()
                    .find(|a| a.name() == other)
                    .ok_or_else(|| err(format!("unknown token `{other}`")))?;
                if spec.has(aux) {
                    return Err(duplicate());
                }
                spec.auxiliaries |= aux.bit();
            }
        }
    }
    if spec.imperative && count > 1 {
        return Err(err("`imperative` cannot be combined with other tokens".into()));
    }
    spec.tense = tense.unwrap_or_default();
    Ok(spec)
}

impl FromStr for CategorySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_category_descriptor(s)
    }
}

/// Canonical descriptor: auxiliaries in declaration order, then `past`,
/// `progressive`, `perfect`; the all-default category prints as `present`.
impl fmt::Display for CategorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.imperative {
            return f.write_str("imperative");
        }
        let mut parts: Vec<&str> = self.auxiliaries().map(Auxiliary::name).collect();
        if self.tense == Tense::Past {
            parts.push("past");
        }
        if self.progressive {
            parts.push("progressive");
        }
        if self.perfect {
            parts.push("perfect");
        }
        if parts.is_empty() {
            parts.push("present");
        }
        f.write_str(&parts.join("+"))
    }
}
