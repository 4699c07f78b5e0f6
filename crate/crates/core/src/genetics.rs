//! Alleles, genotypes and the trace observation channel for a two-person
//! mixture with a known major contributor.
//!
//! A DIP-STR allele carries a DIP class (`L` or `S`) and an STR variant.
//! Selective amplification targets the DIP class the victim lacks, so a
//! DIP-homozygous victim lets the trace reveal the minor contributor's
//! alleles of the opposite class, and a DIP-heterozygous victim reveals
//! nothing.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Deletion/insertion class of a DIP-STR allele. `L` sorts before `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DipClass {
    L,
    S,
}

impl DipClass {
    pub fn opposite(self) -> DipClass {
        match self {
            DipClass::L => DipClass::S,
            DipClass::S => DipClass::L,
        }
    }
}

impl fmt::Display for DipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DipClass::L => f.write_str("L"),
            DipClass::S => f.write_str("S"),
        }
    }
}

/// A DIP-STR allele such as `L2` or `S11`.
///
/// Ordering is by DIP class first, then by the STR identifier compared as a
/// string, so `L13 < L2 < S11`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DipStrAllele {
    dip: DipClass,
    str_id: String,
}

impl DipStrAllele {
    pub fn new(dip: DipClass, str_id: impl Into<String>) -> Result<Self> {
        let str_id = str_id.into();
        if str_id.is_empty() || str_id.chars().any(|c| c.is_whitespace() || c == ',') {
            return Err(Error::MalformedAllele(format!("{dip}{str_id}")));
        }
        Ok(Self { dip, str_id })
    }

    pub fn dip(&self) -> DipClass {
        self.dip
    }

    pub fn str_id(&self) -> &str {
        &self.str_id
    }

    /// Same STR variant with the DIP class flipped.
    pub fn mirrored(&self) -> DipStrAllele {
        DipStrAllele {
            dip: self.dip.opposite(),
            str_id: self.str_id.clone(),
        }
    }
}

impl fmt::Display for DipStrAllele {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.dip, self.str_id)
    }
}

impl FromStr for DipStrAllele {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_allele(s)
    }
}

/// Parses a label like `L2` or `S11`. Surrounding whitespace is ignored.
pub fn parse_allele(label: &str) -> Result<DipStrAllele> {
    let trimmed = label.trim();
    let mut chars = trimmed.chars();
    let dip = match chars.next() {
        Some('L') => DipClass::L,
        Some('S') => DipClass::S,
        _ => return Err(Error::MalformedAllele(label.to_string())),
    };
    DipStrAllele::new(dip, chars.as_str()).map_err(|_| Error::MalformedAllele(label.to_string()))
}

/// Unordered pair of alleles, stored with `first <= second`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genotype {
    a1: DipStrAllele,
    a2: DipStrAllele,
}

impl Genotype {
    pub fn new(a: DipStrAllele, b: DipStrAllele) -> Self {
        if a <= b {
            Self { a1: a, a2: b }
        } else {
            Self { a1: b, a2: a }
        }
    }

    pub fn parse(a: &str, b: &str) -> Result<Self> {
        Ok(Self::new(parse_allele(a)?, parse_allele(b)?))
    }

    pub fn first(&self) -> &DipStrAllele {
        &self.a1
    }

    pub fn second(&self) -> &DipStrAllele {
        &self.a2
    }

    pub fn alleles(&self) -> [&DipStrAllele; 2] {
        [&self.a1, &self.a2]
    }

    pub fn dip_homozygous(&self) -> bool {
        self.a1.dip == self.a2.dip
    }

    /// The shared DIP class of a DIP-homozygous genotype.
    pub fn homozygous_class(&self) -> Option<DipClass> {
        self.dip_homozygous().then_some(self.a1.dip)
    }

    pub fn map(&self, f: impl Fn(&DipStrAllele) -> DipStrAllele) -> Genotype {
        Genotype::new(f(&self.a1), f(&self.a2))
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a1, self.a2)
    }
}

/// Alleles read from the trace: none, one, or two distinct alleles of a
/// single DIP class, in ascending order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Observation {
    o1: Option<DipStrAllele>,
    o2: Option<DipStrAllele>,
}

impl Observation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds an observation from up to two alleles given in any order.
    pub fn from_alleles(mut alleles: Vec<DipStrAllele>) -> Result<Self> {
        alleles.sort();
        match alleles.len() {
            0 => Ok(Self::empty()),
            1 => Ok(Self {
                o1: alleles.pop(),
                o2: None,
            }),
            2 => {
                if alleles[0] == alleles[1] {
                    return Err(Error::InvalidObservation(format!(
                        "allele {} listed twice; a homozygous contribution shows once",
                        alleles[0]
                    )));
                }
                if alleles[0].dip != alleles[1].dip {
                    return Err(Error::InvalidObservation(format!(
                        "observed alleles {} and {} have different DIP classes",
                        alleles[0], alleles[1]
                    )));
                }
                let o2 = alleles.pop();
                let o1 = alleles.pop();
                Ok(Self { o1, o2 })
            }
            n => Err(Error::InvalidObservation(format!(
                "at most two alleles can be observed, got {n}"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.o1.is_some() as usize + self.o2.is_some() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.o1.is_none()
    }

    pub fn first(&self) -> Option<&DipStrAllele> {
        self.o1.as_ref()
    }

    pub fn second(&self) -> Option<&DipStrAllele> {
        self.o2.as_ref()
    }

    pub fn alleles(&self) -> impl Iterator<Item = &DipStrAllele> {
        self.o1.iter().chain(self.o2.iter())
    }

    pub fn dip(&self) -> Option<DipClass> {
        self.o1.as_ref().map(|a| a.dip)
    }

    pub fn map(&self, f: impl Fn(&DipStrAllele) -> DipStrAllele) -> Observation {
        Observation::from_alleles(self.alleles().map(f).collect())
            .expect("allele relabeling must be injective")
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.o1, &self.o2) {
            (None, _) => f.write_str("-"),
            (Some(a), None) => write!(f, "{a}"),
            (Some(a), Some(b)) => write!(f, "{a}-{b}"),
        }
    }
}

/// What the trace shows when `victim` is the major contributor and `minor`
/// the minor one.
///
/// A DIP-homozygous victim of class `c` exposes the minor's alleles of the
/// other class; an STR-homozygous minor shows a single allele. A
/// DIP-heterozygous victim masks everything.
pub fn observe(victim: &Genotype, minor: &Genotype) -> Observation {
    let Some(class) = victim.homozygous_class() else {
        return Observation::empty();
    };
    let mut seen: Vec<DipStrAllele> = minor
        .alleles()
        .into_iter()
        .filter(|a| a.dip != class)
        .cloned()
        .collect();
    seen.dedup();
    Observation::from_alleles(seen).expect("minor alleles of one class form a valid observation")
}

/// Evidence at one locus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseInput {
    pub locus: String,
    pub victim: Genotype,
    pub suspect: Genotype,
    pub observation: Observation,
}

impl CaseInput {
    /// Checks that the observation could have come out of the channel for
    /// this victim: nothing behind a DIP-heterozygous victim, and only the
    /// opposite class behind a DIP-homozygous one.
    pub fn new(
        locus: impl Into<String>,
        victim: Genotype,
        suspect: Genotype,
        observation: Observation,
    ) -> Result<Self> {
        match (victim.homozygous_class(), observation.dip()) {
            (None, Some(_)) => {
                return Err(Error::InvalidCase(format!(
                    "victim {victim} is DIP-heterozygous, so no minor allele can be observed"
                )))
            }
            (Some(c), Some(o)) if c == o => {
                return Err(Error::InvalidCase(format!(
                    "observed {} alleles cannot be told apart from a {c}-{c} victim",
                    o
                )))
            }
            _ => {}
        }
        Ok(Self {
            locus: locus.into(),
            victim,
            suspect,
            observation,
        })
    }

    /// Applies an injective allele relabeling to every genotype and the
    /// observation.
    pub fn map_alleles(&self, f: impl Fn(&DipStrAllele) -> DipStrAllele) -> Result<CaseInput> {
        CaseInput::new(
            self.locus.clone(),
            self.victim.map(&f),
            self.suspect.map(&f),
            self.observation.map(&f),
        )
    }

    /// Shape of the observation as seen under the defence hypothesis. The
    /// suspect plays no part, so this never returns [`CaseKind::Exclusion`].
    pub fn defence_kind(&self) -> CaseKind {
        let Some(victim_class) = self.victim.homozygous_class() else {
            return CaseKind::VictimHeterozygous;
        };
        let side = victim_class.opposite();
        match (self.observation.first(), self.observation.second()) {
            (Some(i), Some(j)) => CaseKind::TwoAlleles {
                first: i.clone(),
                second: j.clone(),
                side,
            },
            (Some(i), None) => CaseKind::OneAllele {
                allele: i.clone(),
                side,
            },
            _ => CaseKind::NoAllele { side },
        }
    }
}

/// The row of the defence-probability table a case falls into. `side` is
/// the DIP class the trace can reveal, the opposite of the victim's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseKind {
    TwoAlleles {
        first: DipStrAllele,
        second: DipStrAllele,
        side: DipClass,
    },
    OneAllele {
        allele: DipStrAllele,
        side: DipClass,
    },
    NoAllele {
        side: DipClass,
    },
    VictimHeterozygous,
    /// The suspect as minor contributor would not have produced this trace.
    Exclusion,
}

pub fn classify_case(case: &CaseInput) -> CaseKind {
    if !case.victim.dip_homozygous() {
        return CaseKind::VictimHeterozygous;
    }
    if observe(&case.victim, &case.suspect) != case.observation {
        return CaseKind::Exclusion;
    }
    case.defence_kind()
}
