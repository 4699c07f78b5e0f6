//! Reference databases and their reduction to per-class sufficient
//! statistics.

use std::collections::BTreeMap;

use crate::genetics::{DipClass, DipStrAllele, Genotype};

/// Alleles sampled from the reference population at one locus. Duplicates
/// are meaningful; order is not.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlleleDatabase {
    pub entries: Vec<DipStrAllele>,
    pub source: String,
}

impl AlleleDatabase {
    pub fn new(entries: Vec<DipStrAllele>, source: impl Into<String>) -> Self {
        Self {
            entries,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn counts(&self) -> BTreeMap<DipStrAllele, usize> {
        tally(self.entries.iter())
    }

    pub fn map(&self, f: impl Fn(&DipStrAllele) -> DipStrAllele) -> AlleleDatabase {
        AlleleDatabase {
            entries: self.entries.iter().map(f).collect(),
            source: self.source.clone(),
        }
    }
}

fn tally<'a>(alleles: impl Iterator<Item = &'a DipStrAllele>) -> BTreeMap<DipStrAllele, usize> {
    let mut counts = BTreeMap::new();
    for a in alleles {
        *counts.entry(a.clone()).or_insert(0) += 1;
    }
    counts
}

/// Counts for the alleles of one DIP class.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideStats {
    /// Total number of alleles of this class.
    pub n_side: usize,
    pub counts: BTreeMap<DipStrAllele, usize>,
    /// Number of distinct alleles.
    pub k_b: usize,
    /// Number of alleles seen exactly once.
    pub n1: usize,
}

impl SideStats {
    pub fn from_counts(counts: BTreeMap<DipStrAllele, usize>) -> Self {
        let counts: BTreeMap<_, _> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        Self {
            n_side: counts.values().sum(),
            k_b: counts.len(),
            n1: counts.values().filter(|&&c| c == 1).count(),
            counts,
        }
    }

    pub fn count(&self, allele: &DipStrAllele) -> usize {
        self.counts.get(allele).copied().unwrap_or(0)
    }
}

/// The reference database together with the four alleles of the suspect and
/// victim, which is the data every posterior quantity conditions on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedDatabase {
    pub base: AlleleDatabase,
    pub suspect: Genotype,
    pub victim: Genotype,
    /// Size of the base database (without the four added alleles).
    pub n: usize,
    pub l: SideStats,
    pub s: SideStats,
}

impl AugmentedDatabase {
    pub fn n_l(&self) -> usize {
        self.l.n_side
    }

    pub fn n_s(&self) -> usize {
        self.s.n_side
    }

    pub fn side(&self, class: DipClass) -> &SideStats {
        match class {
            DipClass::L => &self.l,
            DipClass::S => &self.s,
        }
    }

    /// Total alleles including the augmentation, `n + 4`.
    pub fn total(&self) -> usize {
        self.n + 4
    }

    pub fn entries(&self) -> impl Iterator<Item = &DipStrAllele> {
        self.base
            .entries
            .iter()
            .chain(self.suspect.alleles())
            .chain(self.victim.alleles())
    }
}

pub fn augment(base: &AlleleDatabase, suspect: &Genotype, victim: &Genotype) -> AugmentedDatabase {
    let all = base
        .entries
        .iter()
        .chain(suspect.alleles())
        .chain(victim.alleles());
    let (l, s): (BTreeMap<_, _>, BTreeMap<_, _>) = tally(all)
        .into_iter()
        .partition(|(a, _)| a.dip() == DipClass::L);
    AugmentedDatabase {
        base: base.clone(),
        suspect: suspect.clone(),
        victim: victim.clone(),
        n: base.len(),
        l: SideStats::from_counts(l),
        s: SideStats::from_counts(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genetics::parse_allele;
    use proptest::prelude::*;

    fn db(labels: &[&str]) -> AlleleDatabase {
        AlleleDatabase::new(
            labels.iter().map(|l| parse_allele(l).unwrap()).collect(),
            "test",
        )
    }

    #[test]
    fn empty_base_counts_only_augmentation() {
        let adb = augment(
            &db(&[]),
            &Genotype::parse("S1", "S2").unwrap(),
            &Genotype::parse("L1", "L1").unwrap(),
        );
        assert_eq!(adb.n, 0);
        assert_eq!(adb.n_l(), 2);
        assert_eq!(adb.n_s(), 2);
        assert_eq!(adb.s.k_b, 2);
        assert_eq!(adb.s.n1, 2);
        assert_eq!(adb.l.k_b, 1);
        assert_eq!(adb.l.n1, 0);
    }

    #[test]
    fn tallies_with_base() {
        let adb = augment(
            &db(&["L2"]),
            &Genotype::parse("L2", "L13").unwrap(),
            &Genotype::parse("S11", "S11").unwrap(),
        );
        assert_eq!(adb.l.count(&parse_allele("L2").unwrap()), 2);
        assert_eq!(adb.l.count(&parse_allele("L13").unwrap()), 1);
        assert_eq!(adb.l.counts.len(), 2);
        assert_eq!(adb.l.n1, 1);
        assert_eq!(adb.s.count(&parse_allele("S11").unwrap()), 2);
    }

    fn allele_strategy() -> impl Strategy<Value = DipStrAllele> {
        (prop::bool::ANY, 1u8..8).prop_map(|(l, id)| {
            DipStrAllele::new(if l { DipClass::L } else { DipClass::S }, id.to_string()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn augmented_invariants(
            base in prop::collection::vec(allele_strategy(), 0..40),
            s in (allele_strategy(), allele_strategy()),
            v in (allele_strategy(), allele_strategy()),
        ) {
            let suspect = Genotype::new(s.0, s.1);
            let victim = Genotype::new(v.0, v.1);
            let adb = augment(&AlleleDatabase::new(base, "p"), &suspect, &victim);
            prop_assert_eq!(adb.n_l() + adb.n_s(), adb.n + 4);
            for side in [&adb.l, &adb.s] {
                prop_assert!(side.k_b <= side.n_side);
                prop_assert!(side.n1 <= side.k_b);
                prop_assert_eq!(side.counts.values().sum::<usize>(), side.n_side);
            }
            for allele in suspect.alleles().into_iter().chain(victim.alleles()) {
                prop_assert!(adb.side(allele.dip()).count(allele) >= 1);
            }
        }

        #[test]
        fn augment_commutes_with_relabeling(
            base in prop::collection::vec(allele_strategy(), 0..30),
            s in (allele_strategy(), allele_strategy()),
            v in (allele_strategy(), allele_strategy()),
        ) {
            let rename = |x: &DipStrAllele| {
                let id: u32 = x.str_id().parse().unwrap();
                DipStrAllele::new(x.dip(), (100 - id).to_string()).unwrap()
            };
            let base = AlleleDatabase::new(base, "p");
            let suspect = Genotype::new(s.0, s.1);
            let victim = Genotype::new(v.0, v.1);
            let direct = augment(&base.map(rename), &suspect.map(rename), &victim.map(rename));
            let renamed = augment(&base, &suspect, &victim);
            for class in [DipClass::L, DipClass::S] {
                let expected: BTreeMap<_, _> = renamed
                    .side(class)
                    .counts
                    .iter()
                    .map(|(a, &c)| (rename(a), c))
                    .collect();
                prop_assert_eq!(&direct.side(class).counts, &expected);
                prop_assert_eq!(direct.side(class).n1, renamed.side(class).n1);
            }
        }
    }
}
