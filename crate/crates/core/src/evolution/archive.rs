//! Non-dominated archive under minimisation of (cost, complexity).

use crate::expr::{Individual, Objectives};

#[derive(Clone, Debug, PartialEq)]
pub struct FrontEntry {
    pub individual: Individual,
    pub objectives: Objectives,
    /// One s-expression per tree, newline-terminated.
    pub sexprs: String,
    /// Generation in which the entry was first found.
    pub generation: usize,
}

impl FrontEntry {
    /// Panics if the individual has not been evaluated.
    pub fn new(individual: Individual, generation: usize) -> Self {
        let objectives = individual.objectives.expect("individual must be evaluated");
        let sexprs = individual.to_sexprs();
        FrontEntry {
            individual,
            objectives,
            sexprs,
            generation,
        }
    }

    pub fn cost(&self) -> f64 {
        self.objectives.cost
    }

    pub fn complexity(&self) -> f64 {
        self.objectives.complexity
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Archive {
    entries: Vec<FrontEntry>,
}

impl Archive {
    pub fn new() -> Self {
        Archive::default()
    }

    /// Inserts the entry unless it is dominated by, or a duplicate of, an
    /// existing entry. Entries it dominates are dropped. Returns whether it
    /// was kept.
    pub fn insert(&mut self, entry: FrontEntry) -> bool {
        let o = entry.objectives;
        for e in &self.entries {
            if e.objectives.dominates(&o) || (e.objectives == o && e.sexprs == entry.sexprs) {
                return false;
            }
        }
        self.entries.retain(|e| !o.dominates(&e.objectives));
        self.entries.push(entry);
        true
    }

    pub fn insert_individual(&mut self, ind: &Individual, generation: usize) -> bool {
        let o = ind.objectives.expect("individual must be evaluated");
        // cheap rejection before serializing the trees
        if self.entries.iter().any(|e| e.objectives.dominates(&o)) {
            return false;
        }
        self.insert(FrontEntry::new(ind.clone(), generation))
    }

    pub fn entries(&self) -> &[FrontEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries by ascending complexity, then cost, then tree text.
    pub fn sorted(&self) -> Vec<&FrontEntry> {
        let mut v: Vec<&FrontEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| {
            a.complexity()
                .total_cmp(&b.complexity())
                .then(a.cost().total_cmp(&b.cost()))
                .then_with(|| a.sexprs.cmp(&b.sexprs))
        });
        v
    }

    pub fn min_cost(&self) -> Option<f64> {
        self.entries.iter().map(FrontEntry::cost).min_by(f64::total_cmp)
    }

    pub fn min_complexity(&self) -> Option<f64> {
        self.entries.iter().map(FrontEntry::complexity).min_by(f64::total_cmp)
    }

    /// True when no entry dominates another.
    pub fn is_mutually_non_dominated(&self) -> bool {
        self.entries.iter().all(|a| {
            self.entries
                .iter()
                .all(|b| !a.objectives.dominates(&b.objectives))
        })
    }
}

/// Non-dominated, de-duplicated subset of evaluated individuals.
pub fn non_dominated(pop: &[Individual], generation: usize) -> Archive {
    let mut archive = Archive::new();
    for ind in pop {
        archive.insert_individual(ind, generation);
    }
    archive
}
