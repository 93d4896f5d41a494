//! Stoichiometric simulation of the bench protocol on exact concentrations.
//!
//! Component strands are mixed at their path multiplicity (one unit per
//! choice-to-termination path they take part in), so one unit of a shared
//! strand is available to every path. Reported "per-path" concentrations
//! divide that back out.

use std::fmt;

use serde::Serialize;

use crate::compiler::{EncodingPlan, EnzymeLibrary, PrimerPair, Role};
use crate::scalar::Scalar;
use crate::strand::{cut_at, find_sites, Duplex};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WetlabError {
    #[error("unknown enzyme {0:?}")]
    UnknownEnzyme(String),
    #[error("PCR cycle count {0} is negative")]
    NegativeCycles(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Active,
    Amplified,
    Waste,
    Fragment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpeciesKind {
    /// A motif strand or duplex as mixed.
    Component(Role),
    /// A chance-node strand sequestered by its threshold strand.
    Waste { chance: Role, threshold: Role },
    /// Ligated full path `Z, O_i, P_j, u_j, T`.
    Construct { option: usize, outcome: usize, duplex: Duplex },
    Fragment { option: usize, outcome: usize, duplex: Duplex },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Species<T> {
    pub kind: SpeciesKind,
    pub concentration: T,
    pub status: Status,
}

impl<T: Scalar> Species<T> {
    pub fn name(&self) -> String {
        match &self.kind {
            SpeciesKind::Component(role) => role.tag(),
            SpeciesKind::Waste { chance, threshold } => format!("waste {chance}:{threshold}"),
            SpeciesKind::Construct { option, outcome, duplex } => {
                format!("O_{}/P_{} {} bp", option + 1, outcome + 1, duplex.len())
            }
            SpeciesKind::Fragment { option, outcome, duplex } => {
                format!("fragment O_{}/P_{} {} bp", option + 1, outcome + 1, duplex.len())
            }
        }
    }

    /// Duplex length for constructs and fragments.
    pub fn length(&self) -> Option<usize> {
        match &self.kind {
            SpeciesKind::Construct { duplex, .. } | SpeciesKind::Fragment { duplex, .. } => Some(duplex.len()),
            _ => None,
        }
    }

    pub fn is_construct(&self) -> bool {
        matches!(self.kind, SpeciesKind::Construct { .. })
    }

    pub fn path(&self) -> Option<(usize, usize)> {
        match self.kind {
            SpeciesKind::Construct { option, outcome, .. } => Some((option, outcome)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Delta {
    pub species: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub tube: String,
    pub step: String,
    pub note: String,
    pub deltas: Vec<Delta>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeState<T> {
    pub label: String,
    pub species: Vec<Species<T>>,
    pub enzymes: Vec<String>,
    pub pcr_cycles: u32,
    /// Share of the original mixture's volume held by this tube.
    pub volume_fraction: T,
    pub options: usize,
    pub outcomes: usize,
    pub log: Vec<AuditEntry>,
}

impl<T: Scalar> TubeState<T> {
    pub fn empty(label: impl Into<String>, options: usize, outcomes: usize) -> Self {
        Self {
            label: label.into(),
            species: Vec::new(),
            enzymes: Vec::new(),
            pcr_cycles: 0,
            volume_fraction: T::one(),
            options,
            outcomes,
            log: Vec::new(),
        }
    }

    pub fn find(&self, kind: &SpeciesKind) -> Option<&Species<T>> {
        self.species.iter().find(|s| &s.kind == kind)
    }

    pub fn concentration(&self, kind: &SpeciesKind) -> T {
        self.find(kind).map(|s| s.concentration.clone()).unwrap_or_else(T::zero)
    }

    /// Concentration of a component divided by the number of paths sharing it.
    pub fn per_path(&self, role: Role) -> T {
        let m = role.multiplicity(self.options, self.outcomes).max(1);
        self.concentration(&SpeciesKind::Component(role)) / T::from_usize(m)
    }

    pub fn constructs(&self) -> impl Iterator<Item = &Species<T>> {
        self.species.iter().filter(|s| s.is_construct())
    }

    /// Material of `role` held anywhere in the tube: free, in waste, or
    /// ligated into constructs and their fragments.
    pub fn material(&self, role: Role) -> T {
        self.species
            .iter()
            .filter(|s| match &s.kind {
                SpeciesKind::Component(r) => *r == role,
                SpeciesKind::Waste { chance, threshold } => *chance == role || *threshold == role,
                SpeciesKind::Construct { option, outcome, .. } => Role::path(*option, *outcome).contains(&role),
                SpeciesKind::Fragment { .. } => false,
            })
            .fold(T::zero(), |acc, s| acc + s.concentration.clone())
    }

    fn record(&mut self, step: &str, note: String, deltas: Vec<Delta>) {
        self.log.push(AuditEntry {
            tube: self.label.clone(),
            step: step.to_string(),
            note,
            deltas,
        });
    }

    fn index_of(&self, kind: &SpeciesKind) -> Option<usize> {
        self.species.iter().position(|s| &s.kind == kind)
    }

    fn add(&mut self, kind: SpeciesKind, amount: T, status: Status) {
        match self.index_of(&kind) {
            Some(k) => {
                let s = &mut self.species[k];
                s.concentration = s.concentration.clone() + amount;
            }
            None => self.species.push(Species {
                kind,
                concentration: amount,
                status,
            }),
        }
    }

    pub fn audit_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.log).expect("audit entries serialize")
    }
}

fn delta<T: Scalar>(species: String, before: &T, after: &T) -> Delta {
    Delta {
        species,
        before: before.to_fraction_string(),
        after: after.to_fraction_string(),
    }
}

/// One tube holding every motif component at its path multiplicity and each
/// threshold strand `Th_ij` at `R_j`.
pub fn mix<T: Scalar>(plan: &EncodingPlan<T>) -> TubeState<T> {
    let (n, m) = (plan.option_count(), plan.outcome_count());
    let mut tube = TubeState::empty("mix", n, m);
    if n == 0 || m == 0 {
        tube.record("mix", "empty plan".into(), Vec::new());
        return tube;
    }
    let mut deltas = Vec::new();
    for role in Role::all(n, m) {
        let c = match role {
            Role::Threshold(_, j) => plan.threshold_ratios[j].clone(),
            _ => T::from_usize(role.multiplicity(n, m)),
        };
        deltas.push(delta(role.tag(), &T::zero(), &c));
        tube.species.push(Species {
            kind: SpeciesKind::Component(role),
            concentration: c,
            status: Status::Active,
        });
    }
    tube.record("mix", format!("{} species", tube.species.len()), deltas);
    tube
}

/// Each threshold strand sequesters its chance-node strand one to one.
pub fn apply_thresholds<T: Scalar>(mut tube: TubeState<T>) -> TubeState<T> {
    let mut deltas = Vec::new();
    for i in 0..tube.options {
        for j in 0..tube.outcomes {
            let chance = Role::Chance(i, j);
            let threshold = Role::Threshold(i, j);
            let (Some(ck), Some(tk)) = (
                tube.index_of(&SpeciesKind::Component(chance)),
                tube.index_of(&SpeciesKind::Component(threshold)),
            ) else {
                continue;
            };
            let c = tube.species[ck].concentration.clone();
            let r = tube.species[tk].concentration.clone();
            let consumed = T::min_of(c.clone(), r.clone());
            if consumed == T::zero() {
                continue;
            }
            tube.species[ck].concentration = c.clone() - consumed.clone();
            tube.species[tk].concentration = r.clone() - consumed.clone();
            deltas.push(delta(chance.tag(), &c, &tube.species[ck].concentration));
            deltas.push(delta(threshold.tag(), &r, &tube.species[tk].concentration));
            let waste = SpeciesKind::Waste { chance, threshold };
            let before = tube.concentration(&waste);
            tube.add(waste.clone(), consumed, Status::Waste);
            let after = tube.concentration(&waste);
            deltas.push(delta(format!("waste {chance}:{threshold}"), &before, &after));
        }
    }
    tube.record("thresholds", format!("{} displacements", deltas.len() / 3), deltas);
    tube
}

/// Ligates every path in `(option, outcome)` order at its limiting
/// constituent concentration, debiting the constituents.
pub fn assemble<T: Scalar>(mut tube: TubeState<T>, plan: &EncodingPlan<T>) -> TubeState<T> {
    let mut deltas = Vec::new();
    let mut notes = Vec::new();
    for i in 0..tube.options {
        for j in 0..tube.outcomes {
            let roles = Role::path(i, j);
            let idx: Option<Vec<usize>> = roles
                .iter()
                .map(|r| tube.index_of(&SpeciesKind::Component(*r)))
                .collect();
            let Some(idx) = idx else {
                notes.push(format!("O_{}/P_{} missing a constituent", i + 1, j + 1));
                continue;
            };
            let amount = idx
                .iter()
                .map(|&k| tube.species[k].concentration.clone())
                .reduce(T::min_of)
                .expect("paths have constituents");
            if amount <= T::zero() {
                continue;
            }
            let duplex = match plan.sequences.construct(i, j) {
                Ok(d) => d,
                Err(e) => {
                    notes.push(e.to_string());
                    continue;
                }
            };
            for &k in &idx {
                let before = tube.species[k].concentration.clone();
                tube.species[k].concentration = before.clone() - amount.clone();
                deltas.push(delta(tube.species[k].name(), &before, &tube.species[k].concentration));
            }
            let kind = SpeciesKind::Construct {
                option: i,
                outcome: j,
                duplex,
            };
            let name = Species {
                kind: kind.clone(),
                concentration: amount.clone(),
                status: Status::Active,
            }
            .name();
            deltas.push(delta(name, &T::zero(), &amount));
            tube.add(kind, amount, Status::Active);
        }
    }
    let note = if notes.is_empty() {
        format!("{} constructs", tube.constructs().count())
    } else {
        format!("{} constructs; {}", tube.constructs().count(), notes.join("; "))
    };
    tube.record("assemble", note, deltas);
    tube
}

/// Divides the mixture into `count` equal tubes. Concentration is
/// intensive, so every tube keeps the mixture's concentrations and records
/// its share of the volume.
pub fn split<T: Scalar>(tube: &TubeState<T>, count: usize) -> Vec<TubeState<T>> {
    (0..count)
        .map(|k| {
            let mut t = tube.clone();
            t.label = format!("TT{}", k + 1);
            t.volume_fraction = tube.volume_fraction.clone() / T::from_usize(count);
            t.log.clear();
            t.record(
                "split",
                format!("1/{count} of {}", tube.label),
                Vec::new(),
            );
            t
        })
        .collect()
}

/// Cuts every construct carrying a site of any listed enzyme.
pub fn digest<T: Scalar>(
    mut tube: TubeState<T>,
    enzymes: &[String],
    library: &EnzymeLibrary,
) -> Result<TubeState<T>, WetlabError> {
    let sites = enzymes
        .iter()
        .map(|name| library.get(name).cloned().ok_or_else(|| WetlabError::UnknownEnzyme(name.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut deltas = Vec::new();
    let mut cuts = 0usize;
    let mut next = Vec::with_capacity(tube.species.len());
    for s in std::mem::take(&mut tube.species) {
        let SpeciesKind::Construct { option, outcome, duplex } = &s.kind else {
            next.push(s);
            continue;
        };
        let mut columns: Vec<i64> = sites
            .iter()
            .flat_map(|site| find_sites(duplex, site).into_iter().map(|p| p + site.cut_offset() as i64))
            .collect();
        columns.sort_unstable();
        columns.dedup();
        if columns.is_empty() {
            next.push(s);
            continue;
        }
        cuts += columns.len();
        deltas.push(delta(s.name(), &s.concentration, &T::zero()));
        for piece in cut_at(duplex, &columns) {
            let f = Species {
                kind: SpeciesKind::Fragment {
                    option: *option,
                    outcome: *outcome,
                    duplex: piece,
                },
                concentration: s.concentration.clone(),
                status: Status::Fragment,
            };
            deltas.push(delta(f.name(), &T::zero(), &f.concentration));
            next.push(f);
        }
    }
    tube.species = next;
    tube.enzymes.extend(enzymes.iter().cloned());
    tube.record(
        "digest",
        format!("{} with {} cut(s)", enzymes.join(","), cuts),
        deltas,
    );
    Ok(tube)
}

/// `n` doubling cycles for every construct both primers bind.
pub fn pcr<T: Scalar>(mut tube: TubeState<T>, primers: &PrimerPair, n: i64) -> Result<TubeState<T>, WetlabError> {
    let cycles = u32::try_from(n).map_err(|_| WetlabError::NegativeCycles(n))?;
    let factor = T::two_pow(cycles);
    let mut deltas = Vec::new();
    for s in tube.species.iter_mut() {
        let SpeciesKind::Construct { duplex, .. } = &s.kind else { continue };
        if !primers.amplifies(duplex) {
            continue;
        }
        let before = s.concentration.clone();
        s.concentration = before.clone() * factor.clone();
        s.status = Status::Amplified;
        deltas.push(Delta {
            species: String::new(),
            before: before.to_fraction_string(),
            after: s.concentration.to_fraction_string(),
        });
    }
    let names: Vec<String> = tube
        .species
        .iter()
        .filter(|s| s.status == Status::Amplified)
        .map(|s| s.name())
        .collect();
    for (d, name) in deltas.iter_mut().zip(names) {
        d.species = name;
    }
    tube.pcr_cycles += cycles;
    tube.record("pcr", format!("{cycles} cycles"), deltas);
    Ok(tube)
}

/// Keeps only amplified full-length constructs.
pub fn purify<T: Scalar>(mut tube: TubeState<T>) -> TubeState<T> {
    let before = tube.species.len();
    tube.species.retain(|s| s.is_construct() && s.status == Status::Amplified);
    let removed = before - tube.species.len();
    tube.record("purify", format!("removed {removed} species"), Vec::new());
    tube
}

/// mix → thresholds → assemble → split → digest → PCR → purify.
pub fn run_protocol<T: Scalar>(plan: &EncodingPlan<T>, cycles: i64) -> Result<Vec<TubeState<T>>, WetlabError> {
    if cycles < 0 {
        return Err(WetlabError::NegativeCycles(cycles));
    }
    let tube = mix(plan);
    let tube = apply_thresholds(tube);
    let tube = assemble(tube, plan);
    let tubes = split(&tube, plan.option_count());
    let mut out = Vec::with_capacity(tubes.len());
    for (i, t) in tubes.into_iter().enumerate() {
        let names: Vec<String> = plan.tube_schedule[i].iter().map(|e| e.name().to_string()).collect();
        let t = digest(t, &names, &plan.library)?;
        let t = pcr(t, plan.primers(), cycles)?;
        let mut t = purify(t);
        let mut log = tube.log.clone();
        log.append(&mut t.log);
        t.log = log;
        out.push(t);
    }
    Ok(out)
}

impl<T: Scalar> fmt::Display for TubeState<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}:", self.label)?;
        for s in &self.species {
            writeln!(f, "  {} {} {:?}", s.name(), s.concentration, s.status)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, CompileOptions};
    use crate::decision::DecisionMatrix;
    use crate::scalar::big;
    use crate::{Plan, Rational};

    fn canonical() -> Plan {
        compile(&DecisionMatrix::<Rational>::ball_game(), &CompileOptions::default())
            .unwrap()
            .0
    }

    #[test]
    fn mix_sets_thresholds_and_unit_paths() {
        let plan = canonical();
        let tube = mix(&plan);
        assert_eq!(tube.concentration(&SpeciesKind::Component(Role::Threshold(1, 0))), big(5, 9));
        assert_eq!(tube.concentration(&SpeciesKind::Component(Role::Threshold(0, 1))), big(6, 9));
        assert_eq!(tube.concentration(&SpeciesKind::Component(Role::Threshold(2, 2))), big(7, 9));
        for role in Role::all(3, 3) {
            if !matches!(role, Role::Threshold(..)) {
                assert_eq!(tube.per_path(role), big(1, 1), "{role}");
            }
        }
    }

    #[test]
    fn thresholds_leave_probability_share() {
        let tube = apply_thresholds(mix(&canonical()));
        let e = SpeciesKind::Component(Role::Chance(0, 0));
        assert_eq!(tube.concentration(&e), big(4, 9));
        let w = SpeciesKind::Waste {
            chance: Role::Chance(0, 0),
            threshold: Role::Threshold(0, 0),
        };
        assert_eq!(tube.concentration(&w), big(5, 9));
        for role in Role::all(3, 3) {
            let mixed = mix(&canonical()).material(role);
            assert_eq!(tube.material(role), mixed, "{role}");
        }
    }

    #[test]
    fn assembly_follows_probabilities() {
        let plan = canonical();
        let tube = assemble(apply_thresholds(mix(&plan)), &plan);
        let got: Vec<(usize, usize, usize, Rational)> = tube
            .constructs()
            .map(|s| {
                let (i, j) = s.path().unwrap();
                (i, j, s.length().unwrap(), s.concentration.clone())
            })
            .collect();
        assert_eq!(got.len(), 9);
        assert_eq!(got[0], (0, 0, 147, big(4, 9)));
        assert_eq!(got[4], (1, 1, 156, big(3, 9)));
        assert_eq!(got[8], (2, 2, 174, big(2, 9)));
    }

    #[test]
    fn canonical_protocol_end_to_end() {
        let tubes = run_protocol(&canonical(), 5).unwrap();
        let summary: Vec<Vec<(usize, Rational)>> = tubes
            .iter()
            .map(|t| t.species.iter().map(|s| (s.length().unwrap(), s.concentration.clone())).collect())
            .collect();
        assert_eq!(summary[0], vec![(147, big(128, 9)), (156, big(96, 9))]);
        assert_eq!(summary[1], vec![(147, big(128, 9)), (174, big(64, 9))]);
        assert_eq!(summary[2], vec![(156, big(96, 9)), (174, big(64, 9))]);
    }

    #[test]
    fn zero_cycles_keep_pre_pcr_amounts() {
        let tubes = run_protocol(&canonical(), 0).unwrap();
        let c: Vec<Rational> = tubes[0].species.iter().map(|s| s.concentration.clone()).collect();
        assert_eq!(c, vec![big(4, 9), big(3, 9)]);
    }

    #[test]
    fn negative_cycles_are_rejected() {
        let plan = canonical();
        assert_eq!(run_protocol(&plan, -1), Err(WetlabError::NegativeCycles(-1)));
        assert_eq!(
            pcr(mix(&plan), plan.primers(), -3).unwrap_err(),
            WetlabError::NegativeCycles(-3)
        );
    }

    #[test]
    fn digest_survivors_and_errors() {
        let plan = canonical();
        let tube = assemble(apply_thresholds(mix(&plan)), &plan);
        let names: Vec<String> = ["HpaI", "StuI", "ScaI"].iter().map(|s| s.to_string()).collect();
        let cut = digest(tube.clone(), &names, &plan.library).unwrap();
        let survivors: Vec<(usize, usize)> = cut.constructs().filter_map(|s| s.path()).collect();
        assert_eq!(survivors, vec![(0, 0), (0, 1)]);
        let same = digest(tube.clone(), &[], &plan.library).unwrap();
        assert_eq!(same.species, tube.species);
        assert_eq!(
            digest(tube, &["NotI".to_string()], &plan.library).unwrap_err(),
            WetlabError::UnknownEnzyme("NotI".into())
        );
    }

    #[test]
    fn purify_is_idempotent_and_drops_waste() {
        let plan = canonical();
        let t = pcr(assemble(apply_thresholds(mix(&plan)), &plan), plan.primers(), 2).unwrap();
        let once = purify(t);
        let twice = purify(once.clone());
        assert_eq!(once.species, twice.species);
        let waste_only = apply_thresholds(mix(&plan));
        assert!(purify(waste_only).species.is_empty());
    }

    #[test]
    fn split_keeps_concentration() {
        let plan = canonical();
        let t = assemble(apply_thresholds(mix(&plan)), &plan);
        let parts = split(&t, 3);
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[2].label, "TT3");
        assert_eq!(parts[0].volume_fraction, big(1, 3));
        assert_eq!(parts[1].species, t.species);
    }

    #[test]
    fn audit_log_is_deterministic() {
        let a = run_protocol(&canonical(), 5).unwrap();
        let b = run_protocol(&canonical(), 5).unwrap();
        assert_eq!(a[0].audit_json(), b[0].audit_json());
        let steps: Vec<&str> = a[1].log.iter().map(|e| e.step.as_str()).collect();
        assert_eq!(steps, ["mix", "thresholds", "assemble", "split", "digest", "pcr", "purify"]);
    }
}
