//! Pairwise comparison of states under an entanglement measure and under the
//! maximized mean QFI, tallied into a 4 × 3 table of ordering classes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::locc::EulerAngleSet;

/// Everything computed for one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: usize,
    pub separable: bool,
    pub concurrence: f64,
    pub negativity: f64,
    pub ree: f64,
    pub ree_converged: bool,
    pub qfi_raw: f64,
    pub qfi_max: f64,
    pub qfi_min: f64,
    pub refined: bool,
    pub max_angles: EulerAngleSet,
    pub min_angles: EulerAngleSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Concurrence,
    Negativity,
    Ree,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Concurrence, Measure::Negativity, Measure::Ree];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Concurrence => "concurrence",
            Measure::Negativity => "negativity",
            Measure::Ree => "ree",
        }
    }

    pub fn of(self, r: &StateRecord) -> f64 {
        match self {
            Measure::Concurrence => r.concurrence,
            Measure::Negativity => r.negativity,
            Measure::Ree => r.ree,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown measure {s:?}")))
    }
}

/// Rows of the table, in display order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureRelation {
    BothZero,
    SecondGreater,
    EqualPositive,
    FirstGreater,
}

impl MeasureRelation {
    pub const ALL: [MeasureRelation; 4] = [
        MeasureRelation::BothZero,
        MeasureRelation::SecondGreater,
        MeasureRelation::EqualPositive,
        MeasureRelation::FirstGreater,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureRelation::BothZero => "both-zero",
            MeasureRelation::SecondGreater => "second-greater",
            MeasureRelation::EqualPositive => "equal-positive",
            MeasureRelation::FirstGreater => "first-greater",
        }
    }

    fn mirrored(self) -> Self {
        match self {
            MeasureRelation::SecondGreater => MeasureRelation::FirstGreater,
            MeasureRelation::FirstGreater => MeasureRelation::SecondGreater,
            other => other,
        }
    }
}

/// Columns of the table, in display order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MqfiRelation {
    Greater,
    Equal,
    Less,
}

impl MqfiRelation {
    pub const ALL: [MqfiRelation; 3] = [
        MqfiRelation::Greater,
        MqfiRelation::Equal,
        MqfiRelation::Less,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            MqfiRelation::Greater => "greater",
            MqfiRelation::Equal => "equal",
            MqfiRelation::Less => "less",
        }
    }

    fn mirrored(self) -> Self {
        match self {
            MqfiRelation::Greater => MqfiRelation::Less,
            MqfiRelation::Less => MqfiRelation::Greater,
            MqfiRelation::Equal => MqfiRelation::Equal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderingClass {
    pub measure_relation: MeasureRelation,
    pub mqfi_relation: MqfiRelation,
}

impl OrderingClass {
    /// The class of the same pair listed in the other order.
    pub fn mirrored(self) -> Self {
        Self {
            measure_relation: self.measure_relation.mirrored(),
            mqfi_relation: self.mqfi_relation.mirrored(),
        }
    }

    /// Cells where the two orderings disagree: one quantity separates the
    /// states while the other ties them, or both separate them in opposite
    /// directions.
    pub fn is_discordant(self) -> bool {
        use MeasureRelation::*;
        use MqfiRelation::*;
        matches!(
            (self.measure_relation, self.mqfi_relation),
            (BothZero | EqualPositive, Greater | Less)
                | (FirstGreater | SecondGreater, Equal)
                | (FirstGreater, Less)
                | (SecondGreater, Greater)
        )
    }

    pub fn all() -> impl Iterator<Item = OrderingClass> {
        MeasureRelation::ALL
            .into_iter()
            .flat_map(|measure_relation| {
                MqfiRelation::ALL
                    .into_iter()
                    .map(move |mqfi_relation| OrderingClass {
                        measure_relation,
                        mqfi_relation,
                    })
            })
    }
}

impl fmt::Display for OrderingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}",
            self.measure_relation.name(),
            self.mqfi_relation.name()
        )
    }
}

/// Equality tolerances. A measure value at or below its tolerance counts as
/// zero, and two values within it count as equal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingTolerances {
    pub concurrence: f64,
    pub negativity: f64,
    pub ree: f64,
    pub mqfi: f64,
}

impl Default for OrderingTolerances {
    fn default() -> Self {
        Self {
            concurrence: 1e-4,
            negativity: 1e-4,
            ree: 5e-3,
            mqfi: 1e-4,
        }
    }
}

impl OrderingTolerances {
    /// The same tolerance everywhere.
    pub fn uniform(eps: f64) -> Self {
        Self {
            concurrence: eps,
            negativity: eps,
            ree: eps,
            mqfi: eps,
        }
    }

    pub fn for_measure(&self, m: Measure) -> f64 {
        match m {
            Measure::Concurrence => self.concurrence,
            Measure::Negativity => self.negativity,
            Measure::Ree => self.ree,
        }
    }

    /// Sets one tolerance by name (`concurrence`, `negativity`, `ree` or `mqfi`).
    pub fn set(&mut self, name: &str, eps: f64) -> Result<()> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Config(format!(
                "tolerance for {name} must be positive, got {eps}"
            )));
        }
        match name {
            "mqfi" => self.mqfi = eps,
            other => match other.parse::<Measure>()? {
                Measure::Concurrence => self.concurrence = eps,
                Measure::Negativity => self.negativity = eps,
                Measure::Ree => self.ree = eps,
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, eps) in [
            ("concurrence", self.concurrence),
            ("negativity", self.negativity),
            ("ree", self.ree),
            ("mqfi", self.mqfi),
        ] {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance for {name} must be positive, got {eps}"
                )));
            }
        }
        Ok(())
    }
}

pub fn measure_relation(a: f64, b: f64, eps: f64) -> MeasureRelation {
    if a <= eps && b <= eps {
        MeasureRelation::BothZero
    } else if (a - b).abs() <= eps {
        MeasureRelation::EqualPositive
    } else if a > b {
        MeasureRelation::FirstGreater
    } else {
        MeasureRelation::SecondGreater
    }
}

pub fn mqfi_relation(a: f64, b: f64, eps: f64) -> MqfiRelation {
    if (a - b).abs() <= eps {
        MqfiRelation::Equal
    } else if a > b {
        MqfiRelation::Greater
    } else {
        MqfiRelation::Less
    }
}

/// Classifies from the four compared numbers.
pub fn classify_values(values: [f64; 4], eps_measure: f64, eps_mqfi: f64) -> OrderingClass {
    OrderingClass {
        measure_relation: measure_relation(values[0], values[1], eps_measure),
        mqfi_relation: mqfi_relation(values[2], values[3], eps_mqfi),
    }
}

fn compared_values(r1: &StateRecord, r2: &StateRecord, measure: Measure) -> [f64; 4] {
    [measure.of(r1), measure.of(r2), r1.qfi_max, r2.qfi_max]
}

/// Uses `eps` for both the measure and the maximized QFI.
pub fn classify_pair(
    r1: &StateRecord,
    r2: &StateRecord,
    measure: Measure,
    eps: f64,
) -> OrderingClass {
    classify_values(compared_values(r1, r2, measure), eps, eps)
}

pub fn classify_pair_with(
    r1: &StateRecord,
    r2: &StateRecord,
    measure: Measure,
    tol: &OrderingTolerances,
) -> OrderingClass {
    classify_values(
        compared_values(r1, r2, measure),
        tol.for_measure(measure),
        tol.mqfi,
    )
}

/// Pair counts for one measure, indexed `[measure relation][mqfi relation]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub measure: Measure,
    pub counts: [[u64; 3]; 4],
}

impl Census {
    pub fn count(&self, class: OrderingClass) -> u64 {
        self.counts[class.measure_relation.index()][class.mqfi_relation.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn all_cells_populated(&self) -> bool {
        self.counts.iter().flatten().all(|&c| c > 0)
    }
}

/// Unordered pairs `(r_i, r_j)` with `id_i < id_j`, in id order.
fn canonical_pairs(records: &[StateRecord]) -> impl Iterator<Item = (&StateRecord, &StateRecord)> {
    let mut sorted: Vec<&StateRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.id);
    let n = sorted.len();
    (0..n).flat_map(move |i| {
        let sorted = sorted.clone();
        (i + 1..n).map(move |j| (sorted[i], sorted[j]))
    })
}

/// One census per measure over all `n(n−1)/2` unordered pairs.
pub fn census(records: &[StateRecord], tol: &OrderingTolerances) -> Result<Vec<Census>> {
    if records.len() < 2 {
        return Err(Error::Config(format!(
            "census needs at least 2 records, got {}",
            records.len()
        )));
    }
    tol.validate()?;
    let mut out: Vec<Census> = Measure::ALL
        .iter()
        .map(|&measure| Census {
            measure,
            counts: [[0; 3]; 4],
        })
        .collect();
    for (a, b) in canonical_pairs(records) {
        for c in &mut out {
            let class = classify_pair_with(a, b, c.measure, tol);
            c.counts[class.measure_relation.index()][class.mqfi_relation.index()] += 1;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub id_1: usize,
    pub id_2: usize,
    pub measure: Measure,
    pub class: OrderingClass,
    /// Measure of each state, then maximized mean QFI of each state.
    pub values: [f64; 4],
}

impl PairWitness {
    pub fn reclassify(&self, tol: &OrderingTolerances) -> OrderingClass {
        classify_values(self.values, tol.for_measure(self.measure), tol.mqfi)
    }
}

/// Up to `limit` pairs for every discordant cell, grouped by cell in table
/// order and listed in canonical id order within a cell.
pub fn find_counterexamples(
    records: &[StateRecord],
    measure: Measure,
    tol: &OrderingTolerances,
    limit: usize,
) -> Result<Vec<PairWitness>> {
    if limit == 0 {
        return Err(Error::Config("witness limit must be at least 1".into()));
    }
    tol.validate()?;
    let cells: Vec<OrderingClass> = OrderingClass::all().filter(|c| c.is_discordant()).collect();
    let mut found: Vec<Vec<PairWitness>> = vec![Vec::new(); cells.len()];
    let mut open = cells.len();
    for (a, b) in canonical_pairs(records) {
        let values = compared_values(a, b, measure);
        let class = classify_values(values, tol.for_measure(measure), tol.mqfi);
        if let Some(slot) = cells.iter().position(|&c| c == class) {
            if found[slot].len() < limit {
                found[slot].push(PairWitness {
                    id_1: a.id,
                    id_2: b.id,
                    measure,
                    class,
                    values,
                });
                if found[slot].len() == limit {
                    open -= 1;
                    if open == 0 {
                        break;
                    }
                }
            }
        }
    }
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(id: usize, measure: f64, qfi_max: f64) -> StateRecord {
        StateRecord {
            id,
            separable: measure == 0.0,
            concurrence: measure,
            negativity: measure,
            ree: measure,
            ree_converged: true,
            qfi_raw: qfi_max,
            qfi_max,
            qfi_min: qfi_max,
            refined: false,
            max_angles: EulerAngleSet::default(),
            min_angles: EulerAngleSet::default(),
        }
    }

    fn class(m: MeasureRelation, q: MqfiRelation) -> OrderingClass {
        OrderingClass {
            measure_relation: m,
            mqfi_relation: q,
        }
    }

    #[test]
    fn comparator_fixtures() {
        let c = classify_pair(
            &record(0, 0.5, 1.4),
            &record(1, 0.3, 1.2),
            Measure::Concurrence,
            1e-4,
        );
        assert_eq!(
            c,
            class(MeasureRelation::FirstGreater, MqfiRelation::Greater)
        );
        let c = classify_pair(
            &record(0, 0.0, 0.9),
            &record(1, 0.0, 0.7),
            Measure::Concurrence,
            1e-4,
        );
        assert_eq!(c, class(MeasureRelation::BothZero, MqfiRelation::Greater));
        for m in [0.0, 0.4] {
            let r = record(3, m, 1.1);
            let c = classify_pair(&r, &r, Measure::Ree, 1e-4);
            assert_eq!(c.mqfi_relation, MqfiRelation::Equal);
            assert!(matches!(
                c.measure_relation,
                MeasureRelation::BothZero | MeasureRelation::EqualPositive
            ));
        }
    }

    #[test]
    fn twelve_cells_and_eight_discordant() {
        assert_eq!(OrderingClass::all().count(), 12);
        assert_eq!(
            OrderingClass::all().filter(|c| c.is_discordant()).count(),
            8
        );
        for c in OrderingClass::all() {
            assert_eq!(c.mirrored().is_discordant(), c.is_discordant());
        }
    }

    #[test]
    fn census_of_two_separable_states() {
        let cs = census(
            &[record(0, 0.0, 0.5), record(1, 0.0, 0.8)],
            &OrderingTolerances::default(),
        )
        .unwrap();
        for c in &cs {
            assert_eq!(c.total(), 1);
            assert_eq!(
                c.counts[MeasureRelation::BothZero.index()]
                    .iter()
                    .sum::<u64>(),
                1
            );
        }
        assert!(census(&[record(0, 0.0, 0.5)], &OrderingTolerances::default()).is_err());
    }

    #[test]
    fn monotone_data_is_concordant() {
        let records = [
            record(0, 0.1, 1.1),
            record(1, 0.2, 1.3),
            record(2, 0.3, 1.6),
        ];
        let tol = OrderingTolerances::default();
        for c in census(&records, &tol).unwrap() {
            assert_eq!(c.total(), 3);
            for cell in OrderingClass::all().filter(|c| c.is_discordant()) {
                assert_eq!(c.count(cell), 0);
            }
            assert_eq!(
                c.count(class(MeasureRelation::SecondGreater, MqfiRelation::Less)),
                3
            );
        }
        assert!(
            find_counterexamples(&records, Measure::Concurrence, &tol, 5)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn equal_mqfi_witness() {
        let records = [record(0, 0.4, 1.25), record(1, 0.6, 1.25 + 5e-5)];
        let tol = OrderingTolerances::default();
        let w = find_counterexamples(&records, Measure::Concurrence, &tol, 3).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(
            w[0].class,
            class(MeasureRelation::SecondGreater, MqfiRelation::Equal)
        );
        assert_eq!((w[0].id_1, w[0].id_2), (0, 1));
        assert_eq!(w[0].reclassify(&tol), w[0].class);
    }

    #[test]
    fn witness_limit_and_order() {
        let records: Vec<_> = (0..6)
            .map(|i| record(5 - i, 0.1 * i as f64 + 0.1, 1.0))
            .collect();
        let w = find_counterexamples(
            &records,
            Measure::Negativity,
            &OrderingTolerances::default(),
            2,
        )
        .unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!((w[0].id_1, w[0].id_2), (0, 1));
        assert_eq!((w[1].id_1, w[1].id_2), (0, 2));
        assert!(find_counterexamples(
            &records,
            Measure::Negativity,
            &OrderingTolerances::default(),
            0
        )
        .is_err());
    }

    #[test]
    fn tolerance_parsing() {
        let mut tol = OrderingTolerances::default();
        tol.set("ree", 1e-3).unwrap();
        tol.set("mqfi", 2e-4).unwrap();
        assert_eq!((tol.ree, tol.mqfi), (1e-3, 2e-4));
        assert!(tol.set("entropy", 1e-3).is_err());
        assert!(tol.set("ree", 0.0).is_err());
    }

    fn value() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), 0.0..1e-3, 0.0..1.0]
    }

    proptest! {
        #[test]
        fn classification_is_antisymmetric(a in value(), b in value(), qa in 0.0..2.0f64, qb in 0.0..2.0f64, eps in 1e-6..1e-2f64) {
            let (r1, r2) = (record(0, a, qa), record(1, b, qb));
            let forward = classify_pair(&r1, &r2, Measure::Concurrence, eps);
            let backward = classify_pair(&r2, &r1, Measure::Concurrence, eps);
            prop_assert_eq!(forward.mirrored(), backward);
        }

        #[test]
        fn larger_tolerance_never_breaks_equality(a in value(), b in value(), qa in 0.0..2.0f64, qb in 0.0..2.0f64, eps in 1e-6..1e-2f64, grow in 1.0..100.0f64) {
            let (r1, r2) = (record(0, a, qa), record(1, b, qb));
            let small = classify_pair(&r1, &r2, Measure::Ree, eps);
            let large = classify_pair(&r1, &r2, Measure::Ree, eps * grow);
            if small.mqfi_relation == MqfiRelation::Equal {
                prop_assert_eq!(large.mqfi_relation, MqfiRelation::Equal);
            }
            if matches!(small.measure_relation, MeasureRelation::BothZero | MeasureRelation::EqualPositive) {
                prop_assert!(matches!(large.measure_relation, MeasureRelation::BothZero | MeasureRelation::EqualPositive));
            }
        }

        #[test]
        fn census_totals(values in proptest::collection::vec((value(), 0.0..2.0f64), 2..25)) {
            let records: Vec<_> = values.iter().enumerate().map(|(i, &(m, q))| record(i, m, q)).collect();
            let n = records.len() as u64;
            for c in census(&records, &OrderingTolerances::default()).unwrap() {
                prop_assert_eq!(c.total(), n * (n - 1) / 2);
            }
        }
    }
}
