//! Checked-in transcriptions of printed values and the ledger of corrections,
//! with the diffs the verify suites run against them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::InvSum;
use crate::error::Result;
use crate::hecke::{HeckeElement, HeckePolynomial};
use crate::invariants::canonicalize;
use crate::qpoly::QPoly;

pub const POLYNOMIAL_FILE: &str = "hecke_polynomial_printed.json";
pub const EXPANSION_FILE: &str = "distribution_relation_printed.json";
pub const LEDGER_FILE: &str = "typo_ledger.json";

const POLYNOMIAL_JSON: &str = include_str!("../fixtures/hecke_polynomial_printed.json");
const EXPANSION_JSON: &str = include_str!("../fixtures/distribution_relation_printed.json");
const LEDGER_JSON: &str = include_str!("../fixtures/typo_ledger.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrintedPolynomial {
    pub description: String,
    pub coefficients: Vec<HeckeElement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrintedTerm {
    pub index: usize,
    /// As printed; not necessarily canonical.
    pub inv: [i64; 6],
    pub printed_factor: String,
    pub coeff: QPoly,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub sign_ambiguous: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrintedExpansion {
    pub description: String,
    pub terms: Vec<PrintedTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Sign,
    Transposition,
    Typo,
    Check,
    Projection,
    Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Confirmed,
    Unresolved,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub id: String,
    pub kind: EntryKind,
    pub status: EntryStatus,
    pub confirmed_by: String,
    pub location: String,
    pub printed: String,
    pub corrected: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TypoLedger {
    pub description: String,
    pub entries: Vec<LedgerEntry>,
}

impl TypoLedger {
    pub fn entry(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    fn confirmed(&self, id: &str) -> bool {
        self.entry(id).is_some_and(|e| e.status == EntryStatus::Confirmed)
    }
}

#[derive(Clone, Debug)]
pub struct Fixtures {
    pub polynomial: PrintedPolynomial,
    pub expansion: PrintedExpansion,
    pub ledger: TypoLedger,
}

impl Fixtures {
    /// The copies compiled into the library.
    pub fn embedded() -> Self {
        Fixtures {
            polynomial: serde_json::from_str(POLYNOMIAL_JSON).expect("embedded polynomial fixture"),
            expansion: serde_json::from_str(EXPANSION_JSON).expect("embedded expansion fixture"),
            ledger: serde_json::from_str(LEDGER_JSON).expect("embedded ledger fixture"),
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let read = |name: &str| std::fs::read_to_string(dir.join(name));
        Ok(Fixtures {
            polynomial: serde_json::from_str(&read(POLYNOMIAL_FILE)?)?,
            expansion: serde_json::from_str(&read(EXPANSION_FILE)?)?,
            ledger: serde_json::from_str(&read(LEDGER_FILE)?)?,
        })
    }

    pub fn load_or_embedded(dir: Option<&Path>) -> Result<Self> {
        match dir {
            Some(d) => Fixtures::load(d),
            None => Ok(Fixtures::embedded()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientDiff {
    pub power: usize,
    pub printed: HeckeElement,
    pub computed: HeckeElement,
    pub agrees: bool,
}

pub fn diff_polynomial(printed: &PrintedPolynomial, computed: &HeckePolynomial) -> Vec<CoefficientDiff> {
    let n = printed.coefficients.len().max(computed.coeffs.len());
    (0..n)
        .map(|i| {
            let p = printed.coefficients.get(i).cloned().unwrap_or_else(HeckeElement::zero);
            let c = computed.coeffs.get(i).cloned().unwrap_or_else(HeckeElement::zero);
            CoefficientDiff { power: i, agrees: p == c, printed: p, computed: c }
        })
        .collect()
}

/// Comparison key: the full tuple, or `(k, d, m, n)` when s and r are projected away.
pub type ClassKey = Vec<i64>;

#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub class: ClassKey,
    pub printed: QPoly,
    pub computed: QPoly,
    pub agrees: bool,
    pub printed_terms: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistrelReport {
    pub projected: bool,
    pub applied_entries: Vec<String>,
    pub rows: Vec<ClassRow>,
    pub printed_mass: QPoly,
    pub computed_mass: QPoly,
    /// Indices of printed terms whose class does not agree.
    pub unreproduced_terms: Vec<usize>,
    /// Ledger entries that describe the remaining disagreement without correcting it.
    pub unresolved_entries: Vec<String>,
}

impl DistrelReport {
    pub fn matches(&self) -> bool {
        self.unreproduced_terms.is_empty() && self.rows.iter().all(|r| r.agrees)
    }

    pub fn agreeing_classes(&self) -> usize {
        self.rows.iter().filter(|r| r.agrees).count()
    }
}

/// Diffs a computed expansion against the printed one. Only confirmed ledger
/// entries are applied.
pub fn diff_expansion(computed: &InvSum, printed: &PrintedExpansion, ledger: &TypoLedger) -> Result<DistrelReport> {
    let projected = ledger.confirmed("distrel-central-shifts");
    let key = |a: [i64; 6]| -> ClassKey {
        if projected {
            vec![a[0], a[3], a[4], a[5]]
        } else {
            a.to_vec()
        }
    };
    let mut rows: BTreeMap<ClassKey, ClassRow> = BTreeMap::new();
    let mut printed_mass = QPoly::zero();
    for t in &printed.terms {
        let r = row(&mut rows, key(canonicalize(t.inv)?.to_array()));
        r.printed += &t.coeff;
        r.printed_terms.push(t.index);
        printed_mass += &t.coeff;
    }
    for (t, c) in computed.terms() {
        row(&mut rows, key(t.to_array())).computed += c;
    }
    let mut rows: Vec<ClassRow> = rows.into_values().filter(|r| !(r.printed.is_zero() && r.computed.is_zero())).collect();
    for r in &mut rows {
        r.agrees = r.printed == r.computed;
    }
    let mut unreproduced_terms: Vec<usize> =
        rows.iter().filter(|r| !r.agrees).flat_map(|r| r.printed_terms.iter().copied()).collect();
    unreproduced_terms.sort_unstable();
    let applied_entries = if projected { vec!["distrel-central-shifts".to_string()] } else { Vec::new() };
    let unresolved_entries = ledger
        .entries
        .iter()
        .filter(|e| e.status == EntryStatus::Unresolved && e.id.starts_with("distrel"))
        .map(|e| e.id.clone())
        .collect();
    Ok(DistrelReport {
        projected,
        applied_entries,
        rows,
        printed_mass,
        computed_mass: computed.mass(),
        unreproduced_terms,
        unresolved_entries,
    })
}

fn row(rows: &mut BTreeMap<ClassKey, ClassRow>, k: ClassKey) -> &mut ClassRow {
    rows.entry(k.clone()).or_insert_with(|| ClassRow {
        class: k,
        printed: QPoly::zero(),
        computed: QPoly::zero(),
        agrees: false,
        printed_terms: Vec::new(),
    })
}
