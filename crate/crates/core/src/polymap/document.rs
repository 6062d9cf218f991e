//! Text form of a polynomial map:
//!
//! ```json
//! {"p": 5, "n": 2, "d": 2, "R": 1,
//!  "terms": [{"row": 0, "exponents": [2, 0], "coeff": 1},
//!            {"row": 0, "exponents": [0, 2], "coeff": 1}]}
//! ```
//!
//! Coefficients are integers reduced mod p on parse. Serialization lists
//! terms sorted by `(row, exponents)` and omits zero coefficients.

use serde::{Deserialize, Serialize};

use super::{Monomial, PolyMap};
use crate::error::{Error, Result};
use crate::ffcore::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub row: usize,
    pub exponents: Vec<u32>,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDocument {
    pub p: u32,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "R")]
    pub r: usize,
    pub terms: Vec<TermRecord>,
}

impl MapDocument {
    pub fn from_map(map: &PolyMap) -> Self {
        let terms = map
            .monomials()
            .into_iter()
            .map(|m| TermRecord {
                row: m.row,
                exponents: m.exponents,
                coeff: m.coeff,
            })
            .collect();
        Self {
            p: map.p(),
            n: map.n(),
            d: map.d(),
            r: map.r(),
            terms,
        }
    }

    pub fn to_map(&self) -> Result<PolyMap> {
        if !is_prime(self.p as u64) {
            return Err(Error::NotPrime(self.p as u64));
        }
        for t in &self.terms {
            if t.exponents.len() != self.n {
                return Err(Error::Parse(format!(
                    "term in row {} has {} exponents, expected n = {}",
                    t.row,
                    t.exponents.len(),
                    self.n
                )));
            }
        }
        let monomials: Vec<Monomial> = self
            .terms
            .iter()
            .map(|t| Monomial {
                row: t.row,
                exponents: t.exponents.clone(),
                coeff: t.coeff,
            })
            .collect();
        PolyMap::from_monomials(self.p, self.n, self.d, self.r, &monomials)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Canonical serialization (pretty JSON, sorted terms).
    pub fn to_text(&self) -> String {
        let mut doc = self.clone();
        doc.terms
            .sort_by(|a, b| (a.row, &a.exponents).cmp(&(b.row, &b.exponents)));
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

impl PolyMap {
    pub fn parse(text: &str) -> Result<Self> {
        MapDocument::parse(text)?.to_map()
    }

    pub fn serialize(&self) -> String {
        self.to_document().to_text()
    }
}
