//! Textual group specifications.
//!
//! ```text
//! spec   := family ":" params | "product(" spec ")x(" spec ")"
//! family := cyclic | abelian | ut | heis | lamplighter | symfp | freenil
//! params := key "=" value ("," key "=" value)* | INT ("," INT)*
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Which member of the `Sym(n) ⋉ F_p^n` tower is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymFpVariant {
    /// The full semidirect product `L_n`.
    L,
    /// `Sym(n) ⋉ V` with `V` the sum-zero vectors.
    Gprime,
    /// `Alt(n) ⋉ V`, index two in `Gprime`.
    G,
}

impl SymFpVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SymFpVariant::L => "L",
            SymFpVariant::Gprime => "Gprime",
            SymFpVariant::G => "G",
        }
    }
}

/// A validated group specification.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GroupSpec {
    Cyclic {
        modulus: u64,
    },
    AbelianProduct {
        moduli: Vec<u64>,
    },
    Unitriangular {
        dim: usize,
        p: u64,
    },
    Lamplighter {
        lamps: usize,
    },
    SymFp {
        degree: usize,
        p: u64,
        variant: SymFpVariant,
    },
    FreeNilpotent {
        rank: usize,
        step: usize,
    },
    DirectProduct {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<GroupSpec> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let spec = parser.spec()?;
        if parser.pos != parser.src.len() {
            return Err(LabError::syntax(parser.pos, "trailing input"));
        }
        Ok(spec)
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<u128> {
        match self {
            GroupSpec::Cyclic { modulus } => Some(*modulus as u128),
            GroupSpec::AbelianProduct { moduli } => moduli
                .iter()
                .try_fold(1u128, |acc, &m| acc.checked_mul(m as u128)),
            GroupSpec::Unitriangular { dim, p } => {
                let e = (dim * (dim - 1) / 2) as u32;
                (*p as u128).checked_pow(e)
            }
            GroupSpec::Lamplighter { lamps } => {
                (*lamps as u128).checked_mul(1u128.checked_shl(*lamps as u32)?)
            }
            GroupSpec::SymFp { degree, p, variant } => {
                let fact = (1..=*degree as u128).try_fold(1u128, |a, b| a.checked_mul(b))?;
                let dims = match variant {
                    SymFpVariant::L => *degree as u32,
                    _ => *degree as u32 - 1,
                };
                let base = fact.checked_mul((*p as u128).checked_pow(dims)?)?;
                match variant {
                    SymFpVariant::G if *degree >= 2 => Some(base / 2),
                    _ => Some(base),
                }
            }
            GroupSpec::FreeNilpotent { .. } => None,
            GroupSpec::DirectProduct { left, right } => left.order()?.checked_mul(right.order()?),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, GroupSpec::FreeNilpotent { .. })
            && match self {
                GroupSpec::DirectProduct { left, right } => left.is_finite() && right.is_finite(),
                _ => true,
            }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { modulus } => write!(f, "cyclic:{modulus}"),
            GroupSpec::AbelianProduct { moduli } => {
                let parts: Vec<String> = moduli.iter().map(|m| m.to_string()).collect();
                write!(f, "abelian:{}", parts.join(","))
            }
            GroupSpec::Unitriangular { dim, p } => write!(f, "ut:dim={dim},p={p}"),
            GroupSpec::Lamplighter { lamps } => write!(f, "lamplighter:{lamps}"),
            GroupSpec::SymFp { degree, p, variant } => {
                write!(f, "symfp:n={degree},p={p},variant={}", variant.as_str())
            }
            GroupSpec::FreeNilpotent { rank, step } => write!(f, "freenil:r={rank},s={step}"),
            GroupSpec::DirectProduct { left, right } => write!(f, "product({left})x({right})"),
        }
    }
}

impl std::str::FromStr for GroupSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(u64),
    Ident(String),
}

#[derive(Debug)]
struct Param {
    key: Option<String>,
    value: Value,
    offset: usize,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<()> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(LabError::syntax(self.pos, format!("expected `{lit}`")))
        }
    }

    fn spec(&mut self) -> Result<GroupSpec> {
        if self.eat("product(") {
            let left = self.spec()?;
            self.expect(")x(")?;
            let right = self.spec()?;
            self.expect(")")?;
            return Ok(GroupSpec::DirectProduct {
                left: Box::new(left),
                right: Box::new(right),
            });
        }
        let start = self.pos;
        let family = self.ident();
        if family.is_empty() {
            return Err(LabError::syntax(start, "expected a group family"));
        }
        self.expect(":")?;
        let params = self.params()?;
        build_family(&family, start, &params)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(LabError::syntax(start, "expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| LabError::syntax(start, "integer out of range"))
    }

    fn params(&mut self) -> Result<Vec<Param>> {
        let mut out = Vec::new();
        loop {
            let offset = self.pos;
            let param = match self.peek() {
                Some(c) if c.is_ascii_digit() => Param {
                    key: None,
                    value: Value::Int(self.int()?),
                    offset,
                },
                Some(c) if c.is_ascii_alphabetic() => {
                    let key = self.ident();
                    self.expect("=")?;
                    let value = match self.peek() {
                        Some(c) if c.is_ascii_digit() => Value::Int(self.int()?),
                        Some(c) if c.is_ascii_alphabetic() => Value::Ident(self.ident()),
                        _ => return Err(LabError::syntax(self.pos, "expected a value")),
                    };
                    Param {
                        key: Some(key),
                        value,
                        offset,
                    }
                }
                _ => return Err(LabError::syntax(offset, "expected a parameter")),
            };
            out.push(param);
            if !self.eat(",") {
                break;
            }
        }
        let keyed = out[0].key.is_some();
        if let Some(bad) = out.iter().find(|p| p.key.is_some() != keyed) {
            return Err(LabError::syntax(
                bad.offset,
                "cannot mix positional and keyed parameters",
            ));
        }
        Ok(out)
    }
}

/// Resolves keyed or positional parameters against an ordered key list.
fn lookup(params: &[Param], keys: &[&str]) -> Result<Vec<Option<Value>>> {
    let mut slots: Vec<Option<Value>> = vec![None; keys.len()];
    for (i, p) in params.iter().enumerate() {
        let slot = match &p.key {
            Some(k) => keys
                .iter()
                .position(|c| c == k)
                .ok_or_else(|| LabError::syntax(p.offset, format!("unknown key `{k}`")))?,
            None => {
                if i >= keys.len() {
                    return Err(LabError::syntax(p.offset, "too many parameters"));
                }
                i
            }
        };
        if slots[slot].is_some() {
            return Err(LabError::syntax(
                p.offset,
                format!("duplicate `{}`", keys[slot]),
            ));
        }
        slots[slot] = Some(p.value.clone());
    }
    Ok(slots)
}

fn int_slot(slots: &[Option<Value>], i: usize, name: &str, at: usize) -> Result<u64> {
    match &slots[i] {
        Some(Value::Int(v)) => Ok(*v),
        Some(Value::Ident(_)) => Err(LabError::syntax(at, format!("`{name}` must be an integer"))),
        None => Err(LabError::syntax(at, format!("missing `{name}`"))),
    }
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(LabError::Semantic(format!("{p} is not prime")))
    }
}

fn positive(v: u64, name: &str) -> Result<u64> {
    if v == 0 {
        Err(LabError::Semantic(format!("`{name}` must be positive")))
    } else {
        Ok(v)
    }
}

fn build_family(family: &str, at: usize, params: &[Param]) -> Result<GroupSpec> {
    match family {
        "cyclic" => {
            let s = lookup(params, &["n"])?;
            let modulus = positive(int_slot(&s, 0, "n", at)?, "modulus")?;
            Ok(GroupSpec::Cyclic { modulus })
        }
        "abelian" => {
            let mut moduli = Vec::with_capacity(params.len());
            for p in params {
                match (&p.key, &p.value) {
                    (None, Value::Int(m)) => moduli.push(positive(*m, "modulus")?),
                    _ => {
                        return Err(LabError::syntax(
                            p.offset,
                            "abelian takes a positional list of moduli",
                        ))
                    }
                }
            }
            Ok(GroupSpec::AbelianProduct { moduli })
        }
        "ut" => {
            let s = lookup(params, &["dim", "p"])?;
            let dim = int_slot(&s, 0, "dim", at)? as usize;
            let p = int_slot(&s, 1, "p", at)?;
            if dim < 2 {
                return Err(LabError::Semantic("`dim` must be at least 2".into()));
            }
            require_prime(p)?;
            Ok(GroupSpec::Unitriangular { dim, p })
        }
        "heis" => {
            let s = lookup(params, &["p"])?;
            let p = int_slot(&s, 0, "p", at)?;
            require_prime(p)?;
            Ok(GroupSpec::Unitriangular { dim: 3, p })
        }
        "lamplighter" => {
            let s = lookup(params, &["m"])?;
            let lamps = positive(int_slot(&s, 0, "m", at)?, "lamp count")? as usize;
            if lamps > 64 {
                return Err(LabError::Unsupported("lamp count above 64".into()));
            }
            Ok(GroupSpec::Lamplighter { lamps })
        }
        "symfp" => {
            let s = lookup(params, &["n", "p", "variant"])?;
            let degree = positive(int_slot(&s, 0, "n", at)?, "n")? as usize;
            let p = int_slot(&s, 1, "p", at)?;
            let variant = match &s[2] {
                None => SymFpVariant::L,
                Some(Value::Ident(v)) => match v.as_str() {
                    "L" => SymFpVariant::L,
                    "Gprime" => SymFpVariant::Gprime,
                    "G" => SymFpVariant::G,
                    other => {
                        return Err(LabError::syntax(at, format!("unknown variant `{other}`")))
                    }
                },
                Some(Value::Int(_)) => {
                    return Err(LabError::syntax(at, "variant must be one of L, Gprime, G"))
                }
            };
            require_prime(p)?;
            if p <= degree as u64 {
                return Err(LabError::Semantic(format!(
                    "symfp requires p > n (got n={degree}, p={p})"
                )));
            }
            if degree > 255 {
                return Err(LabError::Unsupported("symfp degree above 255".into()));
            }
            Ok(GroupSpec::SymFp { degree, p, variant })
        }
        "freenil" => {
            let s = lookup(params, &["r", "s"])?;
            let rank = positive(int_slot(&s, 0, "r", at)?, "r")? as usize;
            let step = positive(int_slot(&s, 1, "s", at)?, "s")? as usize;
            Ok(GroupSpec::FreeNilpotent { rank, step })
        }
        other => Err(LabError::syntax(at, format!("unknown family `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terminals() {
        assert_eq!(
            GroupSpec::parse("cyclic:12").unwrap(),
            GroupSpec::Cyclic { modulus: 12 }
        );
        assert_eq!(
            GroupSpec::parse("symfp:n=4,p=5,variant=G").unwrap(),
            GroupSpec::SymFp {
                degree: 4,
                p: 5,
                variant: SymFpVariant::G
            }
        );
        assert_eq!(
            GroupSpec::parse("freenil:r=2,s=4").unwrap(),
            GroupSpec::FreeNilpotent { rank: 2, step: 4 }
        );
        assert_eq!(
            GroupSpec::parse("heis:7").unwrap(),
            GroupSpec::parse("ut:dim=3,p=7").unwrap()
        );
        assert_eq!(
            GroupSpec::parse("abelian:4,4,9").unwrap(),
            GroupSpec::AbelianProduct {
                moduli: vec![4, 4, 9]
            }
        );
    }

    #[test]
    fn parses_nested_products() {
        let spec = GroupSpec::parse("product(lamplighter:3)x(product(cyclic:2)x(heis:3))").unwrap();
        assert_eq!(spec.order(), Some(24 * 2 * 27));
        assert_eq!(GroupSpec::parse(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn reports_offsets() {
        match GroupSpec::parse("cyclic;12") {
            Err(LabError::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
        match GroupSpec::parse("product(cyclic:2)y(cyclic:3)") {
            Err(LabError::Syntax { offset, .. }) => assert_eq!(offset, 16),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            GroupSpec::parse("cyclic:12,"),
            Err(LabError::Syntax { offset: 10, .. })
        ));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(
            GroupSpec::parse("cyclic:0"),
            Err(LabError::Semantic(_))
        ));
        assert!(matches!(
            GroupSpec::parse("ut:dim=3,p=9"),
            Err(LabError::Semantic(_))
        ));
        assert!(matches!(
            GroupSpec::parse("symfp:n=5,p=5"),
            Err(LabError::Semantic(_))
        ));
        assert!(matches!(
            GroupSpec::parse("freenil:r=0,s=2"),
            Err(LabError::Semantic(_))
        ));
    }

    #[test]
    fn orders() {
        assert_eq!(GroupSpec::parse("lamplighter:3").unwrap().order(), Some(24));
        assert_eq!(
            GroupSpec::parse("symfp:n=3,p=7").unwrap().order(),
            Some(6 * 343)
        );
        assert_eq!(
            GroupSpec::parse("symfp:n=4,p=5,variant=Gprime")
                .unwrap()
                .order(),
            Some(24 * 125)
        );
        assert_eq!(
            GroupSpec::parse("symfp:n=4,p=5,variant=G").unwrap().order(),
            Some(12 * 125)
        );
        assert_eq!(GroupSpec::parse("ut:dim=4,p=2").unwrap().order(), Some(64));
        assert_eq!(GroupSpec::parse("freenil:r=2,s=2").unwrap().order(), None);
    }
}
