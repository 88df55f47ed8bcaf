//! Scenario files: `[section]` headers followed by `key = value` lines.
//!
//! ```text
//! [grid]
//! domain = unit
//! n = 2048
//!
//! [case]
//! couple = RR(theta0=1/4, theta1=3/4, a0=1, a1=1, b0=l(-2), b1=l(-2), E0=Lq(1), E1=Lq(1), F0=Lq(2), F1=Lq(2))
//!
//! [family]
//! members = pow(0.5); powlog(0.7, -1); chi(0.01); steps(7, 6)
//! ```

use std::collections::BTreeMap;

pub const KEYS: [&str; 13] = [
    "grid.domain",
    "grid.n",
    "case.spec",
    "case.couple",
    "case.reiteration",
    "case.theorem",
    "case.preset",
    "case.theta",
    "family.members",
    "check.threshold",
    "check.seed",
    "check.refine",
    "output.out",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Scenario {
    entries: BTreeMap<String, (String, usize)>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("line {n}: section header needs a closing ']'"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(format!("line {n}: bad section name '{name}'"));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {n}: expected key = value"))?;
            let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {n}: unknown key '{key}'; known keys: {}", KEYS.join(", ")));
            }
            if entries.insert(key.clone(), (v.trim().to_string(), n)).is_some() {
                return Err(format!("line {n}: duplicate key '{key}'"));
            }
        }
        Ok(Scenario { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, n)| *n)
    }
}

/// Members are separated by ';' since their arguments use ','.
pub fn split_members(s: &str) -> Vec<&str> {
    s.split(';').map(str::trim).filter(|m| !m.is_empty()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_values() {
        let s = Scenario::parse("# x\n[grid]\nn = 512\n[case]\nspec = classic(theta=1/2, b=1, E=Lq(inf))\n").unwrap();
        assert_eq!(s.get("grid.n"), Some("512"));
        assert_eq!(s.get("case.spec"), Some("classic(theta=1/2, b=1, E=Lq(inf))"));
        assert_eq!(s.line("case.spec"), Some(5));
    }

    #[test]
    fn rejects_unknown_and_duplicate() {
        assert!(Scenario::parse("[grid]\nm = 1").unwrap_err().contains("line 2"));
        assert!(Scenario::parse("[grid]\nn = 1\nn = 2").unwrap_err().contains("duplicate"));
        assert!(Scenario::parse("[grid\n").is_err());
    }

    #[test]
    fn member_list() {
        assert_eq!(split_members("pow(0.5); chi(1) ;"), vec!["pow(0.5)", "chi(1)"]);
    }
}
