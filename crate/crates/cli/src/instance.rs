//! Instance files.
//!
//! ```text
//! # comment
//! [sets]
//! evens = prefix=;period=2;pattern=0
//! [charges]
//! d = atoms=;densities=1/1@{prefix=;period=1;pattern=0}
//! [sequences]
//! t = tail(evens)
//! [families]
//! f = finite(d)
//! [generators]
//! g = blocks(2)
//! ```
//!
//! `tail(…)` and `pointmasses(…)` take a set name, a braced set literal or
//! (for `tail`) a `branch=…` word. Everything else uses the library text
//! forms.

use std::fmt;

use charge_lab::{Branch, Charge, ChargeFamily, DisjointSeqGen, ElementSequence, EpSet, Error, Member, Universe};

use crate::error::{CliError, ErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Sets,
    Charges,
    Sequences,
    Families,
    Generators,
}

impl Section {
    pub const ALL: [Section; 5] =
        [Section::Sets, Section::Charges, Section::Sequences, Section::Families, Section::Generators];

    pub fn name(self) -> &'static str {
        match self {
            Section::Sets => "sets",
            Section::Charges => "charges",
            Section::Sequences => "sequences",
            Section::Families => "families",
            Section::Generators => "generators",
        }
    }

    fn parse(s: &str) -> Option<Section> {
        Section::ALL.into_iter().find(|x| x.name() == s)
    }
}

/// A sequence entry, remembering the form it was written in so the instance
/// serializes back to the same text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceEntry {
    Tail { source: String, member: Member },
    Explicit(ElementSequence),
}

impl SequenceEntry {
    pub fn member(&self) -> Member {
        match self {
            SequenceEntry::Tail { member, .. } => member.clone(),
            SequenceEntry::Explicit(s) => Member::Sequence(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyEntry {
    Finite(Vec<String>),
    PointMasses { source: String, support: EpSet },
}

/// Named objects in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub sets: Vec<(String, EpSet)>,
    pub charges: Vec<(String, Charge)>,
    pub sequences: Vec<(String, SequenceEntry)>,
    pub families: Vec<(String, FamilyEntry)>,
    pub generators: Vec<(String, DisjointSeqGen)>,
    present: Vec<&'static str>,
}

fn lookup<'a, T>(items: &'a [(String, T)], name: &str) -> Option<&'a T> {
    items.iter().find(|(n, _)| n == name).map(|(_, v)| v)
}

impl Instance {
    pub fn has_section(&self, section: Section) -> bool {
        self.present.contains(&section.name())
    }

    fn require(&self, section: Section) -> Result<(), CliError> {
        if self.has_section(section) {
            Ok(())
        } else {
            Err(CliError::new(ErrorKind::Missing, format!("instance has no [{}] section", section.name())))
        }
    }

    fn missing(section: Section, name: &str) -> CliError {
        CliError::new(ErrorKind::Missing, format!("no entry `{name}` in [{}]", section.name()))
    }

    pub fn set(&self, name: &str) -> Result<&EpSet, CliError> {
        self.require(Section::Sets)?;
        lookup(&self.sets, name).ok_or_else(|| Instance::missing(Section::Sets, name))
    }

    pub fn charge(&self, name: &str) -> Result<&Charge, CliError> {
        self.require(Section::Charges)?;
        lookup(&self.charges, name).ok_or_else(|| Instance::missing(Section::Charges, name))
    }

    pub fn sequence(&self, name: &str) -> Result<&SequenceEntry, CliError> {
        self.require(Section::Sequences)?;
        lookup(&self.sequences, name).ok_or_else(|| Instance::missing(Section::Sequences, name))
    }

    pub fn family(&self, name: &str) -> Result<ChargeFamily, CliError> {
        self.require(Section::Families)?;
        match lookup(&self.families, name).ok_or_else(|| Instance::missing(Section::Families, name))? {
            FamilyEntry::Finite(names) => {
                Ok(ChargeFamily::Finite(names.iter().map(|n| self.charge(n).cloned()).collect::<Result<_, _>>()?))
            }
            FamilyEntry::PointMasses { support, .. } => Ok(ChargeFamily::PointMasses(support.clone())),
        }
    }

    /// Member names of a finite family.
    pub fn family_members(&self, name: &str) -> Result<Vec<String>, CliError> {
        self.require(Section::Families)?;
        match lookup(&self.families, name).ok_or_else(|| Instance::missing(Section::Families, name))? {
            FamilyEntry::Finite(names) => Ok(names.clone()),
            FamilyEntry::PointMasses { .. } => {
                Err(CliError::new(ErrorKind::Computation, format!("family `{name}` is not a finite list of charges")))
            }
        }
    }

    pub fn generator(&self, name: &str) -> Result<&DisjointSeqGen, CliError> {
        self.require(Section::Generators)?;
        lookup(&self.generators, name).ok_or_else(|| Instance::missing(Section::Generators, name))
    }

    pub fn parse(text: &str) -> Result<Instance, CliError> {
        let mut inst = Instance::default();
        let mut section: Option<Section> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(name) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                let s = Section::parse(name.trim()).ok_or_else(|| {
                    CliError::new(ErrorKind::Parse, format!("unknown section `[{}]`", name.trim()))
                        .at(line_no, indent + 1)
                })?;
                if !inst.present.contains(&s.name()) {
                    inst.present.push(s.name());
                }
                section = Some(s);
                continue;
            }
            let Some(current) = section else {
                return Err(CliError::new(ErrorKind::Parse, "entry outside of any section").at(line_no, indent + 1));
            };
            let (name, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::new(ErrorKind::Parse, "expected `name = value`").at(line_no, indent + 1))?;
            let name = name.trim();
            let value_col = name_value_column(content);
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(CliError::new(ErrorKind::Parse, format!("invalid name `{name}`")).at(line_no, indent + 1));
            }
            if inst.contains_name(current, name) {
                return Err(CliError::new(
                    ErrorKind::Parse,
                    format!("duplicate name `{name}` in [{}]", current.name()),
                )
                .at(line_no, indent + 1));
            }
            inst.add(current, name, value.trim()).map_err(|e| e.at(line_no, value_col))?;
        }
        Ok(inst)
    }

    fn contains_name(&self, section: Section, name: &str) -> bool {
        fn has<T>(v: &[(String, T)], n: &str) -> bool {
            v.iter().any(|(x, _)| x == n)
        }
        match section {
            Section::Sets => has(&self.sets, name),
            Section::Charges => has(&self.charges, name),
            Section::Sequences => has(&self.sequences, name),
            Section::Families => has(&self.families, name),
            Section::Generators => has(&self.generators, name),
        }
    }

    fn add(&mut self, section: Section, name: &str, value: &str) -> Result<(), CliError> {
        let name = name.to_string();
        match section {
            Section::Sets => self.sets.push((name, value.parse().map_err(CliError::from)?)),
            Section::Charges => self.charges.push((name, value.parse().map_err(CliError::from)?)),
            Section::Generators => self.generators.push((name, value.parse().map_err(CliError::from)?)),
            Section::Sequences => {
                let entry = match call_argument(value, "tail") {
                    Some(arg) => {
                        let member = if arg.starts_with("branch=") {
                            Member::BranchTail(arg.parse::<Branch>()?)
                        } else {
                            let set = self.set_operand(arg)?;
                            charge_lab::tail_sequence(&charge_lab::SetDescriptor::Set(set))?
                        };
                        SequenceEntry::Tail { source: arg.to_string(), member }
                    }
                    None => SequenceEntry::Explicit(value.parse()?),
                };
                self.sequences.push((name, entry));
            }
            Section::Families => {
                let entry = if let Some(arg) = call_argument(value, "finite") {
                    let names: Vec<String> =
                        arg.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                    let mut universe: Option<Universe> = None;
                    for n in &names {
                        let c = lookup(&self.charges, n).ok_or_else(|| Instance::missing(Section::Charges, n))?;
                        match universe {
                            Some(u) if u != c.universe() => {
                                return Err(Error::UniverseMismatch { left: u, right: c.universe() }.into())
                            }
                            _ => universe = Some(c.universe()),
                        }
                    }
                    FamilyEntry::Finite(names)
                } else if let Some(arg) = call_argument(value, "pointmasses") {
                    let support = self.set_operand(arg)?;
                    ChargeFamily::point_masses(support.clone())?;
                    FamilyEntry::PointMasses { source: arg.to_string(), support }
                } else {
                    return Err(CliError::new(
                        ErrorKind::Parse,
                        format!("expected `finite(…)` or `pointmasses(…)`, got `{value}`"),
                    ));
                };
                self.families.push((name, entry));
            }
        }
        Ok(())
    }

    /// A set name or a braced literal.
    fn set_operand(&self, arg: &str) -> Result<EpSet, CliError> {
        if arg.starts_with('{') {
            return Ok(arg.parse()?);
        }
        lookup(&self.sets, arg).cloned().ok_or_else(|| Instance::missing(Section::Sets, arg))
    }
}

fn call_argument<'a>(value: &'a str, head: &str) -> Option<&'a str> {
    value.strip_prefix(head)?.trim_start().strip_prefix('(')?.strip_suffix(')').map(str::trim)
}

/// 1-based column of the first character after `=`, skipping spaces.
fn name_value_column(content: &str) -> usize {
    let eq = content.find('=').unwrap_or(0);
    let after = &content[eq + 1..];
    eq + 1 + (after.len() - after.trim_start().len()) + 1
}

impl fmt::Display for Instance {
    /// Serializes back to the instance grammar; parsing the output yields an
    /// equal instance.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for section in Section::ALL {
            if !self.has_section(section) {
                continue;
            }
            writeln!(f, "[{}]", section.name())?;
            match section {
                Section::Sets => {
                    for (n, s) in &self.sets {
                        writeln!(f, "{n} = {s}")?;
                    }
                }
                Section::Charges => {
                    for (n, c) in &self.charges {
                        writeln!(f, "{n} = {c}")?;
                    }
                }
                Section::Sequences => {
                    for (n, e) in &self.sequences {
                        match e {
                            SequenceEntry::Tail { source, .. } => writeln!(f, "{n} = tail({source})")?,
                            SequenceEntry::Explicit(s) => writeln!(f, "{n} = {s}")?,
                        }
                    }
                }
                Section::Families => {
                    for (n, e) in &self.families {
                        match e {
                            FamilyEntry::Finite(names) => writeln!(f, "{n} = finite({})", names.join(", "))?,
                            FamilyEntry::PointMasses { source, .. } => writeln!(f, "{n} = pointmasses({source})")?,
                        }
                    }
                }
                Section::Generators => {
                    for (n, g) in &self.generators {
                        writeln!(f, "{n} = {g}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
