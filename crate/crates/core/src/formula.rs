//! Hybrid Boolean formulas: OR clauses, XOR constraints and at-least-k
//! cardinality constraints over signed literals.
//!
//! Truth values follow the ±1 convention used by the continuous relaxation:
//! `-1` encodes True and `+1` encodes False.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, ParseError, Result};

/// Largest variable count accepted by [`brute_force_best`].
pub const BRUTE_FORCE_LIMIT: usize = 26;

/// A signed occurrence of a 1-based variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    /// Panics if `var` is zero.
    pub fn new(var: u32, negated: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Literal { var, negated }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, false)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, true)
    }

    /// Builds a literal from a nonzero DIMACS integer.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal::new(lit.unsigned_abs() as u32, lit < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    /// Zero-based index of the variable.
    pub fn index(self) -> usize {
        self.var as usize - 1
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// `+1.0` for a positive literal and `-1.0` for a negated one.
    pub fn sign(self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// The symmetric Boolean function a constraint applies to its literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    /// At least one literal is True.
    Or,
    /// The number of True literals is odd (`odd = true`) or even.
    Xor { odd: bool },
    /// At least `bound` literals are True.
    CardGe { bound: usize },
}

impl ConstraintKind {
    /// Value of the constraint when exactly `trues` of its `arity` literals
    /// are True.
    pub fn holds(self, trues: usize, arity: usize) -> bool {
        debug_assert!(trues <= arity);
        match self {
            ConstraintKind::Or => trues >= 1,
            ConstraintKind::Xor { odd } => (trues % 2 == 1) == odd,
            ConstraintKind::CardGe { bound } => trues >= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    kind: ConstraintKind,
    lits: Vec<Literal>,
    weight: f64,
}

impl Constraint {
    /// Validates arity, bound, weight and variable distinctness.
    pub fn new(kind: ConstraintKind, lits: Vec<Literal>, weight: f64) -> Result<Self> {
        if lits.is_empty() {
            return Err(Error::InvalidConstraint("constraint has no literals".into()));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidConstraint(format!("weight {weight} must be finite and nonnegative")));
        }
        if let ConstraintKind::CardGe { bound } = kind {
            if bound > lits.len() {
                return Err(Error::InvalidConstraint(format!("bound {bound} exceeds arity {}", lits.len())));
            }
        }
        if let Some(var) = first_duplicate(&lits) {
            return Err(Error::InvalidConstraint(format!("variable {var} appears twice")));
        }
        Ok(Constraint { kind, lits, weight })
    }

    pub fn or(lits: Vec<Literal>) -> Result<Self> {
        Constraint::new(ConstraintKind::Or, lits, 1.0)
    }

    pub fn xor(lits: Vec<Literal>, odd: bool) -> Result<Self> {
        Constraint::new(ConstraintKind::Xor { odd }, lits, 1.0)
    }

    pub fn card_ge(bound: usize, lits: Vec<Literal>) -> Result<Self> {
        Constraint::new(ConstraintKind::CardGe { bound }, lits, 1.0)
    }

    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(Error::InvalidConstraint(format!("weight {weight} must be finite and nonnegative")));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn lits(&self) -> &[Literal] {
        &self.lits
    }

    pub fn arity(&self) -> usize {
        self.lits.len()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Number of True literals under `a`.
    pub fn count_true(&self, a: &DiscreteAssignment) -> usize {
        self.lits.iter().filter(|&&l| a.lit_is_true(l)).count()
    }

    pub fn is_satisfied(&self, a: &DiscreteAssignment) -> bool {
        self.kind.holds(self.count_true(a), self.arity())
    }
}

fn first_duplicate(lits: &[Literal]) -> Option<u32> {
    let mut vars: Vec<u32> = lits.iter().map(|l| l.var).collect();
    vars.sort_unstable();
    vars.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

/// A conjunction of constraints over `n_vars` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Formula {
    n_vars: usize,
    constraints: Vec<Constraint>,
}

impl Formula {
    pub fn new(n_vars: usize, constraints: Vec<Constraint>) -> Result<Self> {
        for (i, c) in constraints.iter().enumerate() {
            if let Some(l) = c.lits.iter().find(|l| l.index() >= n_vars) {
                return Err(Error::InvalidConstraint(format!(
                    "constraint {i}: literal {l} out of range for {n_vars} variables"
                )));
            }
        }
        Ok(Formula { n_vars, constraints })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.constraints.iter().map(Constraint::weight).sum()
    }

    pub fn is_unweighted(&self) -> bool {
        self.constraints.iter().all(|c| c.weight == 1.0)
    }

    pub fn is_cnf(&self) -> bool {
        self.constraints.iter().all(|c| c.kind == ConstraintKind::Or)
    }
}

/// A point of `{-1, +1}^n`; `-1` is True.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteAssignment(Vec<i8>);

impl DiscreteAssignment {
    /// Panics if any entry is not ±1.
    pub fn new(values: Vec<i8>) -> Self {
        assert!(values.iter().all(|&v| v == 1 || v == -1), "entries must be ±1");
        DiscreteAssignment(values)
    }

    pub fn all_false(n: usize) -> Self {
        DiscreteAssignment(vec![1; n])
    }

    /// Bit `i` of `mask` set means variable `i + 1` is True.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        DiscreteAssignment((0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    /// Rounds a continuous point: negative values become True, zero and
    /// positive values become False.
    pub fn from_signs(x: &[f64]) -> Self {
        DiscreteAssignment(x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect())
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether the 1-based variable `var` is True.
    pub fn is_true(&self, var: u32) -> bool {
        self.0[var as usize - 1] == -1
    }

    pub fn lit_is_true(&self, lit: Literal) -> bool {
        self.is_true(lit.var) != lit.negated
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }

    /// DIMACS literals: positive iff the variable is True.
    pub fn dimacs_literals(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().enumerate().map(|(i, &v)| if v == -1 { i as i64 + 1 } else { -(i as i64 + 1) })
    }
}

pub fn eval_constraint_discrete(c: &Constraint, a: &DiscreteAssignment) -> bool {
    c.is_satisfied(a)
}

/// Number of unsatisfied constraints and their total weight.
pub fn count_unsat(f: &Formula, a: &DiscreteAssignment) -> (usize, f64) {
    let mut count = 0;
    let mut weight = 0.0;
    for c in &f.constraints {
        if !c.is_satisfied(a) {
            count += 1;
            weight += c.weight;
        }
    }
    (count, weight)
}

/// Exhaustive minimum of the falsified weight over all `2^n` assignments.
///
/// Ties go to the assignment with the smallest mask in the
/// [`DiscreteAssignment::from_mask`] numbering.
pub fn brute_force_best(f: &Formula) -> Result<(f64, DiscreteAssignment)> {
    let n = f.n_vars;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyVariables(n));
    }
    let m = f.constraints.len();
    let mut occurs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (ci, c) in f.constraints.iter().enumerate() {
        for l in &c.lits {
            occurs[l.index()].push((ci, l.negated));
        }
    }
    // Mask 0 is all-False: exactly the negated literals are True.
    let mut trues: Vec<usize> = f.constraints.iter().map(|c| c.lits.iter().filter(|l| l.negated).count()).collect();
    let mut sat: Vec<bool> =
        (0..m).map(|ci| f.constraints[ci].kind.holds(trues[ci], f.constraints[ci].arity())).collect();

    let exact_cost =
        |sat: &[bool]| -> f64 { f.constraints.iter().zip(sat).filter(|(_, &s)| !s).map(|(c, _)| c.weight).sum() };

    let slack = 1e-6 * (f.total_weight() + 1.0);
    let mut running = exact_cost(&sat);
    let mut best_cost = running;
    let mut best_mask = 0u64;

    // Gray-code walk flips one variable per step.
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let mask = step ^ (step >> 1);
        let now_true = mask >> bit & 1 == 1;
        for &(ci, negated) in &occurs[bit] {
            let c = &f.constraints[ci];
            if now_true != negated {
                trues[ci] += 1;
            } else {
                trues[ci] -= 1;
            }
            let s = c.kind.holds(trues[ci], c.arity());
            if s != sat[ci] {
                running += if s { -c.weight } else { c.weight };
                sat[ci] = s;
            }
        }
        if running <= best_cost + slack {
            let exact = exact_cost(&sat);
            if exact < best_cost || (exact == best_cost && mask < best_mask) {
                best_cost = exact;
                best_mask = mask;
            }
            running = exact;
        }
    }
    Ok((best_cost, DiscreteAssignment::from_mask(n, best_mask)))
}

/// Text formats understood by [`parse_formula`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    DimacsCnf,
    Hnf,
    Whnf,
}

impl Format {
    /// Guesses the format from the `p` header line.
    pub fn detect(text: &str) -> Option<Format> {
        text.lines().map(str::trim).find(|l| l.starts_with('p')).and_then(|l| match l.split_whitespace().nth(1) {
            Some("cnf") => Some(Format::DimacsCnf),
            Some("hnf") => Some(Format::Hnf),
            Some("whnf") => Some(Format::Whnf),
            _ => None,
        })
    }

    fn tag(self) -> &'static str {
        match self {
            Format::DimacsCnf => "cnf",
            Format::Hnf => "hnf",
            Format::Whnf => "whnf",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cnf" | "dimacs" | "dimacs-cnf" => Ok(Format::DimacsCnf),
            "hnf" => Ok(Format::Hnf),
            "whnf" => Ok(Format::Whnf),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn parse_int(tok: &str, line: usize) -> std::result::Result<i64, ParseError> {
    tok.parse::<i64>().map_err(|_| syntax(line, format!("expected integer, found `{tok}`")))
}

fn parse_header<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    format: Format,
    line: usize,
) -> std::result::Result<(usize, usize), ParseError> {
    match toks.next() {
        Some(tag) if tag == format.tag() => {}
        Some(tag) => return Err(syntax(line, format!("expected `p {}`, found `p {tag}`", format.tag()))),
        None => return Err(syntax(line, "truncated header")),
    }
    let mut count = |what: &str| -> std::result::Result<usize, ParseError> {
        let tok = toks.next().ok_or_else(|| syntax(line, format!("header missing {what}")))?;
        let v = parse_int(tok, line)?;
        usize::try_from(v).map_err(|_| syntax(line, format!("negative {what}")))
    };
    let n = count("variable count")?;
    let m = count("constraint count")?;
    if let Some(extra) = toks.next() {
        return Err(syntax(line, format!("unexpected `{extra}` after header")));
    }
    Ok((n, m))
}

fn parse_lits<'a>(
    toks: impl Iterator<Item = &'a str>,
    n_vars: usize,
    line: usize,
) -> std::result::Result<Vec<Literal>, ParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in toks {
        if terminated {
            return Err(syntax(line, format!("unexpected `{tok}` after terminating 0")));
        }
        let v = parse_int(tok, line)?;
        if v == 0 {
            terminated = true;
            continue;
        }
        if v.unsigned_abs() as usize > n_vars {
            return Err(ParseError::LiteralOutOfRange { line, lit: v, n_vars });
        }
        lits.push(Literal::from_dimacs(v).expect("nonzero and in range"));
    }
    if !terminated {
        return Err(syntax(line, "constraint not terminated by 0"));
    }
    if lits.is_empty() {
        return Err(syntax(line, "empty constraint"));
    }
    if let Some(var) = first_duplicate(&lits) {
        return Err(ParseError::DuplicateVariable { line, var });
    }
    Ok(lits)
}

/// Parses a formula in one of the supported text formats.
pub fn parse_formula(text: &str, format: Format) -> std::result::Result<Formula, ParseError> {
    match format {
        Format::DimacsCnf => parse_dimacs(text),
        Format::Hnf | Format::Whnf => parse_hybrid(text, format),
    }
}

fn parse_dimacs(text: &str) -> std::result::Result<Formula, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut constraints = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        // SATLIB files end with a `%` marker followed by junk.
        if trimmed.starts_with('%') {
            break;
        }
        let mut toks = trimmed.split_whitespace();
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate header"));
            }
            toks.next();
            header = Some(parse_header(&mut toks, Format::DimacsCnf, line)?);
            continue;
        }
        let (n_vars, _) = header.ok_or_else(|| syntax(line, "clause before `p cnf` header"))?;
        for tok in toks {
            let v = parse_int(tok, line)?;
            if pending.is_empty() {
                pending_line = line;
            }
            if v == 0 {
                if pending.is_empty() {
                    return Err(syntax(line, "empty clause"));
                }
                let lits = std::mem::take(&mut pending);
                if let Some(var) = first_duplicate(&lits) {
                    return Err(ParseError::DuplicateVariable { line: pending_line, var });
                }
                constraints.push(Constraint { kind: ConstraintKind::Or, lits, weight: 1.0 });
                continue;
            }
            if v.unsigned_abs() as usize > n_vars {
                return Err(ParseError::LiteralOutOfRange { line, lit: v, n_vars });
            }
            pending.push(Literal::from_dimacs(v).expect("nonzero"));
        }
    }
    let (n_vars, m) = header.ok_or_else(|| syntax(last_line.max(1), "missing `p cnf` header"))?;
    if !pending.is_empty() {
        return Err(syntax(pending_line, "clause not terminated by 0"));
    }
    if constraints.len() != m {
        return Err(syntax(last_line.max(1), format!("header declares {m} clauses, found {}", constraints.len())));
    }
    Ok(Formula { n_vars, constraints })
}

fn parse_hybrid(text: &str, format: Format) -> std::result::Result<Formula, ParseError> {
    let weighted = format == Format::Whnf;
    let mut header: Option<(usize, usize)> = None;
    let mut constraints = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut toks = trimmed.split_whitespace().peekable();
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate header"));
            }
            toks.next();
            header = Some(parse_header(&mut toks, format, line)?);
            continue;
        }
        let (n_vars, _) = header.ok_or_else(|| syntax(line, "constraint before header"))?;

        let weight = if weighted {
            let tok = toks.next().expect("nonempty line");
            let w: f64 = tok.parse().map_err(|_| syntax(line, format!("expected weight, found `{tok}`")))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(syntax(line, format!("weight {tok} must be finite and nonnegative")));
            }
            w
        } else {
            1.0
        };

        let tag = toks.next().ok_or_else(|| syntax(line, "missing constraint type"))?;
        let kind_bound = match tag {
            "o" => (ConstraintKind::Or, None),
            "x" => (ConstraintKind::Xor { odd: true }, None),
            "xn" => (ConstraintKind::Xor { odd: false }, None),
            "d" => {
                let tok = toks.next().ok_or_else(|| syntax(line, "missing cardinality bound"))?;
                (ConstraintKind::CardGe { bound: 0 }, Some(parse_int(tok, line)?))
            }
            other => return Err(syntax(line, format!("unknown constraint type `{other}`"))),
        };
        let lits = parse_lits(toks, n_vars, line)?;
        let kind = match kind_bound {
            (_, Some(bound)) => {
                if bound < 0 || bound as usize > lits.len() {
                    return Err(ParseError::BoundOutOfRange { line, bound, arity: lits.len() });
                }
                ConstraintKind::CardGe { bound: bound as usize }
            }
            (kind, None) => kind,
        };
        constraints.push(Constraint { kind, lits, weight });
    }
    let (n_vars, m) = header.ok_or_else(|| syntax(last_line.max(1), "missing header"))?;
    if constraints.len() != m {
        return Err(syntax(last_line.max(1), format!("header declares {m} constraints, found {}", constraints.len())));
    }
    Ok(Formula { n_vars, constraints })
}

/// Writes `f` in the given format.
///
/// `Hnf` drops weights, so it is refused for weighted formulas; `DimacsCnf`
/// is refused unless every constraint is an OR clause of weight 1.
pub fn write_formula(f: &Formula, format: Format) -> Result<String> {
    match format {
        Format::DimacsCnf if !(f.is_cnf() && f.is_unweighted()) => {
            return Err(Error::Unrepresentable("dimacs-cnf"));
        }
        Format::Hnf if !f.is_unweighted() => return Err(Error::Unrepresentable("hnf")),
        _ => {}
    }
    let mut out = String::new();
    writeln!(out, "p {} {} {}", format.tag(), f.n_vars, f.constraints.len()).unwrap();
    for c in &f.constraints {
        if format == Format::Whnf {
            write!(out, "{:?} ", c.weight).unwrap();
        }
        match (format, c.kind) {
            (Format::DimacsCnf, _) => {}
            (_, ConstraintKind::Or) => out.push_str("o "),
            (_, ConstraintKind::Xor { odd: true }) => out.push_str("x "),
            (_, ConstraintKind::Xor { odd: false }) => out.push_str("xn "),
            (_, ConstraintKind::CardGe { bound }) => write!(out, "d {bound} ").unwrap(),
        }
        for l in &c.lits {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: &[i8]) -> DiscreteAssignment {
        DiscreteAssignment::new(v.to_vec())
    }

    fn saddle() -> Formula {
        Formula::new(
            2,
            vec![
                Constraint::or(vec![Literal::pos(1), Literal::neg(2)]).unwrap(),
                Constraint::xor(vec![Literal::neg(1), Literal::pos(2)], true).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn parses_dimacs_clause() {
        let f = parse_formula("p cnf 2 1\n1 -2 0\n", Format::DimacsCnf).unwrap();
        assert_eq!(f.n_vars(), 2);
        assert_eq!(f.constraints(), &[Constraint::or(vec![Literal::pos(1), Literal::neg(2)]).unwrap()]);
    }

    #[test]
    fn parses_dimacs_with_comments_and_satlib_trailer() {
        let text = "c hello\np cnf 3 2\n1 2\n 3 0 -1 0\n%\n0\n";
        let f = parse_formula(text, Format::DimacsCnf).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.constraints()[0].arity(), 3);
    }

    #[test]
    fn parses_hybrid_lines() {
        let f = parse_formula("p hnf 4 1\nd 2 1 2 3 4 0\n", Format::Hnf).unwrap();
        assert_eq!(f.constraints()[0].kind(), ConstraintKind::CardGe { bound: 2 });
        assert_eq!(f.constraints()[0].arity(), 4);

        let f = parse_formula("p hnf 3 1\nx 1 2 3 0\n", Format::Hnf).unwrap();
        assert_eq!(f.constraints()[0].kind(), ConstraintKind::Xor { odd: true });

        let f = parse_formula("p hnf 3 2\nxn 1 -2 0\no 3 0\n", Format::Hnf).unwrap();
        assert_eq!(f.constraints()[0].kind(), ConstraintKind::Xor { odd: false });
        assert_eq!(f.constraints()[1].kind(), ConstraintKind::Or);
    }

    #[test]
    fn parses_weights() {
        let f = parse_formula("p whnf 2 1\n2.0 x 1 -2 0\n", Format::Whnf).unwrap();
        assert_eq!(f.constraints()[0].weight(), 2.0);
        assert_eq!(f.constraints()[0].lits(), &[Literal::pos(1), Literal::neg(2)]);
    }

    #[test]
    fn reports_errors_with_line_numbers() {
        let err = parse_formula("p hnf 3 1\nc\nx 1 1 0\n", Format::Hnf).unwrap_err();
        assert_eq!(err, ParseError::DuplicateVariable { line: 3, var: 1 });

        let err = parse_formula("p hnf 3 1\nx 1 -4 0\n", Format::Hnf).unwrap_err();
        assert_eq!(err, ParseError::LiteralOutOfRange { line: 2, lit: -4, n_vars: 3 });

        let err = parse_formula("p hnf 3 1\nd 4 1 2 3 0\n", Format::Hnf).unwrap_err();
        assert_eq!(err, ParseError::BoundOutOfRange { line: 2, bound: 4, arity: 3 });

        let err = parse_formula("p hnf 3 1\nq 1 2 0\n", Format::Hnf).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));

        let err = parse_formula("p cnf 3 1\n1 2\n", Format::DimacsCnf).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));

        let err = parse_formula("p cnf 2 1\n1 -1 0\n", Format::DimacsCnf).unwrap_err();
        assert_eq!(err, ParseError::DuplicateVariable { line: 2, var: 1 });

        assert!(parse_formula("p hnf 2 2\no 1 0\n", Format::Hnf).is_err());
        assert!(parse_formula("p whnf 2 1\n-1 o 1 0\n", Format::Whnf).is_err());
    }

    #[test]
    fn detects_format_from_header() {
        assert_eq!(Format::detect("c x\np cnf 1 0\n"), Some(Format::DimacsCnf));
        assert_eq!(Format::detect("p whnf 1 0\n"), Some(Format::Whnf));
        assert_eq!(Format::detect("nothing"), None);
    }

    #[test]
    fn writes_and_rereads() {
        let text = "p whnf 4 3\n0.5 o 1 -2 0\n2.0 d 2 1 2 3 4 0\n1.0 xn -3 4 0\n";
        let f = parse_formula(text, Format::Whnf).unwrap();
        let out = write_formula(&f, Format::Whnf).unwrap();
        assert_eq!(out, text);
        assert!(write_formula(&f, Format::Hnf).is_err());
        assert!(write_formula(&f, Format::DimacsCnf).is_err());
    }

    #[test]
    fn discrete_evaluation_examples() {
        let card = Constraint::card_ge(2, (1..=4).map(Literal::pos).collect()).unwrap();
        assert!(card.is_satisfied(&a(&[-1, -1, 1, 1])));
        let xor = Constraint::xor(vec![Literal::pos(1), Literal::pos(2)], true).unwrap();
        assert!(!xor.is_satisfied(&a(&[-1, -1])));
        let or = Constraint::or(vec![Literal::pos(1), Literal::neg(2)]).unwrap();
        assert!(!or.is_satisfied(&a(&[1, -1])));
    }

    #[test]
    fn count_unsat_examples() {
        let f = Formula::new(
            4,
            vec![
                Constraint::xor(vec![Literal::pos(1), Literal::pos(2)], true).unwrap(),
                Constraint::xor(vec![Literal::pos(2), Literal::pos(3)], true).unwrap(),
                Constraint::xor(vec![Literal::pos(3), Literal::pos(4)], true).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(count_unsat(&f, &a(&[1, -1, -1, 1])), (1, 1.0));
        assert_eq!(count_unsat(&Formula::default(), &a(&[])), (0, 0.0));
    }

    #[test]
    fn brute_force_examples() {
        let f = Formula::new(1, vec![Constraint::or(vec![Literal::pos(1)]).unwrap()]).unwrap();
        assert_eq!(brute_force_best(&f).unwrap(), (0.0, a(&[-1])));

        // Satisfying corners of the two-constraint example are TT and FF;
        // the lowest mask is all False.
        let (cost, w) = brute_force_best(&saddle()).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(w, a(&[1, 1]));
        assert_eq!(count_unsat(&saddle(), &a(&[-1, -1])).0, 0);
        assert_eq!(count_unsat(&saddle(), &a(&[1, -1])).0, 2);
        assert_eq!(count_unsat(&saddle(), &a(&[-1, 1])).0, 1);

        let unsat = Formula::new(
            1,
            vec![
                Constraint::or(vec![Literal::pos(1)]).unwrap(),
                Constraint::or(vec![Literal::neg(1)]).unwrap().with_weight(0.25).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(brute_force_best(&unsat).unwrap(), (0.25, a(&[-1])));

        let big = Formula::new(27, vec![]).unwrap();
        assert_eq!(brute_force_best(&big), Err(Error::TooManyVariables(27)));
    }

    #[test]
    fn brute_force_matches_naive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(1..=9);
            let m = rng.gen_range(0..12);
            let mut cs = Vec::new();
            for _ in 0..m {
                let k = rng.gen_range(1..=n);
                let mut vars: Vec<u32> = (1..=n as u32).collect();
                for i in 0..k {
                    let j = rng.gen_range(i..vars.len());
                    vars.swap(i, j);
                }
                let lits: Vec<Literal> = vars[..k].iter().map(|&v| Literal::new(v, rng.gen())).collect();
                let kind = match rng.gen_range(0..3) {
                    0 => ConstraintKind::Or,
                    1 => ConstraintKind::Xor { odd: rng.gen() },
                    _ => ConstraintKind::CardGe { bound: rng.gen_range(0..=k) },
                };
                let w = rng.gen_range(0..8) as f64 * 0.125;
                cs.push(Constraint::new(kind, lits, w).unwrap());
            }
            let f = Formula::new(n, cs).unwrap();
            let (cost, wit) = brute_force_best(&f).unwrap();
            let mut naive = (f64::INFINITY, 0u64);
            for mask in 0..(1u64 << n) {
                let c = count_unsat(&f, &DiscreteAssignment::from_mask(n, mask)).1;
                if c < naive.0 {
                    naive = (c, mask);
                }
            }
            assert_eq!(cost, naive.0);
            assert_eq!(wit, DiscreteAssignment::from_mask(n, naive.1));
        }
    }

    #[test]
    fn sign_rounding_ties_to_false() {
        let d = DiscreteAssignment::from_signs(&[0.0, -0.0, -1e-300, 0.4]);
        assert_eq!(d.values(), &[1, 1, -1, 1]);
        assert_eq!(d.dimacs_literals().collect::<Vec<_>>(), vec![-1, -2, 3, -4]);
    }
}
