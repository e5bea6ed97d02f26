//! Reader and writer for the CNF fragment of the TPTP language.
//!
//! Supported input:
//!
//! ```text
//! problem     := (include | cnf_annot | comment)*
//! include     := "include(" squoted ")."
//! cnf_annot   := "cnf(" name "," role "," disjunction [ "," annotations ] ")."
//! disjunction := literal ("|" literal)*     (optionally parenthesised)
//! literal     := ["~"] atom | term "=" term | term "!=" term
//! atom        := lower_word [ "(" term ("," term)* ")" ]
//! term        := variable | lower_word [ "(" term ("," term)* ")" ]
//! ```
//!
//! Single-quoted atoms are accepted wherever a lower word is. Annotations
//! after the formula are skipped. `fof`, `tff` and the other TPTP languages are
//! rejected, as are `$`-prefixed tokens (`$false` is only ever written, as the
//! rendering of the empty clause).

use std::fmt;

use thiserror::Error;

use crate::syntax::{Atom, Clause, ClauseSet, Inference, Literal, Role, SymbolKind, Term, EQUALITY};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TptpErrorKind {
    Syntax,
    Include,
    NotCnf,
    Unsupported,
    SignatureConflict,
}

/// Positioned reader error. `file` is `None` for the top-level text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{line}:{column}: {message}", file.as_ref().map(|f| format!("{f}:")).unwrap_or_default())]
pub struct TptpError {
    pub kind: TptpErrorKind,
    pub file: Option<String>,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Resolves the quoted name of an `include` directive to its text.
pub trait IncludeResolver {
    fn resolve(&self, name: &str) -> Result<String, String>;
}

impl<F> IncludeResolver for F
where
    F: Fn(&str) -> Result<String, String>,
{
    fn resolve(&self, name: &str) -> Result<String, String> {
        self(name)
    }
}

/// Resolver for self-contained problems: every include fails.
pub struct NoIncludes;

impl IncludeResolver for NoIncludes {
    fn resolve(&self, name: &str) -> Result<String, String> {
        Err(format!("no include resolver configured for '{name}'"))
    }
}

const MAX_INCLUDE_DEPTH: usize = 32;

/// Parses a CNF problem, resolving includes in place.
///
/// Clauses receive ids and order numbers `0, 1, 2, ...` in file order, with
/// included clauses spliced in at the position of their directive.
pub fn parse_problem(text: &str, resolver: &dyn IncludeResolver) -> Result<ClauseSet, TptpError> {
    let mut builder = Builder { set: ClauseSet::default(), resolver, stack: Vec::new() };
    builder.parse_text(text, None)?;
    Ok(builder.set)
}

/// Convenience for problems without include directives.
pub fn parse_str(text: &str) -> Result<ClauseSet, TptpError> {
    parse_problem(text, &NoIncludes)
}

struct Builder<'r> {
    set: ClauseSet,
    resolver: &'r dyn IncludeResolver,
    stack: Vec<String>,
}

enum Statement {
    Include { name: String, line: usize, column: usize },
    Cnf { label: String, role: Role, literals: Vec<Literal>, symbols: Vec<SymbolUse> },
}

struct SymbolUse {
    name: String,
    arity: usize,
    kind: SymbolKind,
    line: usize,
    column: usize,
}

impl Builder<'_> {
    fn parse_text(&mut self, text: &str, file: Option<&str>) -> Result<(), TptpError> {
        let mut cursor = Cursor::new(text, file);
        while let Some(statement) = cursor.statement()? {
            match statement {
                Statement::Include { name, line, column } => {
                    self.include(&name, file, line, column)?;
                }
                Statement::Cnf { label, role, literals, symbols } => {
                    for sym in symbols {
                        self.declare(sym, file)?;
                    }
                    if literals.iter().any(|l| l.atom.predicate == EQUALITY) {
                        self.set.has_equality = true;
                    }
                    let id = self.set.clauses.len();
                    self.set.clauses.push(Clause {
                        id,
                        literals,
                        label,
                        role,
                        order_number: id,
                        inference: Inference::Input,
                        processed: false,
                    });
                }
            }
        }
        Ok(())
    }

    fn include(&mut self, name: &str, file: Option<&str>, line: usize, column: usize) -> Result<(), TptpError> {
        let err = |message: String| TptpError {
            kind: TptpErrorKind::Include,
            file: file.map(str::to_owned),
            line,
            column,
            message,
        };
        if self.stack.iter().any(|n| n == name) {
            return Err(err(format!("include cycle through '{name}'")));
        }
        if self.stack.len() >= MAX_INCLUDE_DEPTH {
            return Err(err(format!("include nesting deeper than {MAX_INCLUDE_DEPTH}")));
        }
        let text =
            self.resolver.resolve(name).map_err(|reason| err(format!("cannot resolve include '{name}': {reason}")))?;
        self.stack.push(name.to_owned());
        let result = self.parse_text(&text, Some(name));
        self.stack.pop();
        result
    }

    fn declare(&mut self, sym: SymbolUse, file: Option<&str>) -> Result<(), TptpError> {
        let key = (sym.name, sym.arity);
        match self.set.signature.get(&key) {
            Some(kind) if *kind != sym.kind => Err(TptpError {
                kind: TptpErrorKind::SignatureConflict,
                file: file.map(str::to_owned),
                line: sym.line,
                column: sym.column,
                message: format!(
                    "symbol {}/{} used as {} but previously as {}",
                    key.0,
                    key.1,
                    kind_name(sym.kind),
                    kind_name(*kind)
                ),
            }),
            Some(_) => Ok(()),
            None => {
                self.set.signature.insert(key, sym.kind);
                Ok(())
            }
        }
    }
}

fn kind_name(kind: SymbolKind) -> &'static str {
    match kind {
        SymbolKind::Function => "a function",
        SymbolKind::Predicate => "a predicate",
    }
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    file: Option<&'a str>,
}

#[derive(Clone, Copy)]
struct Mark {
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &str, file: Option<&'a str>) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line: 1, column: 1, file }
    }

    fn mark(&self) -> Mark {
        Mark { line: self.line, column: self.column }
    }

    fn error_at(&self, at: Mark, kind: TptpErrorKind, message: impl Into<String>) -> TptpError {
        TptpError {
            kind,
            file: self.file.map(str::to_owned),
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn syntax(&self, message: impl Into<String>) -> TptpError {
        self.error_at(self.mark(), TptpErrorKind::Syntax, message)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<(), TptpError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.mark();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => {
                                return Err(self.error_at(start, TptpErrorKind::Syntax, "unterminated block comment"))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn describe_next(&self) -> String {
        match self.peek() {
            None => "end of input".to_owned(),
            Some(c) => format!("'{c}'"),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TptpError> {
        self.skip_trivia()?;
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}', found {}", self.describe_next())))
        }
    }

    fn eat(&mut self, c: char) -> Result<bool, TptpError> {
        self.skip_trivia()?;
        if self.peek() == Some(c) {
            self.bump();
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn single_quoted(&mut self) -> Result<String, TptpError> {
        let start = self.mark();
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('\'') => break,
                Some('\\') => match self.bump() {
                    Some(c @ ('\\' | '\'')) => s.push(c),
                    _ => return Err(self.syntax("invalid escape in quoted atom")),
                },
                Some('\n') | None => {
                    return Err(self.error_at(start, TptpErrorKind::Syntax, "unterminated quoted atom"))
                }
                Some(c) if (' '..='~').contains(&c) => s.push(c),
                Some(c) => return Err(self.syntax(format!("character {c:?} not allowed in quoted atom"))),
            }
        }
        if s.is_empty() {
            return Err(self.error_at(start, TptpErrorKind::Syntax, "empty quoted atom"));
        }
        Ok(s)
    }

    /// Lower word or single-quoted atom.
    fn symbol(&mut self, what: &str) -> Result<(String, Mark), TptpError> {
        self.skip_trivia()?;
        let at = self.mark();
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => Ok((self.word(), at)),
            Some('\'') => Ok((self.single_quoted()?, at)),
            Some('$') => {
                self.bump();
                let w = self.word();
                Err(self.error_at(at, TptpErrorKind::Unsupported, format!("unsupported token '${w}'")))
            }
            _ => Err(self.syntax(format!("expected {what}, found {}", self.describe_next()))),
        }
    }

    fn statement(&mut self) -> Result<Option<Statement>, TptpError> {
        self.skip_trivia()?;
        if self.peek().is_none() {
            return Ok(None);
        }
        let at = self.mark();
        if !self.peek().is_some_and(|c| c.is_ascii_lowercase()) {
            return Err(self.syntax(format!("expected a statement, found {}", self.describe_next())));
        }
        let keyword = self.word();
        match keyword.as_str() {
            "include" => {
                self.expect('(')?;
                self.skip_trivia()?;
                if self.peek() != Some('\'') {
                    return Err(self.syntax("expected a single-quoted file name"));
                }
                let name = self.single_quoted()?;
                self.skip_trivia()?;
                if self.peek() == Some(',') {
                    return Err(self.error_at(
                        self.mark(),
                        TptpErrorKind::Unsupported,
                        "include with a formula selection is not supported",
                    ));
                }
                self.expect(')')?;
                self.expect('.')?;
                Ok(Some(Statement::Include { name, line: at.line, column: at.column }))
            }
            "cnf" => self.cnf().map(Some),
            "fof" | "tff" | "thf" | "tcf" | "tpi" => Err(self.error_at(
                at,
                TptpErrorKind::NotCnf,
                format!("{keyword} statements need clausification, which is not supported; convert the problem to cnf first"),
            )),
            _ => Err(self.error_at(at, TptpErrorKind::Syntax, format!("unknown statement '{keyword}'"))),
        }
    }

    fn cnf(&mut self) -> Result<Statement, TptpError> {
        self.expect('(')?;
        let label = self.name()?;
        self.expect(',')?;
        self.skip_trivia()?;
        let role_at = self.mark();
        let role_word = self.word();
        let role = Role::from_input(&role_word).ok_or_else(|| {
            if role_word.is_empty() {
                self.syntax(format!("expected a role, found {}", self.describe_next()))
            } else {
                self.error_at(role_at, TptpErrorKind::Syntax, format!("unknown role '{role_word}'"))
            }
        })?;
        self.expect(',')?;
        let mut symbols = Vec::new();
        self.skip_trivia()?;
        let literals = if self.peek() == Some('(') {
            self.bump();
            let lits = self.disjunction(&mut symbols)?;
            self.expect(')')?;
            lits
        } else {
            self.disjunction(&mut symbols)?
        };
        self.skip_trivia()?;
        if self.peek() == Some(',') {
            self.bump();
            self.skip_annotations()?;
        }
        self.expect(')')?;
        self.expect('.')?;
        Ok(Statement::Cnf { label, role, literals, symbols })
    }

    fn name(&mut self) -> Result<String, TptpError> {
        self.skip_trivia()?;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => Ok(self.word()),
            Some('\'') => self.single_quoted(),
            _ => Err(self.syntax(format!("expected a formula name, found {}", self.describe_next()))),
        }
    }

    /// Skips balanced annotation text up to, not including, the closing ')'.
    fn skip_annotations(&mut self) -> Result<(), TptpError> {
        let mut depth = 0usize;
        loop {
            self.skip_trivia()?;
            match self.peek() {
                None => return Err(self.syntax("unexpected end of input inside annotations")),
                Some('(' | '[') => {
                    depth += 1;
                    self.bump();
                }
                Some(')' | ']') if depth == 0 => return Ok(()),
                Some(')' | ']') => {
                    depth -= 1;
                    self.bump();
                }
                Some('\'') => {
                    self.single_quoted()?;
                }
                Some('"') => {
                    let start = self.mark();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\\') => {
                                self.bump();
                            }
                            Some(_) => {}
                            None => return Err(self.error_at(start, TptpErrorKind::Syntax, "unterminated string")),
                        }
                    }
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn disjunction(&mut self, symbols: &mut Vec<SymbolUse>) -> Result<Vec<Literal>, TptpError> {
        let mut lits = vec![self.literal(symbols)?];
        while self.eat('|')? {
            lits.push(self.literal(symbols)?);
        }
        Ok(lits)
    }

    fn literal(&mut self, symbols: &mut Vec<SymbolUse>) -> Result<Literal, TptpError> {
        let positive = !self.eat('~')?;
        self.skip_trivia()?;
        let at = self.mark();
        let mut term_symbols = Vec::new();
        let lhs = self.term(&mut term_symbols)?;
        self.skip_trivia()?;
        let equality = match (self.peek(), self.peek_at(1)) {
            (Some('='), _) => {
                self.bump();
                Some(true)
            }
            (Some('!'), Some('=')) => {
                self.bump();
                self.bump();
                Some(false)
            }
            _ => None,
        };
        if let Some(eq_positive) = equality {
            let rhs = self.term(&mut term_symbols)?;
            symbols.extend(term_symbols);
            symbols.push(SymbolUse {
                name: EQUALITY.to_owned(),
                arity: 2,
                kind: SymbolKind::Predicate,
                line: at.line,
                column: at.column,
            });
            return Ok(Literal { positive: positive == eq_positive, atom: Atom::new(EQUALITY, vec![lhs, rhs]) });
        }
        match lhs {
            Term::Var(v) => {
                Err(self.error_at(at, TptpErrorKind::Syntax, format!("expected an atom, found variable {v}")))
            }
            Term::Fn(predicate, args) => {
                // The outermost symbol was recorded as a function; it is a predicate.
                let head = term_symbols.remove(0);
                symbols.push(SymbolUse { kind: SymbolKind::Predicate, ..head });
                symbols.extend(term_symbols);
                Ok(Literal { positive, atom: Atom { predicate, args } })
            }
        }
    }

    fn term(&mut self, symbols: &mut Vec<SymbolUse>) -> Result<Term, TptpError> {
        self.skip_trivia()?;
        match self.peek() {
            Some(c) if c.is_ascii_uppercase() || c == '_' => Ok(Term::Var(self.word())),
            _ => {
                let (name, at) = self.symbol("a term")?;
                let slot = symbols.len();
                symbols.push(SymbolUse {
                    name: name.clone(),
                    arity: 0,
                    kind: SymbolKind::Function,
                    line: at.line,
                    column: at.column,
                });
                let mut args = Vec::new();
                if self.peek() == Some('(') {
                    self.bump();
                    args.push(self.term(symbols)?);
                    while self.eat(',')? {
                        args.push(self.term(symbols)?);
                    }
                    self.expect(')')?;
                }
                symbols[slot].arity = args.len();
                Ok(Term::Fn(name, args))
            }
        }
    }
}

fn is_lower_word(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_lowercase()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_symbol(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_lower_word(s) {
        f.write_str(s)
    } else {
        f.write_str("'")?;
        for c in s.chars() {
            if c == '\'' || c == '\\' {
                f.write_str("\\")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("'")
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Fn(name, args) => {
                write_symbol(f, name)?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_equality() {
            return write!(f, "{} = {}", self.args[0], self.args[1]);
        }
        write_symbol(f, &self.predicate)?;
        write_args(f, &self.args)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.positive, self.atom.is_equality()) {
            (true, _) => write!(f, "{}", self.atom),
            (false, true) => write!(f, "{} != {}", self.atom.args[0], self.atom.args[1]),
            (false, false) => write!(f, "~{}", self.atom),
        }
    }
}

/// Renders the disjunction part of a clause; the empty clause is `$false`.
pub fn format_literals(literals: &[Literal]) -> String {
    if literals.is_empty() {
        return "$false".to_owned();
    }
    literals.iter().map(ToString::to_string).collect::<Vec<_>>().join(" | ")
}

fn format_name(name: &str) -> String {
    if is_lower_word(name) || (!name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')) {
        name.to_owned()
    } else {
        let escaped: String = name
            .chars()
            .flat_map(|c| match c {
                '\'' | '\\' => vec!['\\', c],
                c => vec![c],
            })
            .collect();
        format!("'{escaped}'")
    }
}

/// `cnf(label, role, disjunction).` Unlabelled clauses are named `c<id>`.
pub fn serialize_clause(clause: &Clause) -> String {
    let label = if clause.label.is_empty() { format!("c{}", clause.id) } else { format_name(&clause.label) };
    format!("cnf({label}, {}, {}).", clause.role, format_literals(&clause.literals))
}

/// One `cnf` line per clause.
pub fn serialize_problem(set: &ClauseSet) -> String {
    let mut out = String::new();
    for c in &set.clauses {
        out.push_str(&serialize_clause(c));
        out.push('\n');
    }
    out
}
