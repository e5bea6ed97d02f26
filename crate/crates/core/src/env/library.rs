use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::syntax::ClauseSet;
use crate::tptp::{self, IncludeResolver, NoIncludes};

type SharedResolver = Arc<dyn IncludeResolver + Send + Sync>;

/// Problem texts keyed by id, plus the resolver for their includes.
#[derive(Clone)]
pub struct ProblemLibrary {
    problems: BTreeMap<String, String>,
    order: Vec<String>,
    resolver: SharedResolver,
}

impl fmt::Debug for ProblemLibrary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemLibrary").field("problems", &self.order).finish()
    }
}

impl Default for ProblemLibrary {
    fn default() -> Self {
        ProblemLibrary { problems: BTreeMap::new(), order: Vec::new(), resolver: Arc::new(NoIncludes) }
    }
}

struct DirResolver {
    root: PathBuf,
}

impl IncludeResolver for DirResolver {
    fn resolve(&self, name: &str) -> Result<String, String> {
        let path = self.root.join(name);
        fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

impl ProblemLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_resolver(mut self, resolver: impl IncludeResolver + Send + Sync + 'static) -> Self {
        self.resolver = Arc::new(resolver);
        self
    }

    /// Adds or replaces a problem. Ids keep their first insertion position.
    pub fn insert(&mut self, id: impl Into<String>, text: impl Into<String>) {
        let id = id.into();
        if self.problems.insert(id.clone(), text.into()).is_none() {
            self.order.push(id);
        }
    }

    /// Every `*.p` file directly under `dir`, in lexicographic file-name
    /// order, keyed by file stem. Includes resolve against `include_root`,
    /// defaulting to `dir`.
    pub fn from_dir(dir: &Path, include_root: Option<&Path>) -> io::Result<Self> {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "p"))
            .collect();
        files.sort();
        let root = include_root.unwrap_or(dir).to_path_buf();
        let mut lib = ProblemLibrary::new().with_resolver(DirResolver { root });
        for path in files {
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            lib.insert(id, fs::read_to_string(&path)?);
        }
        Ok(lib)
    }

    /// Ids in insertion order.
    pub fn ids(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn text(&self, id: &str) -> Option<&str> {
        self.problems.get(id).map(String::as_str)
    }

    pub fn resolver(&self) -> &dyn IncludeResolver {
        self.resolver.as_ref()
    }

    /// `None` if the id is unknown.
    pub fn parse(&self, id: &str) -> Option<Result<ClauseSet, tptp::TptpError>> {
        self.text(id).map(|text| tptp::parse_problem(text, self.resolver()))
    }
}
