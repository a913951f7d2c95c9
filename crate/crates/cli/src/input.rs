//! Loading descriptors from disk, with errors that name the file.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use skewcert::descriptors::{
    builtin_group, groupoid_cocycle, parse_graph, parse_graph_action, parse_group, parse_groupoid,
    parse_groupoid_action, GraphDescriptor,
};
use skewcert::graphs::{DirectedGraph, GraphAction};
use skewcert::groupoids::{make_groupoid, Cocycle, FiniteGroupoid, GroupoidAction};
use skewcert::groups::{FiniteGroup, Labeling};

/// An input problem; the CLI exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn at(path: &Path) -> impl Fn(&dyn Display) -> InputError + '_ {
    move |e| InputError(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| at(path)(&e))
}

/// A group file, or one of the built-in names `trivial`, `z2`, `z3`, `z4`, `klein`.
pub fn group(path: &Path) -> Result<FiniteGroup, InputError> {
    if !path.exists() {
        if let Some(g) = path.to_str().and_then(builtin_group) {
            return Ok(g);
        }
    }
    parse_group(&read(path)?).map_err(|e| at(path)(&e))
}

pub struct LoadedGraph {
    pub path: PathBuf,
    pub descriptor: GraphDescriptor,
    pub graph: DirectedGraph,
}

impl LoadedGraph {
    pub fn name(&self) -> String {
        self.path.file_stem().map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
    }

    /// Edge labels resolved in `g`; over the trivial group they are ignored.
    pub fn labeling(&self, g: &FiniteGroup) -> Result<Labeling, InputError> {
        if g.order() == 1 {
            return Ok(Labeling::constant(&self.graph, g.identity()));
        }
        self.descriptor.labeling(&self.graph, g).map_err(|e| at(&self.path)(&e))
    }

    /// Operator-algebra commands need finitely many sink-bound paths.
    pub fn require_acyclic(&self) -> Result<(), InputError> {
        match self.graph.find_cycle() {
            None => Ok(()),
            Some(cycle) => {
                let names: Vec<&str> = cycle.iter().map(|&f| self.graph.edge_name(f)).collect();
                Err(InputError(format!(
                    "{}: graph has a cycle through edges {}",
                    self.path.display(),
                    names.join(", ")
                )))
            }
        }
    }

    pub fn action(&self, path: &Path, g: &FiniteGroup) -> Result<GraphAction, InputError> {
        parse_graph_action(&read(path)?, &self.graph, g).map_err(|e| at(path)(&e))
    }
}

pub fn graph(path: &Path) -> Result<LoadedGraph, InputError> {
    let descriptor = parse_graph(&read(path)?).map_err(|e| at(path)(&e))?;
    let graph = descriptor.build().map_err(|e| at(path)(&e))?;
    Ok(LoadedGraph { path: path.to_path_buf(), descriptor, graph })
}

pub struct LoadedGroupoid {
    pub path: PathBuf,
    pub spec: skewcert::groupoids::GroupoidSpec,
    pub groupoid: FiniteGroupoid,
}

impl LoadedGroupoid {
    pub fn name(&self) -> String {
        self.path.file_stem().map_or_else(|| "groupoid".into(), |s| s.to_string_lossy().into_owned())
    }

    pub fn cocycle(&self, g: &FiniteGroup) -> Result<Cocycle, InputError> {
        groupoid_cocycle(&self.spec, &self.groupoid, g).map_err(|e| at(&self.path)(&e))
    }

    pub fn has_cocycle(&self) -> bool {
        self.spec.cocycle.is_some()
    }

    pub fn action(&self, path: &Path, g: &FiniteGroup) -> Result<GroupoidAction, InputError> {
        parse_groupoid_action(&read(path)?, &self.groupoid, g).map_err(|e| at(path)(&e))
    }
}

pub fn groupoid(path: &Path) -> Result<LoadedGroupoid, InputError> {
    let spec = parse_groupoid(&read(path)?).map_err(|e| at(path)(&e))?;
    let groupoid = make_groupoid(&spec).map_err(|e| at(path)(&e))?;
    Ok(LoadedGroupoid { path: path.to_path_buf(), spec, groupoid })
}
