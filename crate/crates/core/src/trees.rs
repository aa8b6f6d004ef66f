//! Leveled value trees and the inversion formulas they encode.
//!
//! A leveled tree carries a positive integer value on each vertex, with
//! the root value equal to the sum of each level and the last level
//! spelling out a target composition left to right. Four classes share
//! that shape: class 1 is uncolored; classes 2, 3 and 4 bicolor the
//! edges with a blue prefix and red suffix at chosen split vertices.
//! Summing a per-class weight over each class yields the coefficients
//! that invert the moment triangles: `m` in terms of `alpha`, `omega`
//! in terms of `alpha`, `m` in terms of `omega`, and `alpha` in terms
//! of `omega`. An independent route computes the same polynomials by
//! triangular elimination, never touching trees.

use std::collections::HashMap;
use std::fmt;
use std::sync::{LazyLock, Mutex};

use num::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{comp_pairs, compositions, rho1, rho2, Composition};
use crate::polycore::{rat, rat_int, Monomial, Poly, Rat, SymbolId};

/// Errors for tree validation and weight evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid tree shape: {0}")]
    Shape(String),
    #[error("invalid edge coloring for class {class}: {reason}")]
    Coloring { class: u8, reason: String },
}

fn shape_err(msg: impl Into<String>) -> TreeError {
    TreeError::Shape(msg.into())
}

/// The four weight classes over the shared tree shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeClass {
    Class1,
    Class2,
    Class3,
    Class4,
}

impl TreeClass {
    /// All classes, in order.
    pub const ALL: [TreeClass; 4] = [
        TreeClass::Class1,
        TreeClass::Class2,
        TreeClass::Class3,
        TreeClass::Class4,
    ];

    #[must_use]
    pub fn index(self) -> u8 {
        match self {
            TreeClass::Class1 => 1,
            TreeClass::Class2 => 2,
            TreeClass::Class3 => 3,
            TreeClass::Class4 => 4,
        }
    }

    #[must_use]
    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(TreeClass::Class1),
            2 => Some(TreeClass::Class2),
            3 => Some(TreeClass::Class3),
            4 => Some(TreeClass::Class4),
            _ => None,
        }
    }

    fn is_colored(self) -> bool {
        self != TreeClass::Class1
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Edge color toward a parent vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeColor {
    #[serde(rename = "b")]
    Blue,
    #[serde(rename = "r")]
    Red,
}

impl fmt::Display for EdgeColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeColor::Blue => write!(f, "b"),
            EdgeColor::Red => write!(f, "r"),
        }
    }
}

/// One vertex: its value, the index of its parent within the level
/// above, and the color of the edge toward that parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeVertex {
    pub value: u32,
    pub parent: Option<usize>,
    pub color: Option<EdgeColor>,
}

/// A tree stored level by level, root level first, vertices left to
/// right within each level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeveledTree {
    levels: Vec<Vec<TreeVertex>>,
}

impl LeveledTree {
    /// Builds a tree from raw levels without validation.
    #[must_use]
    pub fn from_levels(levels: Vec<Vec<TreeVertex>>) -> Self {
        LeveledTree { levels }
    }

    /// The single-vertex tree with the given root value.
    #[must_use]
    pub fn single(value: u32) -> Self {
        LeveledTree {
            levels: vec![vec![TreeVertex {
                value,
                parent: None,
                color: None,
            }]],
        }
    }

    #[must_use]
    pub fn levels(&self) -> &[Vec<TreeVertex>] {
        &self.levels
    }

    #[must_use]
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    #[must_use]
    pub fn root_value(&self) -> u32 {
        self.levels[0][0].value
    }

    #[must_use]
    pub fn is_single_vertex(&self) -> bool {
        self.levels.len() == 1 && self.levels[0].len() == 1
    }

    /// The composition spelled out by the last level.
    #[must_use]
    pub fn composition(&self) -> Composition {
        let parts: Vec<u32> = self.levels[self.levels.len() - 1]
            .iter()
            .map(|v| v.value)
            .collect();
        Composition::new(parts)
    }

    /// Indices of the children of vertex `index` at `level`, within
    /// the level below. Children are contiguous by construction.
    #[must_use]
    pub fn children(&self, level: usize, index: usize) -> Vec<usize> {
        match self.levels.get(level + 1) {
            None => Vec::new(),
            Some(below) => below
                .iter()
                .enumerate()
                .filter(|(_, v)| v.parent == Some(index))
                .map(|(i, _)| i)
                .collect(),
        }
    }

    #[must_use]
    pub fn is_multi_branching(&self, level: usize, index: usize) -> bool {
        self.children(level, index).len() >= 2
    }

    /// The same tree with every edge color removed.
    #[must_use]
    pub fn uncolored(&self) -> Self {
        let levels = self
            .levels
            .iter()
            .map(|lvl| {
                lvl.iter()
                    .map(|v| TreeVertex {
                        value: v.value,
                        parent: v.parent,
                        color: None,
                    })
                    .collect()
            })
            .collect();
        LeveledTree { levels }
    }

    fn values_of(&self, level: usize, indices: &[usize]) -> Vec<u32> {
        indices
            .iter()
            .map(|&i| self.levels[level][i].value)
            .collect()
    }

    /// Checks the structural rules shared by all classes: one root
    /// vertex, contiguous children, per-level value sums equal to the
    /// root value, one multi-branching vertex per non-last level, the
    /// single-child chain rule, and strictly growing level sizes.
    pub fn validate_shape(&self) -> Result<(), TreeError> {
        if self.levels.is_empty() || self.levels[0].len() != 1 {
            return Err(shape_err("the root level must hold exactly one vertex"));
        }
        if self.levels[0][0].parent.is_some() || self.levels[0][0].color.is_some() {
            return Err(shape_err("the root vertex cannot have a parent or a color"));
        }
        let n: u64 = u64::from(self.root_value());
        for (l, lvl) in self.levels.iter().enumerate() {
            if lvl.iter().any(|v| v.value == 0) {
                return Err(shape_err(format!("zero value at level {l}")));
            }
            let sum: u64 = lvl.iter().map(|v| u64::from(v.value)).sum();
            if sum != n {
                return Err(shape_err(format!(
                    "level {l} sums to {sum}, expected {n}"
                )));
            }
            if l > 0 {
                if lvl.len() <= self.levels[l - 1].len() {
                    return Err(shape_err(format!(
                        "level {l} is not larger than the level above"
                    )));
                }
                let parents: Vec<usize> = lvl
                    .iter()
                    .map(|v| v.parent.ok_or_else(|| shape_err("missing parent link")))
                    .collect::<Result<_, _>>()?;
                if parents[0] != 0 || *parents.last().unwrap() != self.levels[l - 1].len() - 1 {
                    return Err(shape_err(format!(
                        "parent links at level {l} do not cover the level above"
                    )));
                }
                for w in parents.windows(2) {
                    if w[1] != w[0] && w[1] != w[0] + 1 {
                        return Err(shape_err(format!(
                            "parent links at level {l} are not contiguous"
                        )));
                    }
                }
            }
        }
        for l in 0..self.height() {
            let mut any_multi = false;
            for i in 0..self.levels[l].len() {
                let kids = self.children(l, i);
                if kids.is_empty() {
                    return Err(shape_err(format!(
                        "vertex {i} at level {l} has no children"
                    )));
                }
                let kid_sum: u64 = self
                    .values_of(l + 1, &kids)
                    .iter()
                    .map(|&v| u64::from(v))
                    .sum();
                if kid_sum != u64::from(self.levels[l][i].value) {
                    return Err(shape_err(format!(
                        "children of vertex {i} at level {l} sum to {kid_sum}"
                    )));
                }
                if kids.len() >= 2 {
                    any_multi = true;
                } else if l + 1 < self.height() {
                    let child = kids[0];
                    if self.children(l + 1, child).len() != 1 {
                        return Err(shape_err(format!(
                            "vertex {child} at level {} continues a single-child \
                             chain with more than one child",
                            l + 1
                        )));
                    }
                }
            }
            if !any_multi {
                return Err(shape_err(format!(
                    "level {l} has no multi-branching vertex"
                )));
            }
        }
        Ok(())
    }

    /// The number of leading blue edges among the children of a
    /// vertex, after checking the blue-prefix, red-suffix pattern.
    fn split_of(&self, class: TreeClass, level: usize, index: usize) -> Result<usize, TreeError> {
        let kids = self.children(level, index);
        let colors: Vec<EdgeColor> = kids
            .iter()
            .map(|&i| {
                self.levels[level + 1][i].color.ok_or(TreeError::Coloring {
                    class: class.index(),
                    reason: format!("uncolored edge at level {}, vertex {i}", level + 1),
                })
            })
            .collect::<Result<_, _>>()?;
        let blues = colors
            .iter()
            .take_while(|&&c| c == EdgeColor::Blue)
            .count();
        if colors[blues..].contains(&EdgeColor::Blue) {
            return Err(TreeError::Coloring {
                class: class.index(),
                reason: format!(
                    "children of vertex {index} at level {level} are not a blue \
                     prefix followed by a red suffix"
                ),
            });
        }
        Ok(blues)
    }

    /// Checks the edge-coloring rules of the given class on top of the
    /// structural rules.
    pub fn validate(&self, class: TreeClass) -> Result<(), TreeError> {
        self.validate_shape()?;
        if !class.is_colored() {
            if self
                .levels
                .iter()
                .any(|lvl| lvl.iter().any(|v| v.color.is_some()))
            {
                return Err(TreeError::Coloring {
                    class: class.index(),
                    reason: "class 1 trees carry no edge colors".to_string(),
                });
            }
            return Ok(());
        }
        if self.is_single_vertex() {
            return Ok(());
        }
        for level in 0..self.height() {
            for index in 0..self.levels[level].len() {
                let kids = self.children(level, index);
                let is_root = level == 0;
                if kids.len() >= 2 {
                    let split = self.split_of(class, level, index)?;
                    let restrict_root = match class {
                        TreeClass::Class1 => unreachable!(),
                        TreeClass::Class2 | TreeClass::Class4 => is_root,
                        TreeClass::Class3 => false,
                    };
                    if restrict_root && (split == 0 || split == kids.len()) {
                        return Err(TreeError::Coloring {
                            class: class.index(),
                            reason: "the root needs at least one blue and one red edge"
                                .to_string(),
                        });
                    }
                    if class == TreeClass::Class2 && !is_root {
                        let own = self.levels[level][index].color;
                        for &k in &kids {
                            if self.levels[level + 1][k].color != own {
                                return Err(TreeError::Coloring {
                                    class: class.index(),
                                    reason: format!(
                                        "vertex {index} at level {level} passes a \
                                         different color to a child"
                                    ),
                                });
                            }
                        }
                    }
                } else if !is_root {
                    let own = self.levels[level][index].color;
                    let child = kids[0];
                    if self.levels[level + 1][child].color != own {
                        return Err(TreeError::Coloring {
                            class: class.index(),
                            reason: format!(
                                "single-child vertex {index} at level {level} \
                                 changes color toward its child"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Appends a value-preserving chain of `units` edges below every
    /// last-level vertex. For `units >= 1` the result intentionally
    /// breaks the one-multi-branching-per-level rule. New chain edges
    /// take the color of the edge above the extended vertex; for a
    /// single-vertex colored context there is no such edge, so `fill`
    /// supplies the chain color.
    #[must_use]
    pub fn extend(&self, units: usize, fill: Option<EdgeColor>) -> Self {
        if units == 0 {
            return self.clone();
        }
        let mut levels = self.levels.clone();
        let last = &levels[levels.len() - 1];
        let width = last.len();
        let values: Vec<u32> = last.iter().map(|v| v.value).collect();
        let colors: Vec<Option<EdgeColor>> = last
            .iter()
            .map(|v| if self.is_single_vertex() { fill } else { v.color })
            .collect();
        for _ in 0..units {
            let level: Vec<TreeVertex> = (0..width)
                .map(|i| TreeVertex {
                    value: values[i],
                    parent: Some(i),
                    color: colors[i],
                })
                .collect();
            levels.push(level);
        }
        LeveledTree { levels }
    }

    /// Indented text rendering, one vertex per line as `value` or
    /// `value[color]`, children below their parent.
    #[must_use]
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_vertex(0, 0, &mut out);
        out
    }

    fn render_vertex(&self, level: usize, index: usize, out: &mut String) {
        for _ in 0..level {
            out.push_str("  ");
        }
        let v = &self.levels[level][index];
        out.push_str(&v.value.to_string());
        if let Some(color) = v.color {
            out.push('[');
            out.push_str(&color.to_string());
            out.push(']');
        }
        out.push('\n');
        for child in self.children(level, index) {
            self.render_vertex(level + 1, child, out);
        }
    }

    #[must_use]
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trees serialize to JSON")
    }
}

impl fmt::Display for LeveledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_text())
    }
}

struct ShapeBuilder {
    levels: Vec<Vec<u32>>,
    parents: Vec<Vec<usize>>,
    shapes: Vec<LeveledTree>,
}

impl ShapeBuilder {
    fn assemble(&mut self, top: &[u32]) {
        let mut levels: Vec<Vec<TreeVertex>> = Vec::with_capacity(self.levels.len() + 1);
        levels.push(vec![TreeVertex {
            value: top[0],
            parent: None,
            color: None,
        }]);
        for (values, parents) in self.levels.iter().zip(&self.parents).rev() {
            levels.push(
                values
                    .iter()
                    .zip(parents)
                    .map(|(&value, &parent)| TreeVertex {
                        value,
                        parent: Some(parent),
                        color: None,
                    })
                    .collect(),
            );
        }
        self.shapes.push(LeveledTree { levels });
    }

    fn grow(&mut self, top: Vec<u32>, singleton_ok: Vec<bool>) {
        let len = top.len();
        if len == 1 {
            self.assemble(&top);
            return;
        }
        let full: u64 = (1 << (len - 1)) - 1;
        'mask: for mask in 0..=full {
            if mask == full {
                continue;
            }
            let mut parent_values = Vec::new();
            let mut parent_links = vec![0usize; len];
            let mut singles = Vec::new();
            let mut start = 0;
            for end in 0..len {
                let boundary = end + 1 == len || mask & (1 << end) != 0;
                if !boundary {
                    continue;
                }
                if end == start && !singleton_ok[start] {
                    continue 'mask;
                }
                let block = start..=end;
                let value: u32 = top[block.clone()].iter().sum();
                for i in block {
                    parent_links[i] = parent_values.len();
                }
                singles.push(end == start);
                parent_values.push(value);
                start = end + 1;
            }
            self.levels.push(top.clone());
            self.parents.push(parent_links);
            self.grow(parent_values, singles);
            self.levels.pop();
            self.parents.pop();
        }
    }
}

/// Every uncolored shape for the composition, in the canonical order:
/// groupings are explored bottom-up, cut masks ascending at each step.
#[must_use]
pub fn enumerate_shapes(c: &Composition) -> Vec<LeveledTree> {
    assert!(!c.is_empty(), "shapes need a nonempty composition");
    let mut builder = ShapeBuilder {
        levels: Vec::new(),
        parents: Vec::new(),
        shapes: Vec::new(),
    };
    let bottom = c.parts().to_vec();
    let ok = vec![true; bottom.len()];
    builder.grow(bottom, ok);
    builder.shapes
}

fn multi_branching_vertices(shape: &LeveledTree) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for level in 0..shape.height() {
        for index in 0..shape.levels()[level].len() {
            let s = shape.children(level, index).len();
            if s >= 2 {
                out.push((level, index, s));
            }
        }
    }
    out
}

fn paint(shape: &LeveledTree, class: TreeClass, splits: &HashMap<(usize, usize), usize>) -> LeveledTree {
    let mut tree = shape.clone();
    for level in 0..tree.height() {
        for index in 0..tree.levels[level].len() {
            let kids = tree.children(level, index);
            if kids.is_empty() {
                continue;
            }
            let inherit = tree.levels[level][index].color;
            let colors: Vec<EdgeColor> = if kids.len() >= 2 {
                let inherits = class == TreeClass::Class2 && level > 0;
                if inherits {
                    vec![inherit.expect("non-root vertices are already colored"); kids.len()]
                } else {
                    let split = splits[&(level, index)];
                    (0..kids.len())
                        .map(|i| {
                            if i < split {
                                EdgeColor::Blue
                            } else {
                                EdgeColor::Red
                            }
                        })
                        .collect()
                }
            } else {
                vec![inherit.expect("non-root vertices are already colored")]
            };
            for (&k, color) in kids.iter().zip(colors) {
                tree.levels[level + 1][k].color = Some(color);
            }
        }
    }
    tree
}

/// Every tree of the class for the composition, in the canonical
/// order: shapes first, then split vectors in ascending lexicographic
/// order over the multi-branching vertices read level by level.
#[must_use]
pub fn enumerate_trees(class: TreeClass, c: &Composition) -> Vec<LeveledTree> {
    let shapes = enumerate_shapes(c);
    if !class.is_colored() {
        return shapes;
    }
    let mut out = Vec::new();
    for shape in &shapes {
        if shape.is_single_vertex() {
            out.push(shape.clone());
            continue;
        }
        let vertices = multi_branching_vertices(shape);
        let choosers: Vec<(usize, usize, Vec<usize>)> = vertices
            .iter()
            .filter_map(|&(level, index, s)| {
                let root = level == 0;
                let range: Vec<usize> = match class {
                    TreeClass::Class1 => return None,
                    TreeClass::Class2 => {
                        if root {
                            (1..s).collect()
                        } else {
                            return None;
                        }
                    }
                    TreeClass::Class3 => (0..=s).collect(),
                    TreeClass::Class4 => {
                        if root {
                            (1..s).collect()
                        } else {
                            (0..=s).collect()
                        }
                    }
                };
                Some((level, index, range))
            })
            .collect();
        let mut cursor = vec![0usize; choosers.len()];
        loop {
            let splits: HashMap<(usize, usize), usize> = choosers
                .iter()
                .zip(&cursor)
                .map(|((level, index, range), &i)| ((*level, *index), range[i]))
                .collect();
            out.push(paint(shape, class, &splits));
            let mut pos = choosers.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                cursor[pos] += 1;
                if cursor[pos] < choosers[pos].2.len() {
                    break;
                }
                cursor[pos] = 0;
            }
            if cursor.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    out
}

fn split_pair(values: &[u32], split: usize) -> (Composition, Composition) {
    let left = if split == 0 {
        Composition::empty()
    } else {
        Composition::new(values[..split].to_vec())
    };
    let right = if split == values.len() {
        Composition::empty()
    } else {
        Composition::new(values[split..].to_vec())
    };
    (left, right)
}

fn kappa(class: TreeClass, tree: &LeveledTree, level: usize, index: usize) -> Result<Rat, TreeError> {
    let kids = tree.children(level, index);
    let multi = kids.len() >= 2;
    let child_values = tree.values_of(level + 1, &kids);
    match class {
        TreeClass::Class1 => Ok(if multi {
            -rho1(&Composition::new(child_values))
        } else {
            Rat::one()
        }),
        TreeClass::Class2 => {
            if tree.is_single_vertex() {
                Ok(rat_int(2))
            } else if level == 0 {
                let split = tree.split_of(class, level, index)?;
                Ok(rho2(&split_pair(&child_values, split)))
            } else {
                kappa(TreeClass::Class1, tree, level, index)
            }
        }
        TreeClass::Class3 => {
            if tree.is_single_vertex() {
                Ok(rat(1, 2))
            } else if multi {
                let split = tree.split_of(class, level, index)?;
                Ok(rat(-1, 2) * rho2(&split_pair(&child_values, split)))
            } else {
                let parent_is_multi = match (level, tree.levels[level][index].parent) {
                    (0, _) | (_, None) => false,
                    (_, Some(p)) => tree.is_multi_branching(level - 1, p),
                };
                Ok(if parent_is_multi { rat(1, 2) } else { Rat::one() })
            }
        }
        TreeClass::Class4 => {
            if tree.is_single_vertex() {
                Ok(rat(1, 2))
            } else if level == 0 {
                let split = tree.split_of(class, level, index)?;
                Ok(rat(-1, 2) * rho2(&split_pair(&child_values, split)))
            } else {
                kappa(TreeClass::Class3, tree, level, index)
            }
        }
    }
}

/// The exact rational weight of a tree under the class's per-vertex
/// factors. Validates the tree against the class first.
pub fn tree_weight(class: TreeClass, tree: &LeveledTree) -> Result<Rat, TreeError> {
    tree.validate(class)?;
    let mut product = Rat::one();
    for level in 0..tree.levels().len() {
        for index in 0..tree.levels()[level].len() {
            product *= kappa(class, tree, level, index)?;
        }
    }
    Ok(product)
}

type PhiCache = HashMap<(TreeClass, Vec<u32>), Rat>;

static PHI_CACHE: LazyLock<Mutex<PhiCache>> = LazyLock::new(|| Mutex::new(HashMap::new()));

/// The class's inversion coefficient for a composition: the sum of
/// tree weights over the class. Values are cached.
#[must_use]
pub fn phi(class: TreeClass, c: &Composition) -> Rat {
    let key = (class, c.parts().to_vec());
    if let Some(hit) = PHI_CACHE.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let value: Rat = enumerate_trees(class, c)
        .iter()
        .map(|t| tree_weight(class, t).expect("enumerated trees are valid"))
        .sum();
    PHI_CACHE
        .lock()
        .unwrap()
        .insert(key, value.clone());
    value
}

/// The four sequence inversions realized by the tree classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InversionTarget {
    MFromAlpha,
    OmegaFromAlpha,
    MFromOmega,
    AlphaFromOmega,
}

impl InversionTarget {
    pub const ALL: [InversionTarget; 4] = [
        InversionTarget::MFromAlpha,
        InversionTarget::OmegaFromAlpha,
        InversionTarget::MFromOmega,
        InversionTarget::AlphaFromOmega,
    ];

    #[must_use]
    pub fn class(self) -> TreeClass {
        match self {
            InversionTarget::MFromAlpha => TreeClass::Class1,
            InversionTarget::OmegaFromAlpha => TreeClass::Class2,
            InversionTarget::MFromOmega => TreeClass::Class3,
            InversionTarget::AlphaFromOmega => TreeClass::Class4,
        }
    }

    fn source_symbol(self, index: u32) -> SymbolId {
        match self {
            InversionTarget::MFromAlpha | InversionTarget::OmegaFromAlpha => {
                SymbolId::alpha(index)
            }
            InversionTarget::MFromOmega | InversionTarget::AlphaFromOmega => {
                SymbolId::omega(index)
            }
        }
    }
}

impl fmt::Display for InversionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            InversionTarget::MFromAlpha => "m-from-alpha",
            InversionTarget::OmegaFromAlpha => "omega-from-alpha",
            InversionTarget::MFromOmega => "m-from-omega",
            InversionTarget::AlphaFromOmega => "alpha-from-omega",
        };
        write!(f, "{name}")
    }
}

fn source_monomial(target: InversionTarget, c: &Composition) -> Monomial {
    c.parts().iter().fold(Monomial::unit(), |acc, &part| {
        acc.mul(&Monomial::symbol(target.source_symbol(part)))
    })
}

/// The degree-`n` polynomial of the target sequence in the source
/// sequence, computed through the tree classes: the sum over the
/// compositions of `n` of the class coefficient times the product of
/// source symbols.
#[must_use]
pub fn reconstruct(target: InversionTarget, n: usize) -> Poly {
    assert!(n >= 1, "inversion polynomials start at degree 1");
    let class = target.class();
    Poly::from_terms(
        compositions(n)
            .iter()
            .map(|c| (source_monomial(target, c), phi(class, c))),
    )
}

fn m_in_alpha_table(n: usize) -> Vec<Poly> {
    let mut table: Vec<Poly> = vec![Poly::one()];
    for k in 1..=n {
        let mut value = Poly::symbol(SymbolId::alpha(k as u32));
        for c in compositions(k) {
            if c.len() == 1 {
                continue;
            }
            let product = c
                .parts()
                .iter()
                .fold(Poly::constant(rho1(&c)), |acc, &part| {
                    &acc * &table[part as usize]
                });
            value -= &product;
        }
        table.push(value);
    }
    table
}

fn m_in_omega_table(n: usize) -> Vec<Poly> {
    let mut table: Vec<Poly> = vec![Poly::one()];
    for k in 1..=n {
        let mut value = Poly::symbol(SymbolId::omega(k as u32)).scale(&rat(1, 2));
        for pair in comp_pairs(k) {
            if (pair.0.len() == 1 && pair.1.is_empty())
                || (pair.0.is_empty() && pair.1.len() == 1)
            {
                continue;
            }
            let coeff = rat(-1, 2) * rho2(&pair);
            let product = pair
                .0
                .parts()
                .iter()
                .chain(pair.1.parts())
                .fold(Poly::constant(coeff), |acc, &part| {
                    &acc * &table[part as usize]
                });
            value += &product;
        }
        table.push(value);
    }
    table
}

/// The same polynomial as [`reconstruct`], computed by triangular
/// elimination on the composition closed forms, never touching trees.
#[must_use]
pub fn invert_oracle(target: InversionTarget, n: usize) -> Poly {
    assert!(n >= 1, "inversion polynomials start at degree 1");
    match target {
        InversionTarget::MFromAlpha => m_in_alpha_table(n).swap_remove(n),
        InversionTarget::MFromOmega => m_in_omega_table(n).swap_remove(n),
        InversionTarget::OmegaFromAlpha => {
            let table = m_in_alpha_table(n);
            let mut value = Poly::zero();
            for pair in comp_pairs(n) {
                let product = pair
                    .0
                    .parts()
                    .iter()
                    .chain(pair.1.parts())
                    .fold(Poly::constant(rho2(&pair)), |acc, &part| {
                        &acc * &table[part as usize]
                    });
                value += &product;
            }
            value
        }
        InversionTarget::AlphaFromOmega => {
            let table = m_in_omega_table(n);
            let mut value = Poly::zero();
            for c in compositions(n) {
                let product = c
                    .parts()
                    .iter()
                    .fold(Poly::constant(rho1(&c)), |acc, &part| {
                        &acc * &table[part as usize]
                    });
                value += &product;
            }
            value
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::Zero;
    use std::collections::HashSet;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn comp(parts: &[u32]) -> Composition {
        Composition::new(parts.to_vec())
    }

    fn weights(class: TreeClass, parts: &[u32]) -> Vec<Rat> {
        enumerate_trees(class, &comp(parts))
            .iter()
            .map(|t| tree_weight(class, t).unwrap())
            .collect()
    }

    fn sorted(mut v: Vec<Rat>) -> Vec<Rat> {
        v.sort();
        v
    }

    fn rats(entries: &[(i64, i64)]) -> Vec<Rat> {
        sorted(entries.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn single_part_compositions_give_one_vertex_trees() {
        for class in TreeClass::ALL {
            for n in 1..=6 {
                let trees = enumerate_trees(class, &comp(&[n]));
                assert_eq!(trees.len(), 1);
                assert!(trees[0].is_single_vertex());
                assert_eq!(trees[0].root_value(), n);
            }
        }
    }

    #[test]
    fn two_level_example_has_three_colorings_with_known_weights() {
        let trees = enumerate_trees(TreeClass::Class3, &comp(&[1, 1]));
        assert_eq!(trees.len(), 3);
        let w: Vec<Rat> = trees
            .iter()
            .map(|t| tree_weight(TreeClass::Class3, t).unwrap())
            .collect();
        assert_eq!(w, vec![rat(-1, 8), rat(-1, 4), rat(-1, 8)]);
        let all_c2: Vec<Rat> = [vec![1u32, 1], vec![2]]
            .iter()
            .flat_map(|parts| weights(TreeClass::Class3, parts))
            .collect();
        assert_eq!(sorted(all_c2), rats(&[(-1, 4), (-1, 8), (-1, 8), (1, 2)]));
    }

    #[test]
    fn order_two_classes_match_the_reference_weights() {
        assert_eq!(weights(TreeClass::Class3, &[2]), vec![rat(1, 2)]);
        let c4: Vec<Rat> = [vec![1u32, 1], vec![2]]
            .iter()
            .flat_map(|parts| weights(TreeClass::Class4, parts))
            .collect();
        assert_eq!(sorted(c4), rats(&[(-1, 4), (1, 2)]));
    }

    #[test]
    fn order_three_class_three_has_twenty_nine_trees() {
        let all: Vec<(LeveledTree, Rat)> = compositions(3)
            .iter()
            .flat_map(|c| {
                enumerate_trees(TreeClass::Class3, c)
                    .into_iter()
                    .map(|t| {
                        let w = tree_weight(TreeClass::Class3, &t).unwrap();
                        (t, w)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(all.len(), 29);
        let distinct: HashSet<LeveledTree> = all.iter().map(|(t, _)| t.clone()).collect();
        assert_eq!(distinct.len(), 29);
        let expected = rats(&[
            (1, 2),
            (-1, 4),
            (-1, 4),
            (-3, 8),
            (-3, 8),
            (-1, 8),
            (-1, 8),
            (-1, 8),
            (-1, 8),
            (-1, 16),
            (-1, 16),
            (1, 16),
            (1, 16),
            (1, 16),
            (1, 16),
            (1, 16),
            (1, 16),
            (1, 8),
            (1, 8),
            (3, 32),
            (3, 32),
            (3, 32),
            (3, 32),
            (3, 16),
            (3, 16),
            (1, 32),
            (1, 32),
            (1, 32),
            (1, 32),
        ]);
        assert_eq!(sorted(all.into_iter().map(|(_, w)| w).collect()), expected);
    }

    #[test]
    fn order_three_class_four_has_eleven_trees() {
        let all: Vec<Rat> = compositions(3)
            .iter()
            .flat_map(|c| weights(TreeClass::Class4, c.parts()))
            .collect();
        assert_eq!(all.len(), 11);
        let expected = rats(&[
            (1, 2),
            (-3, 8),
            (-3, 8),
            (-1, 8),
            (-1, 8),
            (3, 32),
            (3, 32),
            (3, 32),
            (3, 32),
            (3, 16),
            (3, 16),
        ]);
        assert_eq!(sorted(all), expected);
    }

    #[test]
    fn coefficient_values_match_the_reference() {
        assert_eq!(phi(TreeClass::Class1, &comp(&[1])), Rat::one());
        assert_eq!(phi(TreeClass::Class3, &comp(&[3])), rat(1, 2));
        assert_eq!(phi(TreeClass::Class3, &comp(&[2, 1])), rat(-7, 8));
        assert_eq!(phi(TreeClass::Class3, &comp(&[1, 2])), rat(-5, 8));
        assert_eq!(phi(TreeClass::Class3, &comp(&[1, 1, 1])), rat(9, 8));
        assert_eq!(phi(TreeClass::Class4, &comp(&[3])), rat(1, 2));
        assert_eq!(
            phi(TreeClass::Class4, &comp(&[2, 1])) + phi(TreeClass::Class4, &comp(&[1, 2])),
            rat(-3, 4)
        );
        assert_eq!(phi(TreeClass::Class4, &comp(&[1, 1, 1])), rat(1, 2));
    }

    #[test]
    fn coefficient_sums_collapse_as_expected() {
        for n in 2..=8 {
            let total: Rat = compositions(n)
                .iter()
                .map(|c| phi(TreeClass::Class1, c))
                .sum();
            assert_eq!(total, Rat::zero(), "class 1 sum at n={n}");
        }
        for n in 1..=8 {
            let total: Rat = compositions(n)
                .iter()
                .map(|c| phi(TreeClass::Class2, c))
                .sum();
            assert_eq!(total, rat_int(2 * n as i64), "class 2 sum at n={n}");
        }
    }

    #[test]
    fn reconstructions_match_the_printed_tables() {
        use InversionTarget::*;
        assert_eq!(reconstruct(MFromAlpha, 1), p("alpha1"));
        assert_eq!(reconstruct(MFromAlpha, 2), p("alpha2 + -1*alpha1^2"));
        assert_eq!(
            reconstruct(MFromAlpha, 3),
            p("alpha3 + -3*alpha2*alpha1 + 2*alpha1^3")
        );
        assert_eq!(
            reconstruct(MFromAlpha, 4),
            p("alpha4 + -4*alpha3*alpha1 + 13*alpha2*alpha1^2 + -3*alpha2^2 + -7*alpha1^4")
        );
        assert_eq!(
            reconstruct(MFromAlpha, 5),
            p("alpha5 + -5*alpha4*alpha1 + -10*alpha3*alpha2 + 23*alpha3*alpha1^2 \
               + 34*alpha2^2*alpha1 + -79*alpha2*alpha1^3 + 36*alpha1^5")
        );
        assert_eq!(reconstruct(OmegaFromAlpha, 1), p("2*alpha1"));
        assert_eq!(reconstruct(OmegaFromAlpha, 2), p("2*alpha2 + 2*alpha1^2"));
        assert_eq!(
            reconstruct(OmegaFromAlpha, 3),
            p("2*alpha3 + 6*alpha2*alpha1 + -2*alpha1^3")
        );
        assert_eq!(
            reconstruct(OmegaFromAlpha, 4),
            p("2*alpha4 + 8*alpha3*alpha1 + -14*alpha2*alpha1^2 + 6*alpha2^2 + 6*alpha1^4")
        );
        assert_eq!(
            reconstruct(OmegaFromAlpha, 5),
            p("2*alpha5 + 10*alpha4*alpha1 + 20*alpha3*alpha2 + -24*alpha3*alpha1^2 \
               + -42*alpha2^2*alpha1 + 72*alpha2*alpha1^3 + -28*alpha1^5")
        );
        assert_eq!(reconstruct(MFromOmega, 1), p("1/2*omega1"));
        assert_eq!(
            reconstruct(MFromOmega, 2),
            p("1/2*omega2 + -1/2*omega1^2")
        );
        assert_eq!(
            reconstruct(MFromOmega, 3),
            p("1/2*omega3 + -3/2*omega2*omega1 + 9/8*omega1^3")
        );
        assert_eq!(
            reconstruct(MFromOmega, 4),
            p("1/2*omega4 + -2*omega3*omega1 + 7*omega2*omega1^2 + -3/2*omega2^2 \
               + -17/4*omega1^4")
        );
        assert_eq!(
            reconstruct(MFromOmega, 5),
            p("1/2*omega5 + -5/2*omega4*omega1 + -5*omega3*omega2 + 95/8*omega3*omega1^2 \
               + 145/8*omega2^2*omega1 + -45*omega2*omega1^3 + 365/16*omega1^5")
        );
        assert_eq!(reconstruct(AlphaFromOmega, 1), p("1/2*omega1"));
        assert_eq!(
            reconstruct(AlphaFromOmega, 2),
            p("1/2*omega2 + -1/4*omega1^2")
        );
        assert_eq!(
            reconstruct(AlphaFromOmega, 3),
            p("1/2*omega3 + -3/4*omega2*omega1 + 1/2*omega1^3")
        );
        assert_eq!(
            reconstruct(AlphaFromOmega, 4),
            p("1/2*omega4 + -1*omega3*omega1 + -3/4*omega2^2 + 25/8*omega2*omega1^2 \
               + -29/16*omega1^4")
        );
        assert_eq!(
            reconstruct(AlphaFromOmega, 5),
            p("1/2*omega5 + -5/4*omega4*omega1 + -5/2*omega3*omega2 + 21/4*omega3*omega1^2 \
               + 33/4*omega2^2*omega1 + -309/16*omega2*omega1^3 + 19/2*omega1^5")
        );
    }

    #[test]
    fn both_inversion_routes_agree() {
        for target in InversionTarget::ALL {
            for n in 1..=6 {
                assert_eq!(
                    reconstruct(target, n),
                    invert_oracle(target, n),
                    "{target} at n={n}"
                );
            }
        }
    }

    #[test]
    fn substituting_the_inversion_into_the_closed_form_is_the_identity() {
        for n in 1..=6u32 {
            let table = m_in_alpha_table(n as usize);
            let recovered = crate::moments::alpha(n as usize).substitute(|id| {
                (id.family == crate::polycore::Family::M)
                    .then(|| table[id.index as usize].clone())
            });
            assert_eq!(recovered, Poly::symbol(SymbolId::alpha(n)), "n={n}");
        }
    }

    #[test]
    fn class_four_shapes_are_class_one_shapes_and_levels_grow() {
        for n in 1..=5 {
            for c in compositions(n) {
                let shapes: HashSet<LeveledTree> =
                    enumerate_trees(TreeClass::Class1, &c).into_iter().collect();
                for t in enumerate_trees(TreeClass::Class4, &c) {
                    assert!(shapes.contains(&t.uncolored()));
                }
                for t in enumerate_trees(TreeClass::Class2, &c) {
                    assert!(t.validate(TreeClass::Class2).is_ok());
                    let sizes: Vec<usize> =
                        t.levels().iter().map(|lvl| lvl.len()).collect();
                    assert!(sizes.windows(2).all(|w| w[0] < w[1]));
                    assert_eq!(sizes[0], 1);
                    assert_eq!(*sizes.last().unwrap(), c.len());
                }
            }
        }
    }

    fn reference_tree() -> LeveledTree {
        let v = |value: u32, parent: usize| TreeVertex {
            value,
            parent: Some(parent),
            color: None,
        };
        LeveledTree::from_levels(vec![
            vec![TreeVertex {
                value: 12,
                parent: None,
                color: None,
            }],
            vec![v(6, 0), v(4, 0), v(2, 0)],
            vec![v(4, 0), v(2, 0), v(1, 1), v(3, 1), v(2, 2)],
            vec![v(1, 0), v(3, 0), v(2, 1), v(1, 2), v(2, 3), v(1, 3), v(2, 4)],
        ])
    }

    #[test]
    fn reference_tree_is_a_valid_shape_and_extends_by_chains() {
        let t = reference_tree();
        assert!(t.validate_shape().is_ok());
        assert_eq!(t.height(), 3);
        assert_eq!(t.composition(), comp(&[1, 3, 2, 1, 2, 1, 2]));
        let shapes = enumerate_shapes(&comp(&[1, 3, 2, 1, 2, 1, 2]));
        assert!(shapes.contains(&t));

        let extended = t.extend(2, None);
        assert_eq!(extended.levels().len(), 6);
        for level in 4..=5 {
            let values: Vec<u32> = extended.levels()[level].iter().map(|v| v.value).collect();
            assert_eq!(values, vec![1, 3, 2, 1, 2, 1, 2]);
            let parents: Vec<usize> = extended.levels()[level]
                .iter()
                .map(|v| v.parent.unwrap())
                .collect();
            assert_eq!(parents, vec![0, 1, 2, 3, 4, 5, 6]);
        }
        assert!(extended.validate_shape().is_err());
        assert_eq!(t.extend(0, None), t);
    }

    #[test]
    fn extension_propagates_edge_colors_and_fills_single_vertices() {
        let trees = enumerate_trees(TreeClass::Class3, &comp(&[1, 1]));
        let mixed = &trees[1];
        let grown = mixed.extend(1, None);
        let colors: Vec<Option<EdgeColor>> =
            grown.levels()[2].iter().map(|v| v.color).collect();
        assert_eq!(colors, vec![Some(EdgeColor::Blue), Some(EdgeColor::Red)]);

        let single = LeveledTree::single(3);
        let filled = single.extend(2, Some(EdgeColor::Red));
        assert!(filled.levels()[1..]
            .iter()
            .all(|lvl| lvl[0].color == Some(EdgeColor::Red) && lvl[0].value == 3));
        let plain = single.extend(2, None);
        assert!(plain.levels().iter().all(|lvl| lvl[0].color.is_none()));
    }

    #[test]
    fn invalid_trees_are_rejected() {
        let mut bad_sum = reference_tree();
        bad_sum.levels[1][0].value = 7;
        assert!(matches!(bad_sum.validate_shape(), Err(TreeError::Shape(_))));

        let single_into_last = LeveledTree::from_levels(vec![
            vec![TreeVertex {
                value: 4,
                parent: None,
                color: None,
            }],
            vec![
                TreeVertex {
                    value: 2,
                    parent: Some(0),
                    color: None,
                },
                TreeVertex {
                    value: 2,
                    parent: Some(0),
                    color: None,
                },
            ],
            vec![
                TreeVertex {
                    value: 1,
                    parent: Some(0),
                    color: None,
                },
                TreeVertex {
                    value: 1,
                    parent: Some(0),
                    color: None,
                },
                TreeVertex {
                    value: 2,
                    parent: Some(1),
                    color: None,
                },
            ],
        ]);
        assert!(single_into_last.validate_shape().is_ok());

        let mut miscolored = enumerate_trees(TreeClass::Class3, &comp(&[1, 1]))[1].clone();
        miscolored.levels[1][0].color = Some(EdgeColor::Red);
        miscolored.levels[1][1].color = Some(EdgeColor::Blue);
        assert!(matches!(
            tree_weight(TreeClass::Class3, &miscolored),
            Err(TreeError::Coloring { class: 3, .. })
        ));

        let all_red = enumerate_trees(TreeClass::Class3, &comp(&[1, 1]))[0].clone();
        assert!(all_red.validate(TreeClass::Class3).is_ok());
        assert!(matches!(
            all_red.validate(TreeClass::Class2),
            Err(TreeError::Coloring { class: 2, .. })
        ));
    }

    #[test]
    fn text_dump_and_json_round_trip() {
        let trees = enumerate_trees(TreeClass::Class3, &comp(&[1, 1]));
        assert_eq!(trees[1].render_text(), "2\n  1[b]\n  1[r]\n");
        assert_eq!(reference_tree().render_text().lines().next(), Some("12"));
        let json = trees[1].to_json();
        assert!(json.contains("\"color\":\"b\""));
        let back: LeveledTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trees[1]);
    }
}
