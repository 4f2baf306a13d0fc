//! Typed graph schema: node, edge and plain type descriptors, the subtype
//! lattice, edge multiplicities and integrity constraints.
//!
//! Descriptors are immutable values held behind `Arc` in a persistent map, so
//! cloning a [`Catalog`] for a transaction is O(1).

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parser::ast::Expr;
use crate::value::{DataType, TypeId, Value};

/// Name of the automatic key column.
pub const ID: &str = "ID";
pub const LEAVING: &str = "LEAVING";
pub const ARRIVING: &str = "ARRIVING";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeKind {
    Node,
    Edge,
    Plain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub data_type: DataType,
    pub nullable: bool,
    /// Engine-allocated value when absent on insert.
    pub auto: bool,
}

impl Column {
    pub fn new(name: impl Into<String>, data_type: DataType) -> Column {
        Column { name: name.into(), data_type, nullable: true, auto: false }
    }
}

/// Min-max counts of edges of one type incident to each endpoint node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub leaving_min: u32,
    pub leaving_max: Option<u32>,
    pub arriving_min: u32,
    pub arriving_max: Option<u32>,
}

impl Multiplicity {
    pub fn new(leaving: (u32, Option<u32>), arriving: (u32, Option<u32>)) -> Result<Multiplicity> {
        for (side, (min, max)) in [("leaving", leaving), ("arriving", arriving)] {
            if let Some(max) = max {
                if max == 0 || min > max {
                    return Err(Error::Schema(format!("invalid {} multiplicity {}..{}", side, min, max)));
                }
            }
        }
        Ok(Multiplicity { leaving_min: leaving.0, leaving_max: leaving.1, arriving_min: arriving.0, arriving_max: arriving.1 })
    }

    pub fn allows_leaving(&self, count: usize) -> bool {
        count >= self.leaving_min as usize && self.leaving_max.is_none_or(|m| count <= m as usize)
    }

    pub fn allows_arriving(&self, count: usize) -> bool {
        count >= self.arriving_min as usize && self.arriving_max.is_none_or(|m| count <= m as usize)
    }

    pub fn is_unconstrained(&self) -> bool {
        *self == Multiplicity::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDescriptor {
    pub id: TypeId,
    pub label: String,
    pub kind: TypeKind,
    /// Columns declared on this type; inherited columns live on the supertypes.
    pub columns: Vec<Column>,
    pub supertype: Option<TypeId>,
    /// Primary key. Only set on hierarchy roots; subtypes inherit it.
    pub primary_key: Vec<String>,
    /// Additional unique keys (e.g. a superseded primary key).
    pub unique_keys: Vec<Vec<String>>,
    pub leaving: Option<TypeId>,
    pub arriving: Option<TypeId>,
    pub multiplicity: Multiplicity,
    pub constraints: Vec<Expr>,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    types: im::OrdMap<TypeId, Arc<TypeDescriptor>>,
    next_type_id: u32,
}

impl Catalog {
    pub fn new() -> Catalog {
        Catalog { types: im::OrdMap::new(), next_type_id: 1 }
    }

    pub fn next_type_id(&self) -> u32 {
        self.next_type_id
    }

    pub fn types(&self) -> impl Iterator<Item = &Arc<TypeDescriptor>> {
        self.types.values()
    }

    pub fn get(&self, id: TypeId) -> Result<&TypeDescriptor> {
        self.types.get(&id).map(|d| d.as_ref()).ok_or_else(|| Error::UnknownType(id.to_string()))
    }

    pub(crate) fn get_arc(&self, id: TypeId) -> Option<&Arc<TypeDescriptor>> {
        self.types.get(&id)
    }

    /// Installs a descriptor verbatim (log replay).
    pub(crate) fn put(&mut self, d: TypeDescriptor) {
        self.next_type_id = self.next_type_id.max(d.id.0 + 1);
        self.types.insert(d.id, Arc::new(d));
    }

    pub(crate) fn set_next_type_id(&mut self, n: u32) {
        self.next_type_id = self.next_type_id.max(n);
    }

    fn update(&mut self, id: TypeId, f: impl FnOnce(&mut TypeDescriptor)) -> Result<()> {
        let mut d = self.get(id)?.clone();
        f(&mut d);
        self.types.insert(id, Arc::new(d));
        Ok(())
    }

    /// Case-normalized label lookup, optionally restricted to one kind.
    pub fn lookup_label(&self, label: &str, kind: Option<TypeKind>) -> Option<&TypeDescriptor> {
        self.types
            .values()
            .find(|d| d.label == label && kind.is_none_or(|k| k == d.kind))
            .map(|d| d.as_ref())
    }

    pub fn require_label(&self, label: &str, kind: Option<TypeKind>) -> Result<&TypeDescriptor> {
        self.lookup_label(label, kind).ok_or_else(|| Error::UnknownType(label.to_string()))
    }

    /// The type and all its (transitive) subtypes, ascending by id.
    pub fn subtype_closure(&self, id: TypeId) -> Vec<TypeId> {
        let mut out: BTreeSet<TypeId> = BTreeSet::new();
        out.insert(id);
        loop {
            let before = out.len();
            for d in self.types.values() {
                if let Some(s) = d.supertype {
                    if out.contains(&s) {
                        out.insert(d.id);
                    }
                }
            }
            if out.len() == before {
                return out.into_iter().collect();
            }
        }
    }

    /// `id` followed by its supertypes, nearest first.
    pub fn ancestry(&self, id: TypeId) -> Vec<TypeId> {
        let mut chain = vec![id];
        let mut cur = id;
        while let Some(s) = self.types.get(&cur).and_then(|d| d.supertype) {
            if chain.contains(&s) {
                break;
            }
            chain.push(s);
            cur = s;
        }
        chain
    }

    pub fn is_subtype_of(&self, id: TypeId, ancestor: TypeId) -> bool {
        self.ancestry(id).contains(&ancestor)
    }

    pub fn root(&self, id: TypeId) -> TypeId {
        *self.ancestry(id).last().unwrap()
    }

    /// Nearest type that both `a` and `b` are (possibly improper) subtypes of.
    pub fn common_supertype(&self, a: TypeId, b: TypeId) -> Option<TypeId> {
        let other = self.ancestry(b);
        self.ancestry(a).into_iter().find(|t| other.contains(t))
    }

    /// Inherited columns first (root-most supertype first), then own columns.
    pub fn effective_columns(&self, id: TypeId) -> Vec<Column> {
        let mut chain = self.ancestry(id);
        chain.reverse();
        chain
            .into_iter()
            .filter_map(|t| self.types.get(&t))
            .flat_map(|d| d.columns.iter().cloned())
            .collect()
    }

    /// Finds a column in the effective set, with the type that declares it.
    pub fn column(&self, id: TypeId, name: &str) -> Option<(TypeId, &Column)> {
        for t in self.ancestry(id) {
            if let Some(d) = self.types.get(&t) {
                if let Some(c) = d.columns.iter().find(|c| c.name == name) {
                    return Some((t, c));
                }
            }
        }
        None
    }

    pub fn primary_key(&self, id: TypeId) -> &[String] {
        self.types.get(&self.root(id)).map(|d| d.primary_key.as_slice()).unwrap_or(&[])
    }

    pub fn unique_keys(&self, id: TypeId) -> &[Vec<String>] {
        self.types.get(&self.root(id)).map(|d| d.unique_keys.as_slice()).unwrap_or(&[])
    }

    /// Constraints declared on the type and all its supertypes.
    pub fn constraints(&self, id: TypeId) -> Vec<(TypeId, Expr)> {
        self.ancestry(id)
            .into_iter()
            .filter_map(|t| self.types.get(&t))
            .flat_map(|d| d.constraints.iter().map(move |c| (d.id, c.clone())))
            .collect()
    }

    /// Edge types whose LEAVING or ARRIVING endpoint type lies in the
    /// hierarchy rooted at `root`.
    pub fn edge_types_referencing(&self, root: TypeId) -> Vec<TypeId> {
        self.types
            .values()
            .filter(|d| d.kind == TypeKind::Edge)
            .filter(|d| {
                [d.leaving, d.arriving].into_iter().flatten().any(|t| self.root(t) == root)
            })
            .map(|d| d.id)
            .collect()
    }

    fn check_label_free(&self, label: &str, kind: TypeKind) -> Result<()> {
        // Node and plain types share a namespace since both name structured types.
        let clash = self.types.values().any(|d| {
            d.label == label && (d.kind == kind || (d.kind != TypeKind::Edge && kind != TypeKind::Edge))
        });
        if clash {
            return Err(Error::DuplicateType(label.to_string()));
        }
        Ok(())
    }

    fn alloc_id(&mut self) -> TypeId {
        let id = TypeId(self.next_type_id);
        self.next_type_id += 1;
        id
    }

    fn check_columns(&self, own: &[Column], inherited: &[Column], self_id: TypeId) -> Result<()> {
        let mut seen: BTreeSet<&str> = inherited.iter().map(|c| c.name.as_str()).collect();
        for c in own {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column {}", c.name)));
            }
            if let DataType::Structured(t) = c.data_type {
                if t == self_id {
                    if !c.nullable {
                        return Err(Error::Schema(format!(
                            "recursive column {} must be nullable",
                            c.name
                        )));
                    }
                } else if self.get(t)?.kind != TypeKind::Plain {
                    return Err(Error::Schema(format!("column {} must reference a plain type", c.name)));
                }
            }
        }
        Ok(())
    }

    /// Registers a node type. An auto-allocated integer `ID` key is added
    /// unless a supertype already supplies the key.
    pub fn define_node_type(&mut self, label: &str, columns: Vec<Column>, supertype: Option<&str>) -> Result<TypeId> {
        self.check_label_free(label, TypeKind::Node)?;
        let sup = match supertype {
            Some(s) => {
                let d = self.require_label(s, Some(TypeKind::Node))?;
                Some(d.id)
            }
            None => None,
        };
        let inherited = sup.map(|s| self.effective_columns(s)).unwrap_or_default();
        let id = TypeId(self.next_type_id);
        let mut own = Vec::new();
        let mut primary_key = Vec::new();
        if sup.is_none() {
            if !columns.iter().any(|c| c.name == ID) {
                own.push(Column { name: ID.into(), data_type: DataType::Integer, nullable: false, auto: true });
            }
            primary_key.push(ID.to_string());
        }
        own.extend(columns);
        self.check_columns(&own, &inherited, id)?;
        let id = self.alloc_id();
        self.types.insert(
            id,
            Arc::new(TypeDescriptor {
                id,
                label: label.to_string(),
                kind: TypeKind::Node,
                columns: own,
                supertype: sup,
                primary_key,
                unique_keys: Vec::new(),
                leaving: None,
                arriving: None,
                multiplicity: Multiplicity::default(),
                constraints: Vec::new(),
            }),
        );
        Ok(id)
    }

    /// Registers an edge type with automatic `ID`, `LEAVING` and `ARRIVING`
    /// columns; the endpoint columns take the data type of the endpoint key.
    pub fn define_edge_type(
        &mut self,
        label: &str,
        columns: Vec<Column>,
        leaving: &str,
        arriving: &str,
        multiplicity: Option<Multiplicity>,
    ) -> Result<TypeId> {
        self.check_label_free(label, TypeKind::Edge)?;
        let l = self.require_label(leaving, Some(TypeKind::Node))?.id;
        let a = self.require_label(arriving, Some(TypeKind::Node))?.id;
        let mut own = vec![
            Column { name: ID.into(), data_type: DataType::Integer, nullable: false, auto: true },
            Column { name: LEAVING.into(), data_type: self.reference_type(l)?, nullable: false, auto: false },
            Column { name: ARRIVING.into(), data_type: self.reference_type(a)?, nullable: false, auto: false },
        ];
        own.extend(columns);
        let id = TypeId(self.next_type_id);
        self.check_columns(&own, &[], id)?;
        let id = self.alloc_id();
        self.types.insert(
            id,
            Arc::new(TypeDescriptor {
                id,
                label: label.to_string(),
                kind: TypeKind::Edge,
                columns: own,
                supertype: None,
                primary_key: vec![ID.to_string()],
                unique_keys: Vec::new(),
                leaving: Some(l),
                arriving: Some(a),
                multiplicity: multiplicity.unwrap_or_default(),
                constraints: Vec::new(),
            }),
        );
        Ok(id)
    }

    pub fn define_plain_type(&mut self, label: &str, columns: Vec<Column>, supertype: Option<&str>) -> Result<TypeId> {
        self.check_label_free(label, TypeKind::Plain)?;
        let sup = match supertype {
            Some(s) => Some(self.require_label(s, Some(TypeKind::Plain))?.id),
            None => None,
        };
        let inherited = sup.map(|s| self.effective_columns(s)).unwrap_or_default();
        let id = TypeId(self.next_type_id);
        self.check_columns(&columns, &inherited, id)?;
        let id = self.alloc_id();
        self.types.insert(
            id,
            Arc::new(TypeDescriptor {
                id,
                label: label.to_string(),
                kind: TypeKind::Plain,
                columns,
                supertype: sup,
                primary_key: Vec::new(),
                unique_keys: Vec::new(),
                leaving: None,
                arriving: None,
                multiplicity: Multiplicity::default(),
                constraints: Vec::new(),
            }),
        );
        Ok(id)
    }

    /// Data type of a reference to a node of type `id` (its key column type).
    pub fn reference_type(&self, id: TypeId) -> Result<DataType> {
        let key = self.primary_key(id);
        match key {
            [single] => Ok(self
                .column(id, single)
                .map(|(_, c)| c.data_type.clone())
                .ok_or_else(|| Error::Schema(format!("key column {} missing", single)))?),
            _ => Err(Error::Schema(format!(
                "type {} has a composite key and cannot be an edge endpoint",
                self.get(id)?.label
            ))),
        }
    }

    /// Appends a nullable column. Existing rows read it as NULL.
    pub fn widen_type(&mut self, id: TypeId, mut column: Column) -> Result<()> {
        if self.column(id, &column.name).is_some() {
            return Err(Error::Schema(format!(
                "column {} already exists on {}",
                column.name,
                self.get(id)?.label
            )));
        }
        // A subtype may already own the name.
        for sub in self.subtype_closure(id) {
            if sub != id && self.get(sub)?.columns.iter().any(|c| c.name == column.name) {
                return Err(Error::Schema(format!(
                    "column {} already exists on subtype {}",
                    column.name,
                    self.get(sub)?.label
                )));
            }
        }
        column.nullable = true;
        self.update(id, |d| d.columns.push(column))
    }

    /// Changes the data type of a column on its declaring type.
    pub(crate) fn retype_column(&mut self, owner: TypeId, name: &str, dt: DataType) -> Result<()> {
        self.update(owner, |d| {
            if let Some(c) = d.columns.iter_mut().find(|c| c.name == name) {
                c.data_type = dt;
            }
        })
    }

    pub(crate) fn remove_column(&mut self, owner: TypeId, name: &str) -> Result<()> {
        self.update(owner, |d| {
            d.columns.retain(|c| c.name != name);
            d.unique_keys.retain(|k| !k.iter().any(|c| c == name));
        })
    }

    /// Installs a new primary key on a hierarchy root; the previous key is
    /// kept as a unique key. Row-level checks are the store's job.
    pub(crate) fn set_primary_key(&mut self, root: TypeId, key: Vec<String>) -> Result<()> {
        self.update(root, |d| {
            let old = std::mem::replace(&mut d.primary_key, key.clone());
            d.unique_keys.retain(|k| *k != key);
            if !old.is_empty() && old != key && !d.unique_keys.contains(&old) {
                d.unique_keys.push(old);
            }
            for c in d.columns.iter_mut() {
                if key.contains(&c.name) {
                    c.nullable = false;
                }
            }
        })
    }

    pub(crate) fn set_endpoints(&mut self, edge: TypeId, leaving: TypeId, arriving: TypeId) -> Result<()> {
        let lt = self.reference_type(leaving)?;
        let at = self.reference_type(arriving)?;
        self.update(edge, |d| {
            d.leaving = Some(leaving);
            d.arriving = Some(arriving);
            for c in d.columns.iter_mut() {
                if c.name == LEAVING {
                    c.data_type = lt.clone();
                } else if c.name == ARRIVING {
                    c.data_type = at.clone();
                }
            }
        })
    }

    pub fn set_multiplicity(&mut self, edge: TypeId, m: Multiplicity) -> Result<()> {
        let d = self.get(edge)?;
        if d.kind != TypeKind::Edge {
            return Err(Error::Schema(format!("{} is not an edge type", d.label)));
        }
        self.update(edge, |d| d.multiplicity = m)
    }

    /// Adds a boolean constraint; every variable must name an effective column.
    pub fn add_constraint(&mut self, id: TypeId, expr: Expr) -> Result<()> {
        let mut vars = Vec::new();
        expr.variables(&mut vars);
        for v in vars {
            if self.column(id, &v).is_none() {
                return Err(Error::Schema(format!("constraint references unknown column {}", v)));
            }
        }
        if let Expr::Literal(v) = &expr {
            if !matches!(v, Value::Bool(_)) {
                return Err(Error::Schema("constraint must be boolean".into()));
            }
        }
        self.update(id, |d| d.constraints.push(expr))
    }

    /// Structured-type conformance for `Doc` values.
    pub fn check_structured(&self, plain: TypeId, value: &Value) -> Result<()> {
        let Value::Doc(fields) = value else {
            return Err(Error::TypeMismatch("expected a structured value".into()));
        };
        let cols = self.effective_columns(plain);
        for (k, v) in fields {
            let Some(col) = cols.iter().find(|c| c.name == *k) else {
                return Err(Error::TypeMismatch(format!("unknown field {}", k)));
            };
            match &col.data_type {
                DataType::Structured(t) => {
                    if !v.is_null() {
                        self.check_structured(*t, v)?
                    }
                }
                dt => {
                    if v.clone().coerce_to(dt).is_err() {
                        return Err(Error::TypeMismatch(format!("field {} expects {}", k, dt.sql_name())));
                    }
                }
            }
        }
        Ok(())
    }
}
