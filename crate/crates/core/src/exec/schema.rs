//! CREATE TYPE and ALTER.

use super::Outcome;
use crate::catalog::{Column, Multiplicity, TypeKind};
use crate::db::Transaction;
use crate::error::{Error, Result};
use crate::parser::ast::{AlterAction, ColumnDef, TypeDefinition, TypeKindDecl};
use crate::value::{DataType, TypeId};

fn column(tx: &Transaction, def: &ColumnDef, defining: &str) -> Result<Column> {
    let data_type = match DataType::from_sql_name(&def.type_name) {
        Some(dt) => dt,
        None if def.type_name == defining => DataType::Structured(TypeId(tx.catalog().next_type_id())),
        None => DataType::Structured(tx.catalog().require_label(&def.type_name, Some(TypeKind::Plain))?.id),
    };
    Ok(Column { name: def.name.clone(), data_type, nullable: !def.not_null, auto: false })
}

pub(super) fn exec_create_type(tx: &mut Transaction, def: &TypeDefinition) -> Result<Outcome> {
    let cols = def.columns.iter().map(|c| column(tx, c, &def.name)).collect::<Result<Vec<_>>>()?;
    let name = def.name.clone();
    let under = def.under.clone();
    match &def.kind {
        TypeKindDecl::Node => {
            tx.schema(|c| c.define_node_type(&name, cols, under.as_deref()))?;
        }
        TypeKindDecl::Edge { leaving, arriving } => {
            if under.is_some() {
                return Err(Error::Schema("edge types cannot have a supertype".into()));
            }
            tx.schema(|c| c.define_edge_type(&name, cols, leaving, arriving, None))?;
        }
        TypeKindDecl::Plain => {
            // A subtype takes the kind of its supertype.
            let super_kind = match &under {
                Some(u) => Some(tx.catalog().require_label(u, None)?.kind),
                None => None,
            };
            match super_kind {
                Some(TypeKind::Node) => tx.schema(|c| c.define_node_type(&name, cols, under.as_deref()))?,
                Some(TypeKind::Edge) => return Err(Error::Schema("edge types cannot have subtypes".into())),
                _ => tx.schema(|c| c.define_plain_type(&name, cols, under.as_deref()))?,
            };
        }
    }
    Ok(Outcome::Done)
}

pub(super) fn exec_alter(tx: &mut Transaction, target: &str, action: &AlterAction) -> Result<Outcome> {
    let cat = tx.catalog();
    let t = [TypeKind::Node, TypeKind::Edge, TypeKind::Plain]
        .into_iter()
        .find_map(|k| cat.lookup_label(target, Some(k)))
        .ok_or_else(|| Error::UnknownType(target.to_string()))?
        .id;
    match action {
        AlterAction::AddPrimaryKey(cols) => tx.alter_primary_key(t, cols.clone())?,
        AlterAction::AddColumn(def) => {
            let col = column(tx, def, "")?;
            tx.add_column(t, col)?;
        }
        AlterAction::DropColumn(name) => tx.drop_column(t, name)?,
        AlterAction::AddCheck(e) => {
            let e = e.clone();
            tx.schema(|c| c.add_constraint(t, e))?;
        }
        AlterAction::SetCardinality { leaving, arriving } => {
            let m = Multiplicity::new((leaving.min, leaving.max), (arriving.min, arriving.max))?;
            tx.schema(|c| c.set_multiplicity(t, m))?;
        }
    }
    Ok(Outcome::Done)
}
