use std::collections::HashSet;

use crate::cparse::symbols::{collect_symbols_with, Resolver};
use crate::cparse::{enclosing_function, AstNode, HeaderEnv, NodeKind, SymbolCategory, SymbolError, SymbolInfo};

use super::omp::OmpPragma;
use super::outline::{localized_written, written_objects};
use super::{Ineligibility, LoopNest};

/// Pragma lines immediately preceding `root` among its siblings.
pub(super) fn attached_pragmas<'a>(unit: &'a AstNode, root: &AstNode) -> Vec<&'a AstNode> {
    let mut out = Vec::new();
    unit.walk(&mut |n| {
        if let Some(i) = n.children.iter().position(|c| std::ptr::eq(c, root)) {
            out = n.children[..i].iter().rev().take_while(|c| c.kind == NodeKind::PragmaDirective).collect();
            out.reverse();
        }
    });
    out
}

/// Symbols of the nest plus identifiers used by clauses of its pragmas.
pub(super) fn nest_symbols(
    unit: &AstNode,
    root: &AstNode,
    pragmas: &[String],
    env: &HeaderEnv,
) -> Result<Vec<SymbolInfo>, SymbolError> {
    let mut symbols = collect_symbols_with(root, unit, env)?;
    let resolver = Resolver::new(unit, root.span, env);
    for p in pragmas.iter().filter_map(|p| OmpPragma::parse(p)) {
        for name in p.expression_identifiers() {
            if !symbols.iter().any(|s| s.name == name) {
                symbols.push(resolver.resolve(&name, false)?);
            }
        }
    }
    Ok(symbols)
}

/// True when an ancestor statement of `root` in its function carries an
/// OpenMP `parallel` pragma, so `root` runs inside a team.
fn inside_parallel_region(unit: &AstNode, root: &AstNode) -> bool {
    let Some(f) = enclosing_function(unit, &root.span) else { return false };
    let mut found = false;
    f.walk(&mut |n| {
        for (i, c) in n.children.iter().enumerate() {
            if !c.span.contains(&root.span) || std::ptr::eq(c, root) {
                continue;
            }
            let parallel = n.children[..i]
                .iter()
                .rev()
                .take_while(|p| p.kind == NodeKind::PragmaDirective)
                .filter_map(|p| OmpPragma::parse(&p.text))
                .any(|p| p.is_parallel());
            found |= parallel;
        }
    });
    found
}

pub fn check_eligibility(nest: &LoopNest, unit: &AstNode) -> (bool, Vec<Ineligibility>) {
    let mut reasons = HashSet::new();
    let Some(root) = unit.find(NodeKind::ForStmt, &nest.span) else {
        return (false, vec![Ineligibility::ExtractionFault]);
    };
    root.walk(&mut |n| match n.kind {
        NodeKind::ReturnStmt => {
            reasons.insert(Ineligibility::HasReturn);
        }
        NodeKind::GotoStmt => {
            reasons.insert(Ineligibility::HasGoto);
        }
        NodeKind::LabelStmt => {
            reasons.insert(Ineligibility::HasLabel);
        }
        NodeKind::Other => {
            reasons.insert(Ineligibility::UnsupportedConstruct);
        }
        _ => {}
    });
    if nest.symbol_error.is_some() {
        reasons.insert(Ineligibility::UnknownSymbol);
    }
    for s in &nest.symbols {
        match s.category {
            SymbolCategory::StaticFn => {
                reasons.insert(Ineligibility::UsesStaticFn);
            }
            SymbolCategory::StaticVar => {
                reasons.insert(Ineligibility::UsesStaticVar);
            }
            _ => {}
        }
    }

    // a localized copy written by several threads no longer aliases the original
    let attached: Vec<OmpPragma> = nest.attached_pragmas.iter().filter_map(|p| OmpPragma::parse(p)).collect();
    let opens_team = attached.iter().any(|p| p.is_parallel());
    let (mut inner_worksharing, mut inner_parallel) = (false, false);
    root.walk(&mut |n| {
        if n.kind == NodeKind::PragmaDirective {
            if let Some(p) = OmpPragma::parse(&n.text) {
                inner_worksharing |= p.is_worksharing();
                inner_parallel |= p.is_parallel();
            }
        }
    });
    let inner_worksharing = inner_worksharing && !inner_parallel;
    let orphaned = !opens_team
        && (attached.iter().any(|p| p.is_worksharing()) || inner_worksharing || inside_parallel_region(unit, root));
    if orphaned {
        let written = written_objects(root, &nest.symbols);
        if localized_written(&nest.symbols, &written) {
            reasons.insert(Ineligibility::OmpOrphanWrite);
        }
    }

    let mut reasons: Vec<_> = reasons.into_iter().collect();
    reasons.sort();
    (reasons.is_empty(), reasons)
}
