//! Outlining of eligible loop nests into standalone loop files.
//!
//! For every source file the extractor produces a rewritten base file, in
//! which each eligible nest is replaced by a call, and per nest a loop file in
//! three variants: clean, timing-instrumented and energy-instrumented.

mod eligibility;
pub mod instrument;
pub mod omp;
mod outline;
mod rewrite;

use std::collections::BTreeMap;
use std::fmt;

use crate::cparse::{self, AstNode, FileId, HeaderEnv, ParseError, SourceSpan, SymbolInfo};

pub use eligibility::check_eligibility;
pub use instrument::{instrument_energy, instrument_timing};
pub use outline::extract_loop;
pub use rewrite::rewrite_base;

/// `<file-stem>_<function>_L<ordinal>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopId(pub String);

impl LoopId {
    pub fn new(stem: &str, function: &str, ordinal: usize) -> Self {
        LoopId(format!("{}_{}_L{}", c_identifier(stem), function, ordinal))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn function_name(&self) -> String {
        format!("mc_loop_{}", self.0)
    }
}

impl fmt::Display for LoopId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Maps a file stem to identifier characters.
pub fn c_identifier(stem: &str) -> String {
    let mut s: String = stem.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if s.starts_with(|c: char| c.is_ascii_digit()) || s.is_empty() {
        s.insert(0, '_');
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ineligibility {
    HasReturn,
    HasGoto,
    HasLabel,
    UsesStaticFn,
    UsesStaticVar,
    UnsupportedConstruct,
    UnknownSymbol,
    Threadprivate,
    OmpOrphanWrite,
    ExtractionFault,
    BelowMinLines,
    DefaultCompileFailed,
}

impl Ineligibility {
    pub fn tag(self) -> &'static str {
        match self {
            Ineligibility::HasReturn => "has_return",
            Ineligibility::HasGoto => "has_goto",
            Ineligibility::HasLabel => "has_label",
            Ineligibility::UsesStaticFn => "uses_static_fn",
            Ineligibility::UsesStaticVar => "uses_static_var",
            Ineligibility::UnsupportedConstruct => "unsupported_construct",
            Ineligibility::UnknownSymbol => "unknown_symbol",
            Ineligibility::Threadprivate => "threadprivate",
            Ineligibility::OmpOrphanWrite => "omp_orphan_write",
            Ineligibility::ExtractionFault => "extraction_fault",
            Ineligibility::BelowMinLines => "below_min_lines",
            Ineligibility::DefaultCompileFailed => "default_compile_failed",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        use Ineligibility::*;
        [
            HasReturn,
            HasGoto,
            HasLabel,
            UsesStaticFn,
            UsesStaticVar,
            UnsupportedConstruct,
            UnknownSymbol,
            Threadprivate,
            OmpOrphanWrite,
            ExtractionFault,
            BelowMinLines,
            DefaultCompileFailed,
        ]
        .into_iter()
        .find(|r| r.tag() == tag)
    }
}

impl fmt::Display for Ineligibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone)]
pub struct LoopNest {
    pub loop_id: LoopId,
    /// Span of the outermost `for`.
    pub span: SourceSpan,
    /// Span replaced in the base file: the nest plus its attached pragmas.
    pub region: SourceSpan,
    pub enclosing_fn: String,
    pub ordinal: usize,
    pub symbols: Vec<SymbolInfo>,
    pub eligible: bool,
    pub ineligibility_reasons: Vec<Ineligibility>,
    /// First OpenMP pragma directly preceding the nest.
    pub omp_pragma: Option<String>,
    /// All pragmas directly preceding the nest, in source order.
    pub attached_pragmas: Vec<String>,
    /// Failure text when symbol collection failed.
    pub symbol_error: Option<String>,
}

impl LoopNest {
    pub fn demote(&mut self, reason: Ineligibility) {
        if !self.ineligibility_reasons.contains(&reason) {
            self.ineligibility_reasons.push(reason);
            self.ineligibility_reasons.sort();
        }
        self.eligible = false;
    }

    pub fn reason_tags(&self) -> Vec<&'static str> {
        self.ineligibility_reasons.iter().map(|r| r.tag()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigParam {
    /// Name of the object in the original code.
    pub name: String,
    /// Parameter name in the outlined function, e.g. `n_ref`.
    pub param_name: String,
    /// Parameter type, e.g. `int *` or `void *`.
    pub type_text: String,
    pub by_ref: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedFunctionSig {
    pub fn_name: String,
    pub params: Vec<SigParam>,
    /// Objects copied into same-named locals before the nest.
    pub localized: Vec<String>,
    /// Localized objects copied back after the nest.
    pub copied_out: Vec<String>,
    /// Globals reached through `extern` declarations instead of parameters.
    pub externs: Vec<String>,
}

impl ExtractedFunctionSig {
    /// `extern void mc_loop_x(int *, void *);`
    pub fn prototype(&self) -> String {
        let params = if self.params.is_empty() {
            "void".to_string()
        } else {
            self.params.iter().map(|p| p.type_text.trim_end().to_string()).collect::<Vec<_>>().join(", ")
        };
        format!("extern void {}({});", self.fn_name, params)
    }

    /// `mc_loop_x(&n, &A);`
    pub fn call(&self) -> String {
        let args: Vec<String> = self.params.iter().map(|p| format!("&{}", p.name)).collect();
        format!("{}({});", self.fn_name, args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopVariants {
    pub clean: String,
    pub timed: String,
    pub energized: String,
}

impl LoopVariants {
    pub fn get(&self, v: Variant) -> &str {
        match v {
            Variant::Clean => &self.clean,
            Variant::Timed => &self.timed,
            Variant::Energized => &self.energized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Clean,
    Timed,
    Energized,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Clean, Variant::Timed, Variant::Energized];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Clean => "clean",
            Variant::Timed => "timed",
            Variant::Energized => "energized",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Variant::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedArtifacts {
    pub stem: String,
    pub base_file: String,
    pub loop_files: BTreeMap<LoopId, LoopVariants>,
    pub sigs: BTreeMap<LoopId, ExtractedFunctionSig>,
    /// Prototypes added to the base file.
    pub extern_decls: Vec<String>,
    pub nests: Vec<LoopNest>,
}

#[derive(Debug, Clone, Default)]
pub struct ExtractOptions {
    /// Nests spanning fewer source lines are skipped.
    pub min_loop_lines: u32,
    pub header_env: HeaderEnv,
}

/// Locates nests, resolves their symbols and applies the eligibility rules.
pub fn analyze(unit: &AstNode, stem: &str, opts: &ExtractOptions) -> Vec<LoopNest> {
    let all_pragmas: Vec<&str> = {
        let mut v = Vec::new();
        unit.walk(&mut |n| {
            if n.kind == cparse::NodeKind::PragmaDirective {
                v.push(n.text.as_str());
            }
        });
        v
    };
    let threadprivate = omp::threadprivate_names(&all_pragmas);
    let mut out = Vec::new();
    for nr in cparse::find_for_nests(unit) {
        let attached = eligibility::attached_pragmas(unit, nr.root);
        let region = attached.first().map(|p| p.span.cover(&nr.root.span)).unwrap_or(nr.root.span);
        let attached_pragmas: Vec<String> = attached.iter().map(|p| p.text.clone()).collect();
        let omp_pragma = attached_pragmas.iter().find(|p| omp::is_omp(p)).cloned();
        let mut nest = LoopNest {
            loop_id: LoopId::new(stem, nr.enclosing_fn, nr.ordinal),
            span: nr.root.span,
            region,
            enclosing_fn: nr.enclosing_fn.to_string(),
            ordinal: nr.ordinal,
            symbols: Vec::new(),
            eligible: true,
            ineligibility_reasons: Vec::new(),
            omp_pragma,
            attached_pragmas,
            symbol_error: None,
        };
        match eligibility::nest_symbols(unit, nr.root, &nest.attached_pragmas, &opts.header_env) {
            Ok(s) => nest.symbols = s,
            Err(e) => nest.symbol_error = Some(e.to_string()),
        }
        let (_, reasons) = check_eligibility(&nest, unit);
        for r in reasons {
            nest.demote(r);
        }
        if nest.symbols.iter().any(|s| threadprivate.contains(&s.name)) {
            nest.demote(Ineligibility::Threadprivate);
        }
        if opts.min_loop_lines > 0 && nest.span.lines() < opts.min_loop_lines {
            nest.demote(Ineligibility::BelowMinLines);
        }
        out.push(nest);
    }
    out
}

/// Full extraction of one file: analysis, outlining and base rewrite.
/// Nests whose outlining fails are demoted with `extraction_fault`.
pub fn extract_file(
    source: &str,
    file_id: FileId,
    stem: &str,
    opts: &ExtractOptions,
) -> Result<GeneratedArtifacts, ParseError> {
    let unit = cparse::parse_unit_with(source, file_id, &opts.header_env)?;
    let nests = analyze(&unit, stem, opts);
    Ok(generate(&unit, stem, nests))
}

/// Outlines the eligible nests of an analyzed unit.
pub fn generate(unit: &AstNode, stem: &str, mut nests: Vec<LoopNest>) -> GeneratedArtifacts {
    let mut loop_files = BTreeMap::new();
    let mut sigs = BTreeMap::new();
    for nest in nests.iter_mut().filter(|n| n.eligible) {
        match extract_loop(nest, unit) {
            Ok((clean, sig)) => {
                let id = nest.loop_id.clone();
                let timed = instrument_timing(&clean, id.as_str());
                let energized = instrument_energy(&clean, id.as_str());
                loop_files.insert(id.clone(), LoopVariants { clean, timed, energized });
                sigs.insert(id, sig);
            }
            Err(e) => {
                log::debug!("{}: {e}", nest.loop_id);
                nest.demote(Ineligibility::ExtractionFault);
            }
        }
    }
    let ordered: Vec<&ExtractedFunctionSig> =
        nests.iter().filter(|n| n.eligible).filter_map(|n| sigs.get(&n.loop_id)).collect();
    let base_file = rewrite_base(unit, &nests, &ordered);
    let extern_decls = ordered.iter().map(|s| s.prototype()).collect();
    GeneratedArtifacts { stem: stem.to_string(), base_file, loop_files, sigs, extern_decls, nests }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot reconstruct declaration of `{symbol}`: {detail}")]
pub struct ExtractionFault {
    pub symbol: String,
    pub detail: String,
}
