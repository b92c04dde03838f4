//! JSON documents: one typed value per object, tagged by `"kind"`.
//!
//! Tables map `"i,j"` label pairs to `{label: expression}` objects; missing
//! pairs are zero. Expressions use the polynomial grammar of the core crate
//! and may only mention the variables their kind allows.

use std::collections::BTreeSet;

use confsym::bialgebra::{BilinearForm, Coproduct};
use confsym::{
    BilinearTable, Bimodule, ConformalAlgebra, ConformalLinearMap, DendriformAlgebra, FreeModule, MatchedPair,
    ModuleMap, Poly, TensorElement, Var,
};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// A bimodule whose algebra is supplied separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleDoc {
    pub algebra_basis: FreeModule,
    pub left: BilinearTable,
    pub right: BilinearTable,
}

impl BimoduleDoc {
    pub fn module(&self) -> &FreeModule {
        self.left.right()
    }

    pub fn resolve(&self, algebra: &ConformalAlgebra) -> CliResult<Bimodule> {
        Ok(Bimodule::new(algebra, self.left.clone(), self.right.clone())?)
    }

    pub fn of(bm: &Bimodule) -> Self {
        BimoduleDoc {
            algebra_basis: bm.algebra().module().clone(),
            left: bm.left().clone(),
            right: bm.right().clone(),
        }
    }
}

/// The four action tables of a matched pair; the algebras come separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedPairDoc {
    /// `l_A`, `r_A`: `A × B → B`.
    pub a_on_b: (BilinearTable, BilinearTable),
    /// `l_B`, `r_B`: `B × A → A`.
    pub b_on_a: (BilinearTable, BilinearTable),
}

impl MatchedPairDoc {
    pub fn resolve(&self, a: &ConformalAlgebra, b: &ConformalAlgebra) -> CliResult<MatchedPair> {
        Ok(MatchedPair::from_tables(
            a,
            b,
            self.a_on_b.0.clone(),
            self.a_on_b.1.clone(),
            self.b_on_a.0.clone(),
            self.b_on_a.1.clone(),
        )?)
    }

    pub fn of(mp: &MatchedPair) -> Self {
        MatchedPairDoc {
            a_on_b: (mp.a_on_b().left().clone(), mp.a_on_b().right().clone()),
            b_on_a: (mp.b_on_a().left().clone(), mp.b_on_a().right().clone()),
        }
    }
}

/// A module map (entries in `D`) or a conformal linear map (entries in `L, D`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapDoc {
    Module(ModuleMap),
    Conformal(ConformalLinearMap),
}

impl MapDoc {
    pub fn source(&self) -> &FreeModule {
        match self {
            MapDoc::Module(m) => m.source(),
            MapDoc::Conformal(m) => m.source(),
        }
    }

    /// The `λ = 0` slice.
    pub fn at_zero(&self) -> ModuleMap {
        match self {
            MapDoc::Module(m) => m.clone(),
            MapDoc::Conformal(m) => m.at_zero(),
        }
    }

    /// A module map viewed as a conformal linear map constant in `λ`.
    pub fn conformal(&self) -> ConformalLinearMap {
        match self {
            MapDoc::Module(m) => ConformalLinearMap::new(m.source(), m.target(), m.matrix().to_vec())
                .expect("module-map entries are valid conformal entries"),
            MapDoc::Conformal(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Algebra(ConformalAlgebra),
    Coproduct(Coproduct),
    Form(BilinearForm),
    Bimodule(BimoduleDoc),
    MatchedPair(MatchedPairDoc),
    RMatrix(TensorElement),
    Map(MapDoc),
    Dendriform(DendriformAlgebra),
}

pub const KINDS: [&str; 8] = [
    "conformal_algebra",
    "coproduct",
    "form",
    "bimodule",
    "matched_pair",
    "rmatrix",
    "module_map",
    "dendriform",
];

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Algebra(_) => "conformal_algebra",
            Document::Coproduct(_) => "coproduct",
            Document::Form(_) => "form",
            Document::Bimodule(_) => "bimodule",
            Document::MatchedPair(_) => "matched_pair",
            Document::RMatrix(_) => "rmatrix",
            Document::Map(_) => "module_map",
            Document::Dendriform(_) => "dendriform",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Document::Algebra(a) => json!({
                "kind": self.kind(),
                "basis": a.module().labels(),
                "products": emit_table(a.table()),
            }),
            Document::Coproduct(d) => {
                let mut images = Map::new();
                for (k, label) in d.module().labels().iter().enumerate() {
                    let t = emit_tensor(d.image(k));
                    if !t.is_empty() {
                        images.insert(label.clone(), Value::Object(t));
                    }
                }
                json!({"kind": self.kind(), "basis": d.module().labels(), "coproduct": images})
            }
            Document::Form(f) => {
                let m = f.module();
                let mut entries = Map::new();
                for i in 0..m.rank() {
                    for j in 0..m.rank() {
                        let e = f.entry(i, j);
                        if !e.is_zero() {
                            entries.insert(pair_key(m.label(i), m.label(j)), Value::String(e.to_string()));
                        }
                    }
                }
                json!({"kind": self.kind(), "basis": m.labels(), "form": entries})
            }
            Document::Bimodule(b) => json!({
                "kind": self.kind(),
                "algebra_basis": b.algebra_basis.labels(),
                "basis": b.module().labels(),
                "left": emit_table(&b.left),
                "right": emit_table(&b.right),
            }),
            Document::MatchedPair(mp) => json!({
                "kind": self.kind(),
                "a_basis": mp.a_on_b.0.left().labels(),
                "b_basis": mp.b_on_a.0.left().labels(),
                "a_on_b": {"left": emit_table(&mp.a_on_b.0), "right": emit_table(&mp.a_on_b.1)},
                "b_on_a": {"left": emit_table(&mp.b_on_a.0), "right": emit_table(&mp.b_on_a.1)},
            }),
            Document::RMatrix(r) => json!({
                "kind": self.kind(),
                "basis": r.legs()[0].labels(),
                "r": emit_tensor(r),
            }),
            Document::Map(m) => {
                let (source, target, matrix, conformal) = match m {
                    MapDoc::Module(m) => (m.source(), m.target(), m.matrix(), false),
                    MapDoc::Conformal(m) => (m.source(), m.target(), m.matrix(), true),
                };
                let mut rows = Map::new();
                for (i, row) in matrix.iter().enumerate() {
                    let mut out = Map::new();
                    for (j, e) in row.iter().enumerate() {
                        if !e.is_zero() {
                            out.insert(target.label(j).to_owned(), Value::String(e.to_string()));
                        }
                    }
                    if !out.is_empty() {
                        rows.insert(source.label(i).to_owned(), Value::Object(out));
                    }
                }
                json!({
                    "kind": self.kind(),
                    "source": source.labels(),
                    "target": target.labels(),
                    "conformal": conformal,
                    "matrix": rows,
                })
            }
            Document::Dendriform(d) => json!({
                "kind": self.kind(),
                "basis": d.module().labels(),
                "prec": emit_table(d.prec()),
                "succ": emit_table(d.succ()),
            }),
        }
    }

    pub fn from_json(v: &Value) -> CliResult<Document> {
        let obj = v
            .as_object()
            .ok_or_else(|| CliError::input("document", "expected a JSON object"))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::input("document", "missing string field \"kind\""))?;
        let d = Reader { obj, kind };
        match kind {
            "conformal_algebra" => {
                d.allow(&["basis", "products"])?;
                let m = d.basis("basis")?;
                let t = d.table("products", &m, &m, &m)?;
                Ok(Document::Algebra(ConformalAlgebra::new(t)?))
            }
            "coproduct" => {
                d.allow(&["basis", "coproduct"])?;
                let m = d.basis("basis")?;
                let images = d.object("coproduct")?;
                check_keys(kind, "coproduct", images.keys().map(String::as_str), &m)?;
                let mut out = Vec::with_capacity(m.rank());
                for label in m.labels() {
                    let ctx = format!("{kind}.coproduct[\"{label}\"]");
                    out.push(match images.get(label) {
                        Some(v) => read_tensor(&ctx, v, &m)?,
                        None => TensorElement::zero(vec![m.clone(), m.clone()]),
                    });
                }
                Ok(Document::Coproduct(Coproduct::new(&m, out)?))
            }
            "form" => {
                d.allow(&["basis", "form"])?;
                let m = d.basis("basis")?;
                let entries = d.object("form")?;
                let n = m.rank();
                let mut table = vec![vec![Poly::zero(); n]; n];
                for (key, val) in entries {
                    let ctx = format!("form.form[\"{key}\"]");
                    let (i, j) = split_pair(&ctx, key, &m, &m)?;
                    table[i][j] = expression(&ctx, val, &[Var::L])?;
                }
                Ok(Document::Form(BilinearForm::new(&m, table)?))
            }
            "bimodule" => {
                d.allow(&["algebra_basis", "basis", "left", "right"])?;
                let a = d.basis("algebra_basis")?;
                let m = d.basis("basis")?;
                Ok(Document::Bimodule(BimoduleDoc {
                    left: d.table("left", &a, &m, &m)?,
                    right: d.table("right", &a, &m, &m)?,
                    algebra_basis: a,
                }))
            }
            "matched_pair" => {
                d.allow(&["a_basis", "b_basis", "a_on_b", "b_on_a"])?;
                let a = d.basis("a_basis")?;
                let b = d.basis("b_basis")?;
                let side = |key: &str, x: &FreeModule, y: &FreeModule| -> CliResult<(BilinearTable, BilinearTable)> {
                    let inner = d.object(key)?;
                    let r = Reader { obj: inner, kind };
                    r.allow(&["left", "right"])?;
                    Ok((r.table("left", x, y, y)?, r.table("right", x, y, y)?))
                };
                Ok(Document::MatchedPair(MatchedPairDoc {
                    a_on_b: side("a_on_b", &a, &b)?,
                    b_on_a: side("b_on_a", &b, &a)?,
                }))
            }
            "rmatrix" => {
                d.allow(&["basis", "r"])?;
                let m = d.basis("basis")?;
                let v = obj.get("r").cloned().unwrap_or_else(|| json!({}));
                Ok(Document::RMatrix(read_tensor("rmatrix.r", &v, &m)?))
            }
            "module_map" => {
                d.allow(&["source", "target", "conformal", "matrix"])?;
                let s = d.basis("source")?;
                let t = d.basis("target")?;
                let conformal = match obj.get("conformal") {
                    None => false,
                    Some(Value::Bool(b)) => *b,
                    Some(_) => return Err(CliError::input("module_map.conformal", "expected a boolean")),
                };
                let vars: &[Var] = if conformal { &[Var::L, Var::D] } else { &[Var::D] };
                let rows = d.object("matrix")?;
                check_keys(kind, "matrix", rows.keys().map(String::as_str), &s)?;
                let mut matrix = vec![vec![Poly::zero(); t.rank()]; s.rank()];
                for (src, row) in rows {
                    let i = s.index_of(src).expect("checked");
                    let ctx = format!("module_map.matrix[\"{src}\"]");
                    let row = row
                        .as_object()
                        .ok_or_else(|| CliError::input(&ctx, "expected an object of target labels"))?;
                    for (tgt, val) in row {
                        let ctx = format!("{ctx}[\"{tgt}\"]");
                        let j = t
                            .index_of(tgt)
                            .ok_or_else(|| CliError::input(&ctx, format!("unknown target label \"{tgt}\"")))?;
                        matrix[i][j] = expression(&ctx, val, vars)?;
                    }
                }
                Ok(Document::Map(if conformal {
                    MapDoc::Conformal(ConformalLinearMap::new(&s, &t, matrix)?)
                } else {
                    MapDoc::Module(ModuleMap::new(&s, &t, matrix)?)
                }))
            }
            "dendriform" => {
                d.allow(&["basis", "prec", "succ"])?;
                let m = d.basis("basis")?;
                Ok(Document::Dendriform(DendriformAlgebra::new(
                    d.table("prec", &m, &m, &m)?,
                    d.table("succ", &m, &m, &m)?,
                )?))
            }
            other => Err(CliError::input(
                "document.kind",
                format!("unknown kind \"{other}\" (expected one of {})", KINDS.join(", ")),
            )),
        }
    }
}

/// Parses a file's contents: a single document or an array of documents.
pub fn parse_documents(src: &str) -> CliResult<Vec<Document>> {
    let v: Value = serde_json::from_str(src)
        .map_err(|e| CliError::input(format!("JSON at line {}, column {}", e.line(), e.column()), e.to_string()))?;
    match &v {
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(n, item)| Document::from_json(item).map_err(|e| e.within(&format!("bundle item {n}"))))
            .collect(),
        _ => Ok(vec![Document::from_json(&v)?]),
    }
}

/// A single document, or an array when there are several.
pub fn emit_documents(docs: &[Document]) -> Value {
    match docs {
        [one] => one.to_json(),
        many => Value::Array(many.iter().map(Document::to_json).collect()),
    }
}

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    kind: &'a str,
}

impl Reader<'_> {
    fn allow(&self, fields: &[&str]) -> CliResult<()> {
        for key in self.obj.keys() {
            if key != "kind" && !fields.contains(&key.as_str()) {
                return Err(CliError::input(
                    self.kind,
                    format!("unexpected field \"{key}\" (allowed: {})", fields.join(", ")),
                ));
            }
        }
        Ok(())
    }

    fn basis(&self, key: &str) -> CliResult<FreeModule> {
        let ctx = format!("{}.{key}", self.kind);
        let arr = self
            .obj
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::input(&ctx, "expected an array of labels"))?;
        let labels = arr
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| CliError::input(&ctx, "labels must be strings")))
            .collect::<CliResult<Vec<_>>>()?;
        FreeModule::new(labels).map_err(|e| CliError::input(&ctx, e.to_string()))
    }

    fn object(&self, key: &str) -> CliResult<&Map<String, Value>> {
        static EMPTY: std::sync::OnceLock<Map<String, Value>> = std::sync::OnceLock::new();
        match self.obj.get(key) {
            None => Ok(EMPTY.get_or_init(Map::new)),
            Some(Value::Object(m)) => Ok(m),
            Some(_) => Err(CliError::input(format!("{}.{key}", self.kind), "expected an object")),
        }
    }

    /// `{"i,j": {"k": expr}}` in `{L, D}`.
    fn table(&self, key: &str, left: &FreeModule, right: &FreeModule, out: &FreeModule) -> CliResult<BilinearTable> {
        let entries = self.object(key)?;
        let mut t = BilinearTable::zero(left, right, out);
        for (pair, val) in entries {
            let ctx = format!("{}.{key}[\"{pair}\"]", self.kind);
            let (i, j) = split_pair(&ctx, pair, left, right)?;
            let row = val
                .as_object()
                .ok_or_else(|| CliError::input(&ctx, "expected an object mapping output labels to expressions"))?;
            for (label, e) in row {
                let ctx = format!("{ctx}[\"{label}\"]");
                let k = out
                    .index_of(label)
                    .ok_or_else(|| CliError::input(&ctx, format!("unknown label \"{label}\"")))?;
                t.set(i, j, k, expression(&ctx, e, &[Var::L, Var::D])?)?;
            }
        }
        Ok(t)
    }
}

fn check_keys<'a>(kind: &str, field: &str, keys: impl Iterator<Item = &'a str>, m: &FreeModule) -> CliResult<()> {
    for key in keys {
        if m.index_of(key).is_none() {
            return Err(CliError::input(format!("{kind}.{field}"), format!("unknown label \"{key}\"")));
        }
    }
    Ok(())
}

fn split_pair(ctx: &str, key: &str, left: &FreeModule, right: &FreeModule) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(CliError::input(ctx, "expected a key of the form \"label,label\""));
    };
    let i = left
        .index_of(a)
        .ok_or_else(|| CliError::input(ctx, format!("unknown label \"{a}\"")))?;
    let j = right
        .index_of(b)
        .ok_or_else(|| CliError::input(ctx, format!("unknown label \"{b}\"")))?;
    Ok((i, j))
}

fn expression(ctx: &str, v: &Value, allowed: &[Var]) -> CliResult<Poly> {
    let src = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(CliError::input(ctx, "expected an expression string")),
    };
    let p = Poly::parse(&src).map_err(|e| CliError::input(ctx, format!("in \"{src}\" {e}")))?;
    let allowed: BTreeSet<Var> = allowed.iter().copied().collect();
    if let Some(var) = p.variables().iter().find(|v| !allowed.contains(v)) {
        let names: Vec<String> = allowed.iter().map(Var::to_string).collect();
        return Err(CliError::input(
            ctx,
            format!("variable {var} is not allowed here (allowed: {})", names.join(", ")),
        ));
    }
    Ok(p)
}

/// `{"i,j": expr}` over `m ⊗ m` with coefficients in `x1, x2`.
fn read_tensor(ctx: &str, v: &Value, m: &FreeModule) -> CliResult<TensorElement> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::input(ctx, "expected an object mapping \"label,label\" to expressions"))?;
    let mut terms = Vec::with_capacity(obj.len());
    for (key, val) in obj {
        let ctx = format!("{ctx}[\"{key}\"]");
        let (i, j) = split_pair(&ctx, key, m, m)?;
        terms.push((vec![i, j], expression(&ctx, val, &[Var::slot(1), Var::slot(2)])?));
    }
    Ok(TensorElement::from_terms(vec![m.clone(), m.clone()], terms)?)
}

fn pair_key(a: &str, b: &str) -> String {
    format!("{a},{b}")
}

fn emit_table(t: &BilinearTable) -> Value {
    let mut out = Map::new();
    for i in 0..t.left().rank() {
        for j in 0..t.right().rank() {
            let mut row = Map::new();
            for k in 0..t.out().rank() {
                let e = t.get(i, j, k);
                if !e.is_zero() {
                    row.insert(t.out().label(k).to_owned(), Value::String(e.to_string()));
                }
            }
            if !row.is_empty() {
                out.insert(pair_key(t.left().label(i), t.right().label(j)), Value::Object(row));
            }
        }
    }
    Value::Object(out)
}

fn emit_tensor(t: &TensorElement) -> Map<String, Value> {
    t.terms()
        .map(|(idx, c)| {
            let labels = t.index_labels(idx);
            (labels.join(","), Value::String(c.to_string()))
        })
        .collect()
}
