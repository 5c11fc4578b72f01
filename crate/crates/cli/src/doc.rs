//! Loading instance documents.
//!
//! Documents are parsed with `serde_json` and then checked field by field.
//! Every integrity error carries the JSON path of the offending value, which
//! is mapped back to a line and column of the source text.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use gprox::gaction::{FiniteGroup, GActionGerm, GroupSet, NeighborhoodBase, DEFAULT_GROUP_CAP};
use gprox::metricprox::{metric_uniformity, FiniteMetric};
use gprox::ordered::OrderedCarrier;
use gprox::rationals::{parse_rat, Rat};
use gprox::setrel::{Carrier, CarrierRef, Rel, Subset};
use gprox::uniformity::UnifBase;
use gprox::Error;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seg {
    Key(String),
    Index(usize),
}

impl fmt::Display for Seg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seg::Key(k) => write!(f, ".{k}"),
            Seg::Index(i) => write!(f, "[{i}]"),
        }
    }
}

/// A load failure at a source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    pub line: usize,
    pub column: usize,
    pub path: String,
    pub message: String,
    /// Set when the failure is a size cap rather than bad input.
    pub cap_exceeded: bool,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        if !self.path.is_empty() {
            write!(f, "at {}: ", self.path)?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for LoadError {}

#[derive(Debug, Clone)]
pub struct Instance {
    pub carrier: CarrierRef,
    pub germ: GActionGerm,
    pub uniformity: Option<UnifBase>,
    pub metric: Option<FiniteMetric>,
    pub order: Option<OrderedCarrier>,
    pub subsets: BTreeMap<String, Subset>,
}

impl Instance {
    /// The declared uniformity, the metric uniformity, or the discrete one.
    pub fn unif(&self) -> UnifBase {
        if let Some(u) = &self.uniformity {
            u.clone()
        } else if let Some(m) = &self.metric {
            metric_uniformity(m)
        } else {
            UnifBase::discrete(&self.carrier)
        }
    }

    /// A named subset, or element names separated by commas, optionally
    /// wrapped in braces.
    pub fn subset(&self, spec: &str) -> Result<Subset, String> {
        if let Some(s) = self.subsets.get(spec) {
            return Ok(*s);
        }
        let inner = spec.trim();
        let inner = inner
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(inner);
        let names: Vec<&str> = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        self.carrier
            .subset_from_names(names)
            .map_err(|e| format!("set `{spec}`: {e}"))
    }
}

struct Loader<'a> {
    source: &'a str,
}

type Path = Vec<Seg>;

fn key(path: &Path, k: &str) -> Path {
    let mut p = path.clone();
    p.push(Seg::Key(k.to_string()));
    p
}

fn index(path: &Path, i: usize) -> Path {
    let mut p = path.clone();
    p.push(Seg::Index(i));
    p
}

impl Loader<'_> {
    fn fail(&self, path: &Path, message: impl Into<String>) -> LoadError {
        let (line, column) = locate(self.source, path).unwrap_or((1, 1));
        LoadError {
            line,
            column,
            path: path.iter().map(Seg::to_string).collect(),
            message: message.into(),
            cap_exceeded: false,
        }
    }

    fn core(&self, path: &Path, e: Error) -> LoadError {
        let cap = matches!(e, Error::ResourceCap { .. });
        LoadError {
            cap_exceeded: cap,
            ..self.fail(path, e.to_string())
        }
    }

    fn array<'v>(&self, v: &'v Value, path: &Path) -> Result<&'v Vec<Value>, LoadError> {
        v.as_array()
            .ok_or_else(|| self.fail(path, "expected an array"))
    }

    fn string<'v>(&self, v: &'v Value, path: &Path) -> Result<&'v str, LoadError> {
        v.as_str()
            .ok_or_else(|| self.fail(path, "expected a string"))
    }

    fn strings(&self, v: &Value, path: &Path) -> Result<Vec<String>, LoadError> {
        self.array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, s)| self.string(s, &index(path, i)).map(str::to_string))
            .collect()
    }

    fn point(&self, carrier: &CarrierRef, v: &Value, path: &Path) -> Result<usize, LoadError> {
        let name = self.string(v, path)?;
        carrier
            .index_of(name)
            .ok_or_else(|| self.fail(path, format!("unknown carrier element `{name}`")))
    }

    fn points(
        &self,
        carrier: &CarrierRef,
        v: &Value,
        path: &Path,
    ) -> Result<Vec<usize>, LoadError> {
        self.array(v, path)?
            .iter()
            .enumerate()
            .map(|(i, x)| self.point(carrier, x, &index(path, i)))
            .collect()
    }

    fn element(&self, group: &FiniteGroup, v: &Value, path: &Path) -> Result<usize, LoadError> {
        let name = self.string(v, path)?;
        group
            .index_of(name)
            .ok_or_else(|| self.fail(path, format!("unknown group element `{name}`")))
    }

    fn permutation(
        &self,
        carrier: &CarrierRef,
        v: &Value,
        path: &Path,
    ) -> Result<Vec<usize>, LoadError> {
        let images = self.points(carrier, v, path)?;
        if images.len() != carrier.len() {
            return Err(self.fail(
                path,
                format!(
                    "{} images for {} carrier elements",
                    images.len(),
                    carrier.len()
                ),
            ));
        }
        let mut seen = vec![false; images.len()];
        for (i, &y) in images.iter().enumerate() {
            if std::mem::replace(&mut seen[y], true) {
                return Err(self.fail(
                    &index(path, i),
                    format!("`{}` is hit twice", carrier.name(y)),
                ));
            }
        }
        Ok(images)
    }

    fn group(
        &self,
        doc: &serde_json::Map<String, Value>,
        carrier: &CarrierRef,
    ) -> Result<(FiniteGroup, Vec<Vec<usize>>), LoadError> {
        let root = Path::new();
        let Some(g) = doc.get("group") else {
            if doc.contains_key("action") {
                return Err(self.fail(&key(&root, "action"), "an action needs a group"));
            }
            let act = vec![(0..carrier.len()).collect()];
            return Ok((FiniteGroup::trivial(), act));
        };
        let gpath = key(&root, "group");
        let obj = g
            .as_object()
            .ok_or_else(|| self.fail(&gpath, "expected an object"))?;
        if let Some(gens) = obj.get("generators") {
            if doc.contains_key("action") {
                return Err(self.fail(
                    &key(&root, "action"),
                    "the action is determined by the generators; remove it",
                ));
            }
            let path = key(&gpath, "generators");
            let mut parsed = Vec::new();
            for (i, entry) in self.array(gens, &path)?.iter().enumerate() {
                let p = index(&path, i);
                let name = entry
                    .get("name")
                    .ok_or_else(|| self.fail(&p, "generator needs a `name`"))
                    .and_then(|n| self.string(n, &key(&p, "name")))?;
                let perm = entry
                    .get("perm")
                    .ok_or_else(|| self.fail(&p, "generator needs a `perm`"))
                    .and_then(|v| self.permutation(carrier, v, &key(&p, "perm")))?;
                parsed.push((name.to_string(), perm));
            }
            return FiniteGroup::from_generators(carrier.len(), &parsed, DEFAULT_GROUP_CAP)
                .map_err(|e| self.core(&path, e));
        }
        let epath = key(&gpath, "elements");
        let names = obj
            .get("elements")
            .ok_or_else(|| {
                self.fail(
                    &gpath,
                    "group needs `elements` and `table`, or `generators`",
                )
            })
            .and_then(|v| self.strings(v, &epath))?;
        let tpath = key(&gpath, "table");
        let rows = obj
            .get("table")
            .ok_or_else(|| self.fail(&gpath, "group needs a `table`"))
            .and_then(|v| self.array(v, &tpath))?;
        if rows.len() != names.len() {
            return Err(self.fail(
                &tpath,
                format!("{} rows for {} elements", rows.len(), names.len()),
            ));
        }
        let lookup = |v: &Value, p: &Path| -> Result<usize, LoadError> {
            let s = self.string(v, p)?;
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| self.fail(p, format!("unknown group element `{s}`")))
        };
        let mut table = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            let rp = index(&tpath, i);
            let cells = self.array(row, &rp)?;
            if cells.len() != names.len() {
                return Err(self.fail(
                    &rp,
                    format!("{} entries for {} elements", cells.len(), names.len()),
                ));
            }
            table.push(
                cells
                    .iter()
                    .enumerate()
                    .map(|(j, c)| lookup(c, &index(&rp, j)))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let group = FiniteGroup::from_table(names, table).map_err(|e| self.core(&tpath, e))?;

        let apath = key(&root, "action");
        let act = match doc.get("action") {
            None if carrier.len() == 1 || group.order() == 1 => {
                vec![(0..carrier.len()).collect(); group.order()]
            }
            None => return Err(self.fail(&root, "a group given by a table needs an `action`")),
            Some(a) => {
                let map = a
                    .as_object()
                    .ok_or_else(|| self.fail(&apath, "expected an object"))?;
                let mut act = vec![None; group.order()];
                for (g, images) in map {
                    let p = key(&apath, g);
                    let gi = group
                        .index_of(g)
                        .ok_or_else(|| self.fail(&p, format!("unknown group element `{g}`")))?;
                    act[gi] = Some(self.permutation(carrier, images, &p)?);
                }
                act.into_iter()
                    .enumerate()
                    .map(|(g, p)| {
                        p.ok_or_else(|| {
                            self.fail(&apath, format!("no permutation for `{}`", group.name(g)))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        Ok((group, act))
    }

    fn entourage(&self, carrier: &CarrierRef, v: &Value, path: &Path) -> Result<Rel, LoadError> {
        match v.as_str() {
            Some("diagonal") => return Ok(Rel::diagonal(carrier)),
            Some("full") => return Ok(Rel::full(carrier)),
            Some(other) => return Err(self.fail(path, format!("unknown entourage `{other}`"))),
            None => {}
        }
        let mut pairs = Vec::new();
        for (i, pair) in self.array(v, path)?.iter().enumerate() {
            let p = index(path, i);
            let xy = self.points(carrier, pair, &p)?;
            if xy.len() != 2 {
                return Err(self.fail(&p, "a pair has two elements"));
            }
            pairs.push((xy[0], xy[1]));
        }
        Rel::from_pairs(carrier, pairs).map_err(|e| self.core(path, e))
    }

    fn rational(&self, v: &Value, path: &Path) -> Result<Rat, LoadError> {
        match v {
            Value::String(s) => parse_rat(s).map_err(|e| self.core(path, e)),
            Value::Number(n) => n
                .as_i64()
                .map(|k| Rat::from_integer(k.into()))
                .ok_or_else(|| self.fail(path, "use an integer or a \"p/q\" string")),
            _ => Err(self.fail(path, "expected a rational")),
        }
    }

    fn load(&self) -> Result<Instance, LoadError> {
        let root = Path::new();
        let value: Value = serde_json::from_str(self.source).map_err(|e| LoadError {
            line: e.line(),
            column: e.column(),
            path: String::new(),
            message: format!("malformed JSON: {e}"),
            cap_exceeded: false,
        })?;
        let doc = value
            .as_object()
            .ok_or_else(|| self.fail(&root, "expected an object"))?;
        const KNOWN: [&str; 8] = [
            "carrier",
            "group",
            "action",
            "neighborhood_base",
            "uniformity",
            "metric",
            "order",
            "subsets",
        ];
        if let Some(k) = doc.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(self.fail(&key(&root, k), format!("unknown field `{k}`")));
        }
        if doc.contains_key("uniformity") && doc.contains_key("metric") {
            return Err(self.fail(
                &key(&root, "metric"),
                "give either `uniformity` or `metric`, not both",
            ));
        }

        let cpath = key(&root, "carrier");
        let names = doc
            .get("carrier")
            .ok_or_else(|| self.fail(&root, "missing `carrier`"))
            .and_then(|v| self.strings(v, &cpath))?;
        let carrier = Carrier::new(names).map_err(|e| self.core(&cpath, e))?;

        let (group, act) = self.group(doc, &carrier)?;
        let group = Arc::new(group);

        let bpath = key(&root, "neighborhood_base");
        let base = match doc.get("neighborhood_base") {
            None => NeighborhoodBase::discrete(&group),
            Some(v) => {
                let mut levels = Vec::new();
                for (i, level) in self.array(v, &bpath)?.iter().enumerate() {
                    let lp = index(&bpath, i);
                    let mut set = GroupSet::EMPTY;
                    for (j, g) in self.array(level, &lp)?.iter().enumerate() {
                        set = set.with(self.element(&group, g, &index(&lp, j))?);
                    }
                    levels.push(set);
                }
                NeighborhoodBase::new(&group, levels).map_err(|e| self.core(&bpath, e))?
            }
        };
        let germ = GActionGerm::new(group, base, carrier.clone(), act)
            .map_err(|e| self.core(&key(&root, "action"), e))?;

        let upath = key(&root, "uniformity");
        let uniformity = match doc.get("uniformity") {
            None => None,
            Some(v) => {
                let basis = self
                    .array(v, &upath)?
                    .iter()
                    .enumerate()
                    .map(|(i, e)| self.entourage(&carrier, e, &index(&upath, i)))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(UnifBase::new(&carrier, basis).map_err(|e| self.core(&upath, e))?)
            }
        };

        let mpath = key(&root, "metric");
        let metric = match doc.get("metric") {
            None => None,
            Some(v) => {
                let mut rows = Vec::new();
                for (i, row) in self.array(v, &mpath)?.iter().enumerate() {
                    let rp = index(&mpath, i);
                    rows.push(
                        self.array(row, &rp)?
                            .iter()
                            .enumerate()
                            .map(|(j, d)| self.rational(d, &index(&rp, j)))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                Some(FiniteMetric::new(&carrier, rows).map_err(|e| self.core(&mpath, e))?)
            }
        };

        let opath = key(&root, "order");
        let order = match doc.get("order") {
            None => None,
            Some(v) => {
                let order = self.points(&carrier, v, &opath)?;
                Some(OrderedCarrier::new(&carrier, order).map_err(|e| self.core(&opath, e))?)
            }
        };

        let spath = key(&root, "subsets");
        let mut subsets = BTreeMap::new();
        if let Some(v) = doc.get("subsets") {
            let map = v
                .as_object()
                .ok_or_else(|| self.fail(&spath, "expected an object"))?;
            for (name, members) in map {
                let p = key(&spath, name);
                let set = Subset::from_elements(self.points(&carrier, members, &p)?);
                subsets.insert(name.clone(), set);
            }
        }

        Ok(Instance {
            carrier,
            germ,
            uniformity,
            metric,
            order,
            subsets,
        })
    }
}

pub fn load_str(source: &str) -> Result<Instance, LoadError> {
    Loader { source }.load()
}

/// Line and column (both 1-based) of the value at `path` in well-formed
/// JSON text.
pub fn locate(source: &str, path: &[Seg]) -> Option<(usize, usize)> {
    let bytes = source.as_bytes();
    let mut pos = skip_ws(bytes, 0);
    for seg in path {
        pos = match (seg, bytes.get(pos)?) {
            (Seg::Key(k), b'{') => find_key(bytes, pos, k)?,
            (Seg::Index(i), b'[') => find_index(bytes, pos, *i)?,
            _ => return None,
        };
    }
    let before = &source[..pos];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Some((line, column))
}

fn skip_ws(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

/// Index just past the string starting at `i`, with its decoded contents.
fn read_string(b: &[u8], i: usize) -> Option<(usize, String)> {
    let mut j = i + 1;
    while j < b.len() {
        match b[j] {
            b'\\' => j += 2,
            b'"' => {
                let text: String = serde_json::from_slice(&b[i..=j]).ok()?;
                return Some((j + 1, text));
            }
            _ => j += 1,
        }
    }
    None
}

/// Index just past the value starting at `i`.
fn skip_value(b: &[u8], i: usize) -> Option<usize> {
    match *b.get(i)? {
        b'"' => read_string(b, i).map(|(j, _)| j),
        b'{' | b'[' => {
            let mut depth = 0usize;
            let mut j = i;
            while j < b.len() {
                match b[j] {
                    b'"' => {
                        j = read_string(b, j)?.0;
                        continue;
                    }
                    b'{' | b'[' => depth += 1,
                    b'}' | b']' => {
                        depth -= 1;
                        if depth == 0 {
                            return Some(j + 1);
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            None
        }
        _ => {
            let mut j = i;
            while j < b.len() && !matches!(b[j], b',' | b'}' | b']') && !b[j].is_ascii_whitespace()
            {
                j += 1;
            }
            Some(j)
        }
    }
}

fn find_key(b: &[u8], open: usize, want: &str) -> Option<usize> {
    let mut i = skip_ws(b, open + 1);
    while b.get(i)? != &b'}' {
        let (after, k) = read_string(b, i)?;
        i = skip_ws(b, after);
        i = skip_ws(b, i + 1); // ':'
        if k == want {
            return Some(i);
        }
        i = skip_ws(b, skip_value(b, i)?);
        if b.get(i)? == &b',' {
            i = skip_ws(b, i + 1);
        }
    }
    None
}

fn find_index(b: &[u8], open: usize, want: usize) -> Option<usize> {
    let mut i = skip_ws(b, open + 1);
    let mut k = 0;
    while b.get(i)? != &b']' {
        if k == want {
            return Some(i);
        }
        i = skip_ws(b, skip_value(b, i)?);
        if b.get(i)? == &b',' {
            i = skip_ws(b, i + 1);
        }
        k += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z3: &str = r#"{
  "carrier": ["0", "1", "2"],
  "group": {"generators": [{"name": "g", "perm": ["1", "2", "0"]}]},
  "neighborhood_base": [["e", "g", "g^2"]],
  "subsets": {"A": ["0"], "B": ["1"]}
}"#;

    #[test]
    fn loads_generator_fixture() {
        let inst = load_str(Z3).unwrap();
        assert_eq!(inst.germ.group().order(), 3);
        assert_eq!(inst.subset("A").unwrap(), Subset::singleton(0));
        assert_eq!(inst.subset("{1,2}").unwrap(), Subset::from_elements([1, 2]));
        assert!(inst.subset("7").is_err());
    }

    #[test]
    fn locates_nested_values() {
        let key = |k: &str| Seg::Key(k.into());
        assert_eq!(locate(Z3, &[key("carrier")]), Some((2, 14)));
        assert_eq!(locate(Z3, &[key("carrier"), Seg::Index(2)]), Some((2, 25)));
        assert_eq!(
            locate(
                Z3,
                &[key("neighborhood_base"), Seg::Index(0), Seg::Index(1)]
            ),
            Some((4, 31))
        );
        assert_eq!(locate(Z3, &[key("missing")]), None);
    }

    #[test]
    fn unknown_names_point_at_the_value() {
        let bad = Z3.replace(r#""B": ["1"]"#, r#""B": ["9"]"#);
        let e = load_str(&bad).unwrap_err();
        assert_eq!((e.line, e.column), (5, 33));
        assert!(e.message.contains("`9`"));
    }

    #[test]
    fn syntax_errors_keep_serde_positions() {
        let e = load_str("{\n  \"carrier\": [\"a\",]\n}").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.starts_with("malformed JSON"));
    }

    #[test]
    fn table_group_requires_action() {
        let src = r#"{"carrier": ["a", "b"],
 "group": {"elements": ["e", "s"], "table": [["e", "s"], ["s", "e"]]}}"#;
        assert!(load_str(src).unwrap_err().message.contains("action"));
        let src = src.replace(
            "]]}}",
            r#"]]}, "action": {"e": ["a", "b"], "s": ["b", "a"]}}"#,
        );
        let inst = load_str(&src).unwrap();
        assert_eq!(inst.germ.permutations()[1], vec![1, 0]);
    }
}
