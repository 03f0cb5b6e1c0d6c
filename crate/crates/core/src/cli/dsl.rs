//! Line-oriented problem files: declarations, optional `{ … }` bodies, and
//! `task` lines. This layer only checks syntax; names are resolved later.

use std::sync::LazyLock;

use regex::Regex;

use crate::kernel::parse::parse_at;

use super::CliError;

/// An expression with the position of its first character.
#[derive(Clone, Debug, PartialEq)]
pub struct Src {
    pub line: usize,
    pub col: usize,
    pub text: String,
}

/// A section: `[c1, c2, …]` or a combination of frame names such as `e3 - x*e1`.
#[derive(Clone, Debug, PartialEq)]
pub enum SectionSrc {
    List(Vec<Src>),
    Combination(Src),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Tangent { chart: String },
    Cotangent { chart: String, bivector: String },
    Bare { chart: String, rank: usize },
}

/// Which part of an IM triple an entry fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    D,
    L,
    R,
}

/// `basis = value` inside a tensor-like body; `basis` is `forms | frames`.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub basis: String,
    pub value: Src,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImEntry {
    pub part: Part,
    pub target: String,
    pub entry: Entry,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Chart { name: String, vars: Vec<String> },
    Algebroid { name: String, chart: String, frame: Vec<String>, anchors: Vec<(usize, String, Vec<Src>)>, brackets: Vec<(usize, String, String, SectionSrc)> },
    Builtin { name: String, kind: Builtin },
    Bivector { name: String, chart: String, entries: Vec<(usize, String, String, Src)> },
    Tensor { name: String, alg: String, p: usize, q: usize, entries: Vec<Entry> },
    Endo { name: String, chart: String, rows: Vec<Vec<Src>> },
    Im { name: String, alg: String, q: usize, p: usize, entries: Vec<ImEntry> },
    Coboundary { name: String, phi: String, alg: String },
    Splitting { name: String, alg: String, rows: Vec<Vec<Src>> },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Chart { name, .. }
            | Decl::Algebroid { name, .. }
            | Decl::Builtin { name, .. }
            | Decl::Bivector { name, .. }
            | Decl::Tensor { name, .. }
            | Decl::Endo { name, .. }
            | Decl::Im { name, .. }
            | Decl::Coboundary { name, .. }
            | Decl::Splitting { name, .. } => name,
        }
    }

    /// The namespace the name lives in.
    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Chart { .. } => "chart",
            Decl::Algebroid { .. } | Decl::Builtin { .. } => "algebroid",
            Decl::Bivector { .. } => "bivector",
            Decl::Tensor { .. } => "tensor",
            Decl::Endo { .. } => "endo",
            Decl::Im { .. } | Decl::Coboundary { .. } => "im",
            Decl::Splitting { .. } => "splitting",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaskLine {
    pub line: usize,
    pub command: String,
    pub args: Vec<String>,
    /// `expect-fail [CHECK…]`: the task passes when the checks fail.
    pub expect_fail: Option<Vec<String>>,
}

impl TaskLine {
    pub fn id(&self) -> String {
        let mut s = self.command.clone();
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProblemFile {
    pub decls: Vec<(usize, Decl)>,
    pub tasks: Vec<TaskLine>,
}

/// One logical statement with the position of its first character.
#[derive(Clone, Debug)]
struct Stmt {
    line: usize,
    col: usize,
    text: String,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, col, msg: msg.into() }
}

fn strip_comment(s: &str) -> &str {
    s.split('#').next().unwrap_or("")
}

/// Splits the source into headers with their bodies (statements).
fn blocks(src: &str) -> Result<Vec<(Stmt, Option<Vec<Stmt>>)>, CliError> {
    let lines: Vec<Vec<char>> = src.lines().map(|l| strip_comment(l).chars().collect()).collect();
    let mut out = Vec::new();
    let mut li = 0;
    while li < lines.len() {
        let chars = &lines[li];
        let text: String = chars.iter().collect();
        if text.trim().is_empty() {
            li += 1;
            continue;
        }
        let lead = chars.iter().take_while(|c| c.is_whitespace()).count();
        let open = top_level_brace(chars);
        let Some(open) = open else {
            out.push((Stmt { line: li + 1, col: lead + 1, text: text.trim().to_string() }, None));
            li += 1;
            continue;
        };
        let header: String = chars[..open].iter().collect();
        let head = Stmt { line: li + 1, col: lead + 1, text: header.trim().to_string() };
        let (start_line, start_col) = (li, open + 1);
        let mut body = Vec::new();
        let mut cur = String::new();
        let mut cur_pos: Option<(usize, usize)> = None;
        let mut depth = 1usize;
        let (mut l, mut c) = (start_line, start_col);
        let mut closed = false;
        'outer: while l < lines.len() {
            let row = &lines[l];
            while c <= row.len() {
                let ch = if c < row.len() { row[c] } else { '\n' };
                match ch {
                    '{' => depth += 1,
                    '}' => {
                        depth -= 1;
                        if depth == 0 {
                            flush(&mut body, &mut cur, &mut cur_pos);
                            let rest: String = row[c + 1..].iter().collect();
                            if !rest.trim().is_empty() {
                                return Err(perr(l + 1, c + 2, "unexpected text after `}`"));
                            }
                            closed = true;
                            li = l + 1;
                            break 'outer;
                        }
                    }
                    _ => {}
                }
                if depth == 1 && (ch == ';' || ch == '\n') {
                    flush(&mut body, &mut cur, &mut cur_pos);
                } else {
                    if cur_pos.is_none() && !ch.is_whitespace() {
                        cur_pos = Some((l + 1, c + 1));
                    }
                    if cur_pos.is_some() {
                        cur.push(ch);
                    }
                }
                c += 1;
            }
            l += 1;
            c = 0;
        }
        if !closed {
            return Err(perr(head.line, head.col, "unterminated `{` block"));
        }
        out.push((head, Some(body)));
    }
    Ok(out)
}

fn flush(body: &mut Vec<Stmt>, cur: &mut String, pos: &mut Option<(usize, usize)>) {
    if let Some((line, col)) = pos.take() {
        body.push(Stmt { line, col, text: cur.trim_end().to_string() });
    }
    cur.clear();
}

/// Position of the first `{` outside `[]` and `()`.
fn top_level_brace(chars: &[char]) -> Option<usize> {
    let mut depth = 0i32;
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            '{' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

macro_rules! re {
    ($name:ident, $pat:expr) => {
        static $name: LazyLock<Regex> = LazyLock::new(|| Regex::new($pat).expect("valid pattern"));
    };
}

const ID: &str = r"[A-Za-z_][A-Za-z0-9_]*";

re!(CHART, &format!(r"^chart\s+({ID})\s+(?:dim\s+(\d+)\s+)?vars\s+(.+)$"));
re!(ALG_BLOCK, &format!(r"^algebroid\s+({ID})\s+over\s+({ID})\s+rank\s+(\d+)\s+frame\s+(.+)$"));
re!(ALG_BUILTIN, &format!(r"^algebroid\s+({ID})\s*=\s*(tangent|cotangent|bare)\s+(.+)$"));
re!(BIVECTOR, &format!(r"^bivector\s+({ID})\s+on\s+({ID})$"));
re!(TENSOR, &format!(r"^tensor\s+({ID})\s+on\s+({ID})\s+type\s*\(\s*p\s*=\s*(\d+)\s*,\s*q\s*=\s*(\d+)\s*\)$"));
re!(ENDO, &format!(r"^endo\s+({ID})\s+on\s+({ID})\s*=\s*(\[.*\])$"));
re!(IM, &format!(r"^im\s+({ID})\s+on\s+({ID})\s+type\s*\(\s*q\s*=\s*(\d+)\s*,\s*p\s*=\s*(\d+)\s*\)$"));
re!(COBOUNDARY, &format!(r"^im\s+({ID})\s*=\s*coboundary\s+({ID})\s+on\s+({ID})$"));
re!(SPLITTING, &format!(r"^splitting\s+({ID})\s+on\s+({ID})\s*=\s*(\[.*\])$"));
re!(TASK, r"^task\s+(\S+)((?:\s+\S+)*)$");
re!(ANCHOR, &format!(r"^anchor\s+({ID})\s*=\s*(\[.*\])$"));
re!(BRACKET, &format!(r"^bracket\s*\[\s*({ID})\s*,\s*({ID})\s*\]\s*=\s*(.+)$"));
re!(PAIR, &format!(r"^\{{\s*({ID})\s*,\s*({ID})\s*\}}\s*=\s*(.+)$"));
re!(ENTRY, r"^([^=]*?)\s*=\s*(.+)$");
re!(IM_ENTRY, &format!(r"^(D|l|r)\s+({ID})\s*(?::\s*([^=]*?))?\s*=\s*(.+)$"));

fn names(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// Checks expression syntax (names are not resolved here).
fn expr(line: usize, col: usize, text: &str) -> Result<Src, CliError> {
    parse_at(text, None, line, col).map_err(|e| match e {
        crate::kernel::KernelError::Syntax { line, col, msg } => perr(line, col, msg),
        other => perr(line, col, other.to_string()),
    })?;
    Ok(Src { line, col, text: text.to_string() })
}

/// `[e1, e2, …]` starting at column `col`; commas split at bracket depth 0.
fn list(line: usize, col: usize, text: &str) -> Result<Vec<Src>, CliError> {
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(perr(line, col, "expected `[ … ]`"));
    }
    let inner_start = col + (text.len() - text.trim_start().len()) + 1;
    let inner = &t[1..t.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let chars: Vec<(usize, char)> = inner.char_indices().collect();
    for (k, &(i, ch)) in chars.iter().enumerate() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        let last = k + 1 == chars.len();
        if (ch == ',' && depth == 0) || last {
            let end = if ch == ',' && depth == 0 { i } else { inner.len() };
            let piece = &inner[start..end];
            let lead = piece.len() - piece.trim_start().len();
            let ccol = inner_start + inner[..start].chars().count() + piece[..lead].chars().count();
            if piece.trim().is_empty() {
                return Err(perr(line, ccol, "empty list entry"));
            }
            out.push(expr(line, ccol, piece.trim())?);
            start = end + 1;
        }
    }
    Ok(out)
}

/// `[[a, b], [c, d]]`.
fn matrix(line: usize, col: usize, text: &str) -> Result<Vec<Vec<Src>>, CliError> {
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(perr(line, col, "expected a matrix `[[…], …]`"));
    }
    let inner = &t[1..t.len() - 1];
    let base = col + (text.len() - text.trim_start().len()) + 1;
    let mut rows = Vec::new();
    let mut depth = 0i32;
    let mut open = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => {
                if depth == 0 {
                    open = Some(i);
                }
                depth += 1;
            }
            ']' => {
                depth -= 1;
                if depth == 0 {
                    let s = open.take().expect("balanced");
                    rows.push(list(line, base + inner[..s].chars().count(), &inner[s..=i])?);
                }
            }
            ',' | ' ' | '\t' if depth == 0 => {}
            _ if depth == 0 => return Err(perr(line, base + inner[..i].chars().count(), "expected `[` opening a row")),
            _ => {}
        }
    }
    if depth != 0 || rows.is_empty() {
        return Err(perr(line, col, "malformed matrix"));
    }
    Ok(rows)
}

fn body_of(head: &Stmt, body: Option<Vec<Stmt>>) -> Result<Vec<Stmt>, CliError> {
    body.ok_or_else(|| perr(head.line, head.col, "expected a `{ … }` body"))
}

fn no_body(head: &Stmt, body: &Option<Vec<Stmt>>) -> Result<(), CliError> {
    if body.is_some() {
        return Err(perr(head.line, head.col, "this declaration takes no `{ … }` body"));
    }
    Ok(())
}

fn num(s: &str) -> usize {
    s.parse().expect("regex guarantees digits")
}

fn entry(st: &Stmt) -> Result<Entry, CliError> {
    let c = ENTRY.captures(&st.text).ok_or_else(|| perr(st.line, st.col, "expected `basis = value`"))?;
    let v = c.get(2).unwrap();
    let col = st.col + st.text[..v.start()].chars().count();
    Ok(Entry { line: st.line, basis: c[1].trim().to_string(), value: expr(st.line, col, v.as_str())? })
}

pub fn parse(src: &str) -> Result<ProblemFile, CliError> {
    let mut pf = ProblemFile::default();
    for (head, body) in blocks(src)? {
        let h = head.text.as_str();
        let (line, col) = (head.line, head.col);
        let at = |m: regex::Match| col + h[..m.start()].chars().count();
        if let Some(c) = TASK.captures(h) {
            no_body(&head, &body)?;
            let mut args = names(&c[2]);
            let mut expect_fail = None;
            if let Some(k) = args.iter().position(|a| a == "expect-fail") {
                expect_fail = Some(args.split_off(k)[1..].to_vec());
            }
            pf.tasks.push(TaskLine { line, command: c[1].to_string(), args, expect_fail });
            continue;
        }
        let decl = if let Some(c) = CHART.captures(h) {
            no_body(&head, &body)?;
            let vars = names(&c[3]);
            if let Some(d) = c.get(2) {
                if num(d.as_str()) != vars.len() {
                    return Err(perr(line, at(d), format!("dim {} but {} variables listed", d.as_str(), vars.len())));
                }
            }
            Decl::Chart { name: c[1].to_string(), vars }
        } else if let Some(c) = ALG_BUILTIN.captures(h) {
            no_body(&head, &body)?;
            let rest = names(&c[3]);
            let kind = match (&c[2], rest.as_slice()) {
                ("tangent", [m]) => Builtin::Tangent { chart: m.clone() },
                ("cotangent", [m, p]) => Builtin::Cotangent { chart: m.clone(), bivector: p.clone() },
                ("bare", [m, n]) => Builtin::Bare {
                    chart: m.clone(),
                    rank: n.parse().map_err(|_| perr(line, at(c.get(3).unwrap()), "rank must be a number"))?,
                },
                (k, _) => {
                    let want = match k {
                        "tangent" => "tangent CHART",
                        "cotangent" => "cotangent CHART BIVECTOR",
                        _ => "bare CHART RANK",
                    };
                    return Err(perr(line, at(c.get(2).unwrap()), format!("expected `{want}`")));
                }
            };
            Decl::Builtin { name: c[1].to_string(), kind }
        } else if let Some(c) = ALG_BLOCK.captures(h) {
            let frame = names(&c[4]);
            if num(&c[3]) != frame.len() {
                return Err(perr(line, at(c.get(3).unwrap()), format!("rank {} but {} frame names", &c[3], frame.len())));
            }
            let mut anchors = Vec::new();
            let mut brackets = Vec::new();
            for st in body_of(&head, body)? {
                let bcol = |m: regex::Match| st.col + st.text[..m.start()].chars().count();
                if let Some(a) = ANCHOR.captures(&st.text) {
                    let v = a.get(2).unwrap();
                    anchors.push((st.line, a[1].to_string(), list(st.line, bcol(v), v.as_str())?));
                } else if let Some(b) = BRACKET.captures(&st.text) {
                    let v = b.get(3).unwrap();
                    let val = if v.as_str().starts_with('[') {
                        SectionSrc::List(list(st.line, bcol(v), v.as_str())?)
                    } else {
                        SectionSrc::Combination(expr(st.line, bcol(v), v.as_str())?)
                    };
                    brackets.push((st.line, b[1].to_string(), b[2].to_string(), val));
                } else {
                    return Err(perr(st.line, st.col, "expected `anchor e = [..]` or `bracket [e,f] = [..]`"));
                }
            }
            Decl::Algebroid { name: c[1].to_string(), chart: c[2].to_string(), frame, anchors, brackets }
        } else if let Some(c) = BIVECTOR.captures(h) {
            let mut entries = Vec::new();
            for st in body_of(&head, body)? {
                let b = PAIR.captures(&st.text).ok_or_else(|| perr(st.line, st.col, "expected `{x, y} = value`"))?;
                let v = b.get(3).unwrap();
                let vcol = st.col + st.text[..v.start()].chars().count();
                entries.push((st.line, b[1].to_string(), b[2].to_string(), expr(st.line, vcol, v.as_str())?));
            }
            Decl::Bivector { name: c[1].to_string(), chart: c[2].to_string(), entries }
        } else if let Some(c) = TENSOR.captures(h) {
            let entries = body_of(&head, body)?.iter().map(entry).collect::<Result<_, _>>()?;
            Decl::Tensor { name: c[1].to_string(), alg: c[2].to_string(), p: num(&c[3]), q: num(&c[4]), entries }
        } else if let Some(c) = ENDO.captures(h) {
            no_body(&head, &body)?;
            let m = c.get(3).unwrap();
            Decl::Endo { name: c[1].to_string(), chart: c[2].to_string(), rows: matrix(line, at(m), m.as_str())? }
        } else if let Some(c) = IM.captures(h) {
            let mut entries = Vec::new();
            for st in body_of(&head, body)? {
                let e = IM_ENTRY
                    .captures(&st.text)
                    .ok_or_else(|| perr(st.line, st.col, "expected `D|l|r TARGET [: basis] = value`"))?;
                let part = match &e[1] {
                    "D" => Part::D,
                    "l" => Part::L,
                    _ => Part::R,
                };
                let v = e.get(4).unwrap();
                let vcol = st.col + st.text[..v.start()].chars().count();
                let basis = e.get(3).map(|m| m.as_str().trim().to_string()).unwrap_or_default();
                let entry = Entry { line: st.line, basis, value: expr(st.line, vcol, v.as_str())? };
                entries.push(ImEntry { part, target: e[2].to_string(), entry });
            }
            Decl::Im { name: c[1].to_string(), alg: c[2].to_string(), q: num(&c[3]), p: num(&c[4]), entries }
        } else if let Some(c) = COBOUNDARY.captures(h) {
            no_body(&head, &body)?;
            Decl::Coboundary { name: c[1].to_string(), phi: c[2].to_string(), alg: c[3].to_string() }
        } else if let Some(c) = SPLITTING.captures(h) {
            no_body(&head, &body)?;
            let m = c.get(3).unwrap();
            Decl::Splitting { name: c[1].to_string(), alg: c[2].to_string(), rows: matrix(line, at(m), m.as_str())? }
        } else {
            let word = h.split_whitespace().next().unwrap_or("");
            let msg = match word {
                "chart" | "algebroid" | "bivector" | "tensor" | "endo" | "im" | "splitting" | "task" => {
                    format!("malformed `{word}` declaration")
                }
                _ => format!("unknown declaration `{word}`"),
            };
            return Err(perr(line, col, msg));
        };
        pf.decls.push((line, decl));
    }
    Ok(pf)
}
