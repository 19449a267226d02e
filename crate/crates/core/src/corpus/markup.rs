//! Wikitext to clean prose.
//!
//! Templates, tables, comments, references, file and category links are
//! dropped. Prose wikilinks are replaced by their anchor text and recorded
//! as [`LinkOccurrence`]s at the anchor's character offset. Headings stay in
//! the text as bare title lines and are also returned as
//! [`HeadingMarker`]s so the snippet segmenter can keep them out of
//! paragraphs.
//!
//! The output never contains `[[`, `]]`, `{{` or `}}`: the writer refuses
//! to emit a bracket or brace directly after the same character.

use std::collections::HashMap;

use super::{canonical_title, LinkOccurrence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadingMarker {
    /// Number of `=` on each side, clamped to 1..=6.
    pub level: u8,
    pub title: String,
    /// `[start, end)` of the heading's title line in the clean text.
    pub span: (u32, u32),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stripped {
    pub text: String,
    /// Length of `text` in characters.
    pub char_len: u32,
    pub links: Vec<LinkOccurrence>,
    pub headings: Vec<HeadingMarker>,
    /// Unbalanced constructs that were dropped up to the end of their line.
    pub warnings: u32,
}

/// Strips `wikitext` down to prose.
pub fn strip_markup(wikitext: &str) -> Stripped {
    let mut scanner = Scanner::new(wikitext, Mode::Document, 0);
    scanner.run();
    let Scanner {
        out,
        links,
        headings,
        warnings,
        ..
    } = scanner;
    let len = out.chars;
    let links = links
        .into_iter()
        .map(|(target_title, anchor_text, char_offset)| LinkOccurrence {
            position_fraction: f64::from(char_offset) / f64::from(len),
            target_title,
            anchor_text,
            char_offset,
            dangling: false,
        })
        .collect();
    Stripped {
        text: out.text,
        char_len: len,
        links,
        headings,
        warnings,
    }
}

/// Nesting beyond this renders anchors without interpreting their markup.
const MAX_NESTING: u32 = 8;

const DROPPED_TAGS: &[&str] = &[
    "ref",
    "references",
    "gallery",
    "math",
    "timeline",
    "syntaxhighlight",
    "source",
    "score",
    "imagemap",
    "templatedata",
    "templatestyles",
    "graph",
    "mapframe",
    "maplink",
    "chem",
    "hiero",
    "inputbox",
    "categorytree",
];

/// Link prefixes whose target is not an article. Links into these render
/// their text but produce no occurrence.
const OTHER_NAMESPACES: &[&str] = &[
    "talk",
    "user",
    "user talk",
    "wikipedia",
    "wp",
    "project",
    "help",
    "template",
    "portal",
    "special",
    "draft",
    "module",
    "mediawiki",
    "wiktionary",
    "wikt",
    "commons",
    "wikisource",
    "wikiquote",
    "wikinews",
    "wikivoyage",
    "wikidata",
    "d",
    "s",
    "q",
    "n",
    "v",
    "w",
    "meta",
    "m",
    "species",
    "book",
    "timedtext",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Full article: line-level constructs are recognized and links recorded.
    Document,
    /// Anchor or heading text: inline markup only, links not recorded.
    Inline,
}

#[derive(Default)]
struct Writer {
    text: String,
    chars: u32,
}

impl Writer {
    fn push(&mut self, c: char) {
        if matches!(c, '[' | ']' | '{' | '}') && self.text.ends_with(c) {
            return;
        }
        self.text.push(c);
        self.chars += 1;
    }

    fn push_str(&mut self, s: &str) {
        for c in s.chars() {
            self.push(c);
        }
    }

    fn ends_with_newline(&self) -> bool {
        self.text.is_empty() || self.text.ends_with('\n')
    }
}

/// Byte positions of matched open/close pairs, found with a stack so that
/// unterminated openers cost one pass instead of one scan each.
#[derive(Default)]
struct Matches {
    templates: HashMap<usize, usize>,
    links: HashMap<usize, usize>,
    /// Line-start byte of a `{|` line to the byte just past its `|}` line.
    tables: HashMap<usize, usize>,
}

impl Matches {
    fn compute(src: &str, mode: Mode) -> Self {
        let bytes = src.as_bytes();
        let mut m = Matches::default();
        let mut tpl = Vec::new();
        let mut lnk = Vec::new();
        let mut i = 0;
        while i + 1 < bytes.len() {
            match (bytes[i], bytes[i + 1]) {
                (b'{', b'{') => {
                    tpl.push(i);
                    i += 2;
                }
                (b'}', b'}') => {
                    if let Some(open) = tpl.pop() {
                        m.templates.insert(open, i + 2);
                    }
                    i += 2;
                }
                (b'[', b'[') => {
                    lnk.push(i);
                    i += 2;
                }
                (b']', b']') => {
                    if let Some(open) = lnk.pop() {
                        m.links.insert(open, i + 2);
                    }
                    i += 2;
                }
                _ => i += 1,
            }
        }
        if mode == Mode::Document {
            let mut tables = Vec::new();
            let mut start = 0;
            while start < bytes.len() {
                let end = src[start..].find('\n').map_or(bytes.len(), |p| start + p);
                let line = src[start..end].trim_start();
                if line.starts_with("{|") {
                    tables.push(start);
                } else if line.starts_with("|}") {
                    if let Some(open) = tables.pop() {
                        m.tables.insert(open, end);
                    }
                }
                start = end + 1;
            }
        }
        m
    }
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    mode: Mode,
    depth: u32,
    matches: Matches,
    out: Writer,
    links: Vec<(String, String, u32)>,
    headings: Vec<HeadingMarker>,
    warnings: u32,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str, mode: Mode, depth: u32) -> Self {
        Scanner {
            src,
            pos: 0,
            mode,
            depth,
            matches: Matches::compute(src, mode),
            out: Writer::default(),
            links: Vec::new(),
            headings: Vec::new(),
            warnings: 0,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn line_end(&self, from: usize) -> usize {
        self.src[from..].find('\n').map_or(self.src.len(), |p| from + p)
    }

    /// Recovery for an unterminated construct: drop everything up to (not
    /// including) the next newline.
    fn drop_line(&mut self) {
        self.warnings += 1;
        self.pos = self.line_end(self.pos);
    }

    fn run(&mut self) {
        let mut line_start = true;
        while self.pos < self.src.len() {
            if line_start && self.mode == Mode::Document && self.line_construct() {
                continue;
            }
            line_start = false;
            let rest = self.rest();
            let c = rest.chars().next().unwrap_or('\0');
            match c {
                '\n' => {
                    self.out.push('\n');
                    self.pos += 1;
                    line_start = true;
                }
                '{' if rest.starts_with("{{") => self.skip_template(),
                '[' if rest.starts_with("[[") => self.link(),
                '[' => self.external_link(),
                ']' if rest.starts_with("]]") => self.pos += 2,
                '}' if rest.starts_with("}}") => self.pos += 2,
                '<' => self.tag(),
                '\'' if rest.starts_with("''") => self.apostrophes(),
                '_' if rest.starts_with("__") => self.magic_word(),
                '&' => self.entity(),
                _ => {
                    self.out.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }

    /// Handles tables, headings, rules and list markers at the start of a
    /// line. Returns true when the scanner moved on to another line.
    fn line_construct(&mut self) -> bool {
        let start = self.pos;
        let end = self.line_end(start);
        let line = &self.src[start..end];
        let trimmed = line.trim_start();
        if trimmed.starts_with("{|") {
            match self.matches.tables.get(&start) {
                Some(&table_end) => self.pos = table_end,
                None => self.drop_line(),
            }
            return true;
        }
        if line.starts_with('=') {
            if let Some((level, inner)) = heading_parts(line) {
                let title = self.render_inline(inner);
                let title = title.trim();
                if !title.is_empty() {
                    if !self.out.ends_with_newline() {
                        self.out.push('\n');
                    }
                    let span_start = self.out.chars;
                    self.out.push_str(title);
                    self.headings.push(HeadingMarker {
                        level,
                        title: title.to_string(),
                        span: (span_start, self.out.chars),
                    });
                }
                self.pos = end;
                return true;
            }
        }
        if trimmed.starts_with("----") && trimmed.trim_start_matches('-').trim().is_empty() {
            self.pos = end;
            return true;
        }
        let markers = line
            .bytes()
            .take_while(|b| matches!(b, b'*' | b'#' | b':' | b';'))
            .count();
        if markers > 0 {
            self.pos += markers;
            if self.src[self.pos..].starts_with(' ') {
                self.pos += 1;
            }
        }
        false
    }

    fn skip_template(&mut self) {
        match self.matches.templates.get(&self.pos) {
            Some(&end) => self.pos = end,
            None => self.drop_line(),
        }
    }

    fn link(&mut self) {
        let Some(&end) = self.matches.links.get(&self.pos) else {
            self.drop_line();
            return;
        };
        let inner = &self.src[self.pos + 2..end - 2];
        self.pos = end;

        let (target_raw, anchor_raw) = match inner.find('|') {
            Some(bar) => (&inner[..bar], Some(&inner[bar + 1..])),
            None => (inner, None),
        };
        let target_trim = target_raw.trim();
        let (leading_colon, target_trim) = match target_trim.strip_prefix(':') {
            Some(t) => (true, t.trim_start()),
            None => (false, target_trim),
        };

        let mut records = true;
        if let Some(colon) = target_trim.find(':') {
            let prefix = target_trim[..colon].trim().to_lowercase();
            let media = matches!(prefix.as_str(), "file" | "image" | "media" | "category");
            let interlanguage = is_language_prefix(&prefix);
            if !leading_colon && (media || interlanguage) {
                return;
            }
            if media || interlanguage || OTHER_NAMESPACES.contains(&prefix.as_str()) {
                records = false;
            }
        }

        let page = target_trim.split('#').next().unwrap_or("");
        if canonical_title(page).is_empty() || !is_valid_title(page) {
            records = false;
        }

        let anchor = match anchor_raw {
            Some(a) if a.trim().is_empty() => pipe_trick(target_trim),
            Some(a) => self.render_inline(a),
            None => target_trim.to_string(),
        };
        let trail_len = self.rest().bytes().take_while(u8::is_ascii_alphabetic).count();
        let trail = &self.src[self.pos..self.pos + trail_len];
        self.pos += trail_len;

        // Surrounding whitespace is written outside the occurrence so that
        // every recorded anchor starts inside a paragraph.
        let full = anchor + trail;
        let core = full.trim();
        let lead = &full[..full.len() - full.trim_start().len()];
        let tail = &full[lead.len() + core.len()..];
        self.out.push_str(lead);
        let offset = self.out.chars;
        let before = self.out.text.len();
        self.out.push_str(core);
        let written = &self.out.text[before..];
        if records && self.mode == Mode::Document && !written.trim().is_empty() {
            self.links.push((canonical_title(page), written.to_string(), offset));
        }
        self.out.push_str(tail);
    }

    fn external_link(&mut self) {
        let rest = self.rest();
        let body = &rest[1..];
        let is_url = ["http://", "https://", "ftp://", "//", "mailto:", "news:"]
            .iter()
            .any(|scheme| {
                body.get(..scheme.len())
                    .is_some_and(|head| head.eq_ignore_ascii_case(scheme))
            });
        let close = body.find([']', '\n']);
        match (is_url, close) {
            (true, Some(close)) if body.as_bytes()[close] == b']' => {
                let inner = &body[..close];
                self.pos += 1 + close + 1;
                if let Some(space) = inner.find(' ') {
                    let label = self.render_inline(&inner[space + 1..]);
                    self.out.push_str(&label);
                }
            }
            _ => {
                self.out.push('[');
                self.pos += 1;
            }
        }
    }

    fn tag(&mut self) {
        let rest = self.rest();
        if rest.starts_with("<!--") {
            match rest.find("-->") {
                Some(end) => self.pos += end + 3,
                None => self.drop_line(),
            }
            return;
        }
        let Some(tag) = parse_tag(rest) else {
            self.out.push('<');
            self.pos += 1;
            return;
        };
        let name = tag.name.to_ascii_lowercase();
        if DROPPED_TAGS.contains(&name.as_str()) {
            if tag.closing || tag.self_closing {
                self.pos += tag.len;
                return;
            }
            let after = self.pos + tag.len;
            match find_closing_tag(&self.src[after..], &name) {
                Some((_, close_end)) => self.pos = after + close_end,
                None => self.drop_line(),
            }
            return;
        }
        if name == "nowiki" && !tag.closing && !tag.self_closing {
            let after = self.pos + tag.len;
            match find_closing_tag(&self.src[after..], "nowiki") {
                Some((close_start, close_end)) => {
                    let raw = &self.src[after..after + close_start];
                    self.out.push_str(raw);
                    self.pos = after + close_end;
                }
                None => self.pos = after,
            }
            return;
        }
        // Formatting tags vanish; their content stays.
        self.pos += tag.len;
    }

    fn apostrophes(&mut self) {
        let run = self.rest().bytes().take_while(|&b| b == b'\'').count();
        let literal = match run {
            4 => 1,
            n if n > 5 => n - 5,
            _ => 0,
        };
        for _ in 0..literal {
            self.out.push('\'');
        }
        self.pos += run;
    }

    fn magic_word(&mut self) {
        let body = &self.rest()[2..];
        let word = body.bytes().take_while(u8::is_ascii_uppercase).count();
        if word > 0 && body[word..].starts_with("__") {
            self.pos += 2 + word + 2;
        } else {
            self.out.push('_');
            self.pos += 1;
        }
    }

    fn entity(&mut self) {
        let rest = self.rest();
        if let Some(semi) = rest[1..].find(';').filter(|&s| s > 0 && s <= 10) {
            let name = &rest[1..1 + semi];
            if let Some(c) = decode_entity(name) {
                self.out.push(c);
                self.pos += semi + 2;
                return;
            }
        }
        self.out.push('&');
        self.pos += 1;
    }

    /// Renders a nested fragment (anchor or heading title) to plain text.
    fn render_inline(&mut self, fragment: &str) -> String {
        if self.depth >= MAX_NESTING {
            return fragment.to_string();
        }
        let mut sub = Scanner::new(fragment, Mode::Inline, self.depth + 1);
        sub.run();
        self.warnings += sub.warnings;
        sub.out.text.replace('\n', " ")
    }
}

fn heading_parts(line: &str) -> Option<(u8, &str)> {
    let line = line.trim_end();
    let open = line.bytes().take_while(|&b| b == b'=').count();
    let close = line.bytes().rev().take_while(|&b| b == b'=').count();
    if open == line.len() {
        return None;
    }
    let level = open.min(close).min(6);
    if level == 0 {
        return None;
    }
    Some((level as u8, &line[level..line.len() - level]))
}

struct Tag<'a> {
    name: &'a str,
    len: usize,
    closing: bool,
    self_closing: bool,
}

/// Parses an HTML-ish tag at the start of `s`. The tag must close on the
/// same line.
fn parse_tag(s: &str) -> Option<Tag<'_>> {
    let body = &s[1..];
    let (closing, body) = match body.strip_prefix('/') {
        Some(b) => (true, b),
        None => (false, body),
    };
    let name_len = body.bytes().take_while(|b| b.is_ascii_alphanumeric()).count();
    if name_len == 0 || !body.as_bytes()[0].is_ascii_alphabetic() {
        return None;
    }
    let name = &body[..name_len];
    let after = &body[name_len..];
    if !after.starts_with(['>', '/', ' ', '\t']) {
        return None;
    }
    let gt = after.find(['>', '\n', '<'])?;
    if after.as_bytes()[gt] != b'>' {
        return None;
    }
    let self_closing = after[..gt].trim_end().ends_with('/');
    let len = 1 + usize::from(closing) + name_len + gt + 1;
    Some(Tag {
        name,
        len,
        closing,
        self_closing,
    })
}

/// Finds `</name>` (case-insensitive); returns its start and end offsets.
fn find_closing_tag(s: &str, name: &str) -> Option<(usize, usize)> {
    let bytes = s.as_bytes();
    let mut from = 0;
    while let Some(p) = s[from..].find("</") {
        let start = from + p;
        let name_start = start + 2;
        let name_end = name_start + name.len();
        if name_end <= bytes.len() && bytes[name_start..name_end].eq_ignore_ascii_case(name.as_bytes()) {
            if let Some(gt) = s[name_end..].find('>') {
                if s[name_end..name_end + gt].trim().is_empty() {
                    return Some((start, name_end + gt + 1));
                }
            }
        }
        from = start + 2;
    }
    None
}

fn decode_entity(name: &str) -> Option<char> {
    if let Some(num) = name.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        return char::from_u32(code).filter(|c| !c.is_control() || c.is_whitespace());
    }
    Some(match name {
        "nbsp" | "ensp" | "emsp" | "thinsp" => ' ',
        "amp" => '&',
        "lt" => '<',
        "gt" => '>',
        "quot" => '"',
        "apos" => '\'',
        "ndash" => '\u{2013}',
        "mdash" => '\u{2014}',
        "minus" => '\u{2212}',
        "deg" => '\u{b0}',
        "prime" => '\u{2032}',
        "Prime" => '\u{2033}',
        "times" => '\u{d7}',
        "hellip" => '\u{2026}',
        _ => return None,
    })
}

fn is_language_prefix(prefix: &str) -> bool {
    let (lang, _) = prefix.split_once('-').unwrap_or((prefix, ""));
    (2..=3).contains(&lang.len()) && lang.bytes().all(|b| b.is_ascii_lowercase()) && !OTHER_NAMESPACES.contains(&prefix)
}

fn is_valid_title(title: &str) -> bool {
    !title
        .chars()
        .any(|c| matches!(c, '[' | ']' | '{' | '}' | '|' | '<' | '>') || c.is_control())
}

/// `[[Foo (bar)|]]` renders as "Foo", `[[Paris, Texas|]]` as "Paris".
fn pipe_trick(target: &str) -> String {
    let base = target.rsplit_once(':').map_or(target, |(_, t)| t);
    let base = match (base.rfind(" ("), base.ends_with(')')) {
        (Some(p), true) => &base[..p],
        _ => base,
    };
    let base = base.split(',').next().unwrap_or(base);
    base.trim().to_string()
}
