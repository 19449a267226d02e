//! Streaming reader for MediaWiki XML exports.
//!
//! Only one page is held in memory at a time. Pages outside namespace 0 are
//! skipped without buffering their text.

use std::collections::HashSet;
use std::io::BufRead;

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use super::{canonical_title, RawPage};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("invalid page ending at byte {offset}: {message}")]
    InvalidPage { offset: u64, message: String },
}

impl ParseError {
    pub fn offset(&self) -> u64 {
        match self {
            ParseError::Xml { offset, .. } | ParseError::InvalidPage { offset, .. } => *offset,
        }
    }
}

/// Reads every namespace-0 page of an export into memory.
pub fn parse_export<R: BufRead>(input: R) -> Result<Vec<RawPage>, ParseError> {
    ExportReader::new(input).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Title,
    Ns,
    PageId,
    Text,
    Other,
}

#[derive(Default)]
struct PageBuilder {
    title: String,
    ns: Option<String>,
    page_id: Option<String>,
    redirect: Option<String>,
    text: String,
    in_revision: bool,
    skip_text: bool,
}

/// Iterator over the namespace-0 pages of an export, yielding them as they
/// are completed.
pub struct ExportReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    depth: usize,
    page: Option<PageBuilder>,
    field: Field,
    seen_ids: HashSet<u64>,
    done: bool,
}

impl<R: BufRead> ExportReader<R> {
    pub fn new(input: R) -> Self {
        let mut reader = Reader::from_reader(input);
        let config = reader.config_mut();
        config.trim_text(false);
        config.check_end_names = true;
        ExportReader {
            reader,
            buf: Vec::with_capacity(8 * 1024),
            depth: 0,
            page: None,
            field: Field::Other,
            seen_ids: HashSet::new(),
            done: false,
        }
    }

    fn xml_error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Xml {
            offset: self.reader.error_position().max(self.reader.buffer_position()),
            message: message.into(),
        }
    }

    fn invalid(&self, message: impl Into<String>) -> ParseError {
        ParseError::InvalidPage {
            offset: self.reader.buffer_position(),
            message: message.into(),
        }
    }

    fn open(&mut self, start: &BytesStart<'_>, empty: bool) -> Result<(), ParseError> {
        let name = start.local_name();
        let name = name.as_ref();
        match (&mut self.page, name) {
            (None, b"page") => {
                if !empty {
                    self.page = Some(PageBuilder::default());
                }
            }
            (Some(_), b"redirect") => {
                let mut target = None;
                for attr in start.attributes().with_checks(false) {
                    let attr = attr.map_err(|e| self.xml_error(e.to_string()))?;
                    if attr.key.local_name().as_ref() == b"title" {
                        let value = attr.unescape_value().map_err(|e| self.xml_error(e.to_string()))?;
                        target = Some(value.into_owned());
                    }
                }
                if let (Some(page), Some(t)) = (self.page.as_mut(), target) {
                    page.redirect = Some(t);
                }
            }
            (Some(page), b"revision") => page.in_revision = !empty,
            (Some(page), field) if !empty => {
                self.field = match field {
                    b"title" if !page.in_revision => Field::Title,
                    b"ns" if !page.in_revision => Field::Ns,
                    b"id" if !page.in_revision => Field::PageId,
                    b"text" if page.in_revision && !page.skip_text => {
                        // Exports with several revisions keep the last one.
                        page.text.clear();
                        Field::Text
                    }
                    _ => Field::Other,
                };
            }
            _ => {}
        }
        Ok(())
    }

    fn close(&mut self, name: &[u8]) -> Result<Option<RawPage>, ParseError> {
        self.field = Field::Other;
        let Some(page) = self.page.as_mut() else {
            return Ok(None);
        };
        match name {
            b"revision" => page.in_revision = false,
            b"ns" => {
                // Skip the text of other namespaces as early as possible.
                page.skip_text = page.ns.as_deref().map(str::trim) != Some("0");
            }
            b"page" => {
                let page = self.page.take().unwrap_or_default();
                return self.finish(page);
            }
            _ => {}
        }
        Ok(None)
    }

    fn finish(&mut self, page: PageBuilder) -> Result<Option<RawPage>, ParseError> {
        let ns = page.ns.as_deref().map(str::trim).unwrap_or("0");
        if ns != "0" {
            return Ok(None);
        }
        let title = canonical_title(&page.title);
        if title.is_empty() {
            return Err(self.invalid("page without a title"));
        }
        let page_id = match page.page_id.as_deref().map(str::trim) {
            Some(id) => id
                .parse::<u64>()
                .map_err(|_| self.invalid(format!("page id {id:?} of {title:?} is not an integer")))?,
            None => return Err(self.invalid(format!("page {title:?} has no id"))),
        };
        if !self.seen_ids.insert(page_id) {
            return Err(self.invalid(format!("duplicate page id {page_id}")));
        }
        let redirect_target = page
            .redirect
            .as_deref()
            .map(redirect_title)
            .or_else(|| redirect_from_text(&page.text))
            .filter(|t| !t.is_empty());
        Ok(Some(RawPage {
            title,
            page_id,
            wikitext: page.text,
            redirect_target,
        }))
    }

    fn push_text(&mut self, text: &str) {
        let Some(page) = self.page.as_mut() else {
            return;
        };
        let dest = match self.field {
            Field::Title => &mut page.title,
            Field::Text => &mut page.text,
            Field::Ns => page.ns.get_or_insert_with(String::new),
            Field::PageId => page.page_id.get_or_insert_with(String::new),
            Field::Other => return,
        };
        dest.push_str(text);
    }

    fn next_page(&mut self) -> Result<Option<RawPage>, ParseError> {
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event.into_owned(),
                Err(e) => return Err(self.xml_error(e.to_string())),
            };
            match event {
                Event::Start(start) => {
                    self.depth += 1;
                    self.open(&start, false)?;
                }
                Event::Empty(start) => self.open(&start, true)?,
                Event::End(end) => {
                    self.depth = self.depth.saturating_sub(1);
                    if let Some(page) = self.close(end.local_name().as_ref())? {
                        return Ok(Some(page));
                    }
                }
                Event::Text(text) => {
                    if self.field != Field::Other {
                        let text = text.xml10_content().map_err(|e| self.xml_error(e.to_string()))?;
                        self.push_text(&text);
                    }
                }
                Event::CData(data) => {
                    if self.field != Field::Other {
                        let text = data.decode().map_err(|e| self.xml_error(e.to_string()))?;
                        self.push_text(&text);
                    }
                }
                Event::GeneralRef(reference) => {
                    if self.field == Field::Other {
                        continue;
                    }
                    if let Some(c) = reference
                        .resolve_char_ref()
                        .map_err(|e| self.xml_error(e.to_string()))?
                    {
                        let mut tmp = [0u8; 4];
                        self.push_text(c.encode_utf8(&mut tmp));
                    } else {
                        let name = reference.decode().map_err(|e| self.xml_error(e.to_string()))?;
                        match resolve_predefined_entity(&name) {
                            Some(resolved) => self.push_text(resolved),
                            None => return Err(self.xml_error(format!("unknown entity &{name};"))),
                        }
                    }
                }
                Event::Eof => {
                    if self.depth > 0 || self.page.is_some() {
                        return Err(self.xml_error("unexpected end of input inside an element"));
                    }
                    return Ok(None);
                }
                Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            }
        }
    }
}

impl<R: BufRead> Iterator for ExportReader<R> {
    type Item = Result<RawPage, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_page() {
            Ok(Some(page)) => Some(Ok(page)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn redirect_title(raw: &str) -> String {
    let without_fragment = raw.split('#').next().unwrap_or("");
    canonical_title(without_fragment)
}

/// Older exports carry no `<redirect>` element; fall back to the
/// `#REDIRECT [[Target]]` line.
fn redirect_from_text(text: &str) -> Option<String> {
    let trimmed = text.trim_start();
    let head = trimmed.get(..9)?;
    if !head.eq_ignore_ascii_case("#redirect") {
        return None;
    }
    let rest = &trimmed[9..];
    let open = rest.find("[[")?;
    if !rest[..open].chars().all(|c| c.is_whitespace() || c == ':') {
        return None;
    }
    let inner = &rest[open + 2..];
    let close = inner.find("]]")?;
    let target = inner[..close].split('|').next().unwrap_or("");
    Some(redirect_title(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn export(pages: &str) -> String {
        format!(
            "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\">\n\
             <siteinfo><sitename>T</sitename></siteinfo>\n{pages}</mediawiki>"
        )
    }

    fn page(title: &str, ns: u32, id: u64, text: &str) -> String {
        format!(
            "<page><title>{title}</title><ns>{ns}</ns><id>{id}</id>\
             <revision><id>{}</id><text xml:space=\"preserve\">{text}</text></revision></page>\n",
            id + 100
        )
    }

    #[test]
    fn namespace_filter_keeps_articles_only() {
        let xml = export(
            &[
                page("Alpha", 0, 1, "a"),
                page("Beta", 0, 2, "b"),
                page("Talk:Alpha", 1, 3, "talk"),
                page("Gamma", 0, 4, "c"),
            ]
            .concat(),
        );
        let pages = parse_export(xml.as_bytes()).unwrap();
        let titles: Vec<_> = pages.iter().map(|p| p.title.as_str()).collect();
        assert_eq!(titles, ["Alpha", "Beta", "Gamma"]);
    }

    #[test]
    fn redirect_element_sets_target() {
        let xml = export(
            "<page><title>X alias</title><ns>0</ns><id>9</id><redirect title=\"X\" />\
             <revision><id>1</id><text>#REDIRECT [[X]]</text></revision></page>",
        );
        let pages = parse_export(xml.as_bytes()).unwrap();
        assert_eq!(pages[0].redirect_target.as_deref(), Some("X"));
    }

    #[test]
    fn redirect_text_fallback() {
        let xml = export(&page("Y", 0, 1, "#redirect [[target_page#Section]]"));
        let pages = parse_export(xml.as_bytes()).unwrap();
        assert_eq!(pages[0].redirect_target.as_deref(), Some("Target page"));
    }

    #[test]
    fn entities_and_revision_ids_are_handled() {
        let xml = export(&page("Q", 0, 5, "a &lt;ref&gt; &amp; &#228;"));
        let pages = parse_export(xml.as_bytes()).unwrap();
        assert_eq!(pages[0].page_id, 5);
        assert_eq!(pages[0].wikitext, "a <ref> & ä");
    }

    #[test]
    fn empty_stream_is_empty_list() {
        assert!(parse_export(&b""[..]).unwrap().is_empty());
        assert!(parse_export(export("").as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn malformed_xml_reports_offset() {
        let xml = "<mediawiki><page><title>A</title></revision></page></mediawiki>";
        let err = parse_export(xml.as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::Xml { .. }));
        assert!(err.offset() > 0 && err.offset() <= xml.len() as u64);
    }

    #[test]
    fn truncated_stream_is_an_error() {
        let xml = "<mediawiki><page><title>A</title><ns>0</ns><id>1</id><revision><text>abc";
        assert!(parse_export(xml.as_bytes()).is_err());
    }

    #[test]
    fn duplicate_page_ids_rejected() {
        let xml = export(&[page("A", 0, 1, "a"), page("B", 0, 1, "b")].concat());
        assert!(matches!(
            parse_export(xml.as_bytes()),
            Err(ParseError::InvalidPage { .. })
        ));
    }

    #[test]
    fn streaming_yields_pages_before_the_end() {
        // The second page is broken; the first must still come out.
        let xml = format!("<mediawiki>{}<page><title>B</title></wrong>", page("A", 0, 1, "x"));
        let mut reader = ExportReader::new(xml.as_bytes());
        assert_eq!(reader.next().unwrap().unwrap().title, "A");
        assert!(reader.next().unwrap().is_err());
        assert!(reader.next().is_none());
    }
}
