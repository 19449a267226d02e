use super::{HeadingMarker, Snippet};

/// Heading paths never grow deeper than this; deeper sections share the
/// path of their depth-5 ancestor.
pub const MAX_HEADING_DEPTH: usize = 5;

/// Splits clean text into paragraphs. A paragraph ends at a blank line or a
/// heading line; the heading stack in force at its start becomes its path.
pub fn segment_snippets(article_title: &str, clean_text: &str, headings: &[HeadingMarker]) -> Vec<Snippet> {
    let mut snippets = Vec::new();
    let mut stack: Vec<(usize, &str)> = Vec::new();
    let mut next_heading = headings.iter().peekable();
    // (byte start, char start) of the open paragraph and its last line end.
    let mut open: Option<(usize, u32)> = None;
    let mut last_end = (0usize, 0u32);

    let mut flush = |open: &mut Option<(usize, u32)>, end: (usize, u32), path: &[(usize, &str)]| {
        if let Some((byte_start, char_start)) = open.take() {
            let raw = &clean_text[byte_start..end.0];
            let lead = raw.len() - raw.trim_start().len();
            let text = raw.trim();
            if text.is_empty() {
                return;
            }
            let lead_chars = raw[..lead].chars().count() as u32;
            let start = char_start + lead_chars;
            let end = start + text.chars().count() as u32;
            snippets.push(Snippet {
                article_title: article_title.to_string(),
                ordinal: snippets.len() as u32,
                heading_path: path.iter().map(|(_, t)| t.to_string()).collect(),
                text: text.to_string(),
                span: (start, end),
            });
        }
    };

    let mut byte = 0usize;
    let mut chars = 0u32;
    for line in clean_text.split('\n') {
        let line_chars = line.chars().count() as u32;
        let line_end = (byte + line.len(), chars + line_chars);

        while next_heading.peek().is_some_and(|h| h.span.0 < chars) {
            next_heading.next();
        }
        let heading = next_heading.next_if(|h| h.span.0 == chars);

        if let Some(h) = heading {
            flush(&mut open, last_end, &stack);
            let depth = usize::from(h.level.max(2) - 1).min(MAX_HEADING_DEPTH);
            while stack.last().is_some_and(|&(d, _)| d >= depth) {
                stack.pop();
            }
            stack.push((depth, h.title.as_str()));
        } else if line.trim().is_empty() {
            flush(&mut open, last_end, &stack);
        } else {
            if open.is_none() {
                open = Some((byte, chars));
            }
            last_end = line_end;
        }

        byte = line_end.0 + 1;
        chars = line_end.1 + 1;
    }
    flush(&mut open, last_end, &stack);
    snippets
}
