//! Entry points shared by the fuzz targets and the seed replay test.
//! Each function panics when an invariant of the parser or decoder breaks.

use std::io::Cursor;

use crate::corpus::store::{decode_articles, encode_articles};
use crate::corpus::{build_corpus, classify_temporal, extract_geotag, parse_export, strip_markup};
use crate::layers::Extent;
use crate::wag::build_wag;
use crate::wag::store::{decode_wag, encode_wag};

pub fn export(data: &[u8]) {
    let Ok(pages) = parse_export(Cursor::new(data)) else {
        return;
    };
    let (corpus, _) = build_corpus(pages);
    let wag = build_wag(&corpus);
    let mut decoded = decode_articles(&encode_articles(&corpus)).expect("built corpus must decode");
    decoded.language = corpus.language.clone();
    assert_eq!(decoded, corpus);
    assert_eq!(decode_wag(&encode_wag(&wag)).expect("built graph must decode"), wag);
}

pub fn markup(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let stripped = strip_markup(text);
    assert_eq!(stripped.char_len as usize, stripped.text.chars().count());
    for link in &stripped.links {
        assert!(link.char_offset <= stripped.char_len);
        assert!((0.0..1.0).contains(&link.position_fraction) || stripped.char_len == 0);
        assert!(!link.target_title.is_empty());
    }
    for h in &stripped.headings {
        assert!((1..=6).contains(&h.level));
        assert!(h.span.0 <= h.span.1 && h.span.1 <= stripped.char_len);
    }
}

pub fn geotag(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(Some(c)) = extract_geotag(text) {
        assert!((-90.0..=90.0).contains(&c.lat) && (-180.0..=180.0).contains(&c.lon));
    }
}

pub fn articles(data: &[u8]) {
    if let Ok(corpus) = decode_articles(data) {
        assert_eq!(
            decode_articles(&encode_articles(&corpus)).expect("re-encoded corpus must decode"),
            corpus
        );
    }
}

pub fn graph(data: &[u8]) {
    if let Ok(wag) = decode_wag(data) {
        assert_eq!(encode_wag(&wag), data);
    }
}

pub fn bbox(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(extent) = text.parse::<Extent>() {
        let again: Extent = extent.to_string().parse().expect("displayed extent must parse");
        assert_eq!(again, extent);
    }
}

pub fn temporal(data: &[u8]) {
    if let Ok(title) = std::str::from_utf8(data) {
        classify_temporal(title);
    }
}
