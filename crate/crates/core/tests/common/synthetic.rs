//! Generated MediaWiki exports for performance checks.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// An export of `articles` pages holding `links` prose links in total,
/// one in ten geotagged, spread over a few sections each.
pub fn synthetic_export(articles: usize, links: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(articles * 700);
    out.push_str("<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" xml:lang=\"en\">\n");
    let per_article = links / articles;
    let mut extra = links % articles;
    for i in 0..articles {
        let mut text = String::new();
        if i % 10 == 0 {
            let lat: f64 = rng.gen_range(-80.0..80.0);
            let lon: f64 = rng.gen_range(-179.0..179.0);
            writeln!(text, "{{{{coord|{lat:.4}|{lon:.4}}}}}").unwrap();
        }
        let mut n = per_article;
        if extra > 0 {
            n += 1;
            extra -= 1;
        }
        writeln!(text, "'''Article {i}''' is a generated page.").unwrap();
        for j in 0..n {
            if j % 4 == 0 {
                writeln!(text, "\n== Section {} ==", j / 4).unwrap();
            }
            let mut t = rng.gen_range(0..articles);
            if t == i {
                t = (t + 1) % articles;
            }
            writeln!(
                text,
                "Some words about [[Article {t}|topic {t}]] and more words follow here."
            )
            .unwrap();
        }
        writeln!(
            out,
            "<page><title>Article {i}</title><ns>0</ns><id>{}</id><revision><id>{}</id><text xml:space=\"preserve\">{}</text></revision></page>",
            i + 1,
            i + 1_000_000,
            text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
        )
        .unwrap();
    }
    out.push_str("</mediawiki>\n");
    out
}
