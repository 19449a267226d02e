use std::collections::BTreeMap;

use rayon::prelude::*;

use super::temporal::TemporalMatcher;
use super::{
    extract_geotag, resolve_redirects, segment_snippets, strip_markup, Article, ArticleKind, CorpusIndex,
    IngestWarning, KindCounts, LocaleProfile, RawPage,
};

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub locale: LocaleProfile,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            locale: LocaleProfile::english(),
        }
    }
}

/// Builds an English corpus; see [`build_corpus_with`].
pub fn build_corpus(pages: Vec<RawPage>) -> (CorpusIndex, Vec<IngestWarning>) {
    build_corpus_with(pages, &BuildOptions::default())
}

/// Runs the per-page pipeline and assembles the index in title order.
///
/// Pages are processed in parallel; the result does not depend on thread
/// scheduling.
pub fn build_corpus_with(pages: Vec<RawPage>, options: &BuildOptions) -> (CorpusIndex, Vec<IngestWarning>) {
    let mut warnings = Vec::new();
    let mut by_title: BTreeMap<String, RawPage> = BTreeMap::new();
    for page in pages {
        if let Some(old) = by_title.insert(page.title.clone(), page) {
            warnings.push(IngestWarning::DuplicateTitle { title: old.title });
        }
    }
    let pages: Vec<RawPage> = by_title.into_values().collect();

    let resolution = resolve_redirects(&pages);
    warnings.extend(resolution.warnings);
    let redirects = resolution.map;

    let matcher = TemporalMatcher::new(&options.locale);
    let processed: Vec<(Article, Vec<IngestWarning>)> = pages
        .par_iter()
        .filter(|p| !p.is_redirect())
        .map(|p| process_page(p, &matcher))
        .collect();

    let mut articles = BTreeMap::new();
    let mut counts = KindCounts {
        redirects: redirects.len() as u64,
        ..KindCounts::default()
    };
    for (article, page_warnings) in processed {
        warnings.extend(page_warnings);
        counts.bump(article.kind);
        articles.insert(article.title.clone(), article);
    }

    let exists: std::collections::HashSet<String> = articles.keys().cloned().collect();
    articles.par_iter_mut().for_each(|(_, article)| {
        for link in &mut article.links {
            if !exists.contains(&link.target_title) {
                if let Some(canonical) = redirects.get(&link.target_title) {
                    link.target_title = canonical.clone();
                }
            }
            link.dangling = !exists.contains(&link.target_title);
        }
    });

    for w in &warnings {
        log::warn!("{w}");
    }
    let corpus = CorpusIndex {
        articles,
        redirects,
        counts,
        language: options.locale.code.to_string(),
    };
    (corpus, warnings)
}

fn process_page(page: &RawPage, temporal: &TemporalMatcher) -> (Article, Vec<IngestWarning>) {
    let mut warnings = Vec::new();
    let stripped = strip_markup(&page.wikitext);
    if stripped.warnings > 0 {
        warnings.push(IngestWarning::UnbalancedMarkup {
            title: page.title.clone(),
            count: stripped.warnings,
        });
    }
    let snippets = segment_snippets(&page.title, &stripped.text, &stripped.headings);
    let geotag = match extract_geotag(&page.wikitext) {
        Ok(c) => c,
        Err(e) => {
            warnings.push(IngestWarning::BadGeotag {
                title: page.title.clone(),
                reason: e.to_string(),
            });
            None
        }
    };
    let (kind, coordinate) = if temporal.is_temporal(&page.title) {
        (ArticleKind::Temporal, None)
    } else if let Some(c) = geotag {
        (ArticleKind::Spatial, Some(c))
    } else {
        (ArticleKind::NonSpatial, None)
    };
    let article = Article {
        title: page.title.clone(),
        kind,
        coordinate,
        text_len: stripped.char_len,
        snippets,
        links: stripped.links,
    };
    (article, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(title: &str, id: u64, text: &str, redirect: Option<&str>) -> RawPage {
        RawPage {
            title: title.into(),
            page_id: id,
            wikitext: text.into(),
            redirect_target: redirect.map(Into::into),
        }
    }

    #[test]
    fn empty_dump_gives_empty_index() {
        let (corpus, warnings) = build_corpus(Vec::new());
        assert!(corpus.articles.is_empty());
        assert_eq!(corpus.counts, KindCounts::default());
        assert!(warnings.is_empty());
    }

    #[test]
    fn kinds_and_link_rewriting() {
        let pages = vec![
            raw(
                "Town",
                1,
                "{{coord|10|20}}\nA town near [[Hill alias|the hill]] in [[1983]].",
                None,
            ),
            raw("Hill", 2, "A hill near [[town]] and [[Nowhere]].", None),
            raw("Hill alias", 3, "", Some("Hill")),
            raw("1983", 4, "{{coord|1|2}} A year.", None),
        ];
        let (corpus, _) = build_corpus(pages);
        assert_eq!(corpus.counts.spatial, 1);
        assert_eq!(corpus.counts.nonspatial, 1);
        assert_eq!(corpus.counts.temporal, 1);
        assert_eq!(corpus.counts.redirects, 1);
        assert_eq!(corpus.articles["1983"].coordinate, None);

        let town = &corpus.articles["Town"];
        assert_eq!(town.kind, ArticleKind::Spatial);
        assert_eq!(town.links[0].target_title, "Hill");
        assert!(!town.links[0].dangling);
        let hill = &corpus.articles["Hill"];
        assert_eq!(hill.links[0].target_title, "Town");
        assert!(hill.links[1].dangling);
        assert_eq!(corpus.resolve("hill_alias").unwrap().title, "Hill");
    }

    #[test]
    fn redirect_to_spatial_keeps_counts() {
        let base = vec![raw("Town", 1, "{{coord|10|20}} Town.", None)];
        let mut with_alias = base.clone();
        with_alias.push(raw("Townsville", 2, "", Some("Town")));
        let (a, _) = build_corpus(base);
        let (b, _) = build_corpus(with_alias);
        assert_eq!(a.counts.spatial, b.counts.spatial);
        assert_eq!(b.redirects["Townsville"], "Town");
        assert!(!b.articles.contains_key("Townsville"));
    }

    #[test]
    fn duplicate_titles_last_wins() {
        let pages = vec![raw("A", 1, "first", None), raw("A", 2, "second", None)];
        let (corpus, warnings) = build_corpus(pages);
        assert_eq!(corpus.articles["A"].snippets[0].text, "second");
        assert_eq!(warnings, [IngestWarning::DuplicateTitle { title: "A".into() }]);
    }

    #[test]
    fn out_of_range_geotag_is_nonspatial_with_warning() {
        let (corpus, warnings) = build_corpus(vec![raw("P", 1, "{{coord|100|0}} x", None)]);
        assert_eq!(corpus.articles["P"].kind, ArticleKind::NonSpatial);
        assert!(matches!(warnings[0], IngestWarning::BadGeotag { .. }));
    }
}
