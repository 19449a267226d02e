use std::collections::{BTreeMap, HashSet};

use super::{IngestWarning, RawPage};

/// Hops followed before a chain is abandoned.
pub const MAX_REDIRECT_DEPTH: usize = 5;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedirectResolution {
    pub map: BTreeMap<String, String>,
    pub warnings: Vec<IngestWarning>,
}

/// Follows every redirect chain to its end. Aliases caught in a cycle or
/// in a chain longer than [`MAX_REDIRECT_DEPTH`] are dropped with a warning.
pub fn resolve_redirects(pages: &[RawPage]) -> RedirectResolution {
    let direct: BTreeMap<&str, &str> = pages
        .iter()
        .filter_map(|p| Some((p.title.as_str(), p.redirect_target.as_deref()?)))
        .collect();

    let mut out = RedirectResolution::default();
    for (&alias, &first) in &direct {
        let mut visited = HashSet::from([alias]);
        let mut current = first;
        let mut hops = 1;
        let outcome = loop {
            if !visited.insert(current) {
                break Err(IngestWarning::RedirectCycle {
                    alias: alias.to_string(),
                });
            }
            match direct.get(current) {
                None => break Ok(current),
                Some(_) if hops >= MAX_REDIRECT_DEPTH => {
                    break Err(IngestWarning::RedirectTooDeep {
                        alias: alias.to_string(),
                    })
                }
                Some(&next) => {
                    current = next;
                    hops += 1;
                }
            }
        };
        match outcome {
            Ok(target) => {
                out.map.insert(alias.to_string(), target.to_string());
            }
            Err(w) => {
                log::warn!("{w}");
                out.warnings.push(w);
            }
        }
    }
    out
}
