use std::sync::LazyLock;

use regex::Regex;

/// Language-specific pieces of the temporal title patterns.
#[derive(Debug, Clone)]
pub struct LocaleProfile {
    pub code: &'static str,
    pub months: [&'static str; 12],
    /// How a month-day title is written.
    pub day_style: DayStyle,
    /// Era suffixes accepted after a bare year, matched case-sensitively.
    pub eras: &'static [&'static str],
    /// Regex fragment matching a whole century title.
    pub century: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DayStyle {
    /// "October 1"
    MonthDay,
    /// "1. Oktober"
    DayDotMonth,
    /// "1 de octubre"
    DayDeMonth,
}

impl LocaleProfile {
    pub fn english() -> Self {
        LocaleProfile {
            code: "en",
            months: [
                "January",
                "February",
                "March",
                "April",
                "May",
                "June",
                "July",
                "August",
                "September",
                "October",
                "November",
                "December",
            ],
            day_style: DayStyle::MonthDay,
            eras: &["BC", "BCE", "AD", "CE"],
            century: r"[1-9][0-9]?(?:st|nd|rd|th) century",
        }
    }

    pub fn german() -> Self {
        LocaleProfile {
            code: "de",
            months: [
                "Januar",
                "Februar",
                "März",
                "April",
                "Mai",
                "Juni",
                "Juli",
                "August",
                "September",
                "Oktober",
                "November",
                "Dezember",
            ],
            day_style: DayStyle::DayDotMonth,
            eras: &["v. Chr.", "n. Chr."],
            century: r"[1-9][0-9]?\. Jahrhundert",
        }
    }

    pub fn spanish() -> Self {
        LocaleProfile {
            code: "es",
            months: [
                "enero",
                "febrero",
                "marzo",
                "abril",
                "mayo",
                "junio",
                "julio",
                "agosto",
                "septiembre",
                "octubre",
                "noviembre",
                "diciembre",
            ],
            day_style: DayStyle::DayDeMonth,
            eras: &["a. C.", "d. C."],
            century: r"[Ss]iglo [IVXLC]+",
        }
    }

    pub fn for_code(code: &str) -> Option<Self> {
        match code {
            "en" => Some(Self::english()),
            "de" => Some(Self::german()),
            "es" => Some(Self::spanish()),
            _ => None,
        }
    }

    fn compile(&self) -> Regex {
        let eras = self.eras.iter().map(|e| regex::escape(e)).collect::<Vec<_>>().join("|");
        let months = self
            .months
            .iter()
            .map(|m| regex::escape(m))
            .collect::<Vec<_>>()
            .join("|");
        let day = "(?:[1-9]|[12][0-9]|3[01])";
        let month_day = match self.day_style {
            DayStyle::MonthDay => format!("(?:{months}) {day}"),
            DayStyle::DayDotMonth => format!(r"{day}\. (?:{months})"),
            DayStyle::DayDeMonth => format!("{day} de (?:{months})"),
        };
        let century = self.century;
        let pattern = format!(
            r"^(?:[0-9]{{1,4}}(?: (?:{eras}))?|{month_day}|[0-9]{{0,3}}0s(?: (?:{eras}))?|{century}(?: (?:{eras}))?)$"
        );
        Regex::new(&pattern).expect("temporal pattern is valid")
    }
}

static ENGLISH: LazyLock<Regex> = LazyLock::new(|| LocaleProfile::english().compile());

/// True when `title` names a pure year, a month-day date, a decade or a
/// century in English.
pub fn classify_temporal(title: &str) -> bool {
    ENGLISH.is_match(title)
}

/// A compiled matcher for a non-English profile.
#[derive(Debug, Clone)]
pub struct TemporalMatcher(Regex);

impl TemporalMatcher {
    pub fn new(profile: &LocaleProfile) -> Self {
        TemporalMatcher(profile.compile())
    }

    pub fn is_temporal(&self, title: &str) -> bool {
        self.0.is_match(title)
    }
}
