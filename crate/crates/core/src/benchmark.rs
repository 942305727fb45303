//! Canonical benchmark texts: the preamble of the Constitution of the
//! Republic of Poland in Polish and in its official English translation.
//! Paragraphs are separated by blank lines.

pub const POLISH_PREAMBLE: &str = include_str!("../data/preamble_pl.txt");
pub const ENGLISH_PREAMBLE: &str = include_str!("../data/preamble_en.txt");
