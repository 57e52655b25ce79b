/// Normalizes a raw surface word.
///
/// Lowercases, strips leading and trailing characters that are not letters
/// or digits, then deletes apostrophes inside the word (`"It's"` becomes
/// `"its"`). Internal hyphens and digits are kept. An empty result means the
/// word should be dropped.
pub fn normalize(raw: &str) -> String {
    let lower = raw.to_lowercase();
    let trimmed = lower.trim_matches(|c: char| !c.is_alphanumeric());
    trimmed.chars().filter(|c| !is_apostrophe(*c)).collect()
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '\u{02BC}')
}
