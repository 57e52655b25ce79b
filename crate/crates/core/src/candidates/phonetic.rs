use rphonetic::DoubleMetaphone;
use serde::{Deserialize, Serialize};

/// Double Metaphone codes; `secondary` is `None` when it equals `primary`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhoneticKey {
    pub primary: String,
    pub secondary: Option<String>,
}

/// Empty primary for words with no ASCII letter.
pub fn phonetic_key(word: &str) -> PhoneticKey {
    if !word.chars().any(|c| c.is_ascii_alphabetic()) {
        return PhoneticKey { primary: String::new(), secondary: None };
    }
    let r = DoubleMetaphone::default().double_metaphone(word);
    let primary = r.primary();
    let alternate = r.alternate();
    let secondary = (!alternate.is_empty() && alternate != primary).then_some(alternate);
    PhoneticKey { primary, secondary }
}
