use unicode_normalization::UnicodeNormalization;

/// NFKC, lowercase, trim and collapse internal whitespace runs to one space.
/// An empty result means the query should be dropped.
pub fn normalize_query(raw: &str) -> String {
    let folded: String = raw.nfkc().collect::<String>().to_lowercase();
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}
