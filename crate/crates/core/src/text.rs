//! Phrase normalization shared by triple matching and every lexical metric.

/// True when every character of `token` is punctuation or a symbol, e.g. `,`,
/// `--` or `—`. Empty strings are not special.
pub fn is_special_token(token: &str) -> bool {
    !token.is_empty()
        && token
            .chars()
            .all(|c| !c.is_alphanumeric() && !c.is_whitespace() && !c.is_control())
}

/// Lowercases `text`, collapses whitespace runs to a single space and strips
/// punctuation-only tokens from both ends. Punctuation inside the phrase is
/// kept, so `"June 7, 2012"` becomes `"june 7, 2012"`.
pub fn normalize_phrase(text: &str) -> String {
    let lowered = text.to_lowercase();
    let tokens: Vec<&str> = lowered.split_whitespace().collect();
    let first = tokens.iter().position(|t| !is_special_token(t));
    let last = tokens.iter().rposition(|t| !is_special_token(t));
    match (first, last) {
        (Some(first), Some(last)) => tokens[first..=last].join(" "),
        _ => String::new(),
    }
}

/// The token basis of the overlap metrics: the normalized phrase split on
/// whitespace, with every punctuation-only token removed.
pub fn phrase_tokens(text: &str) -> Vec<String> {
    normalize_phrase(text)
        .split(' ')
        .filter(|t| !t.is_empty() && !is_special_token(t))
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_phrase("In  Dordrecht ,"), "in dordrecht");
        assert_eq!(normalize_phrase(""), "");
        assert_eq!(normalize_phrase("June 7, 2012"), "june 7, 2012");
        assert_eq!(normalize_phrase(" , . "), "");
        assert_eq!(normalize_phrase("\"Laura\" ."), "\"laura\"");
    }

    #[test]
    fn token_examples() {
        assert_eq!(
            phrase_tokens("a £1 million full-scale replica"),
            vec!["a", "£1", "million", "full-scale", "replica"]
        );
        assert_eq!(phrase_tokens("in Dordrecht"), vec!["in", "dordrecht"]);
        assert!(phrase_tokens("—").is_empty());
        assert_eq!(phrase_tokens("June 7 , 2012"), vec!["june", "7", "2012"]);
    }

    #[test]
    fn special_tokens() {
        assert!(is_special_token(","));
        assert!(is_special_token("--"));
        assert!(is_special_token("£"));
        assert!(!is_special_token("£1"));
        assert!(!is_special_token(""));
        assert!(!is_special_token("'s"));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,40}") {
            let once = normalize_phrase(&s);
            prop_assert_eq!(normalize_phrase(&once), once);
        }

        #[test]
        fn tokens_join_to_normalized_without_punct(s in "[a-zA-Z0-9,.;£—  -]{0,40}") {
            let expected: Vec<String> = normalize_phrase(&s)
                .split(' ')
                .filter(|t| !t.is_empty() && !is_special_token(t))
                .map(str::to_string)
                .collect();
            prop_assert_eq!(phrase_tokens(&s).join(" "), expected.join(" "));
        }
    }
}
