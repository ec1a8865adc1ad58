//! Text utilities shared by BLEU tokenization, answer normalization and
//! duplicate detection.

use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;

pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Comparison key for duplicate detection: NFC, whitespace collapsed.
pub fn dedup_key(text: &str) -> String {
    collapse_whitespace(&nfc(text))
}

/// Scripts written without word-separating spaces, tokenized one character
/// at a time: Han, Hiragana, Katakana, CJK punctuation and Thai.
pub fn is_char_segmented(c: char) -> bool {
    matches!(c as u32,
        0x0E00..=0x0E7F          // Thai
        | 0x3000..=0x303F        // CJK symbols and punctuation
        | 0x3040..=0x309F        // Hiragana
        | 0x30A0..=0x30FF        // Katakana
        | 0x31F0..=0x31FF
        | 0x3400..=0x4DBF        // Han extension A
        | 0x4E00..=0x9FFF        // Han
        | 0xF900..=0xFAFF
        | 0xFF66..=0xFF9F        // halfwidth Katakana
        | 0x20000..=0x2FA1F)
}

/// Whitespace tokenization where runs of character-segmented scripts are
/// split into single characters. Latin digits or words embedded in Chinese
/// text stay whole: `"北京2008年"` gives `北 京 2008 年`.
pub fn segment(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut current, &mut tokens);
        } else if is_char_segmented(c) {
            flush(&mut current, &mut tokens);
            tokens.push(c.to_string());
        } else {
            current.push(c);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

fn flush(buf: &mut String, out: &mut Vec<String>) {
    if !buf.is_empty() {
        out.push(std::mem::take(buf));
    }
}

/// Unicode `P*` categories plus ASCII punctuation (which also covers the
/// `S*` symbols `$+<=>^`|~`).
pub fn is_punctuation(c: char) -> bool {
    if c.is_ascii_punctuation() {
        return true;
    }
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_mixed_script() {
        assert_eq!(segment("北京2008年 ok"), vec!["北", "京", "2008", "年", "ok"]);
        assert_eq!(segment("  a  b "), vec!["a", "b"]);
        assert!(segment("").is_empty());
    }

    #[test]
    fn thai_is_per_character() {
        assert_eq!(segment("กข").len(), 2);
    }

    #[test]
    fn hangul_keeps_words() {
        assert_eq!(segment("서울 대학교"), vec!["서울", "대학교"]);
    }

    #[test]
    fn punctuation_classes() {
        for c in ['.', ',', '$', '|', '«', '¿', '。', '、', '–', '؟'] {
            assert!(is_punctuation(c), "{c:?}");
        }
        for c in ['a', '1', ' ', '北', '©'] {
            assert!(!is_punctuation(c), "{c:?}");
        }
    }

    #[test]
    fn dedup_key_normalizes() {
        let composed = "caf\u{e9}  au\tlait";
        let decomposed = "cafe\u{301} au lait";
        assert_eq!(dedup_key(composed), dedup_key(decomposed));
    }
}
