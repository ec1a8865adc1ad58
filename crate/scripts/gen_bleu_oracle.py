"""Freeze sentence-BLEU reference values computed with sacrebleu.

Tokenization is done here (whitespace split, one token per character for
Han/Kana/CJK punctuation/Thai) and handed to sacrebleu with tokenize='none'.
Smoothing: none unless some n-gram precision is zero, then add-one on orders
>= 2 with the maximum order capped at the candidate length.

    python scripts/gen_bleu_oracle.py > testdata/oracles/bleu.json
"""
import json
import re
import unicodedata

import sacrebleu
from sacrebleu.metrics import BLEU

CHAR_SEGMENTED = re.compile(
    "([฀-๿　-〿぀-ゟ゠-ヿㇰ-ㇿ"
    "㐀-䶿一-鿿豈-﫿ｦ-ﾟ"
    "\U00020000-\U0002fa1f])"
)


def tokenize(text):
    text = unicodedata.normalize("NFC", text)
    return CHAR_SEGMENTED.sub(r" \1 ", text).split()


def ngrams(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def any_zero_precision(cand, ref, order):
    for n in range(1, order + 1):
        ref_counts = {}
        for g in ngrams(ref, n):
            ref_counts[g] = ref_counts.get(g, 0) + 1
        if not any(ref_counts.get(g, 0) for g in set(ngrams(cand, n))):
            return True
    return False


def score(candidate, reference):
    cand, ref = tokenize(candidate), tokenize(reference)
    order = min(4, len(cand))
    if any_zero_precision(cand, ref, order):
        metric = BLEU(tokenize="none", effective_order=True, smooth_method="add-k",
                      smooth_value=1, max_ngram_order=order)
        rule = "add-one"
    else:
        metric = BLEU(tokenize="none", effective_order=True, smooth_method="none")
        rule = "none"
    value = metric.sentence_score(" ".join(cand), [" ".join(ref)]).score
    return value, rule


PAIRS = [
    ("the cat sat on the mat", "the cat sat on the mat"),
    ("a b c d", "w x y z"),
    ("the the the the the", "the cat sat on the mat"),
    ("the cat", "the cat sat on the mat"),
    ("the cat sat on the mat today in the sun", "the cat sat on the mat"),
    ("a b", "a b"),
    ("a", "a"),
    ("a b", "a b c"),
    ("b a", "a b"),
    ("the quick brown fox jumps over the lazy dog", "the quick brown fox jumped over the lazy dog"),
    ("Der Hund bellt laut im Garten .", "Der Hund bellt im Garten laut ."),
    ("What is the capital of France ?", "What is the capital city of France ?"),
    ("Which team won Super Bowl 50 ?", "Which NFL team won Super Bowl 50 ?"),
    ("Denver Broncos defeated the Carolina Panthers", "The Denver Broncos defeated the Carolina Panthers 24–10"),
    ("北京大学是一所大学", "北京大学是中国的一所大学"),
    ("東京は日本の首都です", "東京は日本の首都である"),
    ("ฉันชอบกินข้าว", "ฉันชอบกินข้าวมาก"),
    ("Ελλάδα είναι μια χώρα", "Η Ελλάδα είναι μια όμορφη χώρα"),
    ("one two three four five six", "six five four three two one"),
    ("x x x x y y y y", "x y x y"),
    ("to be or not to be", "to be or not to be that is the question"),
    ("that is the question", "to be or not to be that is the question"),
    ("he said that he would come tomorrow", "he told us he would arrive tomorrow"),
    ("In 2008 北京 hosted the Olympics", "In 2008 北京 hosted the Summer Olympics"),
    ("the", "the cat"),
    ("cat the", "the cat"),
    ("Qui a gagné le match hier soir ?", "Qui a gagné le match de hier soir ?"),
    ("Denver won the title", "Denver won the title, and the fans celebrated downtown"),
    ("a b c d a b c d", "a b c d"),
    ("Café au lait", "Café au lait"),
]


def main():
    out = []
    for cand, ref in PAIRS:
        value, rule = score(cand, ref)
        out.append({"candidate": cand, "reference": ref, "bleu": round(value, 6), "smoothing": rule})
    json.dump({"generator": f"sacrebleu {sacrebleu.__version__}", "pairs": out},
              __import__("sys").stdout, ensure_ascii=False, indent=1)
    print()


if __name__ == "__main__":
    main()
