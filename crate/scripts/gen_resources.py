"""Regenerate the bundled language resources in crates/core/resources/.

english.txt  - frequent alphabetic English words (wordfreq) plus their lemmas
lemmas.tsv   - surface<TAB>lemma for every word whose lemma differs (lemminflect)

Requires: pip install wordfreq lemminflect
"""
import pathlib
import re

from lemminflect import getAllLemmas
from wordfreq import top_n_list

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "resources"
N_WORDS = 40000
POS_ORDER = ("NOUN", "VERB", "ADJ", "ADV", "AUX")
WORD = re.compile(r"^[a-z]+$")


def lemma_of(word):
    lemmas = getAllLemmas(word)
    for pos in POS_ORDER:
        if pos in lemmas and lemmas[pos]:
            return lemmas[pos][0].lower()
    return word


def main():
    words = [w for w in top_n_list("en", N_WORDS) if WORD.match(w)]
    raw = {w: lemma_of(w) for w in words}

    # collapse chains so every lemma is a fixed point
    resolved = {}
    for w in raw:
        seen = {w}
        cur = raw[w]
        while cur in raw and raw[cur] != cur and cur not in seen:
            seen.add(cur)
            cur = raw[cur]
        if cur in seen and cur != w:
            continue
        resolved[w] = cur
    lemma_map = {w: l for w, l in resolved.items() if w != l and WORD.match(l)}
    for lemma in set(lemma_map.values()):
        lemma_map.pop(lemma, None)

    english = sorted(set(words) | set(lemma_map.values()))
    (OUT / "english.txt").write_text(
        "# frequent English words, generated by scripts/gen_resources.py\n"
        + "\n".join(english) + "\n"
    )
    (OUT / "lemmas.tsv").write_text(
        "".join(f"{w}\t{lemma_map[w]}\n" for w in sorted(lemma_map))
    )
    print(len(english), "words,", len(lemma_map), "lemma entries")


if __name__ == "__main__":
    main()
