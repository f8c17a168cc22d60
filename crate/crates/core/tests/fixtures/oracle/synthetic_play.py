"""Generates the 1,500-word synthetic play and computes its expected arc.

The expected values are computed from the generator's own word lists, not
by re-reading the text, so they are independent of the Rust tokenizer.

    python3 synthetic_play.py <fixtures/golden>
"""
import json
import math
import random
import sys
from pathlib import Path

SENTIMENT = {"bon": 1.0, "mauvais": -1.0, "joie": 0.5, "peur": -0.5, "coup": -0.8}
EMOTION = {
    "peur": ["fear"],
    "colère": ["anger"],
    "coup": ["anger", "fear"],
    "joie": ["joy"],
    "larme": ["sadness"],
    "amour": ["love"],
    "surprise": ["surprise"],
}
LABELS = ["sadness", "joy", "love", "anger", "fear", "surprise"]
FILLER = (
    "chemin ville mur porte fenêtre lampe table rue marchand chambre heure "
    "lumière champ coton regard main froid temps point animal homme femme "
    "argent objet silence hangar trottoir pluie voiture ciel terre vent "
    "marche parle attend regarde donne prend vend achète passe reste "
    "lent vide gris long court haut bas loin près ici"
).split()
STOPS = ["le", "la", "de", "un", "une", "et", "je", "vous"]
SPEAKERS = ["LE DEALER.", "LE CLIENT."]

# Lexicon terms injected per segment; later segments darken.
PLAN = [
    ["bon", "joie", "amour", "bon"],
    ["bon", "joie", "surprise"],
    ["joie", "bon", "larme"],
    ["mauvais", "bon", "amour", "colère"],
    ["bon", "peur", "joie"],
    ["larme", "surprise", "bon"],
    ["mauvais", "peur", "colère", "coup"],
    ["coup", "mauvais", "peur", "larme", "colère"],
    ["mauvais", "coup", "colère", "peur", "peur"],
    ["peur", "coup", "mauvais", "colère", "larme", "mauvais"],
]
SEGMENTS = 10
SENTENCES_PER_SEGMENT = 15
WORDS_PER_SENTENCE = 10


def build(rng):
    segments = []
    for seg in range(SEGMENTS):
        sentences = []
        for _ in range(SENTENCES_PER_SEGMENT):
            words = []
            for _ in range(WORDS_PER_SENTENCE):
                if rng.random() < 0.25:
                    words.append(rng.choice(STOPS))
                else:
                    # Zipf-like skew keeps some filler words frequent.
                    idx = min(int(rng.expovariate(1 / 9)), len(FILLER) - 1)
                    words.append(FILLER[idx])
            sentences.append(words)
        # Place each planned term in a distinct random sentence.
        slots = rng.sample(range(SENTENCES_PER_SEGMENT), len(PLAN[seg]))
        for term, s in zip(PLAN[seg], slots):
            sentences[s][rng.randrange(WORDS_PER_SENTENCE)] = term
        segments.append(sentences)
    return segments


def render(segments, rng):
    lines = []
    speaker = 0
    for seg in segments:
        for i, words in enumerate(seg):
            if i % 5 == 0:
                lines.append("")
                lines.append(SPEAKERS[speaker % 2])
                speaker += 1
            text = " ".join(words)
            text = text[0].upper() + text[1:]
            lines.append(text + rng.choice([".", ".", ".", " !", " ?"]))
    return "\n".join(lines).strip() + "\n"


def oracle(segments):
    points = []
    for seg in segments:
        unit_vals = []
        hits = [0] * 6
        for words in seg:
            pol = [SENTIMENT[w] for w in words if w in SENTIMENT]
            if pol:
                unit_vals.append((sum(pol) / len(pol) + 1) / 2)
            for w in words:
                for e in EMOTION.get(w, []):
                    hits[LABELS.index(e)] += 1
        valence = sum(unit_vals) / len(unit_vals) if unit_vals else 0.5
        total = sum(hits)
        if total:
            profile = [h / total for h in hits]
            no_signal = False
        else:
            profile = [1 / 6] * 6
            no_signal = True
        points.append({"valence": valence, "emotions": profile, "no_signal": no_signal})
    signal = [p for p in points if not p["no_signal"]]
    mass = [sum(p["emotions"][i] for p in signal) for i in range(6)]
    pct = [100 * m / sum(mass) for m in mass]
    vals = [p["valence"] for p in points]
    n = len(vals)
    tail = math.ceil(n / 3)
    neg = lambda xs: sum(1 - v for v in xs) / len(xs)
    delta = neg(vals[n - tail:]) - neg(vals[: n - tail])
    peak = min(range(n), key=lambda i: (vals[i], i))
    return {
        "points": points,
        "percentages": dict(zip(LABELS, pct)),
        "tension": {
            "final_third_delta": delta,
            "peak_negativity_index": peak,
            "mean_valence": sum(vals) / n,
        },
    }


def lexical(segments, stoplist):
    words = [w for seg in segments for s in seg for w in s]
    counts = {}
    for w in words:
        if w not in stoplist:
            counts[w] = counts.get(w, 0) + 1
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    return {
        "token_count": len(words),
        "type_count": len(set(words)),
        "ttr": len(set(words)) / len(words),
        "top_terms": top,
    }


def main(out_dir):
    out = Path(out_dir)
    rng = random.Random(1989)
    segments = build(rng)
    (out / "synthetic_play.txt").write_text(render(segments, rng), encoding="utf-8")
    with open(out / "sentiment.csv", "w", encoding="utf-8") as f:
        f.write("term,polarity\n")
        for t, p in SENTIMENT.items():
            f.write(f"{t},{p}\n")
    with open(out / "emotion.csv", "w", encoding="utf-8") as f:
        f.write("term,emotion\n")
        for t, es in EMOTION.items():
            for e in es:
                f.write(f"{t},{e}\n")
    stop_path = Path(__file__).resolve().parents[3] / "data" / "stopwords_fr.txt"
    stoplist = {
        l.strip() for l in stop_path.read_text(encoding="utf-8").splitlines()
        if l.strip() and not l.startswith("#")
    }
    expected = oracle(segments)
    expected["lexical"] = lexical(segments, stoplist)
    (out / "expected_values.json").write_text(
        json.dumps(expected, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


if __name__ == "__main__":
    main(sys.argv[1])
