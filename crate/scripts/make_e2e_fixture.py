"""Writes testdata/e2e: tiny XQuAD-style query sets and a bucket file for en/de/es."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "testdata" / "e2e"

QUERIES = [
    ("x1",
     {"en": ("The Danube passes through Vienna before reaching Bratislava.", "Which city does the Danube reach after Vienna?", "Bratislava"),
      "de": ("Die Donau fließt durch Wien, bevor sie Bratislava erreicht.", "Welche Stadt erreicht die Donau nach Wien?", "Bratislava"),
      "es": ("El Danubio pasa por Viena antes de llegar a Bratislava.", "¿A qué ciudad llega el Danubio después de Viena?", "Bratislava")}),
    ("x2",
     {"en": ("The observatory was opened in 1904 on a hill above the town.", "When was the observatory opened?", "1904"),
      "de": ("Die Sternwarte wurde 1904 auf einem Hügel über der Stadt eröffnet.", "Wann wurde die Sternwarte eröffnet?", "1904"),
      "es": ("El observatorio se inauguró en 1904 en una colina sobre el pueblo.", "¿Cuándo se inauguró el observatorio?", "1904")}),
    ("x3",
     {"en": ("Marie Curie shared the prize with her husband Pierre.", "Who shared the prize with Marie Curie?", "her husband Pierre"),
      "de": ("Marie Curie teilte den Preis mit ihrem Mann Pierre.", "Mit wem teilte Marie Curie den Preis?", "ihrem Mann Pierre"),
      "es": ("Marie Curie compartió el premio con su marido Pierre.", "¿Con quién compartió Marie Curie el premio?", "su marido Pierre")}),
    ("x4",
     {"en": ("The bridge is painted red so ships can see it in fog.", "What colour is the bridge?", "red"),
      "de": ("Die Brücke ist rot gestrichen, damit Schiffe sie im Nebel sehen.", "Welche Farbe hat die Brücke?", "rot"),
      "es": ("El puente está pintado de rojo para que los barcos lo vean en la niebla.", "¿De qué color es el puente?", "rojo")}),
]

DEMOS = [
    ("d1", 0,
     {"en": ("Oslo is the capital of Norway.", "What is the capital of Norway?", "Oslo"),
      "de": ("Oslo ist die Hauptstadt Norwegens.", "Was ist die Hauptstadt Norwegens?", "Oslo"),
      "es": ("Oslo es la capital de Noruega.", "¿Cuál es la capital de Noruega?", "Oslo")}),
    ("d2", 0,
     {"en": ("The library holds about two million books.", "How many books does the library hold?", "about two million"),
      "de": ("Die Bibliothek besitzt etwa zwei Millionen Bücher.", "Wie viele Bücher besitzt die Bibliothek?", "etwa zwei Millionen"),
      "es": ("La biblioteca tiene unos dos millones de libros.", "¿Cuántos libros tiene la biblioteca?", "unos dos millones")}),
    ("d3", 1,
     {"en": ("The festival takes place every August in Edinburgh.", "When does the festival take place?", "every August"),
      "de": ("Das Festival findet jeden August in Edinburgh statt.", "Wann findet das Festival statt?", "jeden August"),
      "es": ("El festival se celebra cada agosto en Edimburgo.", "¿Cuándo se celebra el festival?", "cada agosto")}),
    ("d4", 1,
     {"en": ("Penguins cannot fly but swim very fast.", "What can penguins not do?", "fly"),
      "de": ("Pinguine können nicht fliegen, schwimmen aber sehr schnell.", "Was können Pinguine nicht?", "fliegen"),
      "es": ("Los pingüinos no pueden volar pero nadan muy rápido.", "¿Qué no pueden hacer los pingüinos?", "volar")}),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for lang in ("en", "de", "es"):
        paragraphs = []
        for qid, texts in QUERIES:
            context, question, answer = texts[lang]
            assert answer in context, (lang, qid)
            paragraphs.append({
                "context": context,
                "qas": [{"id": qid, "question": question,
                         "answers": [{"text": answer, "answer_start": context.index(answer)}]}],
            })
        doc = {"version": "1.1", "data": [{"title": "fixture", "paragraphs": paragraphs}]}
        (OUT / f"queries.{lang}.json").write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n")
    with open(OUT / "buckets.jsonl", "w") as f:
        for lang in ("de", "en", "es"):
            for bucket in (0, 1):
                for did, b, texts in DEMOS:
                    if b != bucket:
                        continue
                    context, question, answer = texts[lang]
                    assert answer in context, (lang, did)
                    rec = {"language": lang, "bucket_index": bucket, "id": did, "context": context,
                           "question": question, "answers": [answer], "task": "qa"}
                    f.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
