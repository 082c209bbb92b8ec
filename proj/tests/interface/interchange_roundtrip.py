#!/usr/bin/env python3
"""Plays the external annotator: reads a sentence store the way a Python
tagger would, writes interchange records with str-index offsets, and checks
that `synthqa annotate --annotations` accepts them unchanged.
Usage: interchange_roundtrip.py SYNTHQA DATA_DIR WORKDIR"""
import json
import re
import subprocess
import sys
from pathlib import Path

MIN_SENTENCES = 100


def main():
    exe, data, work = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)

    # A store of at least 100 sentences with non-ASCII text in it.
    docs = [json.loads(l) for l in (data / "mini_corpus.jsonl").read_text(encoding="utf-8").splitlines() if l.strip()]
    corpus = work / "corpus.jsonl"
    with corpus.open("w", encoding="utf-8") as f:
        for d in docs[:16]:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    store = work / "store.jsonl"
    subprocess.run([exe, "ingest", "--corpus", corpus, "--out", store], check=True, capture_output=True)

    lines = store.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    assert header["format"] == "synthqa-sentence-store", header
    assert header["offset_unit"] == "unicode_scalar", header
    sentences = [json.loads(l) for l in lines[1:]]
    assert len(sentences) >= MIN_SENTENCES, len(sentences)
    for s in sentences:
        for key in ("sent_id", "doc_id", "para_index", "para_char_start", "text"):
            assert key in s, (key, s)

    gazetteer = json.loads((data / "mini_gazetteer.json").read_text(encoding="utf-8"))
    phrases = sorted(((p, label) for label, ps in gazetteer.items() for p in ps), key=lambda x: -len(x[0]))
    records = []
    for s in sentences:
        taken = [False] * len(s["text"])
        ents = []
        for phrase, label in phrases:
            for m in re.finditer(r"(?<!\w)" + re.escape(phrase) + r"(?!\w)", s["text"]):
                if any(taken[m.start():m.end()]):
                    continue
                taken[m.start():m.end()] = [True] * (m.end() - m.start())
                ents.append({"surface": m.group(0), "start": m.start(), "end": m.end(), "label": label})
        for m in re.finditer(r"\b\d{4}\b", s["text"]):
            if not any(taken[m.start():m.end()]):
                ents.append({"surface": m.group(0), "start": m.start(), "end": m.end(), "label": "DATE"})
        ents.sort(key=lambda e: e["start"])
        records.append({"sent_id": s["sent_id"], "entities": ents})

    interchange = work / "annotations.jsonl"
    with interchange.open("w", encoding="utf-8") as f:
        f.write(json.dumps({"format": "annotations", "model": "gazetteer-stand-in"}) + "\n")
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")

    exported = work / "exported.jsonl"
    run = subprocess.run([exe, "annotate", "--store", store, "--annotations", interchange, "--out",
                          work / "annotated.jsonl", "--export", exported], capture_output=True, text=True)
    if run.returncode != 0:
        print(run.stdout, run.stderr)
        return 1
    back = [json.loads(l) for l in exported.read_text(encoding="utf-8").splitlines() if l.strip()]
    if back != records:
        print("exported annotations differ from the ones loaded")
        return 1

    # A record with a shifted span must be refused.
    bad = [dict(r) for r in records]
    target = next(i for i, r in enumerate(bad) if r["entities"])
    shifted = dict(bad[target]["entities"][0], start=bad[target]["entities"][0]["start"] + 1)
    bad[target] = {"sent_id": bad[target]["sent_id"], "entities": [shifted]}
    bad_path = work / "bad.jsonl"
    bad_path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in bad), encoding="utf-8")
    refused = subprocess.run([exe, "annotate", "--store", store, "--annotations", bad_path, "--out",
                              work / "never.jsonl"], capture_output=True, text=True)
    if refused.returncode != 2 or (work / "never.jsonl").exists():
        print("shifted span was not refused", refused.returncode, refused.stderr)
        return 1

    n_ents = sum(len(r["entities"]) for r in records)
    print(f"{len(records)} sentences, {n_ents} entities loaded with zero violations; bad span refused")
    return 0


if __name__ == "__main__":
    sys.exit(main())
