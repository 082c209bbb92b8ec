#!/usr/bin/env python3
"""Regenerates data/mini_corpus.jsonl and data/mini_gazetteer.json.

Fictional biographies and city notes with heavy entity overlap between
documents, so retrieval with entity constraints has something to find.
Output is fully determined by the fixed seed.
"""
import json
import random
from pathlib import Path

rng = random.Random(20200705)

FIRST = ["Alma", "Bruno", "Clara", "Dmitri", "Elena", "Farid", "Greta", "Hugo", "Ines", "Jonas",
         "Katya", "Lorenz", "Mira", "Nils", "Odile", "Pavel", "Quinn", "Rosa", "Soren", "Talia",
         "Ulrich", "Vera", "Wendel", "Ximena", "Yusuf", "Zora", "Anton", "Beatrix", "Cyril", "Dagny",
         "Emil", "Freya", "Gideon", "Hedda", "Ivo", "Juno", "Kasimir", "Lena", "Matteo", "Nadia",
         "Oskar", "Petra", "Rafael", "Signe", "Tobias"]
LAST = ["Achterberg", "Brandvold", "Castellane", "Dravecky", "Eskildsen", "Falkenrath", "Gravina",
        "Holmquist", "Ivanek", "Jovanić", "Kettering", "Lindqvist", "Marchetti", "Novotná", "Oberlin",
        "Petrescu", "Quarles", "Rasmussen", "Sandoval", "Thorvaldsen", "Uhlmann", "Varga", "Wexford",
        "Xanthos", "Yamashiro", "Zeller", "Albrecht", "Bergström", "Corvino", "Delacroix", "Engstrand",
        "Fontaine", "Gallagher", "Hartwell", "Iversen", "Jablonski", "Kowalczyk", "Lombardi", "Moreau",
        "Nakashima", "Ostrowski", "Pellegrini", "Reinholt", "Szabó", "Tremblay"]
CITIES = ["Vienna", "Lisbon", "Kraków", "Turin", "Ghent", "Bergen", "Lyon", "Tartu", "Porto", "Graz",
          "Aarhus", "Bologna", "Brno", "Utrecht", "Seville", "Uppsala", "Leipzig", "Zagreb", "Dublin",
          "Tampere", "Basel", "Córdoba", "Riga", "Malmö", "Trieste"]
UNIVERSITIES = ["Northgate University", "Halvorsen Institute", "Royal College of Optics",
                "Meridian Polytechnic", "Saint Aldric University", "Bellmore Academy"]
COMPANIES = ["Corvex Instruments", "Luma Dynamics", "Tessaract Works", "Brightwater Labs",
             "Orrin Aerospace", "Kestrel Biotech", "Vantage Optics", "Halden Foundry"]
PRIZES = ["Corran Medal", "Ellery Prize", "Vossberg Award", "Lindell Prize"]
TOPICS = ["lens design", "protein folding", "radio astronomy", "glacier dynamics", "coding theory",
          "battery chemistry", "bird migration", "urban acoustics", "soil microbiology", "turbine blades"]


def person_names(n):
    firsts = rng.sample(FIRST, n)
    lasts = rng.sample(LAST, n)
    return [f"{f} {l}" for f, l in zip(firsts, lasts)]


def main():
    people = person_names(42)
    facts = {}
    for p in people:
        born = rng.randint(1890, 1965)
        facts[p] = {
            "born": born,
            "city": rng.choice(CITIES),
            "study_city": rng.choice(CITIES),
            "univ": rng.choice(UNIVERSITIES),
            "company": rng.choice(COMPANIES),
            "joined": born + rng.randint(24, 34),
            "topic": rng.choice(TOPICS),
            "partner": None,
            "prize": rng.choice(PRIZES),
            "prize_year": born + rng.randint(38, 55),
            "papers": rng.randint(12, 240),
            "grant": rng.randint(2, 90) * 10000,
            "died_city": rng.choice(CITIES),
            "died": born + rng.randint(60, 95),
            "share": rng.randint(5, 60),
        }
    for p in people:
        facts[p]["partner"] = rng.choice([q for q in people if q != p])

    docs = []
    for i, p in enumerate(people):
        f = facts[p]
        last = p.split()[1]
        q = f["partner"]
        bio = [
            f"{p} was born in {f['city']} in {f['born']}.",
            f"{last} studied at {f['univ']} in {f['study_city']}.",
            f"In {f['born'] + 22}, {p} moved to {f['study_city']} to work on {f['topic']}.",
        ]
        work = [
            f"{p} joined {f['company']} in {f['joined']}.",
            f"At {f['company']}, {p} worked with {q} on {f['topic']}.",
            f"The work of {last} on {f['topic']} received ${f['grant']:,} from {f['univ']}.",
            f"By {f['joined'] + 10}, {last} had published {f['papers']} papers.",
        ]
        later = [
            f"{p} won the {f['prize']} in {f['prize_year']} for research on {f['topic']}.",
            f"{p} died in {f['died_city']} in {f['died']}.",
        ]
        if rng.random() < 0.5:
            later.append(f"About {f['share']}% of the archive of {last} is kept in {f['city']}.")
        paras = [" ".join(bio), " ".join(work), " ".join(later)]
        docs.append({"doc_id": f"bio{i:02d}", "title": p, "paragraphs": paras})

    # City notes restate facts from the biographies in different words.
    for j, city in enumerate(rng.sample(CITIES, 14)):
        natives = [p for p in people if facts[p]["city"] == city]
        movers = [p for p in people if facts[p]["study_city"] == city]
        sents = []
        for p in natives[:3]:
            sents.append(f"{p}, the scientist born in {facts[p]['born']}, grew up in {city}.")
        for p in movers[:3]:
            sents.append(f"{p} came to {city} to study {facts[p]['topic']} at {facts[p]['univ']}.")
        if not sents:
            continue
        uni = rng.choice(UNIVERSITIES)
        intro = f"{city} is home to a campus of {uni}. The city has about {rng.randint(80, 900)},000 residents."
        docs.append({"doc_id": f"city{j:02d}", "title": city, "paragraphs": [intro, " ".join(sents)]})

    # Prize notes list winners with years and collaborators.
    for k, prize in enumerate(PRIZES):
        winners = sorted([p for p in people if facts[p]["prize"] == prize], key=lambda p: facts[p]["prize_year"])
        paras = []
        chunk = []
        for p in winners:
            f = facts[p]
            chunk.append(f"The {prize} went to {p} in {f['prize_year']}.")
            chunk.append(f"{p} shared credit with {f['partner']} of {facts[f['partner']]['company']}.")
            if len(chunk) >= 4:
                paras.append(" ".join(chunk))
                chunk = []
        if chunk:
            paras.append(" ".join(chunk))
        docs.append({"doc_id": f"prize{k}", "title": prize, "paragraphs": paras})

    here = Path(__file__).resolve().parent
    with open(here / "mini_corpus.jsonl", "w", encoding="utf-8") as out:
        for d in docs:
            out.write(json.dumps(d, ensure_ascii=False) + "\n")

    gazetteer = {
        "PERSON": people + [p.split()[1] for p in people],
        "GPE": CITIES,
        "ORG": UNIVERSITIES + COMPANIES,
        "WORK_OF_ART": PRIZES,
    }
    with open(here / "mini_gazetteer.json", "w", encoding="utf-8") as out:
        json.dump(gazetteer, out, ensure_ascii=False, indent=1)
        out.write("\n")


if __name__ == "__main__":
    main()
