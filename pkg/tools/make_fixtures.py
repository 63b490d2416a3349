#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus (fixtures/) deterministically.

The corpus is the bit-exact contract the parser and acceptance tests pin
against: an index page, five venue pages, and 25 proceedings pages
(5 venues x years 2019-2023) plus manifest.json with expected record
counts and spot-check values.

The generator validates its own output before writing:

* anthology ids and titles are globally unique;
* the documented 4-paper filter (years 2021..2023, venues acl/emnlp/naacl,
  all of {"story generation"}, any of {event, persona, coherence, metrics})
  selects exactly the four pinned papers and nothing else;
* every page has at least 3 entries and the corpus carries >= 60
  non-target records.

Run from the repo root:  python3 tools/make_fixtures.py
"""
from __future__ import annotations

import html
import json
import random
import sys
import unicodedata
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures"
SEED = 7193

BASE = "https://anthology.test/"

VENUES = [
    ("acl", "ACL", "acl-events"),
    ("emnlp", "EMNLP", "acl-events"),
    ("naacl", "NAACL", "acl-events"),
    ("coling", "COLING", "non-acl-events"),
    ("tacl", "TACL", "non-acl-events"),
]
YEARS = [2019, 2020, 2021, 2022, 2023]
TRACKS = {"acl": "long", "emnlp": "main", "naacl": "main", "coling": "1", "tacl": "1"}

AUTHORS = [
    "Wei Chen", "Mei Lin", "José García", "Zoë Müller", "Łukasz Kowalski",
    "Chloé Dubois", "Søren Holm", "Anna Schmidt", "Liang Zhao", "Priya Sharma",
    "Tomás Alvarez", "Ivan Petrov", "Sofia Rossi", "Hana Kim", "Yuki Tanaka",
    "Marta Nowak", "Pedro Santos", "Elif Yilmaz", "Nguyễn Văn An",
    "Björn Andersson", "Céline Martin", "Amara Okafor", "Ravi Iyer",
    "Gabriela Silva", "Ingrid Olsen", "Dimitris Papadopoulos", "Aisha Khan",
    "Farid Rahimi", "Helga Jónsdóttir", "Omar Haddad",
]

# Generic material is keyword-safe everywhere: no "story", none of the
# any-keywords (watch hidden substrings: "prevent"/"seventh" contain
# "event", "personal*" contains "persona").
TOPICS = [
    "Machine Translation", "Question Answering", "Named Entity Recognition",
    "Dependency Parsing", "Sentiment Analysis", "Text Summarization",
    "Relation Extraction", "Semantic Role Labeling", "Coreference Resolution",
    "Dialogue State Tracking", "Speech Recognition",
    "Grammatical Error Correction", "Word Sense Disambiguation",
    "Cross-Lingual Retrieval", "Reading Comprehension",
    "Morphological Analysis", "Knowledge Graph Completion", "Code Generation",
    "Table-to-Text Generation", "Keyphrase Extraction",
]
METHODS = [
    "Graph Neural Networks", "Contrastive Learning", "Prompt Tuning",
    "Data Augmentation", "Knowledge Distillation", "Multi-Task Learning",
    "Adapter Modules", "Curriculum Learning", "Span-Based Decoding",
    "Dual Encoders", "Sparse Attention", "Pretrained Encoders",
    "Synthetic Supervision", "Structured Pruning", "Latent Variable Models",
    "Subword Regularization",
]
PATTERNS = [
    "{m} for {t}",
    "Improving {t} with {m}",
    "{t} via {m}",
    "Rethinking {m} for Low-Resource {t}",
    "On the Robustness of {m} in {t}",
    "Efficient {t} through {m}",
    "A Study of {m} for Multilingual {t}",
]
GENERIC_ABSTRACTS = [
    "We study {t} and describe a simple approach built on {m}. "
    "Results on three benchmarks show consistent gains over strong baselines.",
    "This paper revisits {t} from the angle of {m}. "
    "An extensive analysis shows where the approach helps and where it fails.",
    "We propose a new model for {t} that relies on {m}, "
    "and we release code and trained checkpoints for further research.",
    "Scaling {t} to new domains is hard. We show that {m} closes much of the "
    "gap while using a fraction of the supervision.",
]

ANY_KEYWORDS = ("event", "persona", "coherence", "metrics")
ALL_KEYWORDS = ("story generation",)
SCOPE_VENUES = {"acl", "emnlp", "naacl"}
SCOPE_YEARS = {2021, 2022, 2023}

# The four pinned retrieval targets.
TARGETS = [
    {
        "aid": "2021.acl-long.499", "venue": "acl", "year": 2021,
        "title": "Long Text Generation by Modeling Sentence-Level and "
                 "Discourse-Level Coherence",
        "abstract": "Generating long and coherent text remains a challenge. "
                    "We design a model that plans at the sentence level and the "
                    "discourse level, and we evaluate it on story generation "
                    "benchmarks with strong results.",
        "bibkey": "guan-etal-2021-long",
    },
    {
        "aid": "2021.acl-long.500", "venue": "acl", "year": 2021,
        "title": "OpenMEVA: A Benchmark for Evaluating Open-ended Story "
                 "Generation Metrics",
        "abstract": "We introduce a benchmark for evaluating open-ended story "
                    "generation metrics, covering correlation with human "
                    "judgments and robustness tests.",
        "bibkey": "guan-etal-2021-openmeva",
    },
    {
        "aid": "2022.naacl-main.210", "venue": "naacl", "year": 2022,
        "title": "Persona-Guided Planning for Controlling the Protagonist's "
                 "Persona in Story Generation",
        "abstract": "Endowing protagonists with predefined persona profiles "
                    "helps story generation systems keep characters consistent "
                    "across a narrative.",
        "bibkey": "zhang-etal-2022-persona",
    },
    {
        "aid": "2022.emnlp-main.403", "venue": "emnlp", "year": 2022,
        "title": "EtriCA: Event-Triggered Context-Aware Story Generation "
                 "Augmented by Cross Attention",
        "abstract": "We present a neural story generation model that writes "
                    "narratives from event sequences, fusing context features "
                    "through cross attention.",
        "bibkey": "tang-etal-2022-etrica",
    },
]

# In-scope distractors that mention story generation but none of the
# any-keywords anywhere in title or abstract.
STORY_ONLY = {
    ("acl", 2021): (
        "Plot-Guided Story Generation with Hierarchical Planning",
        "We explore story generation guided by structured plans. Our approach "
        "produces diverse plots while staying faithful to a given outline.",
    ),
    ("emnlp", 2023): (
        "Outline-Conditioned Story Generation with Latent Plans",
        "Conditioning story generation on latent outlines yields more "
        "controllable narratives, as shown in a large human study.",
    ),
    ("naacl", 2022): (
        "Story Generation with Commonsense Knowledge Graphs",
        "We inject commonsense relations into story generation and observe "
        "fewer contradictions between consecutive sentences.",
    ),
}

# In-scope distractors that carry an any-keyword but never the phrase
# "story generation" (their abstracts avoid the word "story" altogether).
KEYWORD_ONLY = {
    ("acl", 2022): (
        "Event Extraction from Procedural Text",
        "We extract event mentions and their arguments from procedural text "
        "using a span-based decoder with type constraints.",
    ),
    ("naacl", 2021): (
        "Evaluation Metrics for Dialogue Response Selection",
        "We compare automatic evaluation metrics for response selection and "
        "measure their agreement with human preference labels.",
    ),
    ("emnlp", 2022): (
        "Persona-Grounded Dialogue Response Generation",
        "Grounding responses in a persona profile improves consistency. We "
        "quantify this effect across three dialogue corpora.",
    ),
    ("acl", 2023): (
        "Discourse Coherence in Long Document Summarization",
        "We measure discourse coherence of machine-written summaries and "
        "propose a reranker that prefers well-ordered content.",
    ),
    ("emnlp", 2021): (
        "Coreference Resolution with Event Argument Cues",
        "Linking entity mentions benefits from event argument structure; we "
        "add such cues to a strong end-to-end resolver.",
    ),
}

# Out-of-scope pages may carry full matches: wrong venue or wrong year keeps
# them out of the documented filter's result.
FULL_MATCH_OUT_OF_SCOPE = {
    ("coling", 2022): (
        "Event-Centric Story Generation with Discourse Coherence Rewards",
        "We reward discourse coherence during decoding and rank event chains "
        "for story generation in a two-stage pipeline.",
    ),
    ("tacl", 2021): (
        "Evaluating Story Generation with Automatic Metrics",
        "A survey of automatic metrics for story generation, with persona and "
        "event coverage analyses across systems.",
    ),
    ("acl", 2019): (
        "Persona-Aware Story Generation for Interactive Fiction",
        "We adapt persona conditioning for story generation in games, where "
        "player choices steer the plot.",
    ),
    ("emnlp", 2020): (
        "Coherence Modeling for Story Generation Evaluation",
        "We train a coherence model and use it to score story generation "
        "outputs, improving correlation with human ratings.",
    ),
    ("coling", 2021): (
        "Event Graph Planning for Multi-Paragraph Story Generation",
        "Planning over event graphs gives story generation systems better "
        "long-range structure and fewer repetitions.",
    ),
}

ENTITY_TITLE = "Parsing & Tagging for Low-Resource Morphology"
PLAIN_AUTHOR_SPAN = "Ann Alpha, Bob Beta and Carol Gamma"


def strip_diacritics(text: str) -> str:
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def surname_token(author: str) -> str:
    return strip_diacritics(author.split()[-1]).casefold()


def haystack(title: str, abstract: str | None) -> str:
    return (title + " " + (abstract or "")).casefold()


def filter_predicate(venue: str, year: int, title: str, abstract: str | None) -> bool:
    """The documented 4-paper filter, implemented independently here."""
    if venue not in SCOPE_VENUES or year not in SCOPE_YEARS:
        return False
    hay = haystack(title, abstract)
    if not all(kw in hay for kw in ALL_KEYWORDS):
        return False
    return any(kw in hay for kw in ANY_KEYWORDS)


def build_entries(rng: random.Random) -> dict[tuple[str, int], list[dict]]:
    combos = [(p, t, m) for p in PATTERNS for t in TOPICS for m in METHODS]
    rng.shuffle(combos)
    combo_iter = iter(combos)

    def generic_entry(venue: str, year: int, n: int) -> dict:
        pattern, topic, method = next(combo_iter)
        title = pattern.format(t=topic, m=method)
        authors = rng.sample(AUTHORS, rng.randint(1, 4))
        has_abstract = rng.random() < 0.8
        abstract = None
        if has_abstract:
            template = rng.choice(GENERIC_ABSTRACTS)
            abstract = template.format(t=topic.lower(), m=method.lower())
        bibkey = None
        if rng.random() < 0.5:
            word = "".join(c for c in title.split()[0].casefold() if c.isalnum())
            bibkey = f"{surname_token(authors[0])}-{year}-{word}"
        return {
            "aid": f"{year}.{venue}-{TRACKS[venue]}.{n}",
            "title": title,
            "authors": authors,
            "abstract": abstract,
            "pdf": rng.random() < 0.9,
            "bibkey": bibkey,
        }

    def special_entry(venue: str, year: int, n: int, title: str, abstract: str) -> dict:
        authors = rng.sample(AUTHORS, rng.randint(1, 3))
        return {
            "aid": f"{year}.{venue}-{TRACKS[venue]}.{n}",
            "title": title,
            "authors": authors,
            "abstract": abstract,
            "pdf": True,
            "bibkey": None,
        }

    pages: dict[tuple[str, int], list[dict]] = {}
    for venue, _, _ in VENUES:
        for year in YEARS:
            entries = []
            count = rng.randint(3, 5)
            for n in range(1, count + 1):
                entries.append(generic_entry(venue, year, n))
            next_n = count + 1
            for pool in (STORY_ONLY, KEYWORD_ONLY, FULL_MATCH_OUT_OF_SCOPE):
                if (venue, year) in pool:
                    title, abstract = pool[(venue, year)]
                    entries.append(special_entry(venue, year, next_n, title, abstract))
                    next_n += 1
            pages[(venue, year)] = entries

    for target in TARGETS:
        key = (target["venue"], target["year"])
        pages[key].append({
            "aid": target["aid"],
            "title": target["title"],
            "authors": rng.sample(AUTHORS, 3),
            "abstract": target["abstract"],
            "pdf": True,
            "bibkey": target["bibkey"],
        })

    # Corpus quirks exercised by the parser tests.
    pages[("acl", 2019)].append({
        "aid": "2019.acl-long.900",
        "title": "Shared Task Overview: Multilingual Morphological Analysis",
        "authors": PLAIN_AUTHOR_SPAN,  # plain text span, no anchors
        "abstract": None,
        "pdf": True,
        "bibkey": None,
    })
    pages[("emnlp", 2020)].append({
        "aid": "2020.emnlp-main.901",
        "title": "Conference Organization Notes",
        "authors": [],  # editorial entry, no author span
        "abstract": None,
        "pdf": False,
        "bibkey": None,
    })
    pages[("coling", 2020)].append({
        "aid": "2020.coling-1.902",
        "title": ENTITY_TITLE,  # '&' exercises entity decoding
        "authors": rng.sample(AUTHORS, 2),
        "abstract": "Morphology benefits from shared subword inventories "
                    "across related languages.",
        "pdf": True,
        "bibkey": None,
    })
    pages[("coling", 2019)].append({
        "aid": "",  # rendered without a title anchor; skipped by the parser
        "title": None,
        "authors": rng.sample(AUTHORS, 2),
        "abstract": "An entry damaged on purpose: it has no title anchor.",
        "pdf": False,
        "bibkey": None,
    })

    for entries in pages.values():
        rng.shuffle(entries)
    return pages


def validate(pages: dict[tuple[str, int], list[dict]]) -> None:
    ids, titles, matches = set(), set(), []
    total = 0
    for (venue, year), entries in pages.items():
        real = [e for e in entries if e["title"] is not None]
        assert len(real) >= 3, f"{venue}-{year} has too few entries"
        for e in real:
            total += 1
            assert e["aid"] not in ids, f"duplicate id {e['aid']}"
            assert e["title"] not in titles, f"duplicate title {e['title']}"
            ids.add(e["aid"])
            titles.add(e["title"])
            if filter_predicate(venue, year, e["title"], e["abstract"]):
                matches.append(e["aid"])
    expected = sorted(t["aid"] for t in TARGETS)
    assert sorted(matches) == expected, (
        f"filter matches {sorted(matches)}, wanted {expected}")
    assert total - len(TARGETS) >= 60, f"only {total - len(TARGETS)} distractors"


# -- rendering ----------------------------------------------------------------

HEAD = (
    '<!DOCTYPE html>\n<html lang="en">\n<head>\n<meta charset="utf-8">\n'
    f'<base href="{BASE}">\n<title>{{title}}</title>\n</head>\n<body>\n'
)
FOOT = "</body>\n</html>\n"


def render_index() -> str:
    out = [HEAD.format(title="Anthology Index"), "<main>\n"]
    for token, heading in (("acl-events", "ACL Events"),
                           ("non-acl-events", "Non-ACL Events")):
        out.append(f'<section class="venue-index" data-category="{token}">\n')
        out.append(f"<h2>{heading}</h2>\n<ul>\n")
        for key, name, category in VENUES:
            if category == token:
                out.append(f'<li><a class="venue-link" href="/venues/{key}.html">'
                           f"{name}</a></li>\n")
        out.append("</ul>\n</section>\n")
    out.append("</main>\n")
    out.append(FOOT)
    return "".join(out)


def event_title(venue_name: str, venue_key: str, year: int) -> str:
    if venue_key == "tacl" and year == 2019:
        return "Tutorial Abstracts"
    return f"Proceedings of the {venue_name} Conference ({year})"


def render_venue(venue_key: str, venue_name: str, rng: random.Random) -> str:
    out = [HEAD.format(title=venue_name)]
    out.append(f'<section class="venue-page" data-venue="{venue_key}">\n')
    out.append(f"<h1>{venue_name}</h1>\n")
    for year in sorted(YEARS, reverse=True):
        out.append(f'<h4 class="year-heading" id="y{year}">{year}</h4>\n<ul>\n')
        title = html.escape(event_title(venue_name, venue_key, year))
        out.append(f'<li><a class="proceedings-link" '
                   f'href="/proceedings/{venue_key}-{year}.html">{title}</a>')
        if rng.random() < 0.5:
            desc = rng.choice(["Annual meeting", "Hybrid event series",
                               "Archival proceedings", "Journal volume"])
            out.append(f' <span class="event-desc">{desc}</span>')
        out.append("</li>\n</ul>\n")
    out.append("</section>\n")
    out.append(FOOT)
    return "".join(out)


def render_entry(entry: dict) -> str:
    out = ['<div class="paper-entry">\n']
    if entry["title"] is not None:
        if entry["pdf"]:
            out.append(f'<a class="pdf-link" href="/{entry["aid"]}.pdf">pdf</a>\n')
        out.append(f'<strong><a class="paper-title" href="/{entry["aid"]}/">'
                   f'{html.escape(entry["title"])}</a></strong>\n')
    authors = entry["authors"]
    if isinstance(authors, str):
        out.append(f'<span class="paper-authors">{html.escape(authors)}</span>\n')
    elif authors:
        links = ", ".join(
            f'<a href="/people/{surname_token(a)}/">{html.escape(a)}</a>'
            for a in authors)
        out.append(f'<span class="paper-authors">{links}</span>\n')
    if entry["abstract"]:
        out.append(f'<div class="paper-abstract">{html.escape(entry["abstract"])}'
                   "</div>\n")
    if entry["bibkey"]:
        out.append(f'<span class="bibkey">{entry["bibkey"]}</span>\n')
    out.append("</div>\n")
    return "".join(out)


def render_proceedings(venue_key: str, venue_name: str, year: int,
                       entries: list[dict]) -> str:
    out = [HEAD.format(title=f"{venue_name} {year}")]
    out.append(f'<section class="proceedings-page" data-conf="{venue_key}-{year}">\n')
    out.append(f"<h1>{html.escape(event_title(venue_name, venue_key, year))}</h1>\n")
    out.append('<div class="paper-list">\n')
    for entry in entries:
        out.append(render_entry(entry))
    out.append("</div>\n</section>\n")
    out.append(FOOT)
    return "".join(out)


def spot(aid: str, field: str, value: str) -> dict:
    return {"anthology_id": aid, "field": field, "value": value}


def build_manifest(pages: dict[tuple[str, int], list[dict]]) -> dict:
    venue_names = {key: name for key, name, _ in VENUES}
    entries_by_id = {
        e["aid"]: e for page in pages.values() for e in page if e["title"] is not None
    }

    def authors_joined(aid: str) -> str:
        authors = entries_by_id[aid]["authors"]
        if isinstance(authors, str):
            return "; ".join(
                p.strip() for p in authors.replace(" and ", ", ").split(",") if p.strip())
        return "; ".join(authors)

    manifest_pages = [{
        "path": "index.html", "kind": "index",
        "expected_records": len(VENUES), "spot_checks": [],
    }]
    for key, name, _ in VENUES:
        manifest_pages.append({
            "path": f"venues/{key}.html", "kind": "venue",
            "expected_records": len(YEARS), "spot_checks": [],
        })

    spot_plan = {
        ("acl", 2021): [
            spot("2021.acl-long.499", "title", TARGETS[0]["title"]),
            spot("2021.acl-long.499", "abstract", TARGETS[0]["abstract"]),
            spot("2021.acl-long.499", "pdf_url", f"{BASE}2021.acl-long.499.pdf"),
            spot("2021.acl-long.500", "title", TARGETS[1]["title"]),
            spot("2021.acl-long.500", "venue_key", "acl"),
        ],
        ("naacl", 2022): [
            spot("2022.naacl-main.210", "title", TARGETS[2]["title"]),
            spot("2022.naacl-main.210", "year", "2022"),
        ],
        ("emnlp", 2022): [
            spot("2022.emnlp-main.403", "title", TARGETS[3]["title"]),
            spot("2022.emnlp-main.403", "bibkey", "tang-etal-2022-etrica"),
            spot("2022.emnlp-main.403", "page_url", f"{BASE}2022.emnlp-main.403/"),
        ],
        ("acl", 2019): [
            spot("2019.acl-long.900", "authors", "Ann Alpha; Bob Beta; Carol Gamma"),
            spot("2019.acl-long.900", "abstract", ""),
        ],
        ("coling", 2020): [
            spot("2020.coling-1.902", "title", ENTITY_TITLE),
        ],
        ("emnlp", 2020): [
            spot("2020.emnlp-main.901", "authors", ""),
            spot("2020.emnlp-main.901", "pdf_url", ""),
        ],
    }

    for venue_key, _, _ in VENUES:
        for year in YEARS:
            entries = pages[(venue_key, year)]
            real = [e for e in entries if e["title"] is not None]
            manifest_pages.append({
                "path": f"proceedings/{venue_key}-{year}.html",
                "kind": "proceedings",
                "expected_records": len(real),
                "spot_checks": spot_plan.get((venue_key, year), []),
            })
    return {"pages": manifest_pages}


def main() -> int:
    rng = random.Random(SEED)
    pages = build_entries(rng)
    validate(pages)

    venue_names = {key: name for key, name, _ in VENUES}
    (OUT / "venues").mkdir(parents=True, exist_ok=True)
    (OUT / "proceedings").mkdir(parents=True, exist_ok=True)

    (OUT / "index.html").write_text(render_index(), encoding="utf-8")
    render_rng = random.Random(SEED + 1)
    for key, name, _ in VENUES:
        (OUT / "venues" / f"{key}.html").write_text(
            render_venue(key, name, render_rng), encoding="utf-8")
    for (venue_key, year), entries in pages.items():
        page = render_proceedings(venue_key, venue_names[venue_key], year, entries)
        (OUT / "proceedings" / f"{venue_key}-{year}.html").write_text(
            page, encoding="utf-8")

    manifest = build_manifest(pages)
    (OUT / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    total = sum(
        1 for page in pages.values() for e in page if e["title"] is not None)
    print(f"wrote {1 + len(VENUES) + len(pages)} pages, {total} paper records, "
          f"manifest with {len(manifest['pages'])} page entries -> {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
