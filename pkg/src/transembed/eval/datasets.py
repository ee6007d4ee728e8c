"""Loaders for the gold-standard file formats and the fetch manifest.

Formats, one item per line (UTF-8, ``#`` comments and blank lines ignored):

* similarity: ``word1,word2,score`` (comma, tab or whitespace separated),
  optional header row
* TOEFL: ``cue | c1 c2 c3 c4 | answer_index``
* syn/ant: ``word1,word2,label`` with label synonym/syn or antonym/ant
* analogies: ``: section`` lines open a section, then ``a b c d``

Words are lowercased to match corpus tokenization.
"""
from __future__ import annotations

import json
import logging
import math
import re
from importlib import resources
from pathlib import Path

from .analogy import AnalogyQuestion
from .similarity import SimilarityDataset
from .synant import SynAntSet
from .toefl import ToeflQuestion

log = logging.getLogger(__name__)

_LABELS = {"synonym": "synonym", "syn": "synonym", "s": "synonym",
           "antonym": "antonym", "ant": "antonym", "a": "antonym"}


def load_manifest() -> dict:
    return json.loads(resources.files(__package__).joinpath("manifest.json").read_text())


def expected_rows(name: str) -> int | None:
    for entry in load_manifest()["datasets"]:
        if entry["name"] == name:
            return entry["rows"]
    return None


def check_rows(name: str, n: int) -> bool:
    want = expected_rows(name)
    if want is not None and want != n:
        log.warning("%s: manifest expects %d rows, file has %d", name, want, n)
        return False
    return True


def _lines(path):
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            line = line.strip()
            if line and not line.startswith("#"):
                yield n, line


def split_fields(line: str) -> list[str]:
    if "\t" in line:
        return [x.strip() for x in line.split("\t")]
    if "," in line:
        return [x.strip() for x in line.split(",")]
    return line.split()


def load_similarity(path, name: str | None = None) -> SimilarityDataset:
    name = name or Path(path).stem
    items, seen = [], set()
    for n, line in _lines(path):
        parts = split_fields(line)
        if len(parts) < 3:
            raise ValueError(f"{path}:{n}: expected word1,word2,score")
        try:
            score = float(parts[2])
        except ValueError:
            if not items and not seen:
                continue  # header row
            raise ValueError(f"{path}:{n}: score {parts[2]!r} is not a number") from None
        if not math.isfinite(score):
            raise ValueError(f"{path}:{n}: score must be finite")
        w1, w2 = parts[0].lower(), parts[1].lower()
        key = frozenset((w1, w2))
        if key in seen:
            log.warning("%s:%d: duplicate pair %s,%s ignored", path, n, w1, w2)
            continue
        seen.add(key)
        items.append((w1, w2, score))
    return SimilarityDataset(items, name)


def load_toefl(path) -> list[ToeflQuestion]:
    out = []
    for n, line in _lines(path):
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise ValueError(f"{path}:{n}: expected 'cue | c1 c2 c3 c4 | answer_index'")
        choices = tuple(parts[1].lower().split())
        if len(choices) != 4:
            raise ValueError(f"{path}:{n}: expected 4 choices, got {len(choices)}")
        try:
            answer = int(parts[2])
        except ValueError:
            raise ValueError(f"{path}:{n}: answer index {parts[2]!r} is not an integer") from None
        try:
            out.append(ToeflQuestion(parts[0].lower(), choices, answer))
        except ValueError as e:
            raise ValueError(f"{path}:{n}: {e}") from None
    return out


def load_synant(path, name: str | None = None) -> SynAntSet:
    pairs = []
    for n, line in _lines(path):
        parts = split_fields(line)
        if len(parts) != 3:
            raise ValueError(f"{path}:{n}: expected word1,word2,label")
        label = _LABELS.get(parts[2].lower())
        if label is None:
            if not pairs:
                continue  # header row
            raise ValueError(f"{path}:{n}: unknown label {parts[2]!r}")
        pairs.append((parts[0].lower(), parts[1].lower(), label))
    return SynAntSet(pairs, name or Path(path).stem)


def section_category(section: str, sections: dict | None = None) -> str:
    """Map an analogy section name to syntactic/semantic.

    Names listed in the manifest win; unlisted names starting with ``gram``
    are syntactic, everything else semantic.
    """
    sections = sections if sections is not None else load_manifest()["analogy_sections"]
    for category, names in sections.items():
        if section in names:
            return category
    return "syntactic" if section.startswith("gram") else "semantic"


def load_analogies(path, sections: dict | None = None) -> list[AnalogyQuestion]:
    sections = sections if sections is not None else load_manifest()["analogy_sections"]
    out = []
    section, category = "", None
    for n, line in _lines(path):
        if line.startswith(":"):
            section = line[1:].strip()
            category = section_category(section, sections)
            continue
        words = re.split(r"\s+", line.lower())
        if len(words) != 4:
            raise ValueError(f"{path}:{n}: expected 4 words, got {len(words)}")
        if category is None:
            raise ValueError(f"{path}:{n}: question before any ': section' line")
        if len(set(words)) < 4:
            log.warning("%s:%d: repeated word in analogy, skipped", path, n)
            continue
        out.append(AnalogyQuestion(*words, category=category, section=section))
    return out
