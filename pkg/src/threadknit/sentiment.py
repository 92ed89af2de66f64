"""Lexicon-based sentiment scoring.

A lexicon maps lowercase tokens to signed valences.  A status's score is
the *sum* of the valences of its cleaned tokens (unknown tokens count
zero); a batch's alpha is the mean score over its statuses.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from math import fsum
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DegeneracyError, LexiconError
from .ingest import IterationBatch

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_LOOSE_APOSTROPHE_RE = re.compile(r"(?<![0-9a-z])'|'(?![0-9a-z])")


def clean_text(raw: str) -> str:
    """Normalize status text for token lookup.

    URLs and @-mentions are removed outright; '#' sigils are stripped but
    the tag word is kept; everything is lowercased; punctuation becomes a
    space except apostrophes inside a word; whitespace is collapsed.
    Idempotent.
    """
    text = _URL_RE.sub(" ", raw)
    text = _MENTION_RE.sub(" ", text)
    text = text.replace("’", "'").lower()
    chars = [ch if ch == "'" or ch.isalnum() else " " for ch in text]
    text = _LOOSE_APOSTROPHE_RE.sub(" ", "".join(chars))
    return " ".join(text.split())


@dataclass(frozen=True)
class Lexicon:
    """Immutable token -> valence table."""

    name: str
    entries: Mapping[str, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", dict(self.entries))
        if not self.entries:
            raise LexiconError(f"lexicon {self.name!r} is empty")
        for token, valence in self.entries.items():
            if not token or token != token.lower() or any(c.isspace() for c in token):
                raise LexiconError(
                    f"lexicon {self.name!r}: bad token {token!r} "
                    "(must be lowercase and whitespace-free)"
                )
            if not math.isfinite(valence):
                raise LexiconError(f"lexicon {self.name!r}: non-finite valence for {token!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def valence(self, token: str) -> float:
        return self.entries.get(token, 0.0)


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    """Read a tab-separated ``token<TAB>valence`` file.

    Blank lines and lines starting with '#' are skipped.  Duplicate tokens
    are an error.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as err:
        raise LexiconError(f"cannot read lexicon {path}: {err}") from err
    return parse_lexicon(raw, name=name or path.stem)


def parse_lexicon(raw: str, name: str = "lexicon") -> Lexicon:
    entries: dict[str, float] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(
                f"{name}:{lineno}: expected 'token<TAB>valence', got {line!r}"
            )
        token = parts[0].strip()
        try:
            valence = float(parts[1])
        except ValueError:
            raise LexiconError(f"{name}:{lineno}: bad valence {parts[1]!r}") from None
        if token in entries:
            raise LexiconError(f"{name}:{lineno}: duplicate token {token!r}")
        entries[token] = valence
    if not entries:
        raise LexiconError(f"{name}: no entries")
    return Lexicon(name=name, entries=entries)


def bundled_lexicon() -> Lexicon:
    """The lexicon shipped with the package."""
    raw = resources.files("threadknit").joinpath("data/lexicon.tsv").read_text("utf-8")
    return parse_lexicon(raw, name="bundled")


def score_text(text: str, lexicon: Lexicon) -> float:
    """Sum of valences over the cleaned tokens of ``text``.

    The score is additive over concatenation and zero for text with no
    lexicon tokens.
    """
    cleaned = clean_text(text)
    if not cleaned:
        return 0.0
    return fsum(lexicon.valence(token) for token in cleaned.split(" "))


def batch_alpha(batch: IterationBatch, lexicon: Lexicon) -> float:
    """Mean per-status score for one iteration.  Undefined for an empty batch."""
    if not batch.statuses:
        raise DegeneracyError(
            f"subject {batch.spec.subject!r} iteration {batch.index}: "
            "sentiment undefined for an empty batch"
        )
    scores = [score_text(status.text, lexicon) for status in batch.statuses]
    return fsum(scores) / len(scores)


def aggregate_alpha(alphas: Sequence[float]) -> float:
    """Mean of per-iteration alphas, carried unrounded."""
    if not alphas:
        raise DegeneracyError("no iteration alphas to aggregate")
    return fsum(alphas) / len(alphas)
