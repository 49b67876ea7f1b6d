"""Token extraction and document-term matrix construction.

Each project becomes one text document built from the names its author
chose (sprites, costumes, backdrops, sounds, variables, lists), broadcast
messages, and every string typed into a block input.  Multiword strings
are split on whitespace and punctuation; letters outside ASCII (umlauts,
sharp s) are kept as word characters.

Preprocessing applies, in order: lowercasing, stopword removal (English,
German and a fixed domain list of default asset names), removal of
pure-digit tokens, removal of single-character tokens.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from .model import (
    Block,
    BlockRef,
    Literal,
    MenuSelection,
    Project,
    iter_project_blocks,
)


class EmptyVocabularyError(ValueError):
    """No term met the corpus frequency floor."""


# Default asset and editor vocabulary that carries no authorial signal.
CUSTOM_STOPWORDS = (
    "stage",
    "bühnenbild",
    "pop",
    "plopp",
    "kostüm",
    "figur",
    "block",
    "hintergrund",
)

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

_BROADCAST_OPCODES = frozenset(
    {"event_broadcast", "event_broadcastandwait", "event_whenbroadcastreceived"}
)


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("scratchstats.data").joinpath(name).read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


@lru_cache(maxsize=None)
def _snapshot(name: str) -> frozenset[str]:
    return _load_wordlist(name)


@dataclass(frozen=True)
class StopwordConfig:
    """Stopword sources; extra terms can be layered on per run."""

    use_english: bool = True
    use_german: bool = True
    use_custom: bool = True
    extra: tuple[str, ...] = ()

    def merged(self) -> frozenset[str]:
        words: set[str] = set()
        if self.use_english:
            words |= _snapshot("stopwords_en.txt")
        if self.use_german:
            words |= _snapshot("stopwords_de.txt")
        if self.use_custom:
            words |= set(CUSTOM_STOPWORDS)
        words |= {w.lower() for w in self.extra}
        return frozenset(words)


@dataclass(frozen=True)
class TokenDocument:
    project_id: str
    tokens: tuple[str, ...]


def split_words(text: str) -> list[str]:
    return _WORD_RE.findall(text)


def extract_tokens(project: Project) -> TokenDocument:
    """Raw tokens in a deterministic order, original casing preserved."""
    pieces: list[str] = []
    for sprite in project.targets():
        pieces.append(sprite.name)
        pieces.extend(sprite.costumes)
        pieces.extend(sprite.sounds)
        pieces.extend(name for name, _ in sprite.variables)
        pieces.extend(sprite.lists)
    for block in iter_project_blocks(project):
        if block.opcode in _BROADCAST_OPCODES:
            if block.inputs and isinstance(block.inputs[0], MenuSelection):
                pieces.append(block.inputs[0].value)
            continue
        for inp in block.inputs:
            if isinstance(inp, Literal) and isinstance(inp.value, str):
                pieces.append(inp.value)
    tokens: list[str] = []
    for piece in pieces:
        tokens.extend(split_words(piece))
    return TokenDocument(project_id=project.project_id, tokens=tuple(tokens))


def preprocess(
    doc: TokenDocument, stopwords: StopwordConfig | None = None
) -> TokenDocument:
    """Lowercase, drop stopwords, drop digit runs, drop one-char tokens."""
    merged = (stopwords or StopwordConfig()).merged()
    kept: list[str] = []
    for token in doc.tokens:
        token = token.lower()
        if token in merged:
            continue
        if token.isdigit():
            continue
        if len(token) < 2:
            continue
        kept.append(token)
    return TokenDocument(project_id=doc.project_id, tokens=tuple(kept))


@dataclass(frozen=True)
class DocumentTermMatrix:
    """Dense count matrix; rows follow the input document order."""

    counts: np.ndarray  # shape (documents, terms), dtype int64
    vocabulary: tuple[str, ...]
    doc_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.counts.shape != (len(self.doc_ids), len(self.vocabulary)):
            raise ValueError("matrix shape does not match labels")


def build_dtm(documents: list[TokenDocument], min_count: int = 10) -> DocumentTermMatrix:
    """Count matrix over terms whose corpus frequency reaches min_count.

    The vocabulary is sorted lexicographically; documents whose tokens all
    fall below the floor become all-zero rows, never dropped rows.
    """
    corpus_freq: dict[str, int] = {}
    for doc in documents:
        for token in doc.tokens:
            corpus_freq[token] = corpus_freq.get(token, 0) + 1
    vocabulary = tuple(sorted(t for t, n in corpus_freq.items() if n >= min_count))
    if not vocabulary:
        raise EmptyVocabularyError(
            f"no term occurs at least {min_count} times in the corpus"
        )
    index = {t: i for i, t in enumerate(vocabulary)}
    counts = np.zeros((len(documents), len(vocabulary)), dtype=np.int64)
    for row, doc in enumerate(documents):
        for token in doc.tokens:
            col = index.get(token)
            if col is not None:
                counts[row, col] += 1
    return DocumentTermMatrix(
        counts=counts,
        vocabulary=vocabulary,
        doc_ids=tuple(d.project_id for d in documents),
    )
