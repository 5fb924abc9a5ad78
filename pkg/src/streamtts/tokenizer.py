"""Word-to-token-id mapping for the streaming path.

No tokenizer is trained here; the text vocabulary is whatever the corpus
declares. Two implementations cover the two deployment modes:

* ``VocabTokenizer`` - an explicit word -> [ids] table (JSON file), with
  out-of-vocabulary words mapped to the reserved UNK id and counted.
* ``HashTokenizer`` - a stateless fallback deriving one id per word from a
  hash, skipping reserved ids. Useful for mock-backend runs where token
  identity only needs to be deterministic, and for feeds without a vocab
  file. It has no out-of-vocabulary words by construction.

Both honor the per-word output cap from config; the cap is what makes the
session context bound a compile-time constant.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .config import StreamConfig
from .errors import TokenizationFailure
from .rng import fnv1a64


class Tokenizer(Protocol):
    def encode_word(self, word: str) -> list[int]: ...


class VocabTokenizer:
    """Explicit vocabulary table; OOV words map to the UNK id."""

    def __init__(self, mapping: Mapping[str, Sequence[int]], cfg: StreamConfig) -> None:
        self._table: dict[str, list[int]] = {}
        self._unk_id = cfg.unk_id
        self.oov_count = 0
        for word, ids in mapping.items():
            ids = [int(t) for t in ids]
            if not ids:
                raise TokenizationFailure(f"vocab entry {word!r} maps to no tokens")
            if len(ids) > cfg.max_text_tokens_per_word:
                raise TokenizationFailure(
                    f"vocab entry {word!r} exceeds {cfg.max_text_tokens_per_word} "
                    f"tokens per word")
            for t in ids:
                if not 0 <= t < cfg.vocab_size:
                    raise TokenizationFailure(f"vocab entry {word!r}: id {t} out of range")
                if t == cfg.marker_id:
                    raise TokenizationFailure(
                        f"vocab entry {word!r} uses the reserved marker id {t}")
            self._table[word] = ids

    @classmethod
    def from_file(cls, path: str | Path, cfg: StreamConfig) -> "VocabTokenizer":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise TokenizationFailure(f"{path}: vocab file must be a JSON object")
        return cls(data, cfg)

    def encode_word(self, word: str) -> list[int]:
        ids = self._table.get(word)
        if ids is None:
            self.oov_count += 1
            return [self._unk_id]
        return list(ids)


class HashTokenizer:
    """One deterministic id per word, avoiding the reserved ids."""

    def __init__(self, cfg: StreamConfig) -> None:
        self._vocab_size = cfg.vocab_size
        self._reserved = {cfg.marker_id, cfg.unk_id}

    def encode_word(self, word: str) -> list[int]:
        token = fnv1a64(word.encode("utf-8")) % self._vocab_size
        while token in self._reserved:
            token = (token + 1) % self._vocab_size
        return [token]


def encode_words(tokenizer: Tokenizer, words: Sequence[str], cfg: StreamConfig) -> list[int]:
    """Encode a word sequence, enforcing the per-word cap on any tokenizer."""
    out: list[int] = []
    for word in words:
        ids = tokenizer.encode_word(word)
        if not ids:
            raise TokenizationFailure(f"tokenizer returned no ids for {word!r}")
        if len(ids) > cfg.max_text_tokens_per_word:
            raise TokenizationFailure(
                f"{word!r} tokenized to {len(ids)} ids, cap is "
                f"{cfg.max_text_tokens_per_word}")
        out.extend(ids)
    return out
