"""Incremental word stream to per-step model inputs.

Words accumulate in a buffer; a chunk becomes available once the buffer
holds the current segment plus its full lookahead (chunk + lookahead
words), or immediately once the stream is finalized. Consuming a chunk
advances the cursor by the current segment only - lookahead words are not
consumed and reappear as the next chunk's current words.

The model input for a chunk is

    tokens(current words) ++ [marker] ++ tokens(lookahead words)

except the final chunk, which carries no marker and no lookahead so the
synthesizer terminates naturally (its training distribution includes
unmarked full utterances). ``final_marker`` in config forces marker form
onto the final chunk for ablations.

Word boundary is whitespace; punctuation stays attached to its word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import StreamConfig, require_valid
from .errors import PushAfterFinalize
from .tokenizer import Tokenizer, encode_words


def split_words(text: str) -> list[str]:
    """Whitespace word split; punctuation remains attached."""
    return text.split()


@dataclass(frozen=True)
class Chunk:
    index: int                    # 1-based step counter
    cur_words: tuple[str, ...]
    fut_words: tuple[str, ...]
    is_final: bool


@dataclass(frozen=True)
class ModelInput:
    tokens: tuple[int, ...]
    cur_token_count: int
    marker_position: int | None   # None on a marker-less final chunk

    @property
    def has_marker(self) -> bool:
        return self.marker_position is not None


class Chunker:
    """Single-owner buffer between a text producer and the session."""

    def __init__(self, cfg: StreamConfig) -> None:
        require_valid(cfg)
        self._cfg = cfg
        self._words: list[str] = []
        self._cursor = 0
        self._finalized = False
        self._next_index = 1

    @property
    def finalized(self) -> bool:
        return self._finalized

    @property
    def pending_words(self) -> int:
        return len(self._words) - self._cursor

    @property
    def drained(self) -> bool:
        """True once the stream is finalized and every word was consumed."""
        return self._finalized and self._cursor == len(self._words)

    def push_words(self, words: Sequence[str]) -> None:
        if self._finalized:
            raise PushAfterFinalize("stream already finalized")
        self._words.extend(words)

    def push_text(self, text: str) -> None:
        self.push_words(split_words(text))

    def finalize_stream(self) -> None:
        self._finalized = True

    def try_next_chunk(self) -> Chunk | None:
        """Next chunk, or None while awaiting more text."""
        cfg = self._cfg
        remaining = self.pending_words
        if remaining <= 0:
            return None
        if not self._finalized and remaining < cfg.chunk_words + cfg.lookahead_words:
            return None
        cur = tuple(self._words[self._cursor:self._cursor + cfg.chunk_words])
        fut_start = self._cursor + len(cur)
        fut = tuple(self._words[fut_start:fut_start + cfg.lookahead_words])
        self._cursor += len(cur)
        is_final = self._finalized and self._cursor == len(self._words)
        chunk = Chunk(index=self._next_index, cur_words=cur, fut_words=fut, is_final=is_final)
        self._next_index += 1
        return chunk


def build_input(chunk: Chunk, tokenizer: Tokenizer, cfg: StreamConfig) -> ModelInput:
    """Token layout for one chunk."""
    cur_tokens = encode_words(tokenizer, chunk.cur_words, cfg)
    marker_form = not chunk.is_final or cfg.final_marker
    if not marker_form:
        return ModelInput(tokens=tuple(cur_tokens), cur_token_count=len(cur_tokens),
                          marker_position=None)
    fut_tokens = encode_words(tokenizer, chunk.fut_words, cfg)
    tokens = tuple(cur_tokens) + (cfg.marker_id,) + tuple(fut_tokens)
    return ModelInput(tokens=tokens, cur_token_count=len(cur_tokens),
                      marker_position=len(cur_tokens))
