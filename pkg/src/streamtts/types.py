"""Aligned-utterance domain types.

Text and speech tokens are plain ints (vocabulary / acoustic codebook
indices). Word token spans are stored 0-based half-open ``[begin, end)``;
inputs that arrive 1-based inclusive must be converted at ingestion so all
concatenation code downstream is slice arithmetic with no off-by-one
cases.

All types here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class WordAlignment:
    """One word's token span and (possibly missing) audio timestamps.

    ``aligned=False`` keeps the word in the utterance but marks it
    ineligible as a boundary candidate; its timestamps are not trusted.
    """

    word_index: int          # 1-based position within the utterance
    surface: str
    token_begin: int         # half-open span over text tokens
    token_end: int
    audio_start_s: float
    audio_end_s: float
    aligned: bool = True

    @property
    def token_count(self) -> int:
        return self.token_end - self.token_begin

    @property
    def audio_end_ms(self) -> int:
        """End time as integer milliseconds (round-to-nearest, ties away from zero)."""
        return seconds_to_ms(self.audio_end_s)


def seconds_to_ms(seconds: float) -> int:
    """Canonical float-seconds to integer-milliseconds conversion.

    Defined once so truncation arithmetic is exact integer math everywhere:
    round half away from zero at the third decimal.
    """
    scaled = seconds * 1000.0
    return int(scaled + 0.5) if scaled >= 0 else -int(-scaled + 0.5)


@dataclass(frozen=True)
class AlignedUtterance:
    """Text tokens, speech tokens, and per-word alignments for one utterance."""

    utterance_id: str
    text_tokens: tuple[int, ...]
    speech_tokens: tuple[int, ...]
    words: tuple[WordAlignment, ...]
    audio_duration_s: float

    @property
    def text_len(self) -> int:
        return len(self.text_tokens)

    @property
    def speech_len(self) -> int:
        return len(self.speech_tokens)

    def aligned_words(self) -> tuple[WordAlignment, ...]:
        """Words eligible as boundary candidates."""
        return tuple(w for w in self.words if w.aligned and w.token_count > 0)

    def transcript(self) -> str:
        return " ".join(w.surface for w in self.words)


@dataclass(frozen=True)
class CorpusRecord:
    """An aligned utterance plus corpus-level metadata."""

    utterance: AlignedUtterance
    speaker_id: str | None = None
    is_reference_eligible: bool = field(default=True)

    @property
    def utterance_id(self) -> str:
        return self.utterance.utterance_id
