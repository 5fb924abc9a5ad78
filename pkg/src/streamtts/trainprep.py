"""Training-data preparation: stochastic boundary insertion.

Each utterance yields one fine-tuning example. With probability
``full_utterance_prob`` the example is the full, unmodified pair
(text, speech). Otherwise a word index m is sampled uniformly over the
words with usable timestamps, the boundary marker is spliced into the
text right after word m's token span, and the target speech is truncated
to that word's audio end time:

    target_len = max(min_target_frames, floor(end_time * frame_rate))

The floor is computed over the end time expressed in integer milliseconds
(``end_ms * frame_rate // 1000``) so results never depend on float
rounding near frame boundaries. Lengths exceeding the stored speech
stream (aligner end times can run slightly past it) are clamped to the
stream length and counted.

Draw order is fixed - mode first, then m - so a seed reproduces the same
examples in any implementation. Per-utterance streams are derived from
(seed, epoch, utterance id), making output independent of worker
scheduling.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .config import StreamConfig, require_valid
from .errors import NoAlignedWords, UnalignedBoundaryWord
from .rng import SeededRng, derive_seed
from .types import AlignedUtterance, CorpusRecord, seconds_to_ms


class ExampleMode(Enum):
    FULL = "full"
    TRUNCATED = "trunc"


@dataclass(frozen=True)
class TrainingExample:
    utterance_id: str
    mode: ExampleMode
    input_tokens: tuple[int, ...]
    target_tokens: tuple[int, ...]
    boundary_word_m: int | None = None       # 1-based sampled word index
    boundary_audio_ms: int | None = None     # that word's audio end time
    marker_position: int | None = None       # index of the marker in input_tokens
    target_clamped: bool = False             # truncation hit the stream end


def sample_mode(rng: SeededRng, full_utterance_prob: float) -> ExampleMode:
    """FULL with the given probability; consumes exactly one draw."""
    return ExampleMode.FULL if rng.bernoulli(full_utterance_prob) else ExampleMode.TRUNCATED


def insert_boundary(utt: AlignedUtterance, m: int, marker_id: int) -> tuple[int, ...]:
    """Splice the marker into the text right after word m's token span.

    m is 1-based. The word must have timestamps and a nonempty span;
    removing the marker from the result recovers the original tokens.
    """
    if not 1 <= m <= len(utt.words):
        raise IndexError(f"word index {m} outside 1..{len(utt.words)}")
    word = utt.words[m - 1]
    if not word.aligned:
        raise UnalignedBoundaryWord(f"{utt.utterance_id}: word {m} has no timestamps")
    if word.token_count <= 0:
        raise UnalignedBoundaryWord(f"{utt.utterance_id}: word {m} has an empty token span")
    split = word.token_end
    return utt.text_tokens[:split] + (marker_id,) + utt.text_tokens[split:]


def strip_marker(tokens: Sequence[int], marker_id: int) -> tuple[int, ...]:
    """Inverse of :func:`insert_boundary` over the text side."""
    return tuple(t for t in tokens if t != marker_id)


def truncated_length(end_ms: int, cfg: StreamConfig, speech_len: int) -> tuple[int, bool]:
    """Target length for a boundary ending at ``end_ms`` milliseconds.

    Returns (length, clamped). Exact integer arithmetic throughout.
    """
    frames = end_ms * cfg.frame_rate // 1000
    length = max(cfg.min_target_frames, frames)
    if length > speech_len:
        return speech_len, True
    return length, False


def truncate_speech(
    utt: AlignedUtterance, boundary_end_s: float, cfg: StreamConfig
) -> tuple[int, ...]:
    """Prefix of the speech stream covering audio up to ``boundary_end_s``."""
    if boundary_end_s < 0:
        raise ValueError(f"boundary end {boundary_end_s} before audio start")
    length, _ = truncated_length(seconds_to_ms(boundary_end_s), cfg, utt.speech_len)
    return utt.speech_tokens[:length]


def make_example(
    utt: AlignedUtterance, rng: SeededRng, cfg: StreamConfig
) -> TrainingExample:
    """One training example; mode drawn first, then the boundary word."""
    candidates = utt.aligned_words()
    if not candidates:
        raise NoAlignedWords(utt.utterance_id)
    mode = sample_mode(rng, cfg.full_utterance_prob)
    if mode is ExampleMode.FULL:
        return TrainingExample(
            utterance_id=utt.utterance_id,
            mode=mode,
            input_tokens=utt.text_tokens,
            target_tokens=utt.speech_tokens,
        )
    word = candidates[rng.randrange(len(candidates))]
    end_ms = word.audio_end_ms
    length, clamped = truncated_length(end_ms, cfg, utt.speech_len)
    return TrainingExample(
        utterance_id=utt.utterance_id,
        mode=mode,
        input_tokens=insert_boundary(utt, word.word_index, cfg.marker_id),
        target_tokens=utt.speech_tokens[:length],
        boundary_word_m=word.word_index,
        boundary_audio_ms=end_ms,
        marker_position=word.token_end,
        target_clamped=clamped,
    )


@dataclass(frozen=True)
class PrepSummary:
    examples: int
    full: int
    truncated: int
    skipped_no_aligned_words: int
    clamped_targets: int
    mean_length_ratio: float | None   # mean target/full length over truncated examples
    seed: int
    epochs: int
    boundary_distribution: str = "uniform_over_aligned_words"

    def to_json(self) -> dict:
        return {
            "examples": self.examples,
            "full": self.full,
            "trunc": self.truncated,
            "skipped_no_aligned_words": self.skipped_no_aligned_words,
            "clamped_targets": self.clamped_targets,
            "mean_length_ratio": self.mean_length_ratio,
            "seed": self.seed,
            "epochs": self.epochs,
            "boundary_distribution": self.boundary_distribution,
        }


def example_to_json(example: TrainingExample) -> dict:
    payload: dict = {
        "id": example.utterance_id,
        "mode": example.mode.value,
        "input_tokens": list(example.input_tokens),
    }
    if example.mode is ExampleMode.TRUNCATED:
        payload["marker_pos"] = example.marker_position
        payload["m"] = example.boundary_word_m
        payload["a_m_ms"] = example.boundary_audio_ms
    payload["target_tokens"] = list(example.target_tokens)
    return payload


def prepare_corpus(
    records: Sequence[CorpusRecord],
    cfg: StreamConfig,
    output_path: str | Path,
    epochs: int = 1,
) -> PrepSummary:
    """Write one example per utterance per epoch as JSONL.

    Deterministic for a given seed. The summary lands next to the output
    as ``<output>.summary.json``. Files are written under a ``.partial``
    suffix and renamed only when complete.
    """
    require_valid(cfg)
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    output_path = Path(output_path)
    partial = output_path.with_name(output_path.name + ".partial")

    full = truncated = skipped = clamped = 0
    ratio_sum = 0.0
    with open(partial, "w", encoding="utf-8") as handle:
        for epoch in range(epochs):
            for record in records:
                utt = record.utterance
                rng = SeededRng(derive_seed(cfg.seed, "trainprep", epoch, utt.utterance_id))
                try:
                    example = make_example(utt, rng, cfg)
                except NoAlignedWords:
                    skipped += 1
                    continue
                if example.mode is ExampleMode.FULL:
                    full += 1
                else:
                    truncated += 1
                    clamped += int(example.target_clamped)
                    if utt.speech_len > 0:
                        ratio_sum += len(example.target_tokens) / utt.speech_len
                handle.write(json.dumps(example_to_json(example)) + "\n")
    os.replace(partial, output_path)

    summary = PrepSummary(
        examples=full + truncated,
        full=full,
        truncated=truncated,
        skipped_no_aligned_words=skipped,
        clamped_targets=clamped,
        mean_length_ratio=(ratio_sum / truncated) if truncated else None,
        seed=cfg.seed,
        epochs=epochs,
    )
    summary_path = output_path.with_name(output_path.name + ".summary.json")
    summary_partial = summary_path.with_name(summary_path.name + ".partial")
    summary_partial.write_text(json.dumps(summary.to_json(), indent=2) + "\n", encoding="utf-8")
    os.replace(summary_partial, summary_path)
    return summary
