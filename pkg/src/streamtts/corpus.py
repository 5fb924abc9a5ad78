"""Corpus ingestion and validation.

Input is a normalized JSONL schema rather than any aligner's raw output,
one record per line:

    {"id": str, "text_tokens": [int], "speech_tokens": [int],
     "duration_s": float,
     "words": [{"w": str, "b": int, "e": int, "t0": float, "t1": float,
                "aligned": bool}],
     "speaker": str?}

``b``/``e`` are 0-based half-open token indices; ``t0``/``t1`` seconds.
Malformed lines become rejection entries with machine-readable codes and
never abort the load; accepted + rejected always covers every input line.

Words with ``aligned: false`` are kept (they still occupy token spans) but
are ineligible as boundary candidates, and their timestamps are exempt
from time checks.
"""

from __future__ import annotations

import json
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .config import StreamConfig, require_valid
from .rng import SeededRng, derive_seed
from .types import AlignedUtterance, CorpusRecord, WordAlignment, seconds_to_ms

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)
_WS = re.compile(r"\s+")


def normalize_text(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace.

    The one normalization used for transcript blocklists and word error
    rate, applied identically to both sides of any comparison.
    """
    return _WS.sub(" ", text.lower().translate(_PUNCT_TABLE)).strip()


@dataclass(frozen=True)
class RejectedLine:
    line: int          # 1-based line number in the input file
    code: str
    detail: str = ""


@dataclass(frozen=True)
class CorpusStats:
    utterance_count: int
    total_words: int
    total_speech_tokens: int
    duration_histogram: dict[int, int]   # floor(seconds) -> count
    alignment_gap_count: int             # words lacking usable timestamps


def load_corpus(
    path: str | Path, cfg: StreamConfig
) -> tuple[list[CorpusRecord], list[RejectedLine]]:
    """Load and validate a JSONL corpus.

    IO failure raises; per-line problems land in the rejected list. Output
    order matches input order.
    """
    require_valid(cfg)
    accepted: list[CorpusRecord] = []
    rejected: list[RejectedLine] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                rejected.append(RejectedLine(lineno, "EmptyLine"))
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                rejected.append(RejectedLine(lineno, "MalformedJson", str(exc)))
                continue
            problem = _parse_record(raw, cfg, seen_ids)
            if isinstance(problem, RejectedLine):
                rejected.append(RejectedLine(lineno, problem.code, problem.detail))
            else:
                seen_ids.add(problem.utterance_id)
                accepted.append(problem)
    return accepted, rejected


def _parse_record(
    raw: object, cfg: StreamConfig, seen_ids: set[str]
) -> CorpusRecord | RejectedLine:
    def reject(code: str, detail: str = "") -> RejectedLine:
        return RejectedLine(0, code, detail)

    if not isinstance(raw, dict):
        return reject("NotAnObject")
    for key, kind in (("id", str), ("text_tokens", list), ("speech_tokens", list),
                      ("duration_s", (int, float)), ("words", list)):
        if key not in raw:
            return reject("MissingField", key)
        if not isinstance(raw[key], kind):
            return reject("WrongFieldType", key)

    utt_id = raw["id"]
    if utt_id in seen_ids:
        return reject("DuplicateId", utt_id)

    text_tokens = raw["text_tokens"]
    speech_tokens = raw["speech_tokens"]
    if not all(isinstance(t, int) and 0 <= t < cfg.vocab_size for t in text_tokens):
        return reject("TextTokenOutOfRange")
    if cfg.marker_id in text_tokens:
        return reject("MarkerCollision", f"reserved id {cfg.marker_id} present in text")
    if not all(isinstance(t, int) and 0 <= t < cfg.speech_vocab_size for t in speech_tokens):
        return reject("SpeechTokenOutOfRange")

    duration_s = float(raw["duration_s"])
    if duration_s <= 0:
        return reject("NonPositiveDuration")

    # Speech length must be consistent with duration, one second of slack
    # for trailing silence.
    expected_frames = seconds_to_ms(duration_s) * cfg.frame_rate // 1000
    if abs(len(speech_tokens) - expected_frames) > cfg.frame_rate:
        return reject(
            "TokenCountDurationMismatch",
            f"{len(speech_tokens)} speech tokens vs {expected_frames} expected frames")

    words: list[WordAlignment] = []
    for j, entry in enumerate(raw["words"], start=1):
        if not isinstance(entry, dict):
            return reject("WrongFieldType", f"words[{j - 1}]")
        try:
            word = WordAlignment(
                word_index=j,
                surface=str(entry["w"]),
                token_begin=int(entry["b"]),
                token_end=int(entry["e"]),
                audio_start_s=float(entry["t0"]),
                audio_end_s=float(entry["t1"]),
                aligned=bool(entry.get("aligned", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return reject("MalformedWord", f"words[{j - 1}]: {exc}")
        words.append(word)

    code = _check_spans_and_times(words, len(text_tokens), duration_s, cfg)
    if code is not None:
        return reject(*code)

    utterance = AlignedUtterance(
        utterance_id=utt_id,
        text_tokens=tuple(text_tokens),
        speech_tokens=tuple(speech_tokens),
        words=tuple(words),
        audio_duration_s=duration_s,
    )
    speaker = raw.get("speaker")
    return CorpusRecord(
        utterance=utterance,
        speaker_id=str(speaker) if speaker is not None else None,
        is_reference_eligible=bool(text_tokens) and bool(speech_tokens),
    )


def _check_spans_and_times(
    words: Sequence[WordAlignment], text_len: int, duration_s: float, cfg: StreamConfig
) -> tuple[str, str] | None:
    tolerance_s = cfg.alignment_tolerance_ms / 1000.0
    prev_end = 0
    prev_aligned: WordAlignment | None = None
    for word in words:
        if word.token_begin < 0 or word.token_end > text_len:
            return "SpanOutOfRange", f"word {word.word_index}"
        if word.token_begin >= word.token_end:
            return "EmptySpan", f"word {word.word_index}"
        if word.token_begin < prev_end:
            return "SpanOverlap", f"word {word.word_index}"
        prev_end = word.token_end
        if not word.aligned:
            continue
        if word.audio_start_s < 0 or word.audio_end_s <= word.audio_start_s:
            return "BadTimestamps", f"word {word.word_index}"
        if word.audio_end_s > duration_s:
            return "AlignmentExceedsAudio", (
                f"word {word.word_index} ends {word.audio_end_s}s > duration {duration_s}s")
        if prev_aligned is not None and prev_aligned.audio_end_s > word.audio_start_s + tolerance_s:
            return "TimestampInversion", f"words {prev_aligned.word_index}->{word.word_index}"
        prev_aligned = word
    return None


def dump_corpus(records: Iterable[CorpusRecord], path: str | Path) -> int:
    """Re-serialize records in the on-disk schema. Returns record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record_to_json(record)) + "\n")
            count += 1
    return count


def record_to_json(record: CorpusRecord) -> dict:
    utt = record.utterance
    payload = {
        "id": utt.utterance_id,
        "text_tokens": list(utt.text_tokens),
        "speech_tokens": list(utt.speech_tokens),
        "duration_s": utt.audio_duration_s,
        "words": [
            {"w": w.surface, "b": w.token_begin, "e": w.token_end,
             "t0": w.audio_start_s, "t1": w.audio_end_s, "aligned": w.aligned}
            for w in utt.words
        ],
    }
    if record.speaker_id is not None:
        payload["speaker"] = record.speaker_id
    return payload


def filter_eval_overlap(
    records: Sequence[CorpusRecord], blocklist: set[str]
) -> tuple[list[CorpusRecord], int]:
    """Drop records whose normalized transcript appears in the blocklist.

    Blocklist entries are expected pre-normalized (``normalize_text``);
    they are normalized again here so case-variant lists still work.
    Returns the kept records and the removed count.
    """
    normalized_block = {normalize_text(entry) for entry in blocklist}
    kept = [r for r in records
            if normalize_text(r.utterance.transcript()) not in normalized_block]
    return kept, len(records) - len(kept)


def corpus_stats(records: Sequence[CorpusRecord]) -> CorpusStats:
    histogram: dict[int, int] = {}
    total_words = 0
    total_speech = 0
    gaps = 0
    for record in records:
        utt = record.utterance
        total_words += len(utt.words)
        total_speech += len(utt.speech_tokens)
        gaps += sum(1 for w in utt.words if not w.aligned)
        bucket = int(utt.audio_duration_s)
        histogram[bucket] = histogram.get(bucket, 0) + 1
    return CorpusStats(
        utterance_count=len(records),
        total_words=total_words,
        total_speech_tokens=total_speech,
        duration_histogram=dict(sorted(histogram.items())),
        alignment_gap_count=gaps,
    )


def subsample(
    records: Sequence[CorpusRecord], count: int, seed: int
) -> list[CorpusRecord]:
    """Deterministic subsample of ``count`` records, order preserved.

    Selection depends only on (seed, utterance ids), not processing order:
    records are ranked by a per-id derived draw and the lowest ``count``
    keep their original relative order.
    """
    if count >= len(records):
        return list(records)
    ranked = sorted(
        range(len(records)),
        key=lambda i: (SeededRng(derive_seed(seed, "subsample",
                                             records[i].utterance_id)).next_u64(), i),
    )
    chosen = set(ranked[:count])
    return [r for i, r in enumerate(records) if i in chosen]
