"""Protocol configuration and validation.

One frozen dataclass carries every knob: chunking geometry, training-prep
constants, reserved token ids, mock synthesizer density and timing, and
emitter rates. Defaults are the production constants the whole test suite
is pinned to (5-word chunks, 2-word lookahead, 15% full-utterance
probability, 25 Hz frame rate, 5-frame minimum target).

Validation returns violations as data; constructors downstream require a
clean config and raise ``InvalidConfig`` otherwise. Lookahead larger than
the chunk is a warning in normal operation and an error only in ablation
grid mode, where the sweep is defined under that constraint.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - version-dependent import
    import tomli as tomllib

from .errors import InvalidConfig

SEED_ENV_VAR = "STREAMTTS_SEED"


@dataclass(frozen=True)
class StreamConfig:
    # Chunking geometry (words)
    chunk_words: int = 5
    lookahead_words: int = 2
    # Training prep
    full_utterance_prob: float = 0.15
    frame_rate: int = 25                 # speech tokens per second
    min_target_frames: int = 5
    # Reserved token ids
    marker_id: int = 32000
    unk_id: int = 32001
    vocab_size: int = 32768
    speech_vocab_size: int = 8192
    # Determinism
    seed: int = 1234
    # Mock synthesizer
    tokens_per_word: int = 10            # speech tokens generated per current word
    max_tokens_per_word: int = 40        # overrun cap multiplier
    max_text_tokens_per_word: int = 4    # tokenizer output cap per word
    prefill_ns_per_token: int = 1_000_000    # simulated cost per prompt/input token
    gen_ns_per_token: int = 10_000_000       # simulated cost per generated token
    fault_rate: float = 0.0
    # Emission
    emit_group: int = 15                 # speech tokens per decodable frame group
    sample_rate: int = 24000
    crossfade_ms: int = 0
    # Corpus ingestion
    alignment_tolerance_ms: int = 50
    # Behavior switches (both are documented deviations when enabled)
    final_marker: bool = False           # force a marker onto the final chunk
    retain_reference: bool = False       # prepend the reference to every prompt

    def snapshot(self) -> dict[str, Any]:
        """Plain dict of all fields, for report provenance."""
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class ConfigViolation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_config(cfg: StreamConfig, *, ablation_grid: bool = False) -> list[ConfigViolation]:
    """Return every violated invariant; an empty list means valid.

    ``ablation_grid=True`` additionally enforces lookahead <= chunk size,
    which is otherwise only a warning (see :func:`config_warnings`).
    """
    v: list[ConfigViolation] = []

    def bad(code: str, message: str) -> None:
        v.append(ConfigViolation(code, message))

    if cfg.chunk_words < 1:
        bad("ChunkSizeZero", f"chunk_words must be >= 1, got {cfg.chunk_words}")
    if cfg.lookahead_words < 0:
        bad("LookaheadNegative", f"lookahead_words must be >= 0, got {cfg.lookahead_words}")
    if not 0.0 <= cfg.full_utterance_prob <= 1.0:
        bad("ProbabilityOutOfRange",
            f"full_utterance_prob must be in [0, 1], got {cfg.full_utterance_prob}")
    if not 0.0 <= cfg.fault_rate <= 1.0:
        bad("ProbabilityOutOfRange", f"fault_rate must be in [0, 1], got {cfg.fault_rate}")
    if cfg.frame_rate < 1:
        bad("FrameRateNotPositive", f"frame_rate must be >= 1, got {cfg.frame_rate}")
    if cfg.min_target_frames < 1:
        bad("MinFramesNotPositive", f"min_target_frames must be >= 1, got {cfg.min_target_frames}")
    if not 0 <= cfg.marker_id < cfg.vocab_size:
        bad("MarkerIdOutOfRange",
            f"marker_id {cfg.marker_id} outside [0, {cfg.vocab_size})")
    if not 0 <= cfg.unk_id < cfg.vocab_size:
        bad("UnkIdOutOfRange", f"unk_id {cfg.unk_id} outside [0, {cfg.vocab_size})")
    if cfg.unk_id == cfg.marker_id:
        bad("ReservedIdCollision", "unk_id and marker_id must differ")
    if cfg.vocab_size < 2:
        bad("VocabTooSmall", f"vocab_size must be >= 2, got {cfg.vocab_size}")
    if cfg.speech_vocab_size < 1:
        bad("SpeechVocabTooSmall", f"speech_vocab_size must be >= 1, got {cfg.speech_vocab_size}")
    if cfg.tokens_per_word < 1:
        bad("TokensPerWordNotPositive", f"tokens_per_word must be >= 1, got {cfg.tokens_per_word}")
    if cfg.max_tokens_per_word < cfg.tokens_per_word:
        bad("CapBelowDensity",
            f"max_tokens_per_word {cfg.max_tokens_per_word} below tokens_per_word "
            f"{cfg.tokens_per_word}")
    if cfg.max_text_tokens_per_word < 1:
        bad("TextTokensPerWordNotPositive",
            f"max_text_tokens_per_word must be >= 1, got {cfg.max_text_tokens_per_word}")
    if cfg.emit_group < 1:
        bad("EmitGroupNotPositive", f"emit_group must be >= 1, got {cfg.emit_group}")
    if cfg.sample_rate < 1 or (cfg.frame_rate >= 1 and cfg.sample_rate % cfg.frame_rate != 0):
        bad("SampleRateNotDivisible",
            f"sample_rate {cfg.sample_rate} must be a positive multiple of frame_rate "
            f"{cfg.frame_rate}")
    if cfg.prefill_ns_per_token < 0 or cfg.gen_ns_per_token < 0:
        bad("NegativeSimulatedLatency", "simulated per-token latencies must be >= 0")
    if cfg.alignment_tolerance_ms < 0:
        bad("NegativeTolerance", "alignment_tolerance_ms must be >= 0")
    if cfg.crossfade_ms < 0:
        bad("NegativeCrossfade", "crossfade_ms must be >= 0")
    if ablation_grid and cfg.lookahead_words > cfg.chunk_words:
        bad("LookaheadExceedsChunk",
            f"ablation grid requires lookahead_words <= chunk_words "
            f"({cfg.lookahead_words} > {cfg.chunk_words})")
    return v


def config_warnings(cfg: StreamConfig) -> list[ConfigViolation]:
    """Non-fatal advisories (currently: lookahead exceeding the chunk)."""
    w: list[ConfigViolation] = []
    if cfg.lookahead_words > cfg.chunk_words:
        w.append(ConfigViolation(
            "LookaheadExceedsChunk",
            f"lookahead_words {cfg.lookahead_words} exceeds chunk_words {cfg.chunk_words}; "
            f"allowed outside ablation grids but untested territory"))
    return w


def require_valid(cfg: StreamConfig) -> StreamConfig:
    """Raise ``InvalidConfig`` unless the config passes validation."""
    violations = validate_config(cfg)
    if violations:
        raise InvalidConfig("; ".join(str(v) for v in violations))
    return cfg


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(StreamConfig)}


def _coerce(name: str, raw: Any) -> Any:
    kind = _FIELD_TYPES[name]
    if kind == "bool":
        if isinstance(raw, bool):
            return raw
        if isinstance(raw, str):
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
        raise InvalidConfig(f"cannot parse boolean for {name}: {raw!r}")
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def config_from_mapping(base: StreamConfig, values: Mapping[str, Any]) -> StreamConfig:
    """Apply ``values`` over ``base``; unknown keys are errors."""
    unknown = sorted(set(values) - set(_FIELD_TYPES))
    if unknown:
        raise InvalidConfig(f"unknown config keys: {', '.join(unknown)}")
    coerced = {name: _coerce(name, raw) for name, raw in values.items()}
    return dataclasses.replace(base, **coerced)


def load_config_file(path: str | Path, base: StreamConfig | None = None) -> StreamConfig:
    """Load a TOML or flat ``key = value`` config file over ``base``.

    Files ending in ``.toml`` are parsed as TOML; anything else as one
    ``key = value`` pair per line with ``#`` comments.
    """
    path = Path(path)
    base = base if base is not None else StreamConfig()
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        try:
            values: Mapping[str, Any] = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from exc
    else:
        values = _parse_flat(text, path)
    return config_from_mapping(base, values)


def _parse_flat(text: str, path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidConfig(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def apply_seed_env(cfg: StreamConfig, environ: Mapping[str, str] | None = None) -> StreamConfig:
    """Override the seed from ``STREAMTTS_SEED`` when set."""
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if raw is None:
        return cfg
    try:
        return dataclasses.replace(cfg, seed=int(raw))
    except ValueError as exc:
        raise InvalidConfig(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc
