"""Exception hierarchy shared across the pipeline.

Contract violations raise; recoverable per-record problems (corpus line
rejections, config violations) are returned as data instead.
"""


class StreamTtsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(StreamTtsError):
    """A module constructor received a config with outstanding violations."""


class UnalignedBoundaryWord(StreamTtsError):
    """Boundary insertion asked for a word without usable timestamps."""


class NoAlignedWords(StreamTtsError):
    """Utterance has no word eligible as a boundary candidate."""


class PushAfterFinalize(StreamTtsError):
    """Words were pushed into a chunker whose stream was already finalized."""


class TokenizationFailure(StreamTtsError):
    """A word could not be mapped to token ids."""


class EmptyReference(StreamTtsError):
    """Session started with an empty reference text or speech sequence."""


class SessionNotActive(StreamTtsError):
    """Operation requires an Active session."""


class ChunkIndexMismatch(StreamTtsError):
    """Chunk arrived out of order for this session."""


class BackendFailure(StreamTtsError):
    """The synthesizer backend reported a terminal error."""


class FinalizeWhileChunksPending(StreamTtsError):
    """finalize() called before the stream was fully processed."""


class OutOfOrderChunk(StreamTtsError):
    """Emitter received tokens for a chunk that is not the current one."""


class IncompatibleRates(StreamTtsError):
    """Output sample rate is not an integer multiple of the token frame rate."""


class MissingEvent(StreamTtsError):
    """Timing log lacks an event required by the requested metric."""


class ZeroAudioDuration(StreamTtsError):
    """Real-time factor requested for a run that produced no audio."""


class EmptyReferenceText(StreamTtsError):
    """Word error rate requested against an empty reference."""
