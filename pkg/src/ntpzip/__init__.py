"""Lossless text compression driven by a deterministic next-token
predictor, plus the metrics and membership probes built on top of it."""

from .codec import (
    Counter,
    Literal,
    compress,
    compress_rank,
    decompress,
    decompress_rank,
    parse_body,
    read_header,
    serialize_body,
)
from .errors import (
    BadMagic,
    BadVersion,
    EmptyCorpus,
    FingerprintMismatch,
    MalformedBody,
    MalformedFile,
    NtpzipError,
    OutOfRangeId,
    ProtocolError,
    RankOutOfRange,
    TargetTooSmall,
    VerificationError,
)
from .kernels import ENGINE
from .membership import (
    MembershipReport,
    calibrate_threshold,
    membership_probe,
    probe_configs,
)
from .metrics import (
    CompressionReport,
    bench_sweep,
    bpc,
    ratio,
    report_csv,
    report_json,
    sample_batches,
)
from .predictor import (
    MarkovModel,
    PredictorConfig,
    QUANT_LEVELS,
    WINDOW_SWEEP,
    predict,
    predictor_fingerprint,
    quantize,
    rank,
    train_markov,
)
from .remote import RemotePredictor
from .tokenizer import Vocabulary, byte_vocabulary, decode, encode, train_word_vocab

__version__ = "0.1.0"

__all__ = [
    "BadMagic",
    "BadVersion",
    "CompressionReport",
    "Counter",
    "EmptyCorpus",
    "ENGINE",
    "FingerprintMismatch",
    "Literal",
    "MalformedBody",
    "MalformedFile",
    "MarkovModel",
    "MembershipReport",
    "NtpzipError",
    "OutOfRangeId",
    "PredictorConfig",
    "ProtocolError",
    "QUANT_LEVELS",
    "RankOutOfRange",
    "RemotePredictor",
    "TargetTooSmall",
    "VerificationError",
    "Vocabulary",
    "WINDOW_SWEEP",
    "bench_sweep",
    "bpc",
    "byte_vocabulary",
    "calibrate_threshold",
    "compress",
    "compress_rank",
    "decode",
    "decompress",
    "decompress_rank",
    "encode",
    "membership_probe",
    "parse_body",
    "predict",
    "predictor_fingerprint",
    "probe_configs",
    "quantize",
    "rank",
    "ratio",
    "read_header",
    "report_csv",
    "report_json",
    "sample_batches",
    "serialize_body",
    "train_markov",
    "train_word_vocab",
    "__version__",
]
