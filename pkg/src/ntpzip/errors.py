"""Exception hierarchy shared across the package."""


class NtpzipError(Exception):
    """Base class for all package-specific errors."""


class OutOfRangeId(NtpzipError):
    """A token id does not fit the declared vocabulary."""


class TargetTooSmall(NtpzipError):
    """Requested vocabulary size cannot hold the 256 byte-plane entries."""


class EmptyCorpus(NtpzipError):
    """Training or sampling input has too little material to work with."""


class FingerprintMismatch(NtpzipError):
    """Container was produced with a different tokenizer, model or config."""


class MalformedBody(NtpzipError):
    """Container body or envelope violates the record grammar."""


class BadMagic(NtpzipError):
    """Input does not start with the expected magic bytes."""


class BadVersion(NtpzipError):
    """Container version is not supported by this reader."""


class RankOutOfRange(NtpzipError):
    """A rank record points beyond the vocabulary."""


class MalformedFile(NtpzipError):
    """A vocabulary or model file failed structural validation."""


class VerificationError(NtpzipError):
    """A freshly written container failed its decompression check."""


class ProtocolError(NtpzipError):
    """External predictor sent an invalid or error response."""
