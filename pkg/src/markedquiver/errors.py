"""Exception types shared across the package."""


class MarkedQuiverError(Exception):
    pass


class TooLarge(MarkedQuiverError):
    """An exhaustive enumeration would exceed its configured bound."""


class SearchSpaceTooLarge(TooLarge):
    def __init__(self, message, dims=None):
        super().__init__(message)
        self.dims = dims


class Unsupported(MarkedQuiverError):
    pass


class SpecNotHalflinear(MarkedQuiverError):
    pass


class NotHalflinear(MarkedQuiverError):
    pass


class NotHalflinearMarking(MarkedQuiverError):
    pass


class ValidationError(MarkedQuiverError):
    pass


class NotPendant(MarkedQuiverError):
    pass


class NotReducible(MarkedQuiverError):
    pass


class IndPossiblyInfinite(MarkedQuiverError):
    pass


class PartitionInvalid(MarkedQuiverError):
    pass


class ShapeMismatch(MarkedQuiverError):
    pass


class NotPreliminary(MarkedQuiverError):
    pass


class ParseError(MarkedQuiverError):
    def __init__(self, message, line=None, col=None, token=None):
        where = f" at line {line}, column {col}" if line is not None else ""
        tok = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{message}{where}{tok}")
        self.line = line
        self.col = col
        self.token = token
