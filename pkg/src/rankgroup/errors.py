"""Exception hierarchy shared across the package."""


class RankGroupError(Exception):
    """Base class for all errors raised by rankgroup."""


# ingest
class MissingColumn(RankGroupError):
    pass


class MalformedRow(RankGroupError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class InconsistentScale(MalformedRow):
    pass


# pairstats
class NonPositiveSize(RankGroupError, ValueError):
    pass


class DegenerateVariance(RankGroupError, ValueError):
    pass


class DegenerateTable(RankGroupError, ValueError):
    pass


class InvalidInterval(RankGroupError, ValueError):
    pass


# bootstrap
class TooFewPapers(RankGroupError, ValueError):
    pass


# netbuild
class MissingBounds(RankGroupError):
    pass


# pajek_io
class ParseFailure(RankGroupError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class NegativeVector(RankGroupError, ValueError):
    pass
