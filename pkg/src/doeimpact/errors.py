"""Exception hierarchy.

Every domain failure derives from :class:`DoeImpactError`; the CLI maps those
to exit code 1 and prints ``{"error": <class name>, "message": ...}``.
"""

from __future__ import annotations


class DoeImpactError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict[str, str]:
        return {"error": self.code, "message": str(self)}


# history ingestion
class NotARepository(DoeImpactError):
    pass


class EmptyHistory(DoeImpactError):
    pass


class UnreadableObject(DoeImpactError):
    def __init__(self, obj: str, detail: str = "") -> None:
        self.obj = obj
        super().__init__(f"cannot read git object {obj}" + (f": {detail}" if detail else ""))


class BinaryFile(DoeImpactError):
    pass


# expertise / truck factor / scenario
class DomainError(DoeImpactError, ValueError):
    pass


class NoFiles(DoeImpactError):
    pass


class UnknownPair(DoeImpactError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return Exception.__str__(self)


# statistics
class EmptyInput(DoeImpactError, ValueError):
    pass


class DegenerateRanking(DoeImpactError, ValueError):
    pass


class DegenerateInput(DoeImpactError, ValueError):
    pass


class AllZeroDifferences(DoeImpactError, ValueError):
    pass


# link mining
class LinkDisabled(DoeImpactError):
    pass


class NoCodeSnippets(DoeImpactError):
    pass


class NetworkError(DoeImpactError):
    pass


class ParseError(DoeImpactError):
    pass


class EmptyAfterFilter(DoeImpactError):
    pass
