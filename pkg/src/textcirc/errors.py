"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class TextCircError(Exception):
    """Base class for all errors raised by textcirc."""


# grammar

class DerivationError(TextCircError):
    pass


class UnknownRule(DerivationError):
    pass


class SymbolPositionInvalid(DerivationError):
    pass


class VocabularyViolation(TextCircError):
    pass


class NonTerminalLeaf(TextCircError):
    pass


class ValidationFailure(TextCircError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


# hybrid texts

class LinkError(TextCircError):
    pass


class InvalidOccurrence(LinkError):
    pass


class DoubleLink(LinkError):
    pass


class OrderViolation(LinkError):
    pass


class FusionError(TextCircError):
    pass


class NonAdjacent(FusionError):
    pass


class ScopeEscape(FusionError):
    pass


class UnsupportedFusion(FusionError):
    """The link is well formed but fusing along it would change the circuit."""


# diagrams and circuits

class DiagramError(TextCircError):
    pass


class WiringError(DiagramError):
    """A box would need the same noun wire twice."""


class EntityMismatch(DiagramError):
    pass


class DanglingLink(DiagramError):
    pass


class UnreducedCopula(DiagramError):
    pass


class CircuitError(TextCircError):
    pass


class CycleDetected(CircuitError):
    pass


class MissingDictionaryEntry(TextCircError):
    pass


# generation

class ParamsInvalid(TextCircError, ValueError):
    pass


class Unrealizable(TextCircError):
    pass


# external formats

class FormatError(TextCircError, ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class LexError(FormatError):
    pass


class UnbalancedParens(FormatError):
    pass


class BadEntityIndex(FormatError):
    pass
