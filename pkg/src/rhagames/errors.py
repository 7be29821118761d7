"""Exception types shared across the toolkit."""


class ModelError(Exception):
    """A machine, automaton, or arena violates a structural requirement."""


class StrategyError(Exception):
    """A strategy returned a move that is not available at the current state."""


class MoveError(Exception):
    """A requested transition is not legal at the current configuration."""


class CompileError(Exception):
    """The gadget compiler was asked for something it cannot build."""


class HarnessError(Exception):
    """A playout request is inconsistent (bad address, mismatched arena, ...)."""


class ParseError(Exception):
    """An input file could not be parsed."""
