"""Exception hierarchy shared by all evosc modules."""


class EvoscError(Exception):
    """Base class for all library errors."""


class ShapeError(EvoscError):
    """Operands are not dimensionally conformable."""


class ContractError(EvoscError):
    """An input violates a documented precondition."""


class ConvergenceError(EvoscError):
    """An iterative routine hit its iteration cap without converging."""


class DivergenceError(EvoscError):
    """A numerical computation produced NaN/Inf."""


class DegeneracyError(EvoscError):
    """An input is rank-deficient or otherwise degenerate."""


class LoadError(EvoscError):
    """A file could not be parsed or failed validation on load."""
