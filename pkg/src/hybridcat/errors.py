"""Exception hierarchy for the simulator.

Everything raised on purpose derives from SimulationError so callers can
catch one base class. The CLI maps subclasses to exit codes.
"""


class SimulationError(Exception):
    """Base class for all errors raised deliberately by this package."""


class ValidationError(SimulationError):
    """Bad user input: parameter out of range, malformed scenario file, etc."""


class CutoffError(SimulationError):
    """A requested operation needs a larger Fock cutoff than the mode has."""


class TruncationError(SimulationError):
    """Probability mass above the truncation tolerance was lost at a cutoff."""


class HeraldImpossibleError(SimulationError):
    """The requested herald pattern has (numerically) zero probability."""
