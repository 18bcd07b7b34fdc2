class G2LabError(Exception):
    """Base class for all errors raised by g2lab."""


class NotSymmetric(G2LabError):
    pass


class NotCommuting(G2LabError):
    pass


class InvalidM(G2LabError):
    pass


class NotRotation(G2LabError):
    pass


class DimensionMismatch(G2LabError):
    pass


class NotUnit(G2LabError):
    pass


class SpectrumLeak(G2LabError):
    pass


class RadiusOutOfRange(G2LabError):
    pass


class DegenerateEigenspace(G2LabError):
    pass


class HypothesisViolated(G2LabError):
    def __init__(self, hypothesis: str, value: float | None = None):
        self.hypothesis = hypothesis
        self.value = value
        msg = hypothesis if value is None else f"{hypothesis} (residual {value:.3e})"
        super().__init__(msg)
