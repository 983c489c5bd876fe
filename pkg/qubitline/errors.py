"""
Exceptions raised by qubitline.

Every domain error is a ValueError so callers that only care about bad input can catch that.
"""


class InvalidStateError(ValueError):
    """Coherence vector outside the Bloch ball"""


class InvalidDensityError(ValueError):
    """Matrix is not a valid qubit density matrix"""


class InvalidAxisError(ValueError):
    """Measurement axis is not a unit vector"""


class InvalidProbabilityError(ValueError):
    """Probability outside [0, 1]"""


class InfeasibleConstraintError(ValueError):
    """No measurement axis satisfies axis . xi == k"""


class DegenerateReductionError(ValueError):
    """
    The ellipse reduction divides by a vanishing radius or shift component.
    Callers should switch to the direct edge solver.
    """


class DegenerateConicError(ValueError):
    """Conic coefficients do not describe a real ellipse"""


class NotCPTPError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(
            f'channel is not completely positive (min Choi eigenvalue {report.min_eigenvalue!r})')


class ChannelSpecError(ValueError):
    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        location = ''
        if line is not None:
            location += f'line {line}: '
        if field is not None:
            location += f'field {field!r}: '
        super().__init__(f'{location}{message}')
