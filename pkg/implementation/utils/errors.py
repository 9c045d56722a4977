class LipschitzDNError(Exception):
    """ Base class for all errors raised by this project. """


class GridError(LipschitzDNError, ValueError):
    pass


class ZeroModeError(LipschitzDNError, ValueError):
    def __init__(self, message='zero-mode undefined'):
        super().__init__(message)


class GridMismatchError(LipschitzDNError, ValueError):
    pass


class EllipticityError(LipschitzDNError):
    """ Raised when Re<A(x)eta, eta> <= 0 for some node x and direction eta. """
    def __init__(self, message, node=None, direction=None, value=None):
        super().__init__(message)
        self.node = node
        self.direction = direction
        self.value = value

    def witness(self):
        return {
            'node': None if self.node is None else [int(i) for i in self.node],
            'direction': None if self.direction is None else [[float(z.real), float(z.imag)] for z in self.direction],
            'value': None if self.value is None else float(self.value),
        }


class SymbolError(LipschitzDNError):
    pass


class HypothesisError(LipschitzDNError, ValueError):
    pass


class SolverError(LipschitzDNError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class ConfigError(LipschitzDNError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = '{} (line {}, column {})'.format(message, line, column)
        super().__init__(message)
        self.line = line
        self.column = column
