"""Error types shared across the package."""


class DgError(Exception):
    pass


class DgParseError(DgError):
    def __init__(self, msg, line=None, col=None):
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"parse error{where}: {msg}")
        self.line = line
        self.col = col


class DgTypeError(DgError):
    def __init__(self, msg, pos=None):
        where = f" at {pos[0]}:{pos[1]}" if pos else ""
        super().__init__(f"type error{where}: {msg}")
        self.pos = pos


class DgInputError(DgError):
    """Input/cotangent literal does not match the expected shape."""


class GuardExceeded(DgError):
    """The naive engine refused a program that is too large for it."""


class OrderViolation(DgError):
    """A resolve step staged a call at or above the resolver's own ID."""
