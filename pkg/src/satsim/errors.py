"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A domain object or config field violates its constraints."""


class DomainError(ValueError):
    """A numeric argument is outside the function's valid domain."""


class NoRouteError(Exception):
    """No usable route exists between two nodes.

    ``reason`` distinguishes a disconnected graph ("disconnected") from a
    tripped loop guard ("loop").
    """

    def __init__(self, src: str, dst: str, reason: str):
        super().__init__(f"no route {src} -> {dst} ({reason})")
        self.src = src
        self.dst = dst
        self.reason = reason
