class InputError(ValueError):
    """Invalid input: bad layout, out-of-range parameter, violated precondition."""


class UnitError(InputError):
    """A quantity carries the wrong unit (or no unit) for where it is used."""
