"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class UnsupportedStructureError(ValueError):
    """The input lacks structure a construction requires (e.g. a product state)."""


class PartialMapError(RuntimeError):
    """An embedding could not represent part of its domain within the truncation.

    ``dropped`` lists the domain labels whose images exceeded the length budget.
    """

    def __init__(self, message, dropped):
        super().__init__(message)
        self.dropped = list(dropped)


class ConfigError(ValueError):
    """A configuration failed validation; ``problems`` lists every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
