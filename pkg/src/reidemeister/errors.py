"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Parameters violate a structural precondition (group relations, coprimality, ...)."""


class BudgetExceeded(RuntimeError):
    """A computation would exceed the configured group-order or automorphism budget."""

    def __init__(self, what: str, size: int, budget: int):
        super().__init__(f"{what}: size {size} exceeds budget {budget}")
        self.what = what
        self.size = size
        self.budget = budget


DEFAULT_GROUP_BUDGET = 10**6
DEFAULT_AUT_BUDGET = 10**5


def check_budget(what: str, size: int, budget: int | None) -> None:
    if budget is not None and size > budget:
        raise BudgetExceeded(what, size, budget)
