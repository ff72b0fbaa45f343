class ModelMismatchError(TypeError):
    """Operands belong to different action models."""


class UnsupportedModelError(ValueError):
    pass


class NotHyperbolicError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its element budget."""

    def __init__(self, needed, budget, hint=""):
        self.needed = needed
        self.budget = budget
        msg = f"enumeration needs {needed} elements, budget is {budget}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class ConfigError(ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
