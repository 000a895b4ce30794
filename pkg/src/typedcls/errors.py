"""Exception hierarchy shared by all modules."""


class CLSError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CLSError):
    def __init__(self, message, line=0, column=0, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        where = f"{line}:{column}: " if line else ""
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{message}{extra}")


class KindError(ParseError):
    """The same variable name was used with two different kind markers."""


class UnboundVariable(CLSError, LookupError):
    def __init__(self, var):
        self.var = var
        super().__init__(f"unbound variable {var}")


class MatchBudgetExceeded(CLSError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"match enumeration exceeded {budget} candidates")


class RuleError(CLSError):
    """A rule violates one of the rewrite-rule conditions.

    ``clause`` is ``"EmptyLhs"`` or ``"UnboundRhsVar"``.
    """

    def __init__(self, clause, detail=""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause} {detail}".strip())


class EnvError(CLSError):
    """Inconsistent type environment."""


class UnknownBasicType(CLSError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown basic type {name!r}")


class NotCompatible(CLSError):
    pass


class TypingError(CLSError):
    """A pattern has no type. ``position`` is a path of steps into the pattern."""

    def __init__(self, message, position=()):
        self.position = tuple(position)
        self.message = message
        super().__init__(f"{message} at {format_position(self.position)}")


class Incompatible(TypingError):
    def __init__(self, left, right, position=()):
        self.left = left
        self.right = right
        super().__init__(f"incompatible types {left} and {right}", position)


class RequirementNotProvided(TypingError):
    def __init__(self, required, membrane, position=()):
        self.required = required
        self.membrane = membrane
        super().__init__(
            f"content requires {_fmt(required)} but membrane provides {_fmt(membrane)}",
            position,
        )


class UnknownElement(TypingError):
    def __init__(self, name, position=()):
        self.name = name
        super().__init__(f"element {name!r} has no basic type", position)


class IllFormedBasis(TypingError):
    pass


class NotAReductionRule(CLSError):
    def __init__(self, rule_name, cause):
        self.rule_name = rule_name
        self.cause = cause
        super().__init__(f"rule {rule_name} is not a reduction rule for this basis: {cause}")


class UnboundTypeVariable(CLSError, LookupError):
    def __init__(self, tvar):
        self.tvar = tvar
        super().__init__(f"type mapping does not bind {tvar}")


class IllTypedState(CLSError):
    """The state handed to the typed semantics is not a correct system."""


def _fmt(types):
    return "{" + ", ".join(sorted(types)) + "}"


def format_position(position):
    return "/" + "/".join(str(step) for step in position)
