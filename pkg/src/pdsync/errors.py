"""Exception hierarchy shared by all pdsync modules."""


class PdsyncError(Exception):
    pass


class ValidationError(PdsyncError):
    pass


class ParseError(PdsyncError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class MalformedTree(PdsyncError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        super().__init__(f"{message} (at node {'/'.join(map(str, self.path)) or 'root'})")


class InvalidSubset(PdsyncError):
    pass


class PullBackFailure(PdsyncError):
    pass


class CapExceeded(PdsyncError):
    pass


class BudgetExceeded(PdsyncError):
    pass


class NotNormalized(PdsyncError):
    pass


class NotEnabled(PdsyncError):
    pass


class NotAnApsRunOfAP(PdsyncError):
    pass


class NotDeterministic(PdsyncError):
    pass
