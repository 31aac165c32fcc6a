"""Exception hierarchy.

Everything raised on bad input derives from :class:`DataError`; the CLI maps
it to exit code 3. :class:`ConfigError` maps to exit code 2.
"""


class InetsimError(Exception):
    pass


class ConfigError(InetsimError):
    pass


class DataError(InetsimError, ValueError):
    pass


class MalformedLine(DataError):
    def __init__(self, line_no, detail=""):
        self.line_no = line_no
        super().__init__(f"malformed line {line_no}" + (f": {detail}" if detail else ""))


class MissingItemId(DataError):
    def __init__(self, title):
        self.title = title
        super().__init__(f"article {title!r} has no item id")


class UnknownItem(DataError):
    def __init__(self, item):
        self.item = item
        super().__init__(f"unknown item {item!r}")


class UnknownLanguage(DataError):
    def __init__(self, lang):
        self.lang = lang
        super().__init__(f"language {lang!r} not in corpus")


class UnknownVertex(DataError):
    pass


class AreaMismatch(DataError):
    pass


class MissingTopics(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class OutOfRange(DataError):
    def __init__(self, index, value):
        self.index = index
        super().__init__(f"entry {index} = {value!r} outside [0, 1]")


class EmptyText(DataError):
    pass


class MissingVector(DataError):
    pass


class NonConvergence(DataError):
    pass


class InfeasibleSize(DataError):
    pass


class EmptyNetwork(DataError):
    pass


class MixedMeasures(DataError):
    pass


class LengthMismatch(DataError):
    pass


class TooShort(DataError):
    pass


class VertexSetMismatch(DataError):
    pass


class EmptyMatrix(DataError):
    pass
