"""Exception types shared across the package."""


class ModelError(ValueError):
    """Malformed model file or a model that violates a structural rule."""

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class LeafSpaceError(ValueError):
    pass


class NoStabilization(ValueError):
    def __init__(self, leaf, detail=""):
        self.leaf = leaf
        super().__init__(f"no_stabilization at {leaf}" + (f" ({detail})" if detail else ""))


class WindowTruncated(ValueError):
    def __init__(self, detail=""):
        super().__init__("window_truncated" + (f": {detail}" if detail else ""))


class AmbiguousAgainstCurrent(ValueError):
    def __init__(self, leaf, options):
        self.leaf = leaf
        self.options = list(options)
        super().__init__(f"ambiguous_against_current at {leaf}: {self.options}")


class TypeIViolation(ValueError):
    """A limit-type section whose base came out as a set of leaves."""


class SampleTooSparse(ValueError):
    def __init__(self, detail=""):
        super().__init__("sample_too_sparse" + (f": {detail}" if detail else ""))


class CrossingSections(ValueError):
    pass
