"""Exception types shared by the pipeline stages."""


class VCNetError(Exception):
    """Base error carrying a short machine-readable ``code``."""

    def __init__(self, code, message=""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class GraphError(VCNetError):
    pass


class StatsError(VCNetError):
    pass


class SemError(VCNetError):
    pass


class StageError(VCNetError):
    """Raised by the pipeline runner; names the failing stage."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__("STAGE_FAILED", f"stage '{stage}' failed: {cause}")
