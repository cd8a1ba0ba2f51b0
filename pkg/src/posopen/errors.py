class OpennessError(Exception):
    """Base error carrying a machine-readable ``code``."""

    code = "ERROR"

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(f"{code}: {self.message}" if message else code)


class MetricError(OpennessError):
    pass


class ScoringError(OpennessError):
    def __init__(self, code: str, message: str = "", chain_id: str | None = None):
        self.chain_id = chain_id
        if chain_id is not None:
            message = f"[{chain_id}] {message or code}"
        super().__init__(code, message)


class IngestError(OpennessError):
    def __init__(self, code: str, message: str = "", *, location: str | None = None, violations=()):
        self.location = location
        self.detail = message or code
        self.violations = list(violations)
        if location:
            message = f"{location}: {message}"
        super().__init__(code, message)
