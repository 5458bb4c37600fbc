"""Exception types shared across the planner."""


class PlannerError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(PlannerError):
    """A scenario document or input file has the wrong shape or types."""


class ValidationError(PlannerError):
    """A constructed object violates one of its invariants."""


class KnowledgeFormatError(PlannerError):
    """A channel-knowledge table is missing, malformed, or inconsistent."""


class ConfigError(PlannerError):
    """A requested configuration is not expressible for this scene."""
