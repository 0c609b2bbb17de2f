class TreeShiftError(Exception):
    """Base class for all library errors."""


class SpecError(TreeShiftError, ValueError):
    """Malformed tree spec or function literal."""


class PreconditionError(TreeShiftError):
    """An operation was called outside the hypotheses it needs."""


class ContractError(PreconditionError):
    """The tree does not satisfy a structural hypothesis (e.g. bounded B)."""


class UnsupportedInstanceError(PreconditionError):
    """The requested experiment is not defined for this kind of tree."""


class DepthLimitError(PreconditionError):
    """Lazy expansion was asked to go past ``TREESHIFT_MAX_DEPTH``."""


class VertexError(TreeShiftError, KeyError):
    """A path that does not name a vertex of the tree."""
