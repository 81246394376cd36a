"""Exception types shared by every module; the CLI maps them to exit codes."""


class TreePropsError(Exception):
    pass


class InputError(TreePropsError, ValueError):
    """Malformed or out-of-range input."""


class ResourceError(TreePropsError):
    """A configured size or budget bound would be exceeded."""
