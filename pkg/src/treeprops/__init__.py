"""Finite-depth verification of tree properties from combinatorial model theory."""
from .errors import InputError, ResourceError, TreePropsError
from .report import CheckReport
from .treecore import Node, node

__all__ = ["CheckReport", "InputError", "Node", "ResourceError", "TreePropsError", "node"]
__version__ = "0.1.0"
