"""Combinatorial simplicity checks for labelled-space algebras and subshifts.

The package is organized around the pipeline

    labelled space -> inverse semigroup -> tight filters -> partial action
                   -> groupoid -> simplicity verdict

with a parallel track for one-sided subshifts (follower automata, clopen
set calculus, cost/hyper-cofinality and condition (L)).
"""

__version__ = "0.1.0"

from .errors import DomainError, InputError

__all__ = ["DomainError", "InputError", "__version__"]
