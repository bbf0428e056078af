"""Quasi-free states on finite self-dual CAR algebras."""

from .errors import ConsistencyError, PreconditionError, ResourceError, ValidationError

__version__ = "0.1.0"
