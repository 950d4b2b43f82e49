"""Monomial labels, c-cluster expansions and transition maps for affine cluster algebras."""

try:
    from ._catcluster import *  # noqa: F401,F403
    from ._catcluster import DomainError, InvariantError  # noqa: F401
except ImportError:  # build tree layout: the extension sits next to the package
    from _catcluster import *  # noqa: F401,F403
    from _catcluster import DomainError, InvariantError  # noqa: F401
