from .seeding import derive_seed, make_rng
from .digest import array_digest, file_digest

__all__ = ['derive_seed', 'make_rng', 'array_digest', 'file_digest']
