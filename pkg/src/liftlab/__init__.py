"""liftlab: exact-arithmetic toolkit for Chevalley groups over
truncated Witt rings, local deformation-condition verification, finite
group module decomposition, and a synthetic global Selmer engine."""

__version__ = "0.1.0"
