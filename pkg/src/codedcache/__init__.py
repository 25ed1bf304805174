"""Coded caching for the (K, K) broadcast network.

Bit-level placement/delivery/decoding for the coded-prefetching scheme at
(K - 1 - 1/K, 1/(K - 1)), the Maddah-Ali--Niesen baseline, memory sharing,
closed-form bounds and a GF(2)-rank entropy checker.
"""

from codedcache.bounds import RatePoint
from codedcache.errors import ConfigError, IntegrityError
from codedcache.partition import PartitionSpec, SubfileId

__all__ = ["ConfigError", "IntegrityError", "PartitionSpec", "RatePoint", "SubfileId"]
__version__ = "0.1.0"
