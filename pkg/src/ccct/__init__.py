"""Covert channels written into the links of social-network communities."""

from .errors import (CapacityError, CCCError, DanglingReference, FormatError, GraphError,
                     InternalError, InvalidArgument, KeyMismatch)
from .graphcore import (AttributeDictionary, AttributeVector, CommunityDescriptor, SocialGraph,
                        density, is_community)
from .keychain import MasterKey, Nonce, SeedBundle, derive_seeds, keyed_permutation, keystream
from .linkcodec import (Ciphertext, GraphMode, LinkOrder, capacity, decode, encode, permuted_order,
                        reconfigure, trivial_order)
from .membership import BloomFilter, bloom_build, bloom_query
from .selection import SubCommunity, select_subcommunity

__version__ = "0.1.0"
