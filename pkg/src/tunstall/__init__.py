"""Tunstall variable-to-fixed-length codes for i.i.d. and Markov sources."""
from .builder import BuilderState, build_binary, build_general, split_node
from .codebook import Codebook, compression_ratio, deserialize, freeze, serialize
from .codec import EncodedContainer, decode, decode_block_at, encode
from .errors import *  # noqa: F401,F403
from .forest import ParseForest, ParseNode
from .model import (
    PriorityScheme,
    QueueClass,
    SourceModel,
    bernoulli,
    format_model,
    iid,
    is_admissible,
    load_model,
    parse_model,
    priority_of,
    validate_model,
)
from .oracle import naive_build, naive_build_general

__version__ = "0.1.0"
