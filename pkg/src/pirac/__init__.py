"""Covering-code storage for PIR schemes with low access complexity."""

from .bounds import (
    AchievableTuple,
    SystemParams,
    binary_entropy,
    entropy_inverse,
    f_of_beta,
    memory_sharing_tuple,
    tajeddine_table,
    tajeddine_tuple,
)
from .covercode import (
    CoveringCode,
    EncodedStorage,
    answer_query,
    build_code,
    encode_storage,
    extended_hamming_parity,
    hamming_parity,
    max_tau_coset_weight,
    random_search,
    sum_augmented_identity,
)
from .gf2core import BitMatrix, BitVec, mat_vec_mul, rank, solve_any, systematic_form

__version__ = "0.1.0"
