"""Explicit measurement constructions."""
from .dilation import (NaimarkDilation, local_embedding, local_tomography_kets, local_tomography_measurement,
                       naimark_dilate_rank_one, naimark_standard, orthogonalize_with_ancilla,
                       trace_balanced_extension)
from .families import (SAMPLERS, BasisFamily, is_prime, mpicm_explicit, mpicm_family, mpicm_general,
                       mub_family, povm_from_bases, prime_factors, random_bases)
from .partition import (UnitaryPartition, basis_unitaries, clock_and_shift_partition,
                        mpicm_from_unitary_partition, unitary_partition_from_mpicm)
from .rank_one import diagonal_rescale_kets, rank_one_ic_kets, rank_one_ic_povm, tensor_povm

__all__ = [
    "BasisFamily", "NaimarkDilation", "SAMPLERS", "UnitaryPartition", "basis_unitaries",
    "clock_and_shift_partition", "diagonal_rescale_kets", "is_prime", "local_embedding",
    "local_tomography_kets", "local_tomography_measurement", "mpicm_explicit", "mpicm_family",
    "mpicm_from_unitary_partition", "mpicm_general", "mub_family", "naimark_dilate_rank_one",
    "naimark_standard", "orthogonalize_with_ancilla", "povm_from_bases", "prime_factors",
    "random_bases", "rank_one_ic_kets", "rank_one_ic_povm", "tensor_povm", "trace_balanced_extension",
    "unitary_partition_from_mpicm",
]
