"""Interpolative decompositions of dense, sparse and CP tensors.

CoreID keeps a subtensor of the input as the core; SatID keeps fibers of the
input as the satellites. Both return a :class:`TuckerTensor`-shaped result.
"""
from .coreid import (CoreIDResult, coreid_cp, coreid_dense, coreid_independent, coreid_reconstruct,
                     coreid_sparse)
from .evaluation import ErrorReport, exact_rel_error, hosvd_baseline, sketched_rel_error
from .exceptions import FormatError, InvalidArgumentError, ParseError, ResourceLimitError, TensorIDError
from .io import load_cp_factors, parse_frostt, subsample_sparse, write_cp_factors, write_frostt
from .matrix_id import (Method, SelectionResult, interpolation_coeffs, matrix_id, norm_max_select,
                        norm_sample_select, nuclear_max_select, select_columns, sketched_matrix_id)
from .rng import SketchSeed
from .satid import (SatIDResult, satid_cp, satid_dense, satid_reconstruct, satid_sparse,
                    sparse_select_direct, sparse_select_sketched)
from .synthetic import gen_counterexample_matrix, gen_low_rank_tucker, gen_synthetic_cp
from .tensors import (CPTensor, SparseTensor, TuckerTensor, flatten, materialize, mode_contract,
                      tucker_reconstruct, unflatten)

__version__ = "0.1.0"
