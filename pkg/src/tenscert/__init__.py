"""Best rank-one and nonnegative low-rank approximation of small dense
tensors, with exact certificates of uniqueness for binary cubics."""
from .charpoly import (CERTIFIED, INDETERMINATE, NOT_CERTIFIED, Certificate, CertificationError,
                       certify_unique, discriminant_error_bound, eigen_discriminant,
                       salmon_char_poly, salmon_matrix)
from .nnapprox import (ANLSResult, KKTReport, NNFactors, PreconditionError, anls,
                       compare_deflation, exact_rank_check, kkt_verify, positive_instance,
                       residual_positive_witness)
from .poly import UniPoly, bareiss_det, sylvester_matrix, sylvester_resultant
from .rankone import (ApproxResult, ConvergenceError, DegenerateContraction, SingularPair,
                      best_rank_one, hopm, kkt_check_rank_one, nonneg_best_rank_one,
                      perron_fixed_point, same_class)
from .spectral import (DegenerateSpectrum, EigenPair, PairInventory, enumerate_eigenpairs,
                       enumerate_singular_pairs, is_simple, sigma2_condition)
from .tensor import (DenseTensor, NonnegTensor, PositiveTensor, SymTensor, TensorFormatError,
                     contract_all, contract_except, hs_norm, inner, is_symmetric, load, loads,
                     outer, rayleigh, save, symmetrize)

__version__ = "0.1.0"
