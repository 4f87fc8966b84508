"""Key-homomorphic, input-homomorphic lattice PRF with constrained and updatable-encryption layers."""
from .errors import (EpochError, FormatError, IntegrityError, InvariantError, KihError, LengthError, ParamsError,
                     PreconditionError, StaleCacheError, StructureError)
from .kihprf import (PrfInstance, Seed, SymbolString, almost_xor, combine, homomorphism_defect, keygen, prf_eval,
                     prf_eval_prime, sample_instance)
from .modmath import ModMatrix, Params
from .presets import PRESETS, get_preset

__version__ = "0.1.0"
