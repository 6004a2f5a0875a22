"""Grand Lebesgue norms, moduli of continuity and embedding bounds on the circle."""

from .core import (
    CIRCLE,
    UNIT_INTERVAL,
    CircleDomain,
    PeriodicFunction,
    QuadratureConfig,
    f0_exact_lp_norm,
    lp_norm,
    lp_norms,
    modulus_lp,
    modulus_table,
    shift,
)
from .embedding import (
    HolderModel,
    ModulusProfile,
    SequenceFamily,
    lemma1_series,
    nu,
    prepare,
    theta,
    verify_theorem1,
    zeta_dyadic_sum,
)
from .errors import DataError, DomainError
from .polynomial import TrigPolynomial
from .psi import (
    PsiFunction,
    bgls_modulus,
    bgls_norm,
    constant_psi,
    dirac_psi,
    make_grid,
    make_power_psi,
    natural_psi,
    ordering_ll,
    ordering_lt,
)
from .sharpness import SharpnessConfig, make_f0, sharpness_report
from .trig import TheoremConstants, run_inequality_suite, vallee_poussin

__all__ = [name for name in dir() if not name.startswith("_")]
