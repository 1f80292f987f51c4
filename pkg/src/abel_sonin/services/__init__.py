from .errors import AbelSoninError, DomainError, NumericalError, PreconditionError
from .jacobi import Integrand, Interval, JacobiBasis, WeightParams
from .kernels import SoninKernel, SoninPair, cosine_pair, riemann_liouville_pair
from .solver import ProblemSpec, SolveReport, Verdict, solve

__all__ = [
    "AbelSoninError", "DomainError", "NumericalError", "PreconditionError",
    "Integrand", "Interval", "JacobiBasis", "WeightParams",
    "SoninKernel", "SoninPair", "cosine_pair", "riemann_liouville_pair",
    "ProblemSpec", "SolveReport", "Verdict", "solve",
]
