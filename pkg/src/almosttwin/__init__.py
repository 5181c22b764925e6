"""Almost-twin primes in ternary Goldbach: sieves, Bohr cutoffs, transference and sieve constants."""

__version__ = "0.1.0"

from .primes import ConstraintSpec, PrimeTable, sieve_range, constrained_primes, factorize, is_P2  # noqa: E402
from .trigpoly import TrigPoly, BohrCutoff, bohr_cutoff, bohr_members, fejer, vaaler, selberg_majorant  # noqa: E402
from .cyclic import CyclicFunction, dft, convolve, transference_check  # noqa: E402
from .goldbach import find_representation, representation_count, scan  # noqa: E402
