"""Torsion of bicomplexes: definitions, spectral splitting and flat cell complexes."""
from .bicomplex import (Bicomplex, betti, cochain_complex, cohomology, direct_sum, homology,
                        is_doubly_acyclic, random_bicomplex, trial_rng, validate)
from .errors import (AmbiguousRankError, BasisError, BranchCutError, EigenvalueError,
                     InputError, NotInSpanError, ThresholdCollision, TorsionError)
from .flatcw import (DualPair, FlatCellComplex, Incidence, Representation, builtin_circle,
                     builtin_lens, comb_torsion, dual_complex, theta_bicomplex, twist)
from .spectral import (PerturbationProbe, SpectralSplit, admissible_thresholds, k_ratio_check,
                       ray_singer_term, split, strip_and_parabola_check, total_torsion,
                       zeta_prime_at_zero)
from .torsion import (GradedBasisChoice, TorsionScalar, default_basis, eigen_torsion,
                      laplacian, milnor_tau, milnor_tau_prime, pairing_dual, sign_exponent,
                      torsion)

__version__ = "0.1.0"
