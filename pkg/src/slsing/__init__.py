"""Dirichlet spectra of potentials with derivative-jump singularities.

Forward solvers for -y'' + p y = omega^2 y on (0, pi), large-frequency
expansion of the characteristic function y(pi; omega), zero counting for its
exponential-sum model via the argument principle, and recovery of the
singular points of p from a computed spectrum.
"""

__version__ = "0.1.0"

from .potential import (JumpTerm, SmoothTail, SingularPotential,
                        SpectralCoefficients, evaluate, integral,
                        q_derivative, spectral_coefficients,
                        load_potential, save_potential, potential_from_dict,
                        potential_to_dict, potential_hash,
                        is_piecewise_constant, constant_segments)
from .shooting import (SolverConfig, ShotResult, DEFAULT_CONFIG, shoot,
                       shoot_many, transfer_matrix_shoot,
                       transfer_matrix_many, pruefer_angle,
                       pruefer_angle_many)
from .eigen import (Spectrum, EigenvalueEntry, count_below, nth_eigenvalue,
                    spectrum, oracle_spectrum, spectrum_to_csv)
from .expansion import (ExpSum, eval_expansion, to_exp_sum, eval_exp_sum)
from .zeros import (CountingRectangle, CountResult, CountingRow,
                    count_zeros, count_zeros_safe, build_rectangles,
                    locate_zeros, verify_counting_estimate, auto_halfwidth)
from .recovery import (RecoveryOptions, RecoveryReport, SubsequenceLabeling,
                       recover_singularities, classify_model_zeros,
                       density_report)
