"""Truncation strata of loop groups: root data, extended affine Weyl groups,
σ-conjugacy classes, truncation types of matrices and their closure poset."""

from .affine import AffineElt, bruhat_leq, length, sigma_conj, tau
from .alcoves import (SemistandardParabolic, TruncationType, all_semistandard_parabolics, fundamental_parabolics,
                      is_fundamental, standard_rep, truncation_type_affine)
from .atlas import StrataAtlas, closure_leq, closure_poset, eo_atlas, generic_class, minimal_dieudonne
from .errors import (BudgetExceeded, InsufficientPrecision, InvalidCartanData, LoopStrataError, ParseError)
from .fields import field
from .isocrystal import SigmaClass, class_of, kappa, newton_point
from .matrices import LaurentMatrix
from .matrix_truncation import brute_force_truncation_oracle, truncation_type_matrix
from .parsing import parse_element, parse_group, parse_matrix
from .rootdatum import GL, GSp, SL, Levi, RootDatum, WeylElt, build_root_datum, siegel_mu

__version__ = "0.1.0"
