"""Combinatorics and numerics for twisted Cuntz-Krieger algebras of finitely
aligned k-graphs."""
from .errors import *  # noqa: F401,F403
from .skeleton import Edge, KGraph, Path, Square, ValidationReport, validate
from .align import ext, is_exhaustive, mce, pi_closure, t_set
from .twist import (CategoricalCocycle, NondegeneracyResult, NondegeneracyStatus,
                    TwoCocycleZk, ZkSubgroup, cc_star, is_nondegenerate_on,
                    validate_cocycle_identity)
from .spanalg import SpanElement, ThetaBlock, delta, expectation, multiply, theta_block, tilde_expectation
from .pathrep import CompatibleSubspace, TruncatedRep, check_tck, compressed_norm, represent
from .boundary import BoundedFilter, Satiation, delta_vanishes, is_in_satiation, satiate
from .ideals import list_gauge_invariant_ideals, quotient_graph, saturate
from .periodicity import (PeriodicityData, SimRelation, find_generalized_cycle_with_entrance,
                          is_aperiodic, is_cofinal, per_group, sim_check)
from .simplicity import SimplicityVerdict, build_vm, check_vm_commutation, decide
from .io import load_cocycle, load_ee, load_graph

__version__ = "0.1.0"
