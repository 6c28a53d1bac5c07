"""Integral homology of real wonderful models of subspace arrangements,
computed from the lattice of the building set by exact combinatorics."""
from .buildcore import BuildingSet, Lattice, closure, decompose, generate_lattice, quotient, restrict
from .dcphom import bockstein_b2, graded_homology, integral_synthesis, mod2_betti
from .errors import ConsistencyError, InputError, RealDCPError, ResourceError, StructuralError
from .exactlinalg import HomologyGroup, Subspace, rref, smith_normal_form
from .families import Arrangement, boolean, braid, graphic, parse_arrangement, product, projective, realify

__version__ = "0.1.0"
