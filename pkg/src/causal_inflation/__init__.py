"""Causal compatibility testing with the inflation technique.

Build or load a causal structure and an inflation of it, turn an observed distribution into a
marginal problem over the inflation's contexts, and either witness incompatibility with an
exact Farkas certificate or derive polynomial compatibility inequalities (facets of the
marginal polytope, or Hardy-type implications found as hypergraph transversals)."""
from .errors import CapacityError, ContractError, InflationError, ValidationError
from .graph import CausalStructure, NodeId, node, nodes
from .inflation import (
    InflationStructure,
    ai_expressible_sets,
    expressible_closure,
    has_inflationary_fanout,
    inflationary_isomorphisms,
    injectable_sets,
    verify_inflation,
)
from .distributions import (
    CausalModel,
    JointTable,
    MarginalFamily,
    conditional_mutual_information,
    conditional_product,
    entropy,
    inflation_family,
    marginalize,
    mutual_information,
    product,
    random_model,
    simulate,
)
from .marginal_lp import MarginalProblem, build_problem, certificate_to_inequality, solve
from .inequalities import (
    Atom,
    Polynomial,
    PolynomialInequality,
    load_table,
    orbit,
    reduce_modulo,
    symmetry_group,
)
from .facets import enumerate_facets, facets_to_causal_inequalities
from .hardy import (
    antecedent_sweep,
    build_hypergraph,
    implications,
    implications_to_inequalities,
    minimal_transversals,
    restrict,
)
from . import fixtures

__version__ = "0.1.0"
