"""Exact Ising and dimer partition functions of graphs embedded in closed orientable surfaces.

The pipeline: a graph drawn on the standard 4g-gon-with-bridges planar model is
loaded into an :class:`~surfising.embedding.EmbeddedGraph`; spin-indexed
transition matrices over directed edges yield Ihara-Selberg determinants whose
graded square roots combine, with Arf-invariant signs, into the even-set
generating function E(G,x).  Brute-force oracles, a Kasteleyn-Pfaffian dimer
route and discrete-Dirac structure checks validate every identity at desk
scale.
"""

__version__ = "0.1.0"

from .polyring import MultiPoly, poly_mul, graded_sqrt, poly_eval  # noqa: F401
from .embedding import (  # noqa: F401
    EmbeddedGraph,
    load_embedded_graph,
    crossing_vector,
    homology_class,
    is_critical_embedding,
)
from .cycles import (  # noqa: F401
    PrimeReducedCycle,
    enumerate_prime_reduced_cycles,
    decompose_even_set,
    self_intersections,
    rot0,
    rot_s,
    QuadraticForm,
    quadratic_form,
    arf,
)
from .bruteforce import brute_even_sets, brute_perfect_matchings, brute_ising  # noqa: F401
from .iharafeyn import (  # noqa: F401
    ihara_selberg_det,
    truncated_cycle_product,
    feynman,
    ising_generating_function,
    ising_partition_function,
)
from .reduction import reduce_degrees  # noqa: F401
from .transition import build_delta, build_delta_prime, TransitionMatrix  # noqa: F401
