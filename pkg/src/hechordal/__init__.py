"""Chordality checking on homomorphically encrypted adjacency matrices.

Alice (data owner) holds a graph and the secret key; Bob (computational agent)
sees only ciphertexts and repeatedly scores every vertex for simpliciality
using encrypted matrix arithmetic. Alice decrypts the scores, masks out the
simplicial vertices, and decides termination. The bundled encryption backends
simulate leveled homomorphic encryption and are NOT cryptographically secure.
"""

from hechordal.backend import (
    Ciphertext,
    HeParams,
    PublicKey,
    SecretKey,
    default_params,
    decrypt,
    encrypt,
    keygen,
)
from hechordal.graphs import (
    Graph,
    builtin_graph,
    chord_free_cycle_exists,
    eliminate,
    format_graph,
    gen_chordal,
    gen_gnp,
    graph_from_edges,
    is_simplicial,
    mcs_peo,
    parse_graph,
)
from hechordal.protocol import Outcome, Transcript, Verdict, run_local

__version__ = "0.1.0"

__all__ = [
    "Ciphertext",
    "Graph",
    "HeParams",
    "Outcome",
    "PublicKey",
    "SecretKey",
    "Transcript",
    "Verdict",
    "builtin_graph",
    "chord_free_cycle_exists",
    "decrypt",
    "default_params",
    "eliminate",
    "encrypt",
    "format_graph",
    "gen_chordal",
    "gen_gnp",
    "graph_from_edges",
    "is_simplicial",
    "keygen",
    "mcs_peo",
    "parse_graph",
    "run_local",
]
