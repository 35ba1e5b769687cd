"""The Hori transform on small invariant-form models.

Run with ``python3 demos/02_hori_transform.py``.
"""

from tdk.fixtures import build_fixture
from tdk.hori import hori_transform, pushforward_twist_check, verify_hori

# the point with a circle fibre: the Buscher rules at the level of forms
M = build_fixture("buscher-point")
for w in ("1", "A"):
    print(f"T({w}) =", hori_transform(M, w))

# a Hopf-like model: h = u A on one side and a flat dual
M = build_fixture("hopf-model")
print(M, "h =", M.h, "hhat =", M.hhat)
rep = verify_hori(M)
print("d_hhat T = T d_h:", rep.chain_map, "| sign found:", rep.chain_map_sign)
print("first mismatch:", rep.failures[0])
print("isomorphism:", rep.iso, "| degree shift:", rep.degree_shift, "| T^ T sign:", rep.involution_sign)

# k = 2: the inverse transform squares to -1
rep = verify_hori(build_fixture("k2-model"))
print("k2: chain map", rep.chain_map, "| rank", rep.rank, "of", rep.dimension, "| T^ T sign", set(rep.involution_sign.values()))

# fibre integration of the twist recovers the dual Chern class up to one sign
print(pushforward_twist_check(build_fixture("sigma-model")).to_json())
