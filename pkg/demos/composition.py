"""Composing mechanisms.

Releasing two mechanisms on the same database adds their MI levels (at
most). Releasing two mechanisms on disjoint parts of the database costs
only the worse of the two. Both are checked numerically here, and the
joint mechanism is written to disk in the text format the CLI reads.
"""

import math
import tempfile
from pathlib import Path

from midp import (
    DatabaseSchema,
    audit,
    capacity,
    compose_disjoint,
    compose_parallel,
    load_mechanism,
    make_erasure,
    make_randomized_response,
    save_mechanism,
)

rr = make_randomized_response(1, 0.25)
both = compose_parallel(rr, rr)
mi1 = capacity.mi_dp(rr).value
print(f"randomized response:  eps={audit.epsilon_exact(rr):.4f}  mi={mi1:.6f}")
print(f"released twice:       eps={audit.epsilon_exact(both):.4f}  mi={capacity.mi_dp(both).value:.6f}"
      f"  (sum of parts {2 * mi1:.6f})")

a, b = make_erasure(2, 0.3), make_erasure(3, 0.5)
joint = compose_disjoint(a, [0], b, [1], DatabaseSchema((2, 3)))
per = capacity.personalized_mi(joint)
print()
print(f"erasures on disjoint entries: parts {capacity.mi_dp(a).value:.6f}, {capacity.mi_dp(b).value:.6f}")
print(f"joint per-entry MI {per.round(6).tolist()}, overall {per.max():.6f} = max of parts ({0.5 * math.log(3):.6f})")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "joint.mech"
    save_mechanism(joint, path)
    print()
    print(f"saved as {path.name}; first lines:")
    print("".join(path.read_text().splitlines(keepends=True)[:5]), end="")
    back = load_mechanism(path)
    print(f"reloaded matrix identical: {(back.matrix == joint.matrix).all()}")
