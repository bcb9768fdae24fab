"""Water-filling against the hindsight optimum on a four-agent instance.

Run: python3 demos/running_example.py
"""

from aquafill import (
    RequestSequence,
    compare_majorization,
    nestify,
    opt_hindsight,
    policy_deviation,
    run_waterfill,
    worstcase_upper_triangular,
)
from aquafill.core import HarmonicMatrix, apply_harmonic
from aquafill.policies import ProportionalPolicy, run_policy
from aquafill.transforms import worstcase_quantities
from aquafill.waterfill import waterfill_loads

E = RequestSequence.from_lists(4, [([2, 4], 2), ([1, 2, 3], 5), ([3], 2), ([2, 4], 1), ([3, 4], 2)])

trace = run_waterfill(E)
print("water-filling loads  ", trace.final_loads)
print("arrival heights      ", [str(h) for h in trace.heights])
print("unused edges         ", sorted(trace.inactive_edges))
print("hindsight optimum    ", opt_hindsight(E))

# Moving to a nested sequence can only hurt water-filling.
nested, audit = nestify(E)
print("\nnested arrival order ", audit.order)
print("nested sequence      ", [(sorted(a.neighbors), str(a.quantity)) for a in nested.arrivals])
print("water-filling there  ", waterfill_loads(nested),
      compare_majorization(trace.final_loads, waterfill_loads(nested)).value)

# Any other deterministic policy can be steered to do at least as badly.
P = ProportionalPolicy()
steered = policy_deviation(nested, P)
print("\nproportional on E    ", run_policy(E, P).final_loads)
print("proportional steered ", run_policy(steered, P).final_loads)

# The worst nested sequence with this optimum is upper triangular.
worst = worstcase_upper_triangular(nested)
q = worstcase_quantities(nested)
print("\nworst-case sequence  ", [(sorted(a.neighbors), str(a.quantity)) for a in worst.arrivals])
print("H q'                 ", apply_harmonic(HarmonicMatrix(4), q))
