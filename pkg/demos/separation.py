"""A two-agent objective where a randomized policy beats water-filling.

The objective pays 1 only when both agents end above 1/2. Water-filling
splits the first unit evenly and is then stuck; the threshold-guard policy
commits the first unit to a random agent.

Run: python3 demos/separation.py
"""

from aquafill import RequestSequence, objective
from aquafill.policies import ThresholdGuardPolicy, WaterFillingPolicy
from aquafill.regret import alpha_regret

E = RequestSequence.from_lists(2, [([1, 2], 1), ([2], 1)])
f = objective("indicator-half")
for alpha in (0.6, 1.0):
    for P in (WaterFillingPolicy(), ThresholdGuardPolicy()):
        r = alpha_regret(E, P, f, alpha)
        print(f"alpha={alpha}  {P.name:16s} E[f]={r.policy_value:.3f}  regret={r.regret:.3f}")
