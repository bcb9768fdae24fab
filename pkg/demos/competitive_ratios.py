"""Closed-form competitive ratios next to a derivative-free numeric search.

Run: python3 demos/competitive_ratios.py
"""

from aquafill.regret import CR_OBJECTIVES, cr_table

for name in CR_OBJECTIVES:
    for row in cr_table(name, range(2, 7), mode="both"):
        flag = " (lower bound)" if row["lower_bound"] else ""
        print(f"{name:10s} n={row['n']}  closed={row['closed']:.6f}  "
              f"numeric={row['numeric']:.6f}  exact={row['closed_exact']}{flag}")
