"""
Three scaling regimes at desk scale
===================================

The query bound for almost-trees is n log^3 n + n h. Complete d-ary trees
have logarithmic height and stay close to linear, caterpillars have linear
height and go quadratic, and hybrids sit in between. This script runs small
bench grids and prints the per-size medians and their ratios.
"""

# %%
from pathquery.bench import bench, summarize


def show(title, records):
    summary = summarize(records)
    print(title)
    for cell in summary["cells"]:
        norm = cell["median_norm"]
        print(f"  n={cell['n']:4d}  median queries={cell['median_queries']:9.0f}  "
              f"normalized={norm:.3f}  failures={cell['failures']}")
    print("  ratios:", ", ".join(f"{r['ratio']:.2f}" for r in summary["ratios"]))


# %%
# Doubling n on complete ternary trees multiplies the cost by well under 4.
show("complete ternary trees", bench("kary", [64, 128, 256, 512], 3, d=3))

# %%
# Doubling n on caterpillars multiplies it by roughly 4.
show("caterpillars", bench("caterpillar", [64, 128, 256], 9))

# %%
# Hybrids with h near 3 log2 n: the normalized column stays within a small
# constant band.
show("hybrids, h = 3 log2 n", bench("hybrid", [64, 128, 256], 3, d=2, h="log:3"))
