"""Node-count bounds side by side.

All bound formulas are integer valued and computed without floating point.
For the curve y = x^d the dedicated bound beats the general ones once d is
large, while for small d the older baseline is still best.
"""

from curvequad.bounds import format_table, improvement_over_rs, lower_bound, upper_bounds

for s, d in [(3, 3), (9, 9)]:
    vals = {b.setting: b.value for b in upper_bounds("xd", s, d=d)}
    print(f"y = x^{d}, s = {s}: baseline {vals['zalar-baseline']}, "
          f"rational {vals['rational-odd']}, dedicated {vals['xd-curve']}")

print("\nplane quartic with one pair of real places at infinity, strength 7:")
print(format_table(upper_bounds("plane", 7, d=4, t=2)))

print("\nthe gain over d*s does not depend on the strength:")
for d in (4, 6, 8):
    print(f"  d={d}: compact curve gains {improvement_over_rs(d, 0)} nodes")

print("\nlower bound on a generic space curve of degree 4, strength 9:", lower_bound(4, 9).value)
