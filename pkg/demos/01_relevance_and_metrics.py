"""
Relevance labels from multi-language click counts, then ranking metrics.

A pair clicked 10 times in a small edition and 30 times in one three times
larger carries the same language-specific interest in both, once counts are
balanced by edition size.
"""

from eventrec.clickstream import ClickTable, RelevanceTable, balance_clicks
from eventrec.metrics import map_at_k, ndcg_at_k

de = ClickTable("de", {("pandemic", "pandemic_in_germany"): 10, ("pandemic", "lockdown"): 90})
fr = ClickTable("fr", {("pandemic", "pandemic_in_germany"): 30, ("pandemic", "confinement"): 270})

balanced = balance_clicks([de, fr])
print("balanced de:", balanced["de"])
print("balanced fr:", balanced["fr"])

rel = RelevanceTable.from_balanced(balanced)
for lang in rel.languages:
    print(f"rel(pandemic -> pandemic_in_germany, {lang}) = {rel.get('pandemic', 'pandemic_in_germany', lang):.3f}")

# A ranking is scored by the labels it lists, in order.
ranked = [0.7, 0.0, 0.2, 0.1, 0.0]
print("nDCG@5 of", ranked, "=", round(ndcg_at_k(ranked, 5), 4))
print("MAP@5  of", ranked, "=", round(map_at_k([ranked], 5), 4))
print("nDCG@5 of the ideal order =", ndcg_at_k(sorted(ranked, reverse=True), 5))
