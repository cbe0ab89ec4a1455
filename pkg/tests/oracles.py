"""Reference implementations written directly from the metric definitions.

Deliberately naive (plain loops, no numpy) so they share no code with the
package under test.
"""

import math


def dcg(labels, k):
    total = 0.0
    for rank, label in enumerate(labels, start=1):
        if rank > k:
            break
        total += label / math.log2(rank + 1)
    return total


def ndcg(labels, k):
    ideal = dcg(sorted(labels, reverse=True), k)
    return 0.0 if ideal == 0 else dcg(labels, k) / ideal


def average_precision(labels, k):
    """AP@k: precision at each relevant rank within top-k, over the relevant count in top-k."""
    hits, acc = 0, 0.0
    for rank, label in enumerate(labels[:k], start=1):
        if label > 0:
            hits += 1
            acc += hits / rank
    return 0.0 if hits == 0 else acc / hits


def mean_average_precision(lists, k):
    return sum(average_precision(l, k) for l in lists) / len(lists)


def relevance_from_raw(raw, e, v, lang):
    """rel straight from raw counts: balanced(l) = c * grand / total_l, then the share of l."""
    totals = {l: sum(t.values()) for l, t in raw.items()}
    grand = sum(totals.values())
    bal = {l: raw[l].get((e, v), 0) * grand / totals[l] for l in raw if totals[l] > 0}
    return bal.get(lang, 0.0) / sum(bal.values())
