"""Slow, obviously-correct reference computations used as test oracles."""

import itertools

import numpy as np

from multirank.stump import Stump, candidate_thresholds, eval_stump


def dcg_loop(ratings):
    n = len(ratings)
    return sum(r * (n - i) for i, r in enumerate(ratings, start=1))


def cindex_brute(scores, ratings):
    bad = total = 0
    for i, j in itertools.combinations(range(len(scores)), 2):
        if ratings[i] == ratings[j]:
            continue
        hi, lo = (i, j) if ratings[i] > ratings[j] else (j, i)
        total += 1
        bad += scores[hi] < scores[lo]
    return bad / total


def edge_pairwise(stump, positives, negatives, D):
    """r = sum_ij D[i, j] * (h(x+_i) - h(x-_j)) as an explicit double loop."""
    r = 0.0
    for i, xp in enumerate(positives):
        for j, xn in enumerate(negatives):
            r += D[i, j] * (eval_stump(stump, xp) - eval_stump(stump, xn))
    return r


def all_stumps(instances, features, policy):
    for f in sorted(features):
        for t in candidate_thresholds(instances, f, policy):
            for d in (0, 1):
                yield Stump(f, t, d)


def best_edge_brute(positives, negatives, v, w, features, policy):
    D = np.outer(v, w)
    return max(
        abs(edge_pairwise(s, positives, negatives, D))
        for s in all_stumps(list(positives) + list(negatives), features, policy)
    )


def random_bipartite(rng, m, n, n_features=8, missing=0.2, discrete=False):
    """Random positives/negatives with roughly ``missing`` of entries absent."""
    from multirank.data import Instance

    def draw(prefix, count, shift):
        out = []
        for i in range(count):
            feats = {}
            for f in range(1, n_features + 1):
                if rng.random() < missing:
                    continue
                val = rng.normal(shift * (f % 3 == 1), 1.0)
                feats[f] = float(np.round(val, 1)) if discrete else float(val)
            out.append(Instance(f"{prefix}{i}", feats, None))
        return out

    return draw("p", m, 0.7), draw("n", n, 0.0)
