"""Independent reference implementations used to pin expected test values.

Everything here is written as directly from the definitions as possible:
exhaustive product filters, factorial-expansion permanents, plain recursive
backtracking, and Jensen's formula via polynomial roots. These are slow on
purpose and kept free of the package's kernel machinery.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def naive_patterns(A_points, F_points, mode="injective", required=None):
    """Enumerate displacement patterns x: F -> A by filtering the full product.

    mode 'injective' keeps patterns with s + x_s pairwise distinct, 'admissible'
    additionally requires the image to contain every point of `required`,
    'image' requires the image to equal the set `required` exactly.
    Patterns come out in lexicographic order of their displacement tuples.
    """
    F = sorted(tuple(p) for p in F_points)
    A = sorted(tuple(p) for p in A_points)
    req = {tuple(p) for p in (required or ())}
    out = []
    for x in itertools.product(A, repeat=len(F)):
        image = {tuple(s + d for s, d in zip(p, dx)) for p, dx in zip(F, x)}
        if len(image) != len(F):
            continue
        if mode == "admissible" and not req <= image:
            continue
        if mode == "image" and image != req:
            continue
        out.append(x)
    return out


def naive_window_sum(f_terms, F_points, mode="injective", required=None, A_points=None):
    """Weighted pattern sum straight from the definition (exact on int inputs)."""
    f = {tuple(p): c for p, c in f_terms.items()}
    A = A_points if A_points is not None else list(f)
    total = 0
    for x in naive_patterns(A, F_points, mode=mode, required=required):
        w = 1
        for d in x:
            w = w * f.get(d, 0)
        total += w
    return total


def factorial_permanent(M):
    """Permanent of an m x n matrix (m <= n) by factorial expansion."""
    M = np.asarray(M)
    m, n = M.shape
    if m > n:
        raise ValueError("need at least as many columns as rows")
    total = 0
    for cols in itertools.permutations(range(n), m):
        w = 1
        for i, j in enumerate(cols):
            w = w * M[i, j].item()
        total += w
    return total


def permutation_sign(perm):
    """Sign of a permutation (tuple of images of 0..n-1) by counting inversions."""
    inter = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inter % 2 else 1


def backtracking_torus_permanent(displacement_weights, moduli):
    """Permanent of the displacement matrix on a finite torus, by plain recursion.

    `displacement_weights` maps displacement tuples (already reduced or not) to
    weights; sites are all points of the torus and each must map to a distinct
    image site. No memoization, no frontier tricks.
    """
    moduli = tuple(moduli)
    sites = list(itertools.product(*(range(n) for n in moduli)))
    reduced = {}
    for d, c in displacement_weights.items():
        r = tuple(x % n for x, n in zip(d, moduli))
        reduced[r] = reduced.get(r, 0) + c
    choices = []
    for s in sites:
        opts = []
        for d, c in reduced.items():
            img = tuple((a + b) % n for a, b, n in zip(s, d, moduli))
            opts.append((img, c))
        choices.append(opts)

    used = set()

    def go(k):
        if k == len(sites):
            return 1
        total = 0
        for img, c in choices[k]:
            if img in used:
                continue
            used.add(img)
            total += c * go(k + 1)
            used.discard(img)
        return total

    return go(0)


def jensen_mahler(coeffs):
    """Logarithmic Mahler measure of a one-variable Laurent polynomial.

    `coeffs` maps integer exponents to coefficients. Monomial factors have
    measure zero, so only the root moduli and the leading coefficient matter.
    """
    exps = sorted(coeffs)
    lo, hi = exps[0], exps[-1]
    poly = [coeffs.get(k, 0) for k in range(hi, lo - 1, -1)]
    if len(poly) == 1:
        return math.log(abs(poly[0]))
    roots = np.roots(poly)
    val = math.log(abs(poly[0]))
    for r in roots:
        m = abs(r)
        if m > 1.0:
            val += math.log(m)
    return val


def interior_scan(F_points, A_points):
    """Interior points by scanning a padded bounding box of F."""
    F = {tuple(p) for p in F_points}
    A = [tuple(p) for p in A_points]
    if not F or not A:
        return set()
    d = len(next(iter(F)))
    spread = max(abs(c) for a in A for c in a) if A else 0
    los = [min(p[i] for p in F) - spread for i in range(d)]
    his = [max(p[i] for p in F) + spread for i in range(d)]
    out = set()
    for t in itertools.product(*(range(lo, hi + 1) for lo, hi in zip(los, his))):
        if all(tuple(x - a for x, a in zip(t, av)) in F for av in A):
            out.add(t)
    return out


def quotient_convolve(a, b, moduli):
    """Convolution of coefficient maps on the product of cyclic groups."""
    out = {}
    for p, c in a.items():
        for q, e in b.items():
            r = tuple((x + y) % n for x, y, n in zip(p, q, moduli))
            out[r] = out.get(r, 0) + c * e
    return {k: v for k, v in out.items() if v != 0}
