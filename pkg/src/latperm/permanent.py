"""Permanent kernels for restricted displacement patterns and matrices.

The central quantity is the weighted count of injective (optionally
interior-covering) patterns on a window, which is the permanent of a
rectangular site-by-target matrix. Three backends are provided:

* ``sweep`` - a frontier dynamic program over sites in lexicographic order.
  States are bitmasks of claimed targets, restricted at every step to the
  targets some later site can still claim, so the memo stays small. Coverage
  requirements are enforced the moment a target's last potential claimant
  passes. A pure-dict engine supports exact big-integer arithmetic, and a
  vectorized numpy engine handles wide fronts (large torus quotients).
* ``dfs`` - plain depth-first backtracking without memoization.
* ``ryser`` - Gray-code Ryser on the dense matrix, with rectangular inputs
  padded by all-one rows, and coverage handled by inclusion-exclusion over
  the required targets.

All kernels honor a node budget and raise CapacityError when they blow it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groupring import (
    CapacityError,
    GroupRingElement,
    Point,
    TorusQuotient,
    Window,
    add,
    dilate,
    interior,
    neg,
    project,
    separated_on_quotient,
    sub,
)
from .patterns import DEFAULT_BUDGET, enumerate_injective, enumerate_with_image, pattern_sign

_INT64_GUARD = 1 << 60
_RYSER_MAX_COLS = 24


class _Int64Overflow(Exception):
    pass


def log_of(x) -> float:
    """Natural log of a nonnegative number, exact-int friendly, -inf at zero."""
    if x == 0:
        return float("-inf")
    if isinstance(x, int):
        return math.log(x)
    return math.log(float(x))


@dataclass(frozen=True)
class LogValue:
    """A possibly huge value carried as log magnitude plus sign.

    ``linear`` keeps the plain value when it is representable (always for
    exact integer results); signed sums must be read from it, since ``log``
    only sees the magnitude.
    """

    log: float
    sign: int = 1
    linear: float | int | None = None

    @staticmethod
    def from_linear(v) -> "LogValue":
        if v == 0:
            return LogValue(float("-inf"), 0, 0)
        s = 1 if v > 0 else -1
        return LogValue(log_of(abs(v)), s, v)

    @staticmethod
    def from_log(log: float, sign: int = 1) -> "LogValue":
        if sign == 0 or log == float("-inf"):
            return LogValue(float("-inf"), 0, 0)
        linear = math.exp(log) * sign if log < 700.0 else None
        return LogValue(log, sign, linear)

    def normalized(self, size: int) -> float:
        return self.log / size

    def is_zero(self) -> bool:
        return self.sign == 0


@dataclass(frozen=True)
class WeightedBipartite:
    """Dense site-by-target matrix of displacement weights.

    Rows follow the window F, columns the dilated window FA, and the entry at
    (s, t) is the weight of the displacement t - s. ``required`` lists the
    columns (interior points) that admissible patterns must cover.
    """

    rows: tuple[Point, ...]
    cols: tuple[Point, ...]
    matrix: np.ndarray
    required: tuple[Point, ...]

    def required_indices(self) -> list[int]:
        pos = {t: j for j, t in enumerate(self.cols)}
        return [pos[t] for t in self.required]


def bipartite_structure(f: GroupRingElement, F: Window, A: Window | None = None) -> WeightedBipartite:
    """Build the rectangular weight matrix of (f, A, F)."""
    A = A if A is not None else f.support()
    if not f.support().point_set <= A.point_set:
        raise ValueError("support of f must lie inside A")
    cols = dilate(F, A).points
    pos = {t: j for j, t in enumerate(cols)}
    M = np.zeros((len(F), len(cols)))
    for i, s in enumerate(F.points):
        for a, c in f.terms.items():
            M[i, pos[add(s, a)]] = c
    req = interior(F, A).points
    return WeightedBipartite(F.points, cols, M, req)


# ---------------------------------------------------------------------------
# sweep kernel


def _relevance(rows: list[list[tuple[int, object]]], nrows: int) -> list[int]:
    rel = [0] * (nrows + 1)
    for k in range(nrows - 1, -1, -1):
        m = rel[k + 1]
        for j, _ in rows[k]:
            m |= 1 << j
        rel[k] = m
    return rel


def _sweep_dict(rows, required_mask: int, exact: bool, budget: int):
    """Frontier DP with dict states; exact big-int arithmetic when asked."""
    nrows = len(rows)
    rel = _relevance(rows, nrows)
    if required_mask & ~rel[0]:
        return 0 if exact else 0.0
    states = {0: 1 if exact else 1.0}
    nodes = 0
    for k in range(nrows):
        keep = rel[k + 1]
        need = rel[k] & ~keep & required_mask
        new: dict[int, object] = {}
        choices = [(1 << j, w) for j, w in rows[k]]
        nodes += len(states) * len(choices)
        if nodes > budget:
            raise CapacityError(
                f"sweep kernel exceeded {budget} nodes at row {k}/{nrows}", nodes, budget
            )
        for mask, val in states.items():
            for bit, w in choices:
                if mask & bit:
                    continue
                nm = mask | bit
                if nm & need != need:
                    continue
                nm &= keep
                if nm in new:
                    new[nm] += val * w
                else:
                    new[nm] = val * w
        if not new:
            return 0 if exact else 0.0
        states = new
    return sum(states.values())


def _sweep_vector(rows, ncols: int, required_mask: int, exact: bool, budget: int):
    """Frontier DP with numpy state arrays and per-step bit compaction.

    State keys live in a per-step local coordinate system spanning only the
    targets that are both claimable by now and still claimable later, which
    keeps keys inside 62 bits even when the global target set is larger.
    """
    nrows = len(rows)
    rel = _relevance(rows, nrows)
    if required_mask & ~rel[0]:
        return 0 if exact else 0.0

    def bits_of(mask: int) -> list[int]:
        out = []
        j = 0
        while mask:
            if mask & 1:
                out.append(j)
            mask >>= 1
            j += 1
        return out

    dtype = np.int64 if exact else np.float64
    keys = np.zeros(1, dtype=np.int64)
    vals = np.ones(1, dtype=dtype)
    state_cols: list[int] = []
    claimable = 0
    nodes = 0
    for k in range(nrows):
        targets = 0
        for j, _ in rows[k]:
            targets |= 1 << j
        trans_mask = (claimable | targets) & rel[k]
        trans = bits_of(trans_mask)
        if len(trans) > 62:
            raise CapacityError(
                f"vector sweep needs {len(trans)} live targets at row {k} (max 62)",
                nodes, budget,
            )
        tpos = {j: p for p, j in enumerate(trans)}
        dying_req = rel[k] & ~rel[k + 1] & required_mask
        if dying_req & ~trans_mask:
            return 0 if exact else 0.0
        need_local = 0
        for j in bits_of(dying_req):
            need_local |= 1 << tpos[j]
        # embed incoming keys into the transient coordinate system
        if state_cols != trans:
            spread = np.zeros_like(keys)
            for p, j in enumerate(state_cols):
                spread |= ((keys >> p) & 1) << tpos[j]
            keys = spread
        next_cols = bits_of(trans_mask & rel[k + 1])
        gather = [(tpos[j], p) for p, j in enumerate(next_cols)]
        identity_gather = gather == [(p, p) for p in range(len(trans))]
        parts_k = []
        parts_v = []
        for j, w in rows[k]:
            lb = tpos[j]
            free = (keys >> lb) & 1 == 0
            nk = keys[free] | np.int64(1 << lb)
            nv = vals[free]
            if need_local:
                ok = (nk & need_local) == need_local
                nk = nk[ok]
                nv = nv[ok]
            if nk.size == 0:
                continue
            if not identity_gather:
                mapped = np.zeros_like(nk)
                for sp, dp in gather:
                    mapped |= ((nk >> sp) & 1) << dp
                nk = mapped
            parts_k.append(nk)
            if exact:
                if nv.size and abs(int(np.abs(nv).max())) * abs(int(w)) > _INT64_GUARD:
                    raise _Int64Overflow
                parts_v.append(nv * int(w))
            else:
                parts_v.append(nv * w)
        if not parts_k:
            return 0 if exact else 0.0
        kk = np.concatenate(parts_k)
        vv = np.concatenate(parts_v)
        nodes += kk.size
        if nodes > budget:
            raise CapacityError(
                f"sweep kernel exceeded {budget} nodes at row {k}/{nrows}", nodes, budget
            )
        order = np.argsort(kk, kind="stable")
        kk = kk[order]
        vv = vv[order]
        starts = np.flatnonzero(np.concatenate(([True], kk[1:] != kk[:-1])))
        keys = kk[starts]
        vals = np.add.reduceat(vv, starts)
        if exact and vals.size and abs(int(np.abs(vals).max())) > _INT64_GUARD:
            raise _Int64Overflow
        state_cols = next_cols
        claimable |= targets
    total = vals.sum()
    return int(total) if exact else float(total)


def _dfs_permanent(rows, required_mask: int, exact: bool, budget: int):
    """Plain backtracking over rows, no memoization."""
    nrows = len(rows)
    rel = _relevance(rows, nrows)
    if required_mask & ~rel[0]:
        return 0 if exact else 0.0
    needs = [rel[k] & ~rel[k + 1] & required_mask for k in range(nrows)]
    nodes = 0

    def go(k: int, mask: int, acc):
        nonlocal nodes
        if k == nrows:
            return acc
        total = 0 if exact else 0.0
        need = needs[k]
        for j, w in rows[k]:
            bit = 1 << j
            if mask & bit:
                continue
            nodes += 1
            if nodes > budget:
                raise CapacityError(
                    f"dfs kernel exceeded {budget} nodes", nodes, budget
                )
            nm = mask | bit
            if nm & need != need:
                continue
            total += go(k + 1, nm, acc * w)
        return total

    return go(0, 0, 1 if exact else 1.0)


# ---------------------------------------------------------------------------
# Ryser


def ryser_permanent(M: np.ndarray, exact: bool = False):
    """Permanent of an m x n matrix (m <= n) by Gray-code Ryser.

    Rectangular inputs are padded with all-one rows and the result divided
    by (n - m)!; exact mode runs in Python integers.
    """
    M = np.asarray(M)
    m, n = M.shape
    if m > n:
        return 0 if exact else 0.0
    if n == 0:
        return 1 if exact else 1.0
    if n > _RYSER_MAX_COLS:
        raise CapacityError(f"ryser limited to {_RYSER_MAX_COLS} columns", n, _RYSER_MAX_COLS)
    pad = n - m
    if exact:
        cols = [[int(M[i, j]) for i in range(m)] + [1] * pad for j in range(n)]
        sums = [0] * n
        total = 0
        gray = 0
        for k in range(1, 1 << n):
            flip = (k & -k).bit_length() - 1
            gray ^= 1 << flip
            sign = 1 if gray >> flip & 1 else -1
            col = cols[flip]
            for i in range(n):
                sums[i] += sign * col[i]
            term = 1
            for s in sums:
                term *= s
                if term == 0:
                    break
            total += term if bin(gray).count("1") % 2 == n % 2 else -term
        if pad:
            q, r = divmod(total, math.factorial(pad))
            if r:
                raise ArithmeticError("ryser padding division was not exact")
            total = q
        return total
    Mp = np.vstack([M.astype(float), np.ones((pad, n))])
    sums = np.zeros(n)
    total = 0.0
    gray = 0
    for k in range(1, 1 << n):
        flip = (k & -k).bit_length() - 1
        gray ^= 1 << flip
        if gray >> flip & 1:
            sums += Mp[:, flip]
        else:
            sums -= Mp[:, flip]
        term = sums.prod()
        total += term if bin(gray).count("1") % 2 == n % 2 else -term
    if pad:
        total /= math.factorial(pad)
    return total


# ---------------------------------------------------------------------------
# window and torus permanents


def _window_rows(f: GroupRingElement, F: Window, A: Window, normalize: float | None):
    cols = dilate(F, A).points
    pos = {t: j for j, t in enumerate(cols)}
    disp = sorted(f.terms)
    rows = []
    for s in F.points:
        row = []
        for a in disp:
            c = f.terms[a]
            w = c / normalize if normalize else c
            row.append((pos[add(s, a)], w))
        rows.append(row)
    return rows, cols, pos


def _required_mask(required_points, pos) -> int:
    mask = 0
    for t in required_points:
        mask |= 1 << pos[t]
    return mask


def _pick_exact(f: GroupRingElement, exact: bool | None) -> bool:
    return f.is_integer() if exact is None else exact


def _run_kernel(rows, ncols, required_mask, exact, budget, engine):
    if engine == "dict":
        return _sweep_dict(rows, required_mask, exact, budget)
    if engine == "vector":
        try:
            return _sweep_vector(rows, ncols, required_mask, exact, budget)
        except _Int64Overflow:
            return _sweep_dict(rows, required_mask, exact, budget)
    raise ValueError(f"unknown engine {engine!r}")


def window_permanent(
    f: GroupRingElement,
    F: Window,
    A: Window | None = None,
    mode: str = "admissible",
    backend: str = "auto",
    exact: bool | None = None,
    budget: int = DEFAULT_BUDGET,
    engine: str | None = None,
) -> LogValue:
    """Weighted pattern sum over the window F.

    mode 'injective' sums over injective patterns, 'admissible' additionally
    requires the image to cover the interior of F. The result is exact when
    f has integer coefficients (arbitrary precision via the dict engine).
    """
    if mode not in ("admissible", "injective"):
        raise ValueError("mode must be 'admissible' or 'injective'")
    A = A if A is not None else f.support()
    if f.is_zero() or len(F) == 0:
        return LogValue.from_linear(1 if len(F) == 0 else 0)
    if not f.support().point_set <= A.point_set:
        raise ValueError("support of f must lie inside A")
    use_exact = _pick_exact(f, exact)
    if use_exact:
        f = f.as_integer()
        normalize = None
    else:
        normalize = f.norm_inf()
    rows, cols, pos = _window_rows(f, F, A, normalize)
    req_mask = 0
    if mode == "admissible":
        req_mask = _required_mask(interior(F, A).points, pos)

    if backend == "auto":
        backend = "sweep"
    if backend == "sweep":
        eng = engine or ("dict" if len(F) <= 48 or use_exact else "vector")
        raw = _run_kernel(rows, len(cols), req_mask, use_exact, budget, eng)
    elif backend == "dfs":
        raw = _dfs_permanent(rows, req_mask, use_exact, budget)
    elif backend == "ryser":
        B = bipartite_structure(f, F, A)
        req = B.required_indices() if mode == "admissible" else []
        M = B.matrix if normalize is None else B.matrix / normalize
        raw = _inclusion_exclusion_permanent(M, req, use_exact)
    else:
        raise ValueError(f"unknown backend {backend!r}")

    return _scaled_logvalue(raw, normalize, len(F))


def _scaled_logvalue(raw, normalize, nsites) -> LogValue:
    if normalize is None:
        return LogValue.from_linear(raw)
    if raw == 0:
        return LogValue.from_linear(0)
    sign = 1 if raw > 0 else -1
    log = math.log(abs(raw)) + nsites * math.log(normalize)
    return LogValue.from_log(log, sign)


def _inclusion_exclusion_permanent(M: np.ndarray, required: list[int], exact: bool):
    """Coverage-constrained permanent via inclusion-exclusion over required columns."""
    if len(required) > 24:
        raise CapacityError("inclusion-exclusion limited to 24 required columns",
                            len(required), 24)
    n = M.shape[1]
    total = 0 if exact else 0.0
    for k in range(1 << len(required)):
        drop = {required[i] for i in range(len(required)) if k >> i & 1}
        keep = [j for j in range(n) if j not in drop]
        term = ryser_permanent(M[:, keep], exact=exact)
        total += term if bin(k).count("1") % 2 == 0 else -term
    return total


def torus_permanent(
    f: GroupRingElement,
    quotient: TorusQuotient,
    backend: str = "auto",
    exact: bool | None = None,
    budget: int = DEFAULT_BUDGET,
    factorize: bool | None = None,
) -> LogValue:
    """Permanent of the displacement weight matrix on a finite quotient.

    Every quotient point is a site and must also be hit, so patterns are
    bijections of the quotient with displacements in the projected support.
    Requires distinct displacements to stay distinct on the quotient.

    When every displacement flips coordinate-sum parity and all moduli are
    even, the parity two-coloring descends to the quotient, bijections split
    into an even-to-odd and an odd-to-even part, and the permanent factors
    into two half-size permanents. That fast path is what makes large
    alternating quotients (8x8 and beyond) tractable; set factorize=False to
    force the generic sweep for cross-checks.
    """
    A = f.support()
    if quotient.dim != f.dim:
        raise ValueError("quotient dimension does not match element")
    ok, pair = separated_on_quotient(A, quotient)
    if not ok:
        raise ValueError(
            f"displacements {pair[0]} and {pair[1]} collide modulo {quotient.moduli}"
        )
    use_exact = _pick_exact(f, exact)
    reduced = project(f, quotient)
    if use_exact:
        reduced = {p: int(c) for p, c in reduced.items()}
        normalize = None
    else:
        normalize = max(abs(c) for c in reduced.values())
    parity_flipping = all(sum(a) % 2 == 1 for a in reduced) and all(
        n % 2 == 0 for n in quotient.moduli
    )
    if factorize is None:
        factorize = parity_flipping and backend in ("auto", "sweep")
    if factorize and not parity_flipping:
        raise ValueError("factorized evaluation needs parity-flipping "
                         "displacements and even moduli")

    def run(sites, col_index, ncols, weights_scaled):
        disp = sorted(weights_scaled)
        rows = [
            [(col_index[quotient.reduce(add(s, a))], weights_scaled[a]) for a in disp]
            for s in sites
        ]
        required_mask = (1 << ncols) - 1
        if backend == "dfs":
            return _dfs_permanent(rows, required_mask, use_exact, budget)
        eng = "vector" if ncols > 24 else "dict"
        return _run_kernel(rows, ncols, required_mask, use_exact, budget, eng)

    weights = {
        a: (c / normalize if normalize else c) for a, c in reduced.items()
    }
    if factorize:
        evens = [p for p in quotient.points() if sum(p) % 2 == 0]
        odds = [p for p in quotient.points() if sum(p) % 2 == 1]
        odd_index = {p: j for j, p in enumerate(odds)}
        even_index = {p: j for j, p in enumerate(evens)}
        half1 = run(evens, odd_index, len(odds), weights)
        half2 = run(odds, even_index, len(evens), weights)
        raw = half1 * half2
    else:
        sites = quotient.points()
        full_index = {p: j for j, p in enumerate(sites)}
        raw = run(sites, full_index, quotient.size, weights)
    return _scaled_logvalue(raw, normalize, quotient.size)


def matrix_permanent(
    M, backend: str = "auto", exact: bool = False, budget: int = DEFAULT_BUDGET
):
    """Permanent of a dense matrix or a WeightedBipartite (no coverage).

    Auto backend: Gray-code Ryser for small dense matrices, the sweep kernel
    for sparse or wide ones.
    """
    if isinstance(M, WeightedBipartite):
        M = M.matrix
    M = np.asarray(M)
    m, n = M.shape
    if m > n:
        return 0 if exact else 0.0
    if backend == "auto":
        density = np.count_nonzero(M) / max(1, M.size)
        backend = "ryser" if n <= 20 and density >= 0.25 else "sweep"
    if backend == "ryser":
        return ryser_permanent(M, exact=exact)
    if backend == "sweep":
        rows = []
        for i in range(m):
            nz = np.nonzero(M[i])[0]
            rows.append([(int(j), int(M[i, j]) if exact else float(M[i, j])) for j in nz])
        return _sweep_dict(rows, 0, exact, budget)
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# signed sums and the finite determinant identity


def signed_target_sum(f: GroupRingElement, F: Window, target: Window,
                      budget: int = DEFAULT_BUDGET) -> float:
    """Sum of sgn(order isomorphism) * pattern weight over patterns with the
    given image. Linear-domain on purpose: these sums cancel."""
    A = f.support()
    total = 0.0
    for p in enumerate_with_image(A, F, target, budget=budget):
        total += pattern_sign(p) * p.weight(f)
    return total


def ffstar_section_matrix(f: GroupRingElement, F: Window) -> np.ndarray:
    """Matrix of f f^* restricted to the reflected window -F."""
    g = f.convolve(f.adjoint())
    E = sorted(neg(p) for p in F.points)
    n = len(E)
    M = np.zeros((n, n))
    for i, s in enumerate(E):
        for j, t in enumerate(E):
            M[i, j] = g.coef(sub(s, t))
    return M


def finite_det_ffstar(f: GroupRingElement, F: Window) -> float:
    """Determinant of the f f^* section on -F (nonnegative up to roundoff)."""
    return float(np.linalg.det(ffstar_section_matrix(f, F)))


def det_identity_check(f: GroupRingElement, F: Window,
                       budget: int = DEFAULT_BUDGET) -> dict:
    """Compare det of the f f^* section with the sum over image sets of
    squared signed pattern sums. Returns both sides and their difference."""
    lhs = finite_det_ffstar(f, F)
    A = f.support()
    buckets: dict[frozenset, float] = {}
    npat = 0
    for p in enumerate_injective(A, F, budget=budget):
        npat += 1
        key = p.image_set()
        buckets[key] = buckets.get(key, 0.0) + pattern_sign(p) * p.weight(f)
    rhs = float(sum(v * v for v in buckets.values()))
    denom = max(1.0, abs(lhs), abs(rhs))
    return {
        "lhs_det": lhs,
        "rhs_sum": rhs,
        "abs_error": abs(lhs - rhs),
        "rel_error": abs(lhs - rhs) / denom,
        "patterns": npat,
        "images": len(buckets),
    }


# ---------------------------------------------------------------------------
# doubly stochastic extension and classical bounds


def doubly_stochastic_extension(f: GroupRingElement, F: Window,
                                A: Window | None = None) -> tuple[np.ndarray, tuple[Point, ...]]:
    """Square doubly stochastic matrix on FA extending the site-target matrix.

    Each displacement a of A induces a bijection of FA that translates F by a
    and maps the leftover points onto the leftover targets in lexicographic
    order; summing f_a over these bijections gives the extension. Needs
    nonnegative f with total mass one. The ambient displacement set is
    enlarged by the zero displacement so that F sits inside FA and the
    site-target matrix really is a submatrix.
    """
    A = A if A is not None else f.support()
    if not f.support().point_set <= A.point_set:
        raise ValueError("support of f must lie inside A")
    A = Window.of(set(A.points) | {(0,) * f.dim})
    if not f.is_nonnegative():
        raise ValueError("extension needs nonnegative coefficients")
    if abs(sum(f.terms.values()) - 1.0) > 1e-12:
        raise ValueError("extension needs total mass one")
    ground = dilate(F, A).points
    pos = {t: j for j, t in enumerate(ground)}
    n = len(ground)
    C = np.zeros((n, n))
    fset = F.point_set
    for a in sorted(A.points):
        c = f.coef(a)
        image_of_F = {add(s, a) for s in F.points}
        rest_dom = [t for t in ground if t not in fset]
        rest_cod = [t for t in ground if t not in image_of_F]
        sigma = {s: add(s, a) for s in F.points}
        sigma.update(dict(zip(rest_dom, rest_cod)))
        if c == 0:
            continue
        for t1, t2 in sigma.items():
            C[pos[t1], pos[t2]] += c
    return C, ground


def vdw_bound(n: int) -> float:
    """log of n!/n^n, the van der Waerden floor for doubly stochastic matrices."""
    if n < 1:
        raise ValueError("order must be positive")
    return math.lgamma(n + 1) - n * math.log(n)


def bregman_bound(M: np.ndarray) -> float:
    """log of the Minc/Bregman ceiling prod_i (r_i!)^(1/r_i) for a 0-1 matrix."""
    M = np.asarray(M)
    if not np.isin(M, (0, 1)).all():
        raise ValueError("bound applies to 0-1 matrices")
    total = 0.0
    for r in M.sum(axis=1):
        r = int(r)
        if r == 0:
            return float("-inf")
        total += math.lgamma(r + 1) / r
    return total
