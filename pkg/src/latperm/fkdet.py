"""Determinant-side computations: logarithmic Mahler measures by torus
quadrature (with an exact root-based route in dimension one), finite
determinant sections of f f^*, the permanent-versus-determinant comparison,
and the worked example families relating the two sides."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .groupring import CapacityError, GroupRingElement, Window
from .patterns import DEFAULT_BUDGET, enumerate_with_image, pattern_sign, target_sets
from .permanent import ffstar_section_matrix, window_permanent
from .entropy import (
    WindowSchedule,
    default_tori,
    pressure_lower_bound,
    torus_estimates,
    transfer_pressure,
    upper_estimates,
)

_EPS_SWEEP = (1e-8, 1e-10, 1e-12)
_GRID_CELL_CAP = 1 << 24


@dataclass(frozen=True)
class QuadratureConfig:
    """Tensor midpoint rule parameters for torus integrals of log|f|."""

    grid: int = 64
    refinements: int = 2
    eps: float = 1e-10

    def __post_init__(self):
        if self.grid < 8:
            raise ValueError("grid must be at least 8 points per dimension")
        if not 0 < self.eps <= 1e-6:
            raise ValueError("eps must lie in (0, 1e-6]")
        if not 1 <= self.refinements <= 6:
            raise ValueError("refinements must lie in 1..6")


@dataclass(frozen=True)
class MahlerResult:
    """Quadrature value with refinement diagnostics.

    levels holds (grid, value) pairs at the configured eps floor; the error
    estimate combines the last refinement difference with the spread over the
    eps sweep; converged is False when refinement stopped shrinking the
    difference, flagging a value that should not be trusted at face value.
    """

    value: float
    error_estimate: float
    converged: bool
    levels: tuple[tuple[int, float], ...]
    eps_spread: float


def _torus_abs(f: GroupRingElement, grid: int, threads: int = 1) -> np.ndarray:
    """|f| evaluated on the shifted midpoint grid ((k+1/2)/grid per axis)."""
    d = f.dim
    if grid ** d > _GRID_CELL_CAP:
        raise CapacityError(
            f"quadrature grid {grid}^{d} exceeds the cell cap", grid ** d,
            _GRID_CELL_CAP,
        )
    theta = (np.arange(grid) + 0.5) / grid
    terms = sorted(f.terms.items())

    def chunk_abs(rows: np.ndarray) -> np.ndarray:
        shape = (len(rows),) + (grid,) * (d - 1)
        vals = np.zeros(shape, dtype=complex)
        for p, c in terms:
            phase = (p[0] * rows).reshape((len(rows),) + (1,) * (d - 1))
            for axis in range(1, d):
                ax_shape = [1] * d
                ax_shape[axis] = grid
                phase = phase + (p[axis] * theta).reshape(ax_shape)
            vals = vals + c * np.exp(2j * np.pi * phase)
        return np.abs(vals)

    if threads > 1 and grid >= 2 * threads:
        chunks = np.array_split(theta, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk_abs, chunks))
        return np.concatenate(parts, axis=0)
    return chunk_abs(theta)


def mahler_measure(
    f: GroupRingElement,
    cfg: QuadratureConfig = QuadratureConfig(),
    threads: int = 1,
) -> MahlerResult:
    """Mean of log|f| over the torus by midpoint quadrature on refined grids.

    Log singularities (zeros of f on the torus) are regularized by flooring
    |f| at eps; the returned error estimate adds the spread over a fixed eps
    sweep to the last refinement difference, and Richardson-style
    extrapolation is applied when the differences shrink geometrically.
    """
    if f.is_zero():
        raise ValueError("mahler measure of the zero element is undefined")
    grids = [cfg.grid << i for i in range(cfg.refinements + 1)]
    eps_levels = sorted(set(_EPS_SWEEP) | {cfg.eps})
    values = {eps: [] for eps in eps_levels}
    for g in grids:
        mags = _torus_abs(f, g, threads=threads)
        for eps in eps_levels:
            values[eps].append(float(np.log(np.maximum(mags, eps)).mean()))
    main = values[cfg.eps]
    diffs = [b - a for a, b in zip(main, main[1:])]
    converged = len(diffs) < 2 or abs(diffs[-1]) <= abs(diffs[-2]) + 1e-15
    value = main[-1]
    if len(diffs) >= 2 and diffs[-2] != 0:
        ratio = diffs[-1] / diffs[-2]
        if 0 < abs(ratio) < 1:
            value = main[-1] + diffs[-1] * ratio / (1 - ratio)
    finals = [values[eps][-1] for eps in _EPS_SWEEP]
    eps_spread = max(finals) - min(finals)
    error = abs(diffs[-1]) + eps_spread
    levels = tuple(zip(grids, main))
    return MahlerResult(value, error, converged, levels, eps_spread)


def mahler_measure_roots(f: GroupRingElement) -> float:
    """Exact one-dimensional Mahler measure: log of the leading coefficient
    magnitude plus log-magnitudes of the roots outside the unit circle."""
    if f.dim != 1:
        raise ValueError("root-based mahler measure needs dimension one")
    if f.is_zero():
        raise ValueError("mahler measure of the zero element is undefined")
    lo = min(p[0] for p in f.terms)
    hi = max(p[0] for p in f.terms)
    coeffs = [f.coef((k,)) for k in range(hi, lo - 1, -1)]
    value = math.log(abs(coeffs[0]))
    if len(coeffs) > 1:
        for r in np.roots(coeffs):
            m = abs(r)
            if m > 1:
                value += math.log(m)
    return value


# ---------------------------------------------------------------------------
# finite sections and the permanent comparison


@dataclass(frozen=True)
class SectionRow:
    """One finite determinant section: (1/(2|F|)) log det of the ff* block."""

    window: str
    size: int
    value: float


def fk_finite_sections(f: GroupRingElement, schedule: WindowSchedule) -> list[SectionRow]:
    """Normalized log determinants of f f^* compressions along the schedule.

    A section whose determinant is nonpositive after floating point is
    recorded as -inf rather than raising.
    """
    if f.is_zero():
        raise ValueError("finite sections of the zero element are undefined")
    rows = []
    for label, F in schedule:
        M = ffstar_section_matrix(f, F)
        sign, logabs = np.linalg.slogdet(M)
        if sign > 0 and np.isfinite(logabs):
            value = logabs / (2 * len(F))
        else:
            value = float("-inf")
        rows.append(SectionRow(label, len(F), value))
    return rows


@dataclass(frozen=True)
class ComparisonRow:
    """Permanent upper estimate next to the determinant section at one window."""

    window: str
    size: int
    iper_upper: float
    section_value: float
    det_le_iper_sq: bool


def per_vs_det_report(
    f: GroupRingElement,
    schedule: WindowSchedule,
    budget: int = DEFAULT_BUDGET,
) -> list[ComparisonRow]:
    """Window-by-window comparison of the injective permanent estimate of |f|
    with the finite determinant section, including the finite inequality
    det section <= (injective sum)^2."""
    sections = {r.window: r for r in fk_finite_sections(f, schedule)}
    rows = []
    for label, F in schedule:
        v = window_permanent(f.abs(), F, mode="injective", budget=budget)
        M = ffstar_section_matrix(f, F)
        sign, logabs = np.linalg.slogdet(M)
        if sign > 0 and np.isfinite(logabs):
            ok = logabs <= 2 * v.log + 1e-9 * max(1.0, abs(logabs))
        else:
            ok = True
        rows.append(ComparisonRow(label, len(F), v.normalized(len(F)),
                                  sections[label].value, ok))
    return rows


# ---------------------------------------------------------------------------
# example families


_FAMILY_PARAMS = {
    "trinomial-Z": ("a", "b", "c"),
    "three-point-Z": ("a", "b", "c", "K"),
    "four-point-Z": ("a", "b", "c", "d", "K"),
    "affine-Z2": ("a", "b", "c"),
    "quad-Z2": ("a", "b", "c", "d"),
    "dimer": ("a", "b"),
}


@dataclass(frozen=True)
class FamilyInstance:
    """One parameterized family member: the nonnegative permanent-side element
    and the signed determinant-side representative(s) it is compared with.

    relation tells how the sides are asserted to meet: "equality" when the
    permanent equals the single representative's determinant, "max" when it
    equals the larger of two."""

    family: str
    params: tuple[tuple[str, float], ...]
    dim: int
    permanent_element: GroupRingElement
    det_elements: tuple[GroupRingElement, ...]
    relation: str

    def params_label(self) -> str:
        return ";".join(f"{k}={v:g}" for k, v in self.params)


def family_instance(family: str, params: dict) -> FamilyInstance:
    """Build a family member from its parameter dict, validating ranges."""
    if family not in _FAMILY_PARAMS:
        raise ValueError(f"unknown family {family!r}")
    names = _FAMILY_PARAMS[family]
    if set(params) != set(names):
        raise ValueError(f"family {family} needs parameters {names}")
    vals = {k: params[k] for k in names}
    for k in names:
        if k == "K":
            continue
        if not vals[k] > 0:
            raise ValueError(f"parameter {k} must be positive")
    if "K" in names:
        K = vals["K"]
        floor = 2 if family == "three-point-Z" else 3
        if K != int(K) or K < floor:
            raise ValueError(f"K must be an integer >= {floor}")
        vals["K"] = K = int(K)

    a = vals.get("a")
    b = vals.get("b")
    c = vals.get("c")
    d = vals.get("d")
    if family == "trinomial-Z":
        perm = GroupRingElement(1, {(2,): a, (1,): b, (0,): c})
        dets = (GroupRingElement(1, {(2,): a, (1,): b, (0,): -c}),)
        relation = "equality"
    elif family == "three-point-Z":
        perm = GroupRingElement(1, {(K,): a, (K - 1,): b, (0,): c})
        dets = (GroupRingElement(1, {(K,): a, (K - 1,): b, (0,): -c}),
                GroupRingElement(1, {(K,): a, (K - 1,): b, (0,): c}))
        relation = "max"
    elif family == "four-point-Z":
        perm = GroupRingElement(1, {(K,): a, (K - 1,): b, (1,): c, (0,): d})
        dets = (GroupRingElement(1, {(K,): a, (K - 1,): b, (1,): c, (0,): -d}),
                GroupRingElement(1, {(K,): a, (K - 1,): b, (1,): -c, (0,): d}))
        relation = "max"
    elif family == "affine-Z2":
        perm = GroupRingElement(2, {(0, 0): a, (1, 0): b, (0, 1): c})
        dets = (perm,)
        relation = "equality"
    elif family == "quad-Z2":
        perm = GroupRingElement(2, {(0, 0): a, (1, 0): b, (0, 1): c, (1, 1): d})
        dets = (GroupRingElement(2, {(0, 0): a, (1, 0): b, (0, 1): c, (1, 1): -d}),
                GroupRingElement(2, {(0, 0): a, (1, 0): -b, (0, 1): c, (1, 1): d}))
        relation = "max"
    else:
        perm = GroupRingElement(2, {(1, 0): a, (-1, 0): a, (0, 1): b, (0, -1): b})
        dets = (GroupRingElement(2, {(-1, 0): a, (0, 1): b, (0, -1): b, (1, 0): -a}),)
        relation = "equality"
    ordered = tuple((k, float(vals[k])) for k in names)
    return FamilyInstance(family, ordered, perm.dim, perm, dets, relation)


@dataclass(frozen=True)
class FamilyReport:
    """Both sides of the comparison for one family member.

    per_low and per_high are certified: the transfer value twice in dimension
    one, the van der Waerden floor and the best window estimate in dimension
    two. torus_max is the best finite-quotient value, reported separately
    because quotient values can overshoot the permanent in dimension two."""

    instance: FamilyInstance
    per_low: float
    per_high: float
    per_label: str
    det_results: tuple[MahlerResult, ...]
    det_value: float
    det_error: float
    torus_max: float | None = None

    def csv_row(self) -> str:
        return (f"{self.instance.family},{self.instance.params_label()},"
                f"{self.per_low:.12g},{self.per_high:.12g},"
                f"{self.det_value:.12g},{self.det_error:.12g}")


FAMILY_CSV_HEADER = ("family,params,per_estimate_low,per_estimate_high,"
                     "det_value,det_error_estimate")


def evaluate_family(
    family: str,
    params: dict,
    cfg: QuadratureConfig = QuadratureConfig(),
    schedule: WindowSchedule | None = None,
    tori=None,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> FamilyReport:
    """Evaluate the permanent and determinant sides of one family member.

    The determinant side is the max over the signed representatives'
    quadrature Mahler measures. The permanent side is exact via the transfer
    matrix in dimension one and a window/torus bracket in dimension two."""
    inst = family_instance(family, params)
    det_results = tuple(mahler_measure(g, cfg, threads=threads)
                        for g in inst.det_elements)
    det_value = max(r.value for r in det_results)
    det_error = max(r.error_estimate for r in det_results)
    if inst.dim == 1:
        p = transfer_pressure(inst.permanent_element)
        return FamilyReport(inst, p, p, "transfer-exact", det_results,
                            det_value, det_error)
    if schedule is None:
        schedule = WindowSchedule.boxes(2, [2, 4, 6])
    if tori is None:
        tori = default_tori(inst.permanent_element, max_side=4)
    upper_rows, _ = upper_estimates(inst.permanent_element, schedule,
                                    modes=("admissible",), budget=budget,
                                    threads=threads)
    torus_rows, _ = torus_estimates(inst.permanent_element, tori,
                                    budget=budget, threads=threads)
    per_high = min(r.normalized for r in upper_rows)
    per_low = pressure_lower_bound(inst.permanent_element)
    torus_max = max((r.normalized for r in torus_rows), default=None)
    return FamilyReport(inst, per_low, per_high, "certified-bracket",
                        det_results, det_value, det_error, torus_max)


# ---------------------------------------------------------------------------
# sign structure probe


@dataclass(frozen=True)
class TargetSignReport:
    target: Window
    patterns: int
    vacuous: bool
    constant: bool
    sign: int | None


@dataclass(frozen=True)
class SignProbe:
    reports: tuple[TargetSignReport, ...]
    all_constant: bool


def constant_sign_probe(
    f: GroupRingElement,
    F: Window,
    targets=None,
    budget: int = DEFAULT_BUDGET,
) -> SignProbe:
    """Check whether the signed pattern terms share one sign per image set.

    For each image set (by default all interior-covering ones), enumerates the
    patterns with exactly that image and compares the signs of
    sign(order isomorphism) * product of coefficient signs. Empty image sets
    are reported as vacuous and count as constant."""
    A = f.support()
    if targets is None:
        targets = target_sets(A, F, require_interior=True)
    reports = []
    for target in targets:
        seen: set[int] = set()
        count = 0
        for p in enumerate_with_image(A, F, target, budget=budget):
            s = pattern_sign(p)
            for disp in p.displacements:
                if f.coef(disp) < 0:
                    s = -s
            seen.add(s)
            count += 1
        vacuous = count == 0
        constant = len(seen) <= 1
        sign = next(iter(seen)) if (constant and not vacuous) else None
        reports.append(TargetSignReport(target, count, vacuous, constant, sign))
    return SignProbe(tuple(reports), all(r.constant for r in reports))


# ---------------------------------------------------------------------------
# dimer integrand forms


def dimer_det_value(a: float, b: float,
                    cfg: QuadratureConfig = QuadratureConfig(),
                    form: str = "cos2") -> float:
    """Half the torus mean of log(2a^2+2b^2 - trig form) in its equivalent
    shapes: "cos4" uses -2a^2 cos(4 pi x) + 2b^2 cos(4 pi y), "cos2" uses
    -cos(2 pi) in both axes, "cospi" uses -cos(pi) in both axes. All agree
    as exact integrals."""
    if a <= 0 or b <= 0:
        raise ValueError("dimer parameters must be positive")
    g = cfg.grid << cfg.refinements
    theta = (np.arange(g) + 0.5) / g
    x = theta[:, None]
    y = theta[None, :]
    if form == "cos4":
        vals = (2 * a * a + 2 * b * b
                - 2 * a * a * np.cos(4 * np.pi * x)
                + 2 * b * b * np.cos(4 * np.pi * y))
    elif form == "cos2":
        vals = (2 * a * a + 2 * b * b
                - 2 * a * a * np.cos(2 * np.pi * x)
                - 2 * b * b * np.cos(2 * np.pi * y))
    elif form == "cospi":
        vals = (2 * a * a + 2 * b * b
                - 2 * a * a * np.cos(np.pi * x)
                - 2 * b * b * np.cos(np.pi * y))
    else:
        raise ValueError(f"unknown integrand form {form!r}")
    return float(np.log(np.maximum(vals, cfg.eps)).mean()) / 2
