"""Extremal witness sequences and an empirical blow-up oracle.

For a discrete relation such as ``l_{q1,s1} * l_{q2,s2} c l_{q,s}`` the oracle
evaluates the norm ratio

    ||a * b||_{q,s} / (||a||_{q1,s1} ||b||_{q2,s2})

over parametric witness families (unit impulses, far deltas, boxes and
Hoelder power profiles) at growing truncation ``N`` and fits the exponent of
growth on a log2-log2 scale.  A fitted slope of at least ``SLOPE_THRESHOLD``
with monotone ratios refutes the relation; a slope of at most
``BOUNDED_SLOPE`` is reported as bounded.
"""

from __future__ import annotations

import enum
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence as Seq

import numpy as np

from .indices import Exponent, IndexPair, Kind, holder_lr_recip
from .lattice import Sequence, convolve, pointwise_product, weighted_norm

__all__ = [
    "SLOPE_THRESHOLD",
    "BOUNDED_SLOPE",
    "FamilyKind",
    "OracleVerdict",
    "WitnessFamily",
    "OracleReport",
    "EmpiricalSummary",
    "InvalidBranch",
    "ZeroDenominator",
    "box",
    "holder_power_witness",
    "ratio",
    "canonical_families",
    "blowup_probe",
    "empirical_decide",
    "default_n_list",
    "confirmation_windows",
]

SLOPE_THRESHOLD = 0.05
BOUNDED_SLOPE = 0.02
MIN_FIT_N = 8
# members above this radius are rebuilt on demand instead of cached
CACHE_MAX_N = 1024


class InvalidBranch(ValueError):
    """The Hoelder power witness needs ``1/q - sum 1/q_j > 0``."""


class ZeroDenominator(ZeroDivisionError):
    pass


class FamilyKind(str, enum.Enum):
    UNIT = "Unit"
    DELTA_AT = "DeltaAt"
    BOX = "Box"
    HOLDER_POWER = "HolderPower"


class OracleVerdict(str, enum.Enum):
    BOUNDED = "Bounded"
    BLOW_UP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"


def default_n_list(dim: int) -> tuple[int, ...]:
    return (8, 16, 32, 64, 128) if dim == 1 else (8, 16, 32)


def confirmation_windows(dim: int) -> tuple[tuple[int, ...], ...]:
    """Farther windows used to re-probe families that were not bounded.

    Convergent witness ratios approach their limit like a partial sum,
    ``C - c N^{-d}`` (possibly with a logarithmic factor), and for small ``d``
    the fitted slope at ``N <= 128`` sits well above the noise band.  True
    power growth keeps its slope on every window.
    """
    if dim == 1:
        return ((2 ** 14, 2 ** 16, 2 ** 18), (2 ** 18, 2 ** 19, 2 ** 20))
    return ((128, 256, 512),)


# -- witness sequences ------------------------------------------------------


def box(N: int, dim: int = 1) -> Sequence:
    """Indicator of ``{|i|_inf <= N}``."""
    if N < 0:
        raise ValueError("box radius must be >= 0")
    return Sequence(np.ones((2 * N + 1,) * dim), (-N,) * dim)


def _cube_points(N: int, dim: int) -> np.ndarray:
    ax = np.arange(-N, N + 1)
    return np.stack(np.meshgrid(*([ax] * dim), indexing="ij"), axis=-1)


def holder_power_witness(N: int, out: IndexPair, ins: Seq[IndexPair],
                         dim: int = 1) -> list[Sequence]:
    """The extremal profiles for ``prod_j l_{q_j,s_j} c l_{q,s}`` on ``|i|_inf <= N``.

    ``a_j(i) = m_j(i)^{-1} (m(i) / prod_k m_k(i))^{r/q_j}`` with ``m = <.>^s``
    and ``1/r = 1/q - sum 1/q_j``.  A zero exponent ``r/q_j`` (``q_j = inf``)
    gives the factor 1.
    """
    rho = out.u - sum(i.u for i in ins)
    if rho <= 0:
        raise InvalidBranch(f"need 1/q - sum 1/q_j > 0, got {rho}")
    s_diff = out.s - sum(i.s for i in ins)
    log_br = 0.5 * np.log1p(np.sum(_cube_points(N, dim).astype(float) ** 2, axis=-1))
    seqs = []
    for pr in ins:
        expo = -pr.s
        if pr.u != 0:
            expo += s_diff * pr.u / rho
        seqs.append(Sequence(np.exp(float(expo) * log_br), (-N,) * dim))
    return seqs


def _apply(kind: Kind, seqs: Seq[Sequence]) -> Sequence:
    op = convolve if Kind(kind) is Kind.CONVOLUTION else pointwise_product
    return reduce(op, seqs)


def ratio(kind, out: IndexPair, ins: Seq[IndexPair], seqs: Seq[Sequence],
          dim: int = 1) -> float:
    """``||map(seqs)||_out / prod_j ||seq_j||_{in_j}``."""
    if len(seqs) != len(ins):
        raise ValueError("one sequence per input index is required")
    den = 1.0
    for a, pr in zip(seqs, ins):
        den *= weighted_norm(a, pr.q, pr.s)
    if den <= 0:
        raise ZeroDenominator("an input sequence has zero norm")
    return weighted_norm(_apply(kind, seqs), out.q, out.s) / den


# -- families ---------------------------------------------------------------

_SLOTS = ("unit", "delta+", "delta-", "box", "box2", "holder")


@dataclass(frozen=True)
class WitnessFamily:
    """A recipe producing one sequence per input slot for each ``N``.

    Slot recipes: ``unit`` (impulse at 0), ``delta+`` / ``delta-`` (impulse
    at ``+-N e_1``), ``box`` / ``box2`` (boxes of radius ``N`` / ``2N``) and
    ``holder`` (Hoelder power profiles tuned to ``target`` over the holder
    slots).
    """

    kind: FamilyKind
    slots: tuple[str, ...]
    target: IndexPair | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        object.__setattr__(self, "slots", tuple(self.slots))
        bad = [s for s in self.slots if s not in _SLOTS]
        if bad:
            raise ValueError(f"unknown slot recipes {bad}")
        if "holder" in self.slots and self.target is None:
            raise ValueError("holder slots need a target index")

    @property
    def label(self) -> str:
        text = f"{self.kind.value}[{','.join(self.slots)}]"
        if self.target is not None:
            text += f"->{self.target}"
        return text

    def members(self, N: int, ins: Seq[IndexPair], dim: int = 1) -> list[Sequence]:
        if N < 1:
            raise ValueError("N must be >= 1")
        if len(ins) != len(self.slots):
            raise ValueError("family arity does not match the query")
        hins = tuple(pr for pr, sl in zip(ins, self.slots) if sl == "holder")
        return list(_members(self.slots, N, dim, self.target, hins))


def _members(slots, N, dim, target, hins) -> tuple[Sequence, ...]:
    if N <= CACHE_MAX_N:
        return _members_cached(slots, N, dim, target, hins)
    return _build_members(slots, N, dim, target, hins)


def _build_members(slots, N, dim, target, hins) -> tuple[Sequence, ...]:
    far = np.zeros(dim, dtype=int)
    far[0] = N
    hseqs = iter(holder_power_witness(N, target, hins, dim) if hins else ())
    out = []
    for sl in slots:
        if sl == "unit":
            out.append(Sequence.delta(np.zeros(dim, dtype=int)))
        elif sl == "delta+":
            out.append(Sequence.delta(far))
        elif sl == "delta-":
            out.append(Sequence.delta(-far))
        elif sl == "box":
            out.append(box(N, dim))
        elif sl == "box2":
            out.append(box(2 * N, dim))
        else:
            out.append(next(hseqs))
    return tuple(out)


_members_cached = lru_cache(maxsize=4096)(_build_members)


@lru_cache(maxsize=4096)
def _mapped_cached(kind, slots, N, dim, target, hins) -> Sequence:
    return _apply(kind, _members_cached(slots, N, dim, target, hins))


def _family_ratio(kind: Kind, family: WitnessFamily, out: IndexPair,
                  ins: Seq[IndexPair], N: int, dim: int) -> float:
    hins = tuple(pr for pr, sl in zip(ins, family.slots) if sl == "holder")
    seqs = _members(family.slots, N, dim, family.target, hins)
    den = 1.0
    for a, pr in zip(seqs, ins):
        den *= weighted_norm(a, pr.q, pr.s)
    if den <= 0:
        raise ZeroDenominator("an input sequence has zero norm")
    if N <= CACHE_MAX_N:
        img = _mapped_cached(Kind(kind), family.slots, N, dim, family.target, hins)
    else:
        img = _apply(Kind(kind), seqs)
    return weighted_norm(img, out.q, out.s) / den


def canonical_families(kind, out: IndexPair, ins: Seq[IndexPair],
                       dim: int = 1) -> list[WitnessFamily]:
    """Witness families applicable to a discrete product or convolution query."""
    kind = Kind(kind)
    J = len(ins)
    fams: list[WitnessFamily] = []
    unit = ("unit",) * J

    def with_slot(base, j, sl):
        return tuple(sl if i == j else b for i, b in enumerate(base))

    if kind is Kind.PRODUCT:
        fams.append(WitnessFamily(FamilyKind.DELTA_AT, ("delta+",) * J))
        fams.append(WitnessFamily(FamilyKind.BOX, ("box",) * J))
        if J == 2:
            fams.append(WitnessFamily(FamilyKind.BOX, ("box", "box2")))
        for j in range(J):
            fams.append(WitnessFamily(FamilyKind.UNIT, with_slot(("box",) * J, j, "unit")))
        if holder_lr_recip(out, ins) > 0:
            fams.append(WitnessFamily(FamilyKind.HOLDER_POWER, ("holder",) * J, out))
        return fams

    if kind is not Kind.CONVOLUTION:
        raise ValueError("families are defined for products and convolutions")
    for j in range(J):
        fams.append(WitnessFamily(FamilyKind.DELTA_AT, with_slot(unit, j, "delta+")))
    if J == 2:
        fams.append(WitnessFamily(FamilyKind.DELTA_AT, ("delta+", "delta-")))
        fams.append(WitnessFamily(FamilyKind.BOX, ("box", "box2")))
    fams.append(WitnessFamily(FamilyKind.BOX, ("box",) * J))
    for j in range(J):
        fams.append(WitnessFamily(FamilyKind.UNIT, with_slot(unit, j, "box")))
    banach = tuple(sl if ins[i].q.is_banach() else "unit"
                   for i, sl in enumerate(("box",) * J))
    if J > 2 and banach not in (("box",) * J, unit):
        fams.append(WitnessFamily(FamilyKind.UNIT, banach))
    one = IndexPair(Exponent.of(1), Fraction(0))
    if J == 2 and holder_lr_recip(one, ins) > 0:
        # (a * b)(0) = sum_k a_k b_k for even profiles
        fams.append(WitnessFamily(FamilyKind.HOLDER_POWER, ("holder", "holder"), one))
    for j in range(J):
        if out.u > ins[j].u:
            fams.append(WitnessFamily(FamilyKind.HOLDER_POWER,
                                      with_slot(unit, j, "holder"), out))
    return fams


# -- oracle -----------------------------------------------------------------


@dataclass(frozen=True)
class OracleReport:
    family: str
    points: tuple[tuple[int, float], ...]
    slope: float
    verdict: OracleVerdict

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r for _, r in self.points])

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "points": [{"N": N, "ratio": r} for N, r in self.points],
            "slope": self.slope,
            "verdict": self.verdict.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def fit_slope(points) -> float:
    """Least-squares slope of ``log2 ratio`` against ``log2 N`` for ``N >= 8``."""
    pts = [(N, r) for N, r in points if N >= MIN_FIT_N]
    if len(pts) < 2:
        raise ValueError("need at least two points with N >= 8")
    x = np.log2([N for N, _ in pts])
    y = np.log2([r for _, r in pts])
    return float(np.polyfit(x, y, 1)[0])


def _monotone(ratios) -> bool:
    r = np.asarray(ratios)
    return bool(np.all(r[1:] >= r[:-1] * (1 - 1e-12)))


def classify(points) -> tuple[float, OracleVerdict]:
    slope = fit_slope(points)
    ratios = [r for N, r in points if N >= MIN_FIT_N]
    if slope >= SLOPE_THRESHOLD and _monotone(ratios):
        return slope, OracleVerdict.BLOW_UP
    if slope <= BOUNDED_SLOPE:
        return slope, OracleVerdict.BOUNDED
    return slope, OracleVerdict.INCONCLUSIVE


def _check_n_list(N_list) -> tuple[int, ...]:
    N_list = tuple(int(N) for N in N_list)
    if list(N_list) != sorted(set(N_list)):
        raise ValueError("N_list must be strictly ascending")
    if sum(N >= MIN_FIT_N for N in N_list) < 3:
        raise ValueError("N_list needs at least three entries >= 8")
    return N_list


def blowup_probe(kind, out: IndexPair, ins: Seq[IndexPair], family: WitnessFamily,
                 dim: int = 1, N_list=None) -> OracleReport:
    """Evaluate the ratio along one family and classify its growth."""
    N_list = _check_n_list(default_n_list(dim) if N_list is None else N_list)
    pts = tuple((N, _family_ratio(Kind(kind), family, out, ins, N, dim)) for N in N_list)
    slope, verdict = classify(pts)
    return OracleReport(family.label, pts, slope, verdict)


@dataclass(frozen=True)
class EmpiricalSummary:
    """Outcome of :func:`empirical_decide`.

    ``reports`` holds one report per family on the base window and
    ``confirmations`` the far-window re-probes of the families that were not
    bounded there (the report from the farthest window reached).
    """

    verdict: OracleVerdict
    worst: OracleReport
    reports: tuple[OracleReport, ...] = field(default=())
    confirmations: tuple[OracleReport, ...] = field(default=())

    def final_reports(self) -> tuple[OracleReport, ...]:
        """Per family, the confirmation report if there is one, else the base report."""
        conf = {r.family: r for r in self.confirmations}
        return tuple(conf.get(r.family, r) for r in self.reports)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "worst": self.worst.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
            "confirmations": [r.to_dict() for r in self.confirmations],
        }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MODSPACE_THREADS", "1")))
    except ValueError:
        return 1


def _run_all(fn, items):
    workers = _threads()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def empirical_decide(kind, out: IndexPair, ins: Seq[IndexPair], dim: int = 1,
                     N_list=None, families=None, confirm=True) -> EmpiricalSummary:
    """Run every canonical family; a confirmed blow-up refutes the relation.

    Each family is probed on ``N_list`` (default :func:`default_n_list`).  With
    ``confirm`` set, families that are not bounded there are probed again on
    the windows of :func:`confirmation_windows`, and the last report decides
    the family:
    growth has to persist over the far window to count as a blow-up, and a
    slowly converging ratio gets the chance to flatten out.  Families still
    inconclusive move on to the next window.

    The worst report is the blow-up (or else any report) with the largest
    final slope.
    """
    ins = tuple(ins)
    fams = canonical_families(kind, out, ins, dim) if families is None else list(families)
    if not fams:
        raise ValueError("no witness family applies")

    reports = _run_all(lambda f: blowup_probe(kind, out, ins, f, dim, N_list), fams)
    latest = {f.label: r for f, r in zip(fams, reports)}
    if confirm:
        todo = [f for f, r in zip(fams, reports) if r.verdict is not OracleVerdict.BOUNDED]
        for far in confirmation_windows(dim):
            if not todo:
                break
            got = _run_all(lambda f: blowup_probe(kind, out, ins, f, dim, far), todo)
            latest.update((f.label, r) for f, r in zip(todo, got))
            # a blow-up that persists is confirmed; only undecided families go further
            todo = [f for f, r in zip(todo, got) if r.verdict is OracleVerdict.INCONCLUSIVE]
    confirmations = [r for f, r in zip(fams, reports) if latest[f.label] is not r
                     for r in (latest[f.label],)]
    order = sorted(range(len(fams)), key=lambda i: reports[i].family)
    reports = tuple(reports[i] for i in order)
    confirmations = tuple(sorted(confirmations, key=lambda r: r.family))

    summary = EmpiricalSummary(OracleVerdict.INCONCLUSIVE, reports[0], reports, confirmations)
    final = summary.final_reports()
    blow = [r for r in final if r.verdict is OracleVerdict.BLOW_UP]
    if blow:
        verdict, worst = OracleVerdict.BLOW_UP, max(blow, key=lambda r: r.slope)
    else:
        worst = max(final, key=lambda r: r.slope)
        if all(r.verdict is OracleVerdict.BOUNDED for r in final):
            verdict = OracleVerdict.BOUNDED
        else:
            verdict = OracleVerdict.INCONCLUSIVE
    return EmpiricalSummary(verdict, worst, reports, confirmations)
