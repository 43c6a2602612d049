"""Phase-transition sweeps, the good-support census, and emission of the
explicit constructions, with CSV / SVG / JSON writers.

All randomness is drawn from per-trial substreams, so every output is a pure
function of its parameters and seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .checkers import check_subspace, check_jointsparse_dft, ENUMERATION_GUARD
from .conditions import necessary_bound
from .errors import EnumerationGuardError, ParameterError
from .indexsets import IndexSet, all_supports, canonical, is_periodic
from .instances import (
    COUNTEREXAMPLES,
    Counterexample,
    ProblemInstance,
    _decode_matrix,
    _decode_vector,
    _encode_matrix,
    _encode_vector,
    counterexample,
    dumps,
    instance_to_dict,
    random_jointsparse,
    random_subspace,
)
from .matcore import DEFAULT_TOL, Tolerance
from .rng import RNG_NAME
from .transgroup import DftShiftScale, Scaling, orbit_equivalent

SWEEP_MAX_N = 14
SWEEP_MODELS = ("subspace", "jointsparse")


# --- sweeps -----------------------------------------------------------------

@dataclass
class SweepGrid:
    """Identifiable counts over the ``(k, N)`` grid, ``k`` being m or s."""

    model: str
    n: int
    k_values: list[int]
    N_values: list[int]
    trials: int
    seed: int
    counts: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def axis_name(self) -> str:
        return "m" if self.model == "subspace" else "s"

    def ratio(self, k: int, N: int) -> float:
        return self.counts[(k, N)] / self.trials

    def below_bound(self, k: int, N: int) -> bool:
        """Whether the cell violates the necessary sample-complexity bound."""
        return N < necessary_bound(self.n, k)

    def to_csv(self) -> str:
        lines = [f"{self.axis_name},N,trials,identifiable,ratio"]
        for k in self.k_values:
            for N in self.N_values:
                c = self.counts[(k, N)]
                lines.append(f"{k},{N},{self.trials},{c},{c / self.trials!r}")
        return "\n".join(lines) + "\n"


def _check_sweep_args(model: str, n: int, trials: int):
    if model not in SWEEP_MODELS:
        raise ParameterError(f"sweep model must be one of {SWEEP_MODELS}, got {model!r}")
    if not 2 <= n <= SWEEP_MAX_N:
        raise EnumerationGuardError(f"sweep needs 2 <= n <= {SWEEP_MAX_N}, got n = {n}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")


def sweep_trial(model: str, n: int, k: int, N: int, seed: int, t: int, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Verdict of trial ``t`` in cell ``(k, N)``."""
    if model == "subspace":
        inst = random_subspace(n, k, N, seed, k, N, t)
        return check_subspace(inst.A, inst.Y, tol).identifiable
    inst = random_jointsparse(n, k, N, "uniform", seed, k, N, t)
    return check_jointsparse_dft(inst.Y, inst.support, k, tol).identifiable


def sweep(model: str, n: int, trials: int, seed: int, tol: Tolerance = DEFAULT_TOL,
          k_values=None, N_values=None) -> SweepGrid:
    """Fraction of random identifiable instances over ``1 <= k, N <= n - 1``."""
    _check_sweep_args(model, n, trials)
    ks = list(k_values) if k_values is not None else list(range(1, n))
    Ns = list(N_values) if N_values is not None else list(range(1, n))
    if any(not 1 <= k < n for k in ks) or any(N < 1 for N in Ns):
        raise ParameterError("grid values out of range")
    grid = SweepGrid(model, n, ks, Ns, trials, seed)
    for k in ks:
        for N in Ns:
            grid.counts[(k, N)] = sum(sweep_trial(model, n, k, N, seed, t, tol) for t in range(trials))
    return grid


def _gray(ratio: float) -> str:
    v = int(round(255 * ratio))
    return f"#{v:02x}{v:02x}{v:02x}"


def sweep_svg(grid: SweepGrid, cell: int = 32) -> str:
    """Heat map of the ratios (white = always identifiable) with the bound overlays.

    The horizontal axis is ``k`` (m or s) and the vertical axis is ``N``,
    growing upwards.  The polyline traces ``N = (n - 1) / (n - k)`` and the
    segment traces ``N = k``.
    """
    ks, Ns, n = grid.k_values, grid.N_values, grid.n
    margin = 48
    W = margin + cell * len(ks) + 16
    H = margin + cell * len(Ns) + 16
    k0 = ks[0]

    def x(k: float) -> float:
        return margin + (k - k0 + 0.5) * cell

    def y(N: float) -> float:
        return 16 + (Ns[-1] - N + 0.5) * cell

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">']
    for k in ks:
        for N in Ns:
            r = grid.ratio(k, N)
            out.append(
                f'<rect x="{x(k) - cell / 2:g}" y="{y(N) - cell / 2:g}" width="{cell}" height="{cell}" '
                f'fill="{_gray(r)}" data-{grid.axis_name}="{k}" data-N="{N}" data-ratio="{r!r}"/>'
            )
    pts = []
    steps = 200
    for i in range(steps + 1):
        k = ks[0] + (ks[-1] - ks[0]) * i / steps
        Nb = (n - 1) / (n - k)
        if Nb <= Ns[-1] + 0.5:
            pts.append(f"{x(k):.2f},{y(Nb):.2f}")
    out.append(f'<polyline class="necessary-bound" fill="none" stroke="#d62728" stroke-width="2" '
               f'points="{" ".join(pts)}"/>')
    lo, hi = max(ks[0], Ns[0]), min(ks[-1], Ns[-1])
    out.append(f'<line class="k-equals-N" x1="{x(lo):g}" y1="{y(lo):g}" x2="{x(hi):g}" y2="{y(hi):g}" '
               f'stroke="#1f77b4" stroke-width="2"/>')
    for k in ks:
        out.append(f'<text x="{x(k):g}" y="{H - 24}" font-size="11" text-anchor="middle">{k}</text>')
    for N in Ns:
        out.append(f'<text x="{margin - 6}" y="{y(N) + 4:g}" font-size="11" text-anchor="end">{N}</text>')
    out.append(f'<text x="{margin + cell * len(ks) / 2:g}" y="{H - 6}" font-size="13" '
               f'text-anchor="middle">{grid.axis_name}</text>')
    out.append(f'<text x="14" y="{16 + cell * len(Ns) / 2:g}" font-size="13" text-anchor="middle">N</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- census -----------------------------------------------------------------

@dataclass
class SupportVerdict:
    support: IndexSet
    periodic: bool
    identifiable_trials: int
    trials: int

    @property
    def good(self) -> bool:
        return self.identifiable_trials == self.trials


@dataclass
class CensusResult:
    n: int
    s: int
    N: int
    trials: int
    seed: int
    verdicts: list[SupportVerdict]

    @property
    def nonperiodic(self) -> list[SupportVerdict]:
        return [v for v in self.verdicts if not v.periodic]

    @property
    def good_fraction(self) -> float | None:
        """Fraction of good supports among the non-periodic ones (None if there are none)."""
        pool = self.nonperiodic
        return sum(v.good for v in pool) / len(pool) if pool else None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": self.s,
            "N": self.N,
            "trials_per_support": self.trials,
            "seed": self.seed,
            "rng": RNG_NAME,
            "supports": [
                {"support": list(v.support.members), "periodic": v.periodic,
                 "identifiable_trials": v.identifiable_trials, "good": v.good}
                for v in self.verdicts
            ],
            "nonperiodic": len(self.nonperiodic),
            "good_nonperiodic": sum(v.good for v in self.nonperiodic),
            "good_fraction": self.good_fraction,
        }


def canonical_supports(n: int, s: int) -> list[IndexSet]:
    """One shift-minimal representative per circular-shift class of ``s``-subsets."""
    seen: dict[tuple, IndexSet] = {}
    for J in all_supports(n, s):
        c = canonical(J)
        seen.setdefault(c.members, c)
    return [seen[key] for key in sorted(seen)]


def census(n: int, s: int, N: int, trials: int, seed: int, tol: Tolerance = DEFAULT_TOL,
           guard: int = ENUMERATION_GUARD) -> CensusResult:
    """Run the joint-sparsity checker on ``trials`` Gaussian instances per support class.

    A support is good when every trial is identifiable.
    """
    if not 1 <= s < n:
        raise ParameterError(f"need 1 <= s < n, got s = {s}")
    if N < 1 or trials < 1:
        raise ParameterError("N and trials must be >= 1")
    if comb(n, s) > guard:
        raise EnumerationGuardError(f"C({n}, {s}) = {comb(n, s)} exceeds the guard {guard}")
    verdicts = []
    for idx, J in enumerate(canonical_supports(n, s)):
        hits = sum(
            check_jointsparse_dft(random_jointsparse(n, s, N, J, seed, idx, t).Y, J, s, tol).identifiable
            for t in range(trials)
        )
        verdicts.append(SupportVerdict(J, is_periodic(J), hits, trials))
    return CensusResult(n, s, N, trials, seed, verdicts)


# --- explicit constructions -------------------------------------------------

def default_counterexamples(seed: int = 0) -> list[Counterexample]:
    out = [counterexample(k, seed) for k in COUNTEREXAMPLES if k != "periodic"]
    out.append(counterexample("periodic", seed, J=IndexSet.of([1, 2, 6, 7], 10), ell=5))
    return out


def _checker_verdict(inst: ProblemInstance, tol: Tolerance):
    if inst.model == "subspace":
        return check_subspace(inst.A, inst.Y, tol)
    return check_jointsparse_dft(inst.Y, inst.support, inst.k, tol)


def _rel_residual(inst: ProblemInstance, lam1, X1) -> float:
    Y0 = inst.Y
    Y1 = np.asarray(lam1)[:, None] * (inst.A @ np.asarray(X1))
    if Y1.shape != Y0.shape:
        return math.inf
    return float(np.abs(Y1 - Y0).max())


def verify_pair(inst: ProblemInstance, lam1, X1, group, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Check that ``(lam1, X1)`` reproduces the measurement, lies off the orbit, and the checker says False."""
    residual = _rel_residual(inst, lam1, X1)
    orbit = orbit_equivalent(group, inst.pair, (lam1, X1), tol)
    check = _checker_verdict(inst, tol)
    return {
        "residual_max": residual,
        "measurement_equal": residual < 1e-9,
        "orbit_equivalent": orbit.equivalent,
        "checker_identifiable": check.identifiable,
        "checker_reason": check.reason,
        "passed": residual < 1e-9 and not orbit.equivalent and not check.identifiable,
    }


def transcript(ce: Counterexample, tol: Tolerance = DEFAULT_TOL) -> dict:
    return {
        "name": ce.name,
        "group": ce.group.name,
        "lambda1": _encode_vector(ce.lam1),
        "X1": _encode_matrix(ce.X1),
        "verification": verify_pair(ce.instance, ce.lam1, ce.X1, ce.group, tol),
    }


_GROUPS = {g.name: g for g in (Scaling(), DftShiftScale())}


def verify_transcript(inst: ProblemInstance, data: dict, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Re-run the verification from a stored transcript instead of trusting its recorded result."""
    group = _GROUPS.get(data.get("group"))
    if group is None:
        raise ParameterError(f"unsupported group {data.get('group')!r}")
    lam1 = _decode_vector(data["lambda1"])
    X1 = _decode_matrix(data["X1"])
    return verify_pair(inst, lam1, X1, group, tol)


def emit_counterexamples(out_dir, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> list[dict]:
    """Write ``<name>.instance.json`` and ``<name>.verification.json`` per construction."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for ce in default_counterexamples(seed):
        tr = transcript(ce, tol)
        (out / f"{ce.name}.instance.json").write_text(dumps(instance_to_dict(ce.instance)),
                                                      encoding="utf-8", newline="\n")
        (out / f"{ce.name}.verification.json").write_text(dumps(tr), encoding="utf-8", newline="\n")
        results.append({"name": ce.name, **tr["verification"]})
    return results

