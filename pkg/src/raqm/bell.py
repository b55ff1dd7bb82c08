"""Bell experiments with nominal settings, jittered exact settings and MI checks.

Experimenters pick nominal polariser directions (angles in a common plane,
in turns) to within a tolerance. For each run the exact directions are the
nominal ones plus uniform jitter; the exact relative angle is then snapped
to the nearest one whose cosine a singlet can carry at this L, namely
``cos = 1 - 4k/L`` for ``k = 0..L/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .bitstring import HiddenPermutation, sample_measured_indices
from .entanglement import _singlet_strings
from .errors import NoCompatibleSetting, OutOfRange
from .exact import RationalAngle, as_rational, format_rational
from .geometry import DefinednessVerdict, Obstruction, bell_counterfactuals_defined

TAGS = ("AB", "AC", "BC")
DIHEDRAL_DENOMINATOR = 10**6
DEFAULT_TOLERANCE = Fraction(1, 360)


@dataclass(frozen=True)
class NominalSetting:
    direction: RationalAngle
    tolerance: Fraction = DEFAULT_TOLERANCE

    def __post_init__(self):
        d = self.direction if isinstance(self.direction, RationalAngle) else RationalAngle(self.direction)
        tol = as_rational(self.tolerance)
        if tol <= 0:
            raise OutOfRange("tolerance must be positive")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "tolerance", tol)

    def to_json(self) -> dict:
        return {"direction": self.direction.to_json(), "tolerance": format_rational(self.tolerance)}


@dataclass(frozen=True)
class ExactSetting:
    cos_between: Fraction
    # k in cos = 1 - 4k/L, and its offset from the snapped nominal angle
    grid_k: int
    grid_index: int


def default_settings(tolerance=DEFAULT_TOLERANCE) -> Dict[str, NominalSetting]:
    """0, 60 and 120 degrees."""
    return {
        "A": NominalSetting(RationalAngle(0), tolerance),
        "B": NominalSetting(RationalAngle(Fraction(1, 6)), tolerance),
        "C": NominalSetting(RationalAngle(Fraction(1, 3)), tolerance),
    }


# ---------------------------------------------------------------------------
# snapping


def _fold(turns: float) -> float:
    """Angle between two in-plane directions, in [0, 1/2] turns."""
    t = turns % 1.0
    return 1.0 - t if t > 0.5 else t


def _grid_angle(k: int, L: int) -> float:
    return math.acos(max(-1.0, min(1.0, 1.0 - 4.0 * k / L))) / (2 * math.pi)


def _k_below(theta: float, L: int) -> int:
    """Largest k with grid angle <= theta (floating estimate, then fixed up)."""
    half = L // 2
    k = int(math.floor((1.0 - math.cos(2 * math.pi * theta)) * L / 4))
    k = max(0, min(half, k))
    while k > 0 and _grid_angle(k, L) > theta:
        k -= 1
    while k < half and _grid_angle(k + 1, L) <= theta:
        k += 1
    return k


def _window(r0: float, w: float) -> Tuple[float, float]:
    if w >= 0.5:
        return 0.0, 0.5
    lo, hi = r0 - w, r0 + w
    if lo < 0:
        lo = 0.0
    if hi > 0.5:
        lo = min(lo, 1.0 - hi)
        hi = 0.5
    return lo, hi


def snap_relative(rel: float, nominal_rel: float, half_width: float, L: int) -> int:
    """Grid k nearest to ``rel`` among those inside the nominal window."""
    if L % 2:
        raise NoCompatibleSetting(f"no singlet cosines exist at odd L={L}")
    lo, hi = _window(nominal_rel, half_width)
    k_lo = _k_below(lo, L)
    if _grid_angle(k_lo, L) < lo:
        k_lo += 1
    k_hi = _k_below(hi, L)
    if k_lo > k_hi or k_lo > L // 2:
        raise NoCompatibleSetting(
            f"no grid-compatible angle within {half_width:.3g} turn of {nominal_rel:.6g} at L={L}"
        )
    k = _k_below(rel, L)
    candidates = {min(max(c, k_lo), k_hi) for c in (k, k + 1)}
    return min(candidates, key=lambda c: (abs(_grid_angle(c, L) - rel), c))


@lru_cache(maxsize=64)
def _nominal_k(nominal: NominalSetting, partner: NominalSetting, L: int) -> int:
    r0 = _fold(float(partner.direction.turns - nominal.direction.turns))
    return snap_relative(r0, r0, float(nominal.tolerance + partner.tolerance), L)


def _exact_setting(k: int, k_nom: int, L: int) -> ExactSetting:
    return ExactSetting(1 - Fraction(4 * k, L), k, k - k_nom)


def snap_to_grid(nominal: NominalSetting, partner: NominalSetting, L: int, jitter_seed: int) -> ExactSetting:
    rng = np.random.default_rng(int(jitter_seed))
    ja, jb = rng.uniform(-1.0, 1.0, 2)
    return _snap_pair(nominal, partner, L, ja, jb)


def _snap_pair(nominal: NominalSetting, partner: NominalSetting, L: int, ja: float, jb: float) -> ExactSetting:
    ta = float(nominal.tolerance)
    tb = float(partner.tolerance)
    a = float(nominal.direction.turns) + ja * ta
    b = float(partner.direction.turns) + jb * tb
    r0 = _fold(float(partner.direction.turns - nominal.direction.turns))
    k = snap_relative(_fold(b - a), r0, ta + tb, L)
    return _exact_setting(k, _nominal_k(nominal, partner, L), L)


def nominal_exact_cos(nominal: NominalSetting, partner: NominalSetting, L: int) -> Fraction:
    """Grid cosine for the un-jittered nominal pair: the exact-layer value."""
    return 1 - Fraction(4 * _nominal_k(nominal, partner, L), L)


# ---------------------------------------------------------------------------
# exact triples and the per-lambda Bell sum


@dataclass(frozen=True)
class ExactTriple:
    """Exact data for one run's triangle, spanned at vertex A."""

    cos_AB: Fraction
    cos_AC: Fraction
    phi_A: RationalAngle
    L: Optional[int] = None

    def verdict(self) -> DefinednessVerdict:
        return bell_counterfactuals_defined(self.cos_AB, self.cos_AC, self.phi_A)

    def to_json(self) -> dict:
        return {
            "cos_AB": format_rational(self.cos_AB),
            "cos_AC": format_rational(self.cos_AC),
            "phi_A": self.phi_A.to_json(),
        }


def nominal_dihedral(settings: Dict[str, NominalSetting]) -> Fraction:
    """Dihedral angle at A for coplanar nominals: 0 if B and C lie on the
    same side of A, 1/2 turn if on opposite sides."""
    a = float(settings["A"].direction.turns)
    sb = math.sin(2 * math.pi * (float(settings["B"].direction.turns) - a))
    sc = math.sin(2 * math.pi * (float(settings["C"].direction.turns) - a))
    if abs(sb) < 1e-15 or abs(sc) < 1e-15:
        return Fraction(0)
    return Fraction(0) if (sb > 0) == (sc > 0) else Fraction(1, 2)


def bellsum_value(s_a: int, s_b: int, s_c: int) -> int:
    """|S_A S_B - S_A S_C| - S_B S_C with the far party's spin anti-aligned.

    Each product pairs the near party's spin along one direction with the
    far party's spin along another; perfect anticorrelation makes the far
    spin along X equal to -S_X.
    """
    p_ab = s_a * -s_b
    p_ac = s_a * -s_c
    p_bc = s_b * -s_c
    return abs(p_ab - p_ac) - p_bc


@dataclass(frozen=True)
class BellsumResult:
    defined: bool
    value: Optional[int] = None
    obstruction: Optional[Obstruction] = None
    spins: Optional[Tuple[int, int, int]] = None


def _lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


def bellsum_evaluate(lambda_seed: int, triple: ExactTriple) -> BellsumResult:
    """Per-lambda Bell combination, or Undefined when the triple is irrational.

    For a defined triple the spins come from the singlet strings at one
    shared M(xi): S_A is the near bit, S_B and S_C are minus the far bits
    for the AB and AC settings.
    """
    verdict = triple.verdict()
    if not verdict.defined:
        return BellsumResult(False, None, verdict.obstruction)
    L = _lcm(4 * triple.cos_AB.denominator, 4 * triple.cos_AC.denominator, triple.L or 1)
    j = HiddenPermutation.from_seed(int(lambda_seed), L).measured_index
    near, far_b = _strings(L, triple.cos_AB)
    _, far_c = _strings(L, triple.cos_AC)
    spins = (int(near[j]), -int(far_b[j]), -int(far_c[j]))
    return BellsumResult(True, bellsum_value(*spins), None, spins)


@lru_cache(maxsize=256)
def _strings(L: int, cos_theta: Fraction):
    return _singlet_strings(L, cos_theta)


# ---------------------------------------------------------------------------
# the experiment


@dataclass(frozen=True)
class BellRunLog:
    run_id: int
    ensemble_tag: str
    xi_seed: int
    jitter_seed: int
    exact_cos: Fraction
    outcomes: Tuple[int, int]
    position: int
    triple: ExactTriple

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "ensemble": self.ensemble_tag,
            "xi_seed": self.xi_seed,
            "jitter_seed": self.jitter_seed,
            "exact_cos": format_rational(self.exact_cos),
            "outcomes": list(self.outcomes),
            "position": self.position,
            "triple": self.triple.to_json(),
        }


@dataclass(frozen=True)
class EnsembleSummary:
    tag: str
    runs: int
    exact_Co: Fraction
    run_mean_exact_Co: Fraction
    empirical_Co: float

    @property
    def stderr(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.empirical_Co**2) / self.runs)

    def to_json(self) -> dict:
        return {
            "runs": self.runs,
            "exact_Co": format_rational(self.exact_Co),
            "run_mean_exact_Co": format_rational(self.run_mean_exact_Co),
            "empirical_Co": round(self.empirical_Co, 12),
            "stderr": round(self.stderr, 12),
        }


def bell_statistic(co_ab, co_ac, co_bc):
    """|Co(A,B) - Co(A,C)| - Co(B,C); Bell's inequality says this is <= 1."""
    return abs(co_ab - co_ac) - co_bc


@dataclass(frozen=True)
class BellReport:
    L: int
    master_seed: int
    runs_per_ensemble: int
    settings: Dict[str, NominalSetting]
    ensembles: Dict[str, EnsembleSummary]

    @property
    def Co_AB(self) -> Fraction:
        return self.ensembles["AB"].exact_Co

    @property
    def Co_AC(self) -> Fraction:
        return self.ensembles["AC"].exact_Co

    @property
    def Co_BC(self) -> Fraction:
        return self.ensembles["BC"].exact_Co

    @property
    def statistic(self) -> Fraction:
        return bell_statistic(self.Co_AB, self.Co_AC, self.Co_BC)

    @property
    def empirical_statistic(self) -> float:
        e = self.ensembles
        return bell_statistic(e["AB"].empirical_Co, e["AC"].empirical_Co, e["BC"].empirical_Co)

    @property
    def empirical_stderr(self) -> float:
        return math.sqrt(sum(s.stderr**2 for s in self.ensembles.values()))

    def to_json(self) -> dict:
        return {
            "schema": "raqm.bell_report/1",
            "L": self.L,
            "master_seed": self.master_seed,
            "runs_per_ensemble": self.runs_per_ensemble,
            "settings": {k: v.to_json() for k, v in sorted(self.settings.items())},
            "ensembles": {k: v.to_json() for k, v in sorted(self.ensembles.items())},
            "statistic": format_rational(self.statistic),
            "violates_bell": self.statistic > 1,
            "empirical_statistic": round(self.empirical_statistic, 12),
            "empirical_stderr": round(self.empirical_stderr, 12),
        }


@dataclass
class BellExperiment:
    report: BellReport
    logs: List[BellRunLog] = field(default_factory=list)

    def correlation_table(self) -> List[dict]:
        """Rows (ensemble, exact_cos, runs, empirical_Co, exact_Co) for plotting."""
        groups: Dict[Tuple[str, Fraction], List[int]] = {}
        for log in self.logs:
            groups.setdefault((log.ensemble_tag, log.exact_cos), []).append(log.outcomes[0] * log.outcomes[1])
        rows = []
        for (tag, c), prods in sorted(groups.items()):
            rows.append({
                "ensemble": tag,
                "exact_cos": format_rational(c),
                "runs": len(prods),
                "empirical_Co": round(sum(prods) / len(prods), 12),
                "exact_Co": format_rational(-c),
            })
        return rows


def run_seeds(master_seed: int, tag_index: int, runs: int) -> Tuple[np.ndarray, np.ndarray]:
    """(xi seeds, jitter seeds) for one ensemble, split from the master seed."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(tag_index,))
    state = ss.generate_state(2 * runs, dtype=np.uint64)
    return state[0::2], state[1::2]


def _run_triple(settings, L, jit, offset, dihedral=None) -> ExactTriple:
    A, B, C = settings["A"], settings["B"], settings["C"]
    ab = _snap_pair(A, B, L, jit[0], jit[1])
    ac = _snap_pair(A, C, L, jit[0], jit[2])
    if dihedral is None:
        dihedral = nominal_dihedral(settings)
    phi = RationalAngle(dihedral + Fraction(offset, DIHEDRAL_DENOMINATOR))
    return ExactTriple(ab.cos_between, ac.cos_between, phi, L)


def _jitter(jitter_seed: int, tolerance: Fraction):
    """Three uniform jitters in [-1, 1] and a non-zero dihedral offset.

    The offset is an integer count of 1/10^6 turn inside the A tolerance;
    it is never zero, since exact settings are never exactly coplanar.
    """
    rng = np.random.default_rng(int(jitter_seed))
    jit = rng.uniform(-1.0, 1.0, 3)
    K = max(1, int(tolerance * DIHEDRAL_DENOMINATOR))
    offset = int(rng.integers(1, K + 1)) * (1 if rng.random() < 0.5 else -1)
    return jit, offset


def run_bell_experiment(
    settings: Optional[Dict[str, NominalSetting]] = None,
    L: int = 3600,
    runs_per_ensemble: int = 10_000,
    master_seed: int = 0,
) -> BellExperiment:
    settings = settings or default_settings()
    if runs_per_ensemble < 1:
        raise OutOfRange("runs_per_ensemble must be at least 1")
    pairs = {"AB": ("A", "B"), "AC": ("A", "C"), "BC": ("B", "C")}
    logs: List[BellRunLog] = []
    ensembles: Dict[str, EnsembleSummary] = {}
    run_id = 0
    dihedral = nominal_dihedral(settings)
    for t_index, tag in enumerate(TAGS):
        x, y = pairs[tag]
        nx, ny = settings[x], settings[y]
        xi_seeds, jitter_seeds = run_seeds(master_seed, t_index, runs_per_ensemble)
        indices = sample_measured_indices(L, xi_seeds)
        products = 0
        exact_sum = Fraction(0)
        jx_i, jy_i = "ABC".index(x), "ABC".index(y)
        for xs, js, j in zip(xi_seeds, jitter_seeds, indices):
            jit, offset = _jitter(js, settings["A"].tolerance)
            try:
                setting = _snap_pair(nx, ny, L, jit[jx_i], jit[jy_i])
                triple = _run_triple(settings, L, jit, offset, dihedral)
            except NoCompatibleSetting as exc:
                raise NoCompatibleSetting(f"run {run_id}: {exc}", run_id=run_id) from exc
            alice, bob = _strings(L, setting.cos_between)
            out = (int(alice[j]), int(bob[j]))
            logs.append(BellRunLog(
                run_id, tag, int(xs), int(js), setting.cos_between, out, int(j) + 1, triple
            ))
            products += out[0] * out[1]
            exact_sum += setting.cos_between
            run_id += 1
        ensembles[tag] = EnsembleSummary(
            tag=tag,
            runs=runs_per_ensemble,
            exact_Co=-nominal_exact_cos(nx, ny, L),
            run_mean_exact_Co=-exact_sum / runs_per_ensemble,
            empirical_Co=products / runs_per_ensemble,
        )
    report = BellReport(L, int(master_seed), runs_per_ensemble, dict(settings), ensembles)
    return BellExperiment(report, logs)


# ---------------------------------------------------------------------------
# measurement independence


@dataclass(frozen=True)
class MIReport:
    chi2: float
    dof: int
    p_value: float
    bins: int
    counts: Tuple[Tuple[int, ...], ...]
    triples: int
    defined: int

    @property
    def defined_fraction(self) -> Fraction:
        return Fraction(self.defined, self.triples) if self.triples else Fraction(0)

    @property
    def nominal_independent(self) -> bool:
        return self.p_value > 0.01

    def to_json(self) -> dict:
        return {
            "schema": "raqm.mi_report/1",
            "chi2": round(self.chi2, 9),
            "dof": self.dof,
            "p_value": round(self.p_value, 9),
            "bins": self.bins,
            "nominal_independent": self.nominal_independent,
            "triples": self.triples,
            "defined": self.defined,
            "defined_fraction": format_rational(self.defined_fraction),
        }


def binned_positions(L: int, indices: np.ndarray, bins: int) -> np.ndarray:
    return np.bincount((np.asarray(indices) * bins) // L, minlength=bins)


def defined_fraction(triples: Iterable[ExactTriple]) -> Tuple[int, int]:
    """(number simultaneously defined, number of triples)."""
    n = d = 0
    for t in triples:
        n += 1
        d += t.verdict().defined
    return d, n


def mi_diagnostic(
    settings: Optional[Dict[str, NominalSetting]] = None,
    L: int = 3600,
    runs: int = 1000,
    master_seed: int = 0,
    bins: int = 30,
    exact_triples: Optional[Sequence[ExactTriple]] = None,
) -> MIReport:
    """Nominal-level independence and exact-level definedness of one setup.

    (i) chi-square test that the binned M(xi) distribution is the same in
    the three nominal ensembles; (ii) the fraction of runs whose full
    counterfactual triple is simultaneously defined. ``exact_triples``
    replaces the jittered triples in (ii) with hand-built ones.
    """
    from scipy.stats import chi2_contingency

    if runs < 1000:
        raise OutOfRange("mi_diagnostic needs at least 1000 runs per ensemble")
    exp = run_bell_experiment(settings, L, runs, master_seed)
    table = np.array([
        binned_positions(L, [log.position - 1 for log in exp.logs if log.ensemble_tag == tag], bins)
        for tag in TAGS
    ])
    chi2, p, dof, _ = chi2_contingency(table)
    triples = exact_triples if exact_triples is not None else [log.triple for log in exp.logs]
    defined, n = defined_fraction(triples)
    return MIReport(
        float(chi2), int(dof), float(p), bins,
        tuple(tuple(int(c) for c in row) for row in table), n, defined,
    )
