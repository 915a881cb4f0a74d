"""Self-checks run by ``zzgate verify``.

Fatal checks establish that this build is internally consistent. Reference
checks compare against externally quoted coefficients; a mismatch there is
reported but does not fail the run.
"""

from dataclasses import dataclass

import numpy as np

from . import channels
from .fidelity import (
    CZ_SMALL_ANGLE_COEFFS,
    analytic_cp_coherent,
    analytic_depolarizing,
    batch_gate_fidelity,
    cz_small_angle_monomials,
    gate_fidelity_coherent_overlap,
    gate_fidelity_numeric,
)
from .gates import Kind, build_decomposition

TOL = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    fatal: bool = True
    detail: str = ""


def random_density_matrix(rng, rank=None):
    rank = rank or int(rng.integers(1, 5))
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _gammas(n, seed):
    return np.random.default_rng(seed).uniform(-2 * np.pi, 2 * np.pi, n)


def check_decompositions(gamma_samples=100, seed=0):
    gammas = _gammas(gamma_samples, seed)
    out = []
    for kind in Kind:
        res = max(build_decomposition(kind, g).residual() for g in gammas)
        fatal = kind is not Kind.ISWAP
        detail = "up to global phase" if kind is Kind.ISWAP else "elementwise"
        out.append(Check(f"decomposition_{kind.value}", res < TOL, res, fatal, detail))
    worst = 0.0
    for kind in Kind:
        for g in gammas[:10]:
            for u in build_decomposition(kind, g).gates:
                worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(4)))))
    out.append(Check("gate_unitarity", worst < TOL, worst))
    return out


def check_channel(samples=200, seed=1):
    rng = np.random.default_rng(seed)
    comp = 0.0
    closed = 0.0
    for p in np.linspace(0.0, 1.0, 11):
        comp = max(comp, channels.make_depolarizing(p).completeness_residual())
    for _ in range(samples):
        p = rng.uniform()
        rho = random_density_matrix(rng)
        ch = channels.make_depolarizing(p)
        diff = channels.apply_channel(ch, rho) - channels.depolarize_closed_form(rho, p)
        closed = max(closed, float(np.max(np.abs(diff))))
    return [
        Check("kraus_completeness", comp < TOL, comp),
        Check("kraus_vs_closed_form", closed < TOL, closed),
    ]


def check_cp_coherent(gamma_samples=100, seed=2):
    thetas = np.linspace(0.0, np.pi, 25)
    worst = 0.0
    for g in _gammas(gamma_samples, seed)[:20]:
        d = build_decomposition(Kind.CP, g)
        f = batch_gate_fidelity(d, 0.0, thetas[:, None])
        worst = max(worst, float(np.max(np.abs(f - analytic_cp_coherent(thetas)))))
    return [Check("cp_coherent_law", worst < TOL, worst)]


def check_depolarizing(seed=3):
    worst = 0.0
    for kind in (Kind.CP, Kind.CZ):
        for p in np.linspace(0.0, 0.02, 5):
            for g in _gammas(3, seed):
                f = gate_fidelity_numeric(build_decomposition(kind, g), channels.NoiseModel(p=p))
                worst = max(worst, abs(f - analytic_depolarizing(kind, p)))
    return [Check("depolarizing_laws", worst < TOL, worst, detail="1-3p/4 (CP), 1-3p/2+3p^2/4 (CZ)")]


def check_routes(samples=50, seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        kind = (Kind.CP, Kind.CZ)[int(rng.integers(2))]
        d = build_decomposition(kind, rng.uniform(-np.pi, np.pi))
        draw = channels.CoherentErrorDraw(*rng.normal(0, 0.2, 2))
        a = gate_fidelity_numeric(d, None, draw)
        b = gate_fidelity_coherent_overlap(d, draw)
        worst = max(worst, abs(a - b))
    return [Check("density_vs_overlap", worst < TOL, worst)]


def fit_cz_small_angle(max_angle=0.02 * np.pi, n_gamma=24, n_angle=5):
    """Least-squares second-order fit of the numeric CZ coherent fidelity.

    Returns the fitted coefficients keyed like ``CZ_SMALL_ANGLE_COEFFS`` plus
    θ²·sinγ and θ²·cosγ, which the quoted expansion omits and which fit to zero.
    """
    keys = list(CZ_SMALL_ANGLE_COEFFS) + ["theta^2*sin", "theta^2*cos"]
    rows, ys = [], []
    angles = np.linspace(-max_angle, max_angle, n_angle)
    for g in np.linspace(0.0, 2 * np.pi, n_gamma, endpoint=False):
        d = build_decomposition(Kind.CZ, g)
        tz = np.array([(t, z) for t in angles for z in angles])
        f = batch_gate_fidelity(d, 0.0, tz)
        for (t, z), fv in zip(tz, f):
            m = cz_small_angle_monomials(g, t, z)
            m["theta^2*sin"] = t * t * np.sin(g)
            m["theta^2*cos"] = t * t * np.cos(g)
            rows.append([m[k] for k in keys])
            ys.append(fv - 1.0)
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(ys), rcond=None)
    return dict(zip(keys, coef))


def fit_cz_equal_angles(max_angle=0.02 * np.pi, n_gamma=50, n_angle=10):
    """Fit 1 - F = θ²(c0 + c1 sin γ + c2 cos γ) for ζ = θ; returns (c0, c1, c2)."""
    thetas = np.linspace(0.0, max_angle, n_angle + 1)[1:]
    rows, ys = [], []
    for g in np.linspace(0.0, 2 * np.pi, n_gamma):
        f = batch_gate_fidelity(build_decomposition(Kind.CZ, g), 0.0, np.column_stack([thetas, thetas]))
        for t, fv in zip(thetas, f):
            rows.append([t * t, t * t * np.sin(g), t * t * np.cos(g)])
            ys.append(1.0 - fv)
    coef, *_ = np.linalg.lstsq(np.array(rows), np.array(ys), rcond=None)
    return tuple(float(c) for c in coef)


def check_cz_small_angle():
    # second order with no first-order term: halving the angle quarters 1 - F
    worst = 0.0
    for g in np.linspace(0.0, 2 * np.pi, 9):
        d = build_decomposition(Kind.CZ, g)
        t = 0.02 * np.pi
        f = batch_gate_fidelity(d, 0.0, np.array([[t, t], [t / 2, t / 2]]))
        worst = max(worst, abs((1 - f[0]) / (1 - f[1]) - 4.0))
    out = [Check("cz_expansion_order", worst < 0.05, worst, detail="(1-F(t))/(1-F(t/2)) vs 4")]
    fitted = fit_cz_small_angle()
    dev = {k: fitted[k] - v for k, v in CZ_SMALL_ANGLE_COEFFS.items()}
    worst_key = max(dev, key=lambda k: abs(dev[k]))
    bad = [k for k, v in dev.items() if abs(v) > 0.02]
    out.append(
        Check(
            "cz_expansion_reference_coeffs",
            not bad,
            abs(dev[worst_key]),
            fatal=False,
            detail=("outside +/-0.02: " + ", ".join(f"{k} fit={fitted[k]:+.4f} ref={CZ_SMALL_ANGLE_COEFFS[k]:+.2f}" for k in bad))
            if bad
            else "all within +/-0.02",
        )
    )
    return out


def check_reference_depolarizing_slope():
    # the widely quoted CP slope of 0.8 is the exact 0.75 rounded
    ps = np.linspace(0.0, 0.02, 5)
    f = np.array([analytic_depolarizing(Kind.CP, p) for p in ps])
    res = float(np.max(np.abs(f - (1 - 0.8 * ps))))
    return [Check("cp_depolarizing_reference_slope", res < TOL, res, fatal=False, detail="1-0.8p vs exact 1-0.75p")]


def run_all(gamma_samples=100):
    groups = [
        (check_decompositions, (gamma_samples,)),
        (check_channel, ()),
        (check_cp_coherent, (gamma_samples,)),
        (check_depolarizing, ()),
        (check_routes, ()),
        (check_cz_small_angle, ()),
        (check_reference_depolarizing_slope, ()),
    ]
    checks = []
    for fn, args in groups:
        try:
            checks += fn(*args)
        except (ValueError, ArithmeticError) as exc:
            # a broken component can make later checks raise; report, don't abort
            checks.append(Check(fn.__name__.removeprefix("check_"), False, float("nan"), detail=str(exc)))
    return checks


def all_fatal_passed(checks):
    return all(c.passed for c in checks if c.fatal)
