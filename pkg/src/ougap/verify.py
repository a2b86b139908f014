"""Numerical checks of the fundamental-gap results, one suite per claim.

Each ``verify_*`` function returns a list of :class:`VerificationOutcome`;
failures are reported as outcomes, never raised. ``SUITES`` maps claim ids to
zero-argument runners with the default parameters used by ``ougap verify``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import domain2d, eigen, model1d
from .errors import ExperimentSetupError, LemmaViolation, NumericalError, PositivityError
from .spectral import cheb_diff_matrix, sine_galerkin_operator

THREE_PI_SQ = model1d.THREE_PI_SQ

# Published reference values: D -> (scaled lam_1, scaled lam_2, normalized gap).
REFERENCE_TABLE = {
    1.0: (9.877771, 39.496084, 1.000321),
    2.0: (10.000000, 39.760812, 1.005134),
    3.0: (10.523736, 40.902321, 1.025998),
    4.0: (11.887886, 43.930465, 1.082197),
    5.0: (14.565218, 50.105109, 1.200315),
    6.0: (18.862067, 60.642110, 1.411068),
    7.0: (24.771932, 76.264955, 1.739111),
    8.0: (32.063557, 96.863410, 2.188533),
    9.0: (40.511000, 121.695967, 2.741919),
    10.0: (50.001421, 150.032187, 3.378412),
}

LEMMA_DIAMETERS = (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)


@dataclass
class VerificationOutcome:
    claim_id: str
    inputs: dict
    measured: dict
    tolerance: float
    passed: bool
    notes: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "inputs": self.inputs,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def sweep(D_min: float, D_max: float, step: float) -> np.ndarray:
    """D_min, D_min + step, ..., D_max (inclusive when it lands on the lattice), rounded to 12 digits."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    count = int(math.floor((D_max - D_min) / step + 1e-9)) + 1
    return np.round(D_min + step * np.arange(count), 12)


def verify_table(D_values: Sequence[float] = tuple(REFERENCE_TABLE), N: Optional[int] = None,
                 eig_tol: float = 1e-4, gap_tol: float = 1e-5) -> List[VerificationOutcome]:
    out = []
    for D in D_values:
        D = float(D)
        ref = REFERENCE_TABLE.get(D)
        l1, l2 = model1d.solve_scaled(D, N)
        ng = (l2 - l1) / THREE_PI_SQ
        measured = {"lambda1_scaled": l1, "lambda2_scaled": l2, "gap_normalized": ng}
        if ref is None:
            out.append(VerificationOutcome("table", {"D": D}, measured, gap_tol, False,
                                           ["no published row for this D"]))
            continue
        err = [abs(l1 - ref[0]), abs(l2 - ref[1]), abs(ng - ref[2])]
        measured.update(err_lambda1=err[0], err_lambda2=err[1], err_gap=err[2])
        ok = err[0] <= eig_tol and err[1] <= eig_tol and err[2] <= gap_tol
        out.append(VerificationOutcome("table", {"D": D, "N": N}, measured, gap_tol, ok,
                                       [f"eigenvalue tolerance {eig_tol}"]))
    return out


def verify_monotonicity(D_min: float = 0.1, D_max: float = 10.0, step: float = 0.1,
                        N: Optional[int] = None) -> List[VerificationOutcome]:
    grid = sweep(D_min, D_max, step)
    values = np.array([model1d.normalized_gap(D, N).normalized for D in grid])
    inputs = {"D_min": D_min, "D_max": D_max, "step": step, "N": N}
    notes = []
    if len(values) < 2:
        notes.append("single grid point: monotonicity is vacuous")
        min_inc = math.inf
    else:
        min_inc = float(np.diff(values).min())
    measured = {"points": int(len(values)), "min_increase": min_inc,
                "min_normalized_gap": float(values.min())}
    ok = bool(min_inc > 0 and values.min() > 1.0)
    return [VerificationOutcome("gap-monotone", inputs, measured, 0.0, ok, notes)]


def verify_small_D_limit(D_list: Sequence[float] = (0.1, 0.2, 0.5, 1.0), N: Optional[int] = None,
                         tol: float = 1e-8) -> List[VerificationOutcome]:
    out = []
    for D in D_list:
        l1, l2 = model1d.solve_scaled(D, N)
        dev = abs((l2 - l1) - THREE_PI_SQ)
        bound = D**4 / 16
        measured = {"scaled_gap": l2 - l1, "deviation": dev, "bound": bound,
                    "normalized_deviation": dev / THREE_PI_SQ}
        out.append(VerificationOutcome("small-diameter-limit", {"D": D, "N": N}, measured, tol,
                                       bool(dev <= bound + tol)))
    return out


def concavity_outcome(D: float, grid, phi1) -> VerificationOutcome:
    """phi1'' < 0 at every interior node for the given (OU-gauge) samples."""
    Dm = cheb_diff_matrix(grid)
    second = (Dm @ (Dm @ phi1))[1:-1]
    worst = float(second.max())
    notes = []
    if abs(worst) < 1e-10 * np.abs(second).max():
        notes.append("margin is below the roundoff floor of the spectral second derivative")
    return VerificationOutcome("concavity", {"D": D, "N": grid.order},
                               {"max_phi1_second": worst, "margin": -worst}, 0.0,
                               bool(worst < 0), notes)


def verify_concavity(D_grid: Sequence[float] = LEMMA_DIAMETERS,
                     N: Optional[int] = None) -> List[VerificationOutcome]:
    out = []
    for D in D_grid:
        spec = model1d.solve_model(D, "ou", N)
        out.append(concavity_outcome(D, spec.grid, spec.phi1))
    return out


def parity_crossing_outcome(D: float, grid, phi1, phi2, parity_tol: float = 1e-9):
    """Parity residuals and the single crossing of phi1^2 - phi2^2 on (0, D/2)."""
    par1 = float(np.abs(phi1 - phi1[::-1]).max())
    par2 = float(np.abs(phi2 + phi2[::-1]).max())
    _, _, changes = model1d.crossing_sign_changes(grid, phi1, phi2)
    measured = {"parity_residual_phi1": par1, "parity_residual_phi2": par2,
                "sign_changes": int(len(changes))}
    notes = []
    try:
        b = model1d.find_crossing(grid, phi1, phi2)
        measured["b"] = b
        crossing_ok = 0 < b < grid.half_width
    except LemmaViolation as exc:
        notes.append(str(exc))
        crossing_ok = False
    ok = par1 <= parity_tol and par2 <= parity_tol and crossing_ok
    return VerificationOutcome("parity-crossing", {"D": D, "N": grid.order}, measured,
                               parity_tol, bool(ok), notes)


def verify_parity_crossing(D_grid: Sequence[float] = LEMMA_DIAMETERS,
                           N: Optional[int] = None) -> List[VerificationOutcome]:
    out = []
    for D in D_grid:
        spec = model1d.solve_model(D, "schrodinger", N)
        out.append(parity_crossing_outcome(D, spec.grid, spec.phi1, spec.phi2))
    return out


def verify_ratio_ode(D_grid: Sequence[float] = LEMMA_DIAMETERS, N: Optional[int] = None,
                     tol: float = 1e-6) -> List[VerificationOutcome]:
    out = []
    for D in D_grid:
        spec = model1d.solve_model(D, "schrodinger", N)
        inputs = {"D": D, "N": spec.order}
        try:
            rf = model1d.ratio_function(spec)
        except PositivityError as exc:
            out.append(VerificationOutcome("ratio-ode", inputs, {}, tol, False, [str(exc)]))
            continue
        res = float(np.abs(model1d.ratio_ode_residual(spec, rf)).max())
        min_dw = float(rf.dw[1:-1].min())
        w0 = float(abs(rf.w[spec.grid.center_index]))
        measured = {"ode_residual": res, "min_dw": min_dw, "w_at_0": w0}
        ok = res <= tol and min_dw > 0 and w0 <= 1e-12
        out.append(VerificationOutcome("ratio-ode", inputs, measured, tol, bool(ok)))
    return out


def verify_log_concavity_comparison(w_rect: float = 2.0, h_rect: float = 2.0,
                                    N: Optional[int] = None, sample_count: int = 10_000,
                                    seed: int = 42, tol: float = 1e-6,
                                    min_separation: float = 1e-3,
                                    inner_fraction: float = 0.98) -> List[VerificationOutcome]:
    """Two-point log-gradient comparison on a rectangle with separable phi1.

    LHS = -<grad log phi1(y) - grad log phi1(x), e>, e = (y - x)/|y - x|;
    RHS = -2 (log model phi1)'(|y - x|/2) with the model on the diagonal length.
    """
    px = model1d.solve_model(w_rect, "schrodinger", N)
    py = model1d.solve_model(h_rect, "schrodinger", N)
    D = float(np.hypot(w_rect, h_rect))
    model = model1d.solve_model(D, "schrodinger", N)

    rng = np.random.default_rng(seed)
    half = 0.5 * inner_fraction * np.array([w_rect, h_rect])
    x = rng.uniform(-half, half, size=(sample_count, 2))
    y = rng.uniform(-half, half, size=(sample_count, 2))
    d = y - x
    r = np.linalg.norm(d, axis=1)
    keep = r >= min_separation
    x, y, d, r = x[keep], y[keep], d[keep], r[keep]
    e = d / r[:, None]

    def grad(p):
        return np.column_stack([model1d.log_derivative(px, p[:, 0]),
                                model1d.log_derivative(py, p[:, 1])])

    lhs = -np.einsum("ij,ij->i", grad(y) - grad(x), e)
    rhs = -2.0 * model1d.log_derivative(model, r / 2)
    slack = lhs - rhs
    skipped = int(sample_count - keep.sum())
    notes = [f"{skipped} pairs closer than {min_separation} skipped",
             f"samples restricted to the inner {inner_fraction:.0%} of the rectangle"]
    measured = {"pairs": int(keep.sum()), "min_slack": float(slack.min()),
                "mean_slack": float(slack.mean()), "diameter": D}
    inputs = {"w": w_rect, "h": h_rect, "N": N, "sample_count": sample_count, "seed": seed}
    return [VerificationOutcome("log-concavity", inputs, measured, tol,
                                bool(slack.min() >= -tol), notes)]


DEFAULT_POTENTIALS: Dict[str, Callable] = {
    "zero": lambda s: np.zeros_like(s),
    "s^2": lambda s: s * s,
    "|s|": np.abs,
    "exp(s)": np.exp,
}


def verify_convex_potential(D: float = 2.0, N: Optional[int] = None,
                            V_choices: Optional[Dict[str, Callable]] = None,
                            tol: float = 1e-9) -> List[VerificationOutcome]:
    """Gap with s^2/4 + V against the V-free model gap, for convex V.

    Non-smooth potentials (|s|) converge only algebraically under collocation,
    so each gap is solved at order n and 2n and the difference widens the
    tolerance.
    """
    V_choices = DEFAULT_POTENTIALS if V_choices is None else V_choices
    n0 = N or 256
    gap_model = model1d.model_gap(D)
    out = []
    for name, V in V_choices.items():
        coarse = model1d.solve_model(D, "schrodinger", n0, V=V)
        spec = model1d.solve_model(D, "schrodinger", 2 * n0, V=V)
        est = domain2d.richardson_estimate(coarse.gap, spec.gap)
        s = spec.nodes
        v = np.asarray(V(s), dtype=float)
        notes = []
        if np.allclose(v, v[::-1], atol=1e-12, rtol=0):
            par = max(np.abs(spec.phi1 - spec.phi1[::-1]).max(),
                      np.abs(spec.phi2 + spec.phi2[::-1]).max())
            notes.append(f"parity residual {par:.2e}")
        else:
            notes.append("asymmetric potential: parity checks skipped")
        allowed = max(tol, est)
        measured = {"gap": spec.gap, "model_gap": gap_model, "margin": spec.gap - gap_model,
                    "error_estimate": est}
        out.append(VerificationOutcome("convex-potential", {"D": D, "V": name, "N": spec.order},
                                       measured, allowed, bool(spec.gap >= gap_model - allowed),
                                       notes))
    return out


def default_domains():
    return {
        "square": domain2d.Rectangle(1.0, 1.0),
        "rectangle 3x4": domain2d.Rectangle(3.0, 4.0),
        "disk r=1": domain2d.disk(1.0),
        "ellipse 2x1": domain2d.Ellipse(2.0, 1.0),
        "regular pentagon": domain2d.regular_polygon(5, 1.0),
    }


def verify_gap_bound_2d(domains=None, h: float = 1 / 128, N: Optional[int] = None,
                        method: str = "auto") -> List[VerificationOutcome]:
    domains = default_domains() if domains is None else domains
    out = []
    for name, dom in domains.items():
        inputs = {"domain": name, "h": h, "N": N, "method": method}
        try:
            rep = domain2d.check_gap_bound(dom, h, N, method)
        except NumericalError as exc:
            out.append(VerificationOutcome("gap-bound-2d", inputs, {}, 0.0, False, [str(exc)]))
            continue
        d = rep.to_dict()
        measured = {k: d[k] for k in ("diameter", "gap", "model_gap", "margin", "error_estimate")}
        notes = [f"method: {rep.method}", f"convexity: {rep.convexity}"]
        out.append(VerificationOutcome("gap-bound-2d", inputs, measured,
                                       rep.discretization_error_estimate,
                                       rep.verdict == "pass", notes))
    return out


def verify_thin_rectangle(D: float = 2.0, eps_list: Sequence[float] = (0.1, 0.05, 0.01),
                          N: Optional[int] = None, tol: float = 1e-5,
                          lower_tol: float = 1e-9) -> List[VerificationOutcome]:
    """gap_model <= gap(eps) <= gap_model + eps^2 + tol on (-D/2, D/2) x (-eps, eps).

    The lower side allows ``lower_tol`` because the separable gap equals the
    model gap exactly in exact arithmetic.
    """
    inputs = {"D": D, "eps": list(eps_list), "N": N}
    gap_model = model1d.model_gap(D, N)
    try:
        rows = domain2d.thin_rectangle_experiment(D, eps_list, N, tol=tol)
    except (ExperimentSetupError, LemmaViolation) as exc:
        return [VerificationOutcome("thin-rectangle", inputs, {"model_gap": gap_model}, tol,
                                    False, [str(exc)])]
    gaps = [g for _, g in rows]
    above = [g - gap_model for g in gaps]
    ok = all(-lower_tol <= a <= e * e + tol for (e, _), a in zip(rows, above))
    ok = ok and all(b <= a + lower_tol for a, b in zip(gaps, gaps[1:]))
    measured = {"model_gap": gap_model, "gaps": gaps, "excess": above}
    return [VerificationOutcome("thin-rectangle", inputs, measured, tol, bool(ok))]


def verify_eigenvalue_derivative(Dparam: float = 5.0, step: float = 1e-3, N: int = 64,
                                 rtol: float = 1e-4) -> List[VerificationOutcome]:
    lo = np.array(model1d.solve_scaled(Dparam - step, N))
    hi = np.array(model1d.solve_scaled(Dparam + step, N))
    fd = (hi - lo) / (2 * step)
    quad = model1d.eigenvalue_sensitivity(Dparam, N)
    rel = np.abs(fd - quad) / np.abs(quad)
    measured = {"finite_difference": fd.tolist(), "moment_formula": quad.tolist(),
                "relative_error": rel.tolist()}
    return [VerificationOutcome("eigenvalue-derivative", {"D": Dparam, "step": step, "N": N},
                                measured, rtol, bool(np.all(rel <= rtol) and np.all(quad > 0)))]


def verify_oracle_agreement(D_values: Sequence[float] = tuple(range(1, 11)), N: int = 64,
                            M: int = 64, tol: float = 1e-8) -> List[VerificationOutcome]:
    out = []
    for D in D_values:
        col = np.array(model1d.solve_scaled(float(D), N))
        gal = eigen.smallest_symmetric(sine_galerkin_operator(M, 0.25 * D**4), 2).values
        diff = np.abs(col - gal)
        measured = {"collocation": col.tolist(), "galerkin": gal.tolist(),
                    "max_difference": float(diff.max())}
        out.append(VerificationOutcome("oracle-agreement", {"D": float(D), "N": N, "M": M},
                                       measured, tol, bool(diff.max() <= tol)))
    return out


def verify_harmonic_limit(D: float = 30.0, N: Optional[int] = None,
                          tol: float = 1e-6) -> List[VerificationOutcome]:
    schr = model1d.solve_model(D, "schrodinger", N)
    ou = (schr.lambda1 - model1d.GAUGE_SHIFT, schr.lambda2 - model1d.GAUGE_SHIFT)
    err = [abs(schr.lambda1 - 0.5), abs(schr.lambda2 - 1.5), abs(ou[0]), abs(ou[1] - 1.0)]
    measured = {"schrodinger": [schr.lambda1, schr.lambda2], "ou": list(ou),
                "max_error": max(err), "N": schr.order}
    return [VerificationOutcome("harmonic-limit", {"D": D, "N": N}, measured, tol,
                                bool(max(err) <= tol))]


SUITES: Dict[str, Callable[..., List[VerificationOutcome]]] = {
    "table": verify_table,
    "gap-monotone": verify_monotonicity,
    "small-diameter-limit": verify_small_D_limit,
    "oracle-agreement": verify_oracle_agreement,
    "harmonic-limit": verify_harmonic_limit,
    "concavity": verify_concavity,
    "parity-crossing": verify_parity_crossing,
    "ratio-ode": verify_ratio_ode,
    "gap-bound-2d": verify_gap_bound_2d,
    "thin-rectangle": verify_thin_rectangle,
    "log-concavity": verify_log_concavity_comparison,
    "eigenvalue-derivative": verify_eigenvalue_derivative,
    "convex-potential": verify_convex_potential,
}


def run_suites(names: Sequence[str], seed: int = 42,
               h: Optional[float] = None) -> List[VerificationOutcome]:
    """Run the named suites (``"all"`` expands to every suite) in registry order."""
    names = list(SUITES) if "all" in names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    out = []
    for name in SUITES:
        if name not in names:
            continue
        if name == "log-concavity":
            out.extend(verify_log_concavity_comparison(seed=seed))
        elif name == "gap-bound-2d" and h is not None:
            out.extend(verify_gap_bound_2d(h=h))
        else:
            out.extend(SUITES[name]())
    return out
