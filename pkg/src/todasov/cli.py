"""Command-line front end: argument handling, JSON/CSV emission, manifests.

Every command prints a human-readable summary to standard output and
writes numeric results to JSON or CSV files on request; a reproducibility
manifest goes alongside each result file.  JSON is emitted through a
canonical serializer (sorted keys, floats at a fixed 17 significant
digits), so identical runs produce byte-identical files.

Exit codes: 0 on success, 1 when a verification suite reports a failed
identity, 2 on usage or input errors.
"""

import argparse
import csv
import math
import platform
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .baxter import (bs_quantize, build_q, baxter_residual,
                     solve_relative_spectrum)
from .characters import (character_binomial, character_product,
                         character_resolution, qfactorial)
from .dynamics import (abel_linearization, em_residual, flow_endpoint,
                       fourier_coefficient, hamiltonian_flow, pde_residual)
from .errors import TodaError
from .exactpoly import CFraction, Poly, QSeries, delta, delta_inverse
from .lax import PhasePoint, build_monodromy, conserved_poly
from .matrixelements import (build_quantum_identity_polys,
                             close_state_compare, contour_shift_residual,
                             matrix_element, quantum_prop_check,
                             quasiclassical_q)
from .spectral import build_spectral, period_matrix, prop_check_classical

COMMANDS = ("periods", "evolve", "quantize-bs", "quantize-exact",
            "qfunction", "matrix-element", "verify-identities",
            "characters", "fourier")

SUITES = ("structure", "classical", "dynamics", "pde", "characters",
          "quantum", "quasiclassical", "exactness", "all")

TOLERANCES = {
    "det": 1e-12,
    "tcoeff": 1e-12,
    "classical": 1e-7,
    "conservation": 1e-9,
    "em": 1e-5,
    "abel": 1e-5,
    "commute": 1e-7,
    "pde": 1e-4,
    "exact": 0.0,
    "baxter": 1e-6,
    "orthogonality": 1e-6,
    "p1pp": 1e-6,
    "control": 1e-2,
    "contour": 1e-7,
    "spacing": 0.05,
    "interval": 0.0,
}

# reality-compatible default curves per genus: all critical values
# outside (-2, 2)
DEFAULT_CURVES = {
    1: Poly([-6.0, 0.0, 1.0]),
    2: Poly([0.0, -6.0, 0.0, 1.0]),
    3: Poly([4.0, 0.0, -8.0, 0.0, 1.0]),
}


# ---------------------------------------------------------------------------
# canonical JSON

def _float_repr(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value has no JSON representation")
    return format(float(x), ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """JSON text with sorted keys and fixed float formatting.

    The stdlib encoder formats floats with repr (shortest round trip),
    which varies in digit count; byte-stable output needs every float
    printed the same way, so the emitter is written out here.
    """
    pad, pad1 = " " * indent, " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float_repr(obj)
    if isinstance(obj, str):
        out = ['"']
        for ch in obj:
            if ch in '"\\':
                out.append("\\" + ch)
            elif ord(ch) < 0x20:
                out.append(f"\\u{ord(ch):04x}")
            else:
                out.append(ch)
        return "".join(out) + '"'
    if isinstance(obj, complex):
        return dumps_canonical({"re": obj.real, "im": obj.imag}, indent)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{pad1}{dumps_canonical(str(k))}: '
                f'{dumps_canonical(obj[k], indent + 2)}'
                for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            return "[]"
        rows = [pad1 + dumps_canonical(v, indent + 2) for v in items]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _coeff_list(p: Poly) -> list:
    return [float(c) for c in p.coeffs]


# ---------------------------------------------------------------------------
# manifests

@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one command invocation."""

    command: str
    params: dict
    tolerances: dict
    seeds: dict
    versions: dict
    wall_clock_s: float
    summary: dict

    def to_json(self) -> str:
        return dumps_canonical({
            "command": self.command, "params": self.params,
            "tolerances": self.tolerances, "seeds": self.seeds,
            "versions": self.versions, "wall_clock_s": self.wall_clock_s,
            "summary": self.summary}) + "\n"


def _versions() -> dict:
    import scipy
    return {"todasov": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version()}


def _manifest_path(result_path: str) -> str:
    stem, dot, _ = result_path.rpartition(".")
    return (stem if dot else result_path) + ".manifest.json"


# ---------------------------------------------------------------------------
# argument parsing helpers

def load_config(path: str) -> dict:
    """Flat key=value file; blank lines and # comments are skipped."""
    params = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq or not key.strip():
                raise ValueError(
                    f"{path}: line {lineno}: expected key=value, "
                    f"got {line!r}")
            params[key.strip()] = value.strip()
    return params


def parse_coeffs(text: str) -> Poly:
    """Comma-separated coefficient list, constant term first."""
    try:
        return Poly([float(v) for v in text.split(",")])
    except ValueError:
        raise ValueError(f"bad coefficient list {text!r}") from None


def parse_poly(text: str, genus: int = 1) -> Poly:
    """Coefficient list or a symbolic separation variable b1..b_genus."""
    name = text.strip()
    if name.startswith("b") and name[1:].isdigit():
        j = int(name[1:])
        if not 1 <= j <= genus:
            raise ValueError(f"{name} outside b1..b{genus}")
        if genus == 1:
            return Poly([0.0, 1.0])
        raise ValueError("symbolic names need the genus-1 problem")
    return parse_coeffs(name)


def parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    lo, hi, step = (float(v) for v in parts)
    if step <= 0 or hi <= lo:
        raise ValueError(f"empty grid {text!r}")
    return lo, hi, step


def _merge_value_flags(argv):
    # values like "-6,0,1" or "-10:10:0.01" start with a dash and would
    # be taken for option names; fold them into --flag=value form
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and argv[i + 1].startswith("-")
                and any(c in argv[i + 1] for c in ",:")):
            out.append(tok + "=" + argv[i + 1])
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# verification checks

@dataclass(frozen=True)
class Check:
    """One identity evaluation destined for the report table.

    For plain residual checks `residual` is the normalized defect; for
    interval or ratio criteria it is the distance outside the accepted
    range (0 when satisfied) with the measured value recorded in inputs.
    """

    identity: str
    inputs: dict
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def row(self) -> dict:
        return {"identity": self.identity, "inputs": self.inputs,
                "residual": self.residual, "tolerance": self.tolerance,
                "pass": self.passed}


def _outside(value: float, lo: float, hi: float) -> float:
    return max(0.0, lo - value, value - hi)


def _suite_structure(seed: int, points: int = 10) -> list:
    rng = np.random.default_rng(seed)
    checks = []
    for n in (2, 3, 4):
        worst_det = worst_t = 0.0
        for _ in range(points):
            x = PhasePoint(tuple(rng.uniform(-2, 2, n)),
                           tuple(rng.uniform(-2, 2, n)))
            m = build_monodromy(x)
            worst_det = max(worst_det, m.det_defect())
            t = conserved_poly(m)
            mom = sum(x.p)
            ham = x.energy()
            scale = max(1.0, abs(mom), abs(ham))
            worst_t = max(
                worst_t,
                abs(float(t.coeffs[n - 1]) + mom) / scale,
                abs(float(t.coeffs[n - 2]) - (mom * mom / 2 - ham)) / scale)
        checks.append(Check("quantum determinant", {"n": n, "points": points},
                            worst_det, TOLERANCES["det"]))
        checks.append(Check("trace coefficients", {"n": n, "points": points},
                            worst_t, TOLERANCES["tcoeff"]))
    return checks


def _suite_classical(genus: int) -> list:
    if genus not in DEFAULT_CURVES:
        raise ValueError(f"no default curve of genus {genus}")
    s = build_spectral(DEFAULT_CURVES[genus])
    tol = TOLERANCES["classical"]
    basis = [Poly([1.0]), Poly([0.0, 1.0]), Poly([0.0, 0.0, 1.0]),
             Poly([0.0, 0.0, 0.0, 1.0])]
    checks = []
    for deg, L in enumerate(basis):
        r = prop_check_classical(s, "P1", L=L)
        checks.append(Check("P1", {"genus": genus, "L_degree": deg}, r, tol))
    checks.append(Check("P2", {"genus": genus},
                        prop_check_classical(s, "P2"), tol))
    kset = [(1,), (-2,), (2,)] if genus == 1 else \
        [(1, 0), (0, 1), (1, -1), (-2, 2)] if genus == 2 else \
        [(1, 0, 0), (0, 1, -1), (-2, 1, 2)]
    for k in kset:
        kd = {"genus": genus, "k": list(k)}
        checks.append(Check("P1p", {**kd, "L_degree": 1},
                            prop_check_classical(s, "P1p", L=basis[1], k=k),
                            tol))
        checks.append(Check("P2p", kd,
                            prop_check_classical(s, "P2p", k=k), tol))
        checks.append(Check("P3p", kd,
                            prop_check_classical(s, "P3p", k=k), tol))
    return checks


def _suite_dynamics() -> list:
    x0 = PhasePoint((0.4, -0.3, 0.1), (0.5, 0.0, -0.5))
    traj = hamiltonian_flow(x0, 1, 2.0)
    checks = [
        Check("conservation", {"n": 3, "flow": 1, "duration": 2.0},
              traj.conservation_defect(), TOLERANCES["conservation"]),
        Check("equations of motion", {"n": 3, "flow": 1},
              em_residual(traj), TOLERANCES["em"]),
    ]
    rep = abel_linearization(traj)
    checks.append(Check("abel linearization", {"n": 3, "flow": 1},
                        max(rep.drift), TOLERANCES["abel"]))
    d = 0.7
    e12 = flow_endpoint(flow_endpoint(x0, 1, d), 2, d)
    e21 = flow_endpoint(flow_endpoint(x0, 2, d), 1, d)
    defect = max(max(abs(a - b) for a, b in zip(e12.p, e21.p)),
                 max(abs(a - b) for a, b in zip(e12.q, e21.q)))
    checks.append(Check("flow commutativity", {"n": 3, "duration": d},
                        defect, TOLERANCES["commute"]))
    return checks


def _suite_pde() -> list:
    tol = TOLERANCES["pde"]
    x2 = PhasePoint((0.4, -0.4), (0.5, -0.1))
    checks = []
    for p in (0, 1, 2):
        rep = pde_residual(x2, "WEI", p=p)
        checks.append(Check("WEI", {"n": 2, "p": p, "order": rep.order},
                            rep.residual, tol))
    x3 = PhasePoint((1.1, -0.3, -0.2), (0.9, 0.2, -0.6))
    rep = pde_residual(x3, "Q")
    checks.append(Check("Q", {"n": 3, "order": rep.order}, rep.residual, tol))
    x4 = PhasePoint((0.6, -0.1, 0.2, -0.7), (0.5, 0.1, -0.2, -0.4))
    rep = pde_residual(x4, "C")
    checks.append(Check("C", {"n": 4, "order": rep.order}, rep.residual, tol))
    return checks


def _suite_characters(order: int = 40) -> list:
    checks = []
    for n in range(2, 7):
        prod = character_product(n, order).chi
        binom = character_binomial(n, order).chi
        resol = character_resolution(n, order)
        bad = sum(a != b for a, b in zip(prod.coeffs, binom.coeffs)) \
            + sum(a != b for a, b in zip(prod.coeffs, resol.coeffs))
        checks.append(Check("character forms", {"n": n, "order": order},
                            float(bad), TOLERANCES["exact"]))
    closed = (QSeries.one(order) + QSeries.qpow(2, order)) \
        / (qfactorial(1, order) * qfactorial(2, order))
    bad = sum(a != b for a, b in zip(
        character_product(2, order).chi.coeffs, closed.coeffs))
    checks.append(Check("two-site closed form", {"order": order},
                        float(bad), TOLERANCES["exact"]))
    return checks


def _suite_quantum(hbar: float) -> list:
    pairs = solve_relative_spectrum(hbar, 6)
    qs = [build_q(p) for p in pairs]
    checks = [Check("baxter residual", {"hbar": hbar, "level": p.level},
                    baxter_residual(q, p.t, hbar), TOLERANCES["baxter"])
              for p, q in zip(pairs, qs)]
    one = Poly([1.0])
    norms = [matrix_element(q, q, one) for q in qs[:3]]
    for a in range(3):
        for b in range(a + 1, 3):
            r = abs(matrix_element(qs[a], qs[b], one)) \
                / math.sqrt(norms[a] * norms[b])
            checks.append(Check("orthogonality",
                                {"hbar": hbar, "levels": [a, b]},
                                r, TOLERANCES["orthogonality"]))
    for deg in range(4):
        L = Poly.monomial(deg) if deg else one
        r = quantum_prop_check("P1pp", qs[0], qs[1], L=L)
        checks.append(Check("P1pp", {"hbar": hbar, "levels": [0, 1],
                                     "L_degree": deg}, r,
                            TOLERANCES["p1pp"]))
    ip = build_quantum_identity_polys(qs[0].t, qs[1].t, hbar)
    scale = max(abs(complex(c)) for c in ip.Dq.coeffs)
    rng = np.random.default_rng(7)
    junk = Poly(list(rng.standard_normal(4) * scale))
    from .matrixelements import WINDOW_MARGIN, _weighted_line
    i, l1 = _weighted_line(qs[0], qs[1], junk, 1, WINDOW_MARGIN)
    checks.append(Check("negative control", {"hbar": hbar, "seed": 7,
                                             "measured": abs(i) / l1},
                        _outside(abs(i) / l1, TOLERANCES["control"],
                                 math.inf),
                        TOLERANCES["interval"]))
    checks.append(Check("P3pp", {"hbar": hbar, "levels": [0, 1]},
                        quantum_prop_check("P3pp", qs[0], qs[1]),
                        TOLERANCES["orthogonality"]))
    checks.append(Check("contour shift", {"hbar": hbar, "levels": [0, 1]},
                        contour_shift_residual(qs[0], qs[1]),
                        TOLERANCES["contour"]))
    return checks


def _suite_quasiclassical() -> list:
    checks = []
    errs = {}
    for hb in (0.5, 0.25):
        e_exact = solve_relative_spectrum(hb, 4)[3].E
        e_bs = -float(bs_quantize(hb, 3).coeffs[0])
        errs[hb] = abs(e_bs - e_exact)
    factor = errs[0.5] / errs[0.25]
    checks.append(Check("bs error scaling",
                        {"nj": 3, "hbars": [0.5, 0.25], "factor": factor},
                        _outside(factor, 2.5, 6.0), TOLERANCES["interval"]))
    rep = close_state_compare(0.1, 5)
    checks.append(Check("level spacing", {"hbar": 0.1, "level": 5},
                        rep.spacing_rel, TOLERANCES["spacing"]))
    d1 = close_state_compare(0.2, 9).deviation
    d2 = close_state_compare(0.1, 18).deviation
    checks.append(Check("close-state deviation",
                        {"hbars": [0.2, 0.1], "levels": [9, 18],
                         "ratio": d1 / d2},
                        _outside(d1 / d2, 1.5, math.inf),
                        TOLERANCES["interval"]))
    t = solve_relative_spectrum(0.15, 7)[6].t
    n1 = len(quasiclassical_q(t, 0.15).zone(1).predicted_zeros())
    n2 = len(quasiclassical_q(t, 0.075).zone(1).predicted_zeros())
    checks.append(Check("zero count doubling",
                        {"hbars": [0.15, 0.075], "counts": [n1, n2]},
                        float(max(0, abs(n2 - 2 * n1) - 1)),
                        TOLERANCES["interval"]))
    return checks


def _suite_exactness(seed: int) -> list:
    import random
    from fractions import Fraction
    rng = random.Random(seed)
    bad = 0
    for _ in range(20):
        deg = rng.randint(0, 12)
        hb = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        l = Poly([CFraction(Fraction(rng.randint(-9, 9), rng.randint(1, 9)))
                  for _ in range(deg + 1)])
        if delta(delta_inverse(l, hb), hb) != l:
            bad += 1
    checks = [Check("difference roundtrip", {"degree_max": 12, "trials": 20},
                    float(bad), TOLERANCES["exact"])]
    ip = build_quantum_identity_polys(
        Poly([-3, 0, 1]), Poly([-5, 0, 1]), 1)
    anti = ip.Cq + ip.Cq.swap()
    checks.append(Check("Cq antisymmetry", {"hbar": 1},
                        float(len(list(anti.terms()))), TOLERANCES["exact"]))
    t = Poly([-3, 0, 1])
    sq = build_quantum_identity_polys(t, t, 1).Sq
    checks.append(Check("Sq diagonal", {"hbar": 1},
                        float(sum(1 for c in sq.coeffs if complex(c))),
                        TOLERANCES["exact"]))
    return checks


# ---------------------------------------------------------------------------
# commands

def _emit(args, payload: dict, manifest: RunManifest) -> None:
    if getattr(args, "json_path", None):
        with open(args.json_path, "w") as fh:
            fh.write(dumps_canonical(payload) + "\n")
        with open(_manifest_path(args.json_path), "w") as fh:
            fh.write(manifest.to_json())
        print(f"wrote {args.json_path}")


def _emit_csv(args, header: list, rows, manifest: RunManifest) -> None:
    if getattr(args, "csv_path", None):
        with open(args.csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([_float_repr(v) for v in row])
        with open(_manifest_path(args.csv_path), "w") as fh:
            fh.write(manifest.to_json())
        print(f"wrote {args.csv_path}")


def _make_manifest(command: str, params: dict, summary: dict,
                   t0: float, seeds: dict = None) -> RunManifest:
    return RunManifest(command=command, params=params,
                       tolerances=TOLERANCES, seeds=seeds or {},
                       versions=_versions(),
                       wall_clock_s=time.monotonic() - t0, summary=summary)


def cmd_periods(args, t0) -> int:
    t = parse_coeffs(args.t)
    s = build_spectral(t)
    pd = period_matrix(s, nodes=args.nodes) if args.nodes \
        else period_matrix(s)
    payload = {
        "t": _coeff_list(t),
        "branch_points": [float(b) for b in s.branch],
        "rawPeriods": [[float(v) for v in row] for row in pd.rawPeriods],
        "A": [[float(v) for v in row] for row in pd.A],
        "J": [float(j) for j in pd.J],
    }
    params = {"t": args.t, "nodes": args.nodes}
    print(f"genus {s.genus} curve, branch points "
          + ", ".join(f"{b:.6g}" for b in s.branch))
    print("actions J: " + ", ".join(f"{j:.12g}" for j in pd.J))
    _emit(args, payload, _make_manifest(
        "periods", params, {"pass": True}, t0))
    return 0


def cmd_evolve(args, t0) -> int:
    import json as _json
    with open(args.phase) as fh:
        x0 = PhasePoint.from_dict(_json.load(fh))
    pd = period_matrix(build_spectral(conserved_poly(build_monodromy(x0))))
    col = x0.n - 1 - args.flow
    rate = float(np.max(np.abs(pd.A[:, col])))
    duration = args.periods * 2.0 * math.pi / rate
    traj = hamiltonian_flow(x0, args.flow, duration, samples=args.samples)
    n, g = x0.n, x0.n - 1
    header = (["tau"] + [f"p{i + 1}" for i in range(n)]
              + [f"q{i + 1}" for i in range(n)]
              + [f"gamma{j + 1}" for j in range(g)]
              + [f"Lambda{j + 1}" for j in range(g)]
              + [f"t{k}" for k in range(n + 1)])
    rows = [[traj.times[i], *traj.points[i].p, *traj.points[i].q,
             *traj.sov[i].gamma, *traj.sov[i].Lambda, *traj.tcoeffs[i]]
            for i in range(len(traj.times))]
    params = {"phase": args.phase, "flow": args.flow,
              "periods": args.periods, "samples": args.samples,
              "duration": duration}
    defect = traj.conservation_defect()
    print(f"flow {args.flow}: {len(traj.times)} samples over tau = "
          f"{duration:.6g} (fastest angle makes {args.periods} turns)")
    print(f"conservation defect {defect:.3e}")
    manifest = _make_manifest("evolve", params, {
        "pass": defect < TOLERANCES["conservation"],
        "conservation_defect": defect}, t0)
    _emit_csv(args, header, rows, manifest)
    return 0


def cmd_quantize_bs(args, t0) -> int:
    t = bs_quantize(args.hbar, args.nj)
    energy = -float(t.coeffs[0])
    payload = {"hbar": args.hbar, "nj": args.nj, "E": energy,
               "t": _coeff_list(t)}
    print(f"semiclassical level nj={args.nj} at hbar={args.hbar:g}: "
          f"E = {energy:.12g}")
    _emit(args, payload, _make_manifest(
        "quantize-bs", {"hbar": args.hbar, "nj": args.nj},
        {"pass": True}, t0))
    return 0


def cmd_quantize_exact(args, t0) -> int:
    pairs = solve_relative_spectrum(args.hbar, args.levels)
    rows, failed = [], 0
    for p in pairs:
        res = baxter_residual(build_q(p), p.t, args.hbar)
        ok = res < TOLERANCES["baxter"]
        failed += not ok
        rows.append({"level": p.level, "E": p.E, "parity": p.parity,
                     "t": _coeff_list(p.t), "baxter_residual": res,
                     "pass": ok})
        print(f"level {p.level}: E = {p.E:.12g}  parity {p.parity:+d}  "
              f"residual {res:.3e}  {'ok' if ok else 'FAIL'}")
    payload = {"hbar": args.hbar, "levels": rows}
    _emit(args, payload, _make_manifest(
        "quantize-exact", {"hbar": args.hbar, "levels": args.levels},
        {"pass": failed == 0, "failed": failed}, t0))
    return 1 if failed else 0


def cmd_qfunction(args, t0) -> int:
    lo, hi, step = parse_grid(args.grid)
    pairs = solve_relative_spectrum(args.hbar, args.level + 1)
    q = build_q(pairs[args.level])
    num = int(round((hi - lo) / step)) + 1
    gam = np.linspace(lo, lo + step * (num - 1), num)
    vals = q.line(0.0, gam[0], gam[-1], num)
    core = q.core_line(0.0, gam[0], gam[-1], num)
    params = {"hbar": args.hbar, "level": args.level, "grid": args.grid}
    print(f"level {args.level} at hbar={args.hbar:g}: E = "
          f"{pairs[args.level].E:.12g}, {num} samples")
    manifest = _make_manifest("qfunction", params, {"pass": True}, t0)
    _emit_csv(args, ["gamma", "Q", "core"],
              [[gam[i], vals[i].real, core[i].real] for i in range(num)],
              manifest)
    return 0


def cmd_matrix_element(args, t0) -> int:
    try:
        la, lb = (int(v) for v in args.levels.split(","))
    except ValueError:
        raise ValueError(f"--levels wants two integers, got {args.levels!r}")
    F = parse_poly(args.poly)
    pairs = solve_relative_spectrum(args.hbar, max(la, lb) + 1)
    qa, qb = build_q(pairs[la]), build_q(pairs[lb])
    one = Poly([1.0])
    me = matrix_element(qa, qb, F)
    na, nb = matrix_element(qa, qa, one), matrix_element(qb, qb, one)
    norm = me / math.sqrt(na * nb)
    payload = {"hbar": args.hbar, "levels": [la, lb], "poly": args.poly,
               "value": me, "normalized": norm, "norms": [na, nb]}
    print(f"<{la}| {args.poly} |{lb}> at hbar={args.hbar:g}: "
          f"{me:.12g} (normalized {norm:.12g})")
    _emit(args, payload, _make_manifest(
        "matrix-element",
        {"hbar": args.hbar, "levels": args.levels, "poly": args.poly},
        {"pass": True}, t0))
    return 0


def cmd_verify(args, t0) -> int:
    seeds = {"structure": args.seed, "exactness": args.seed}
    runners = {
        "structure": lambda: _suite_structure(args.seed),
        "classical": lambda: _suite_classical(args.genus),
        "dynamics": _suite_dynamics,
        "pde": _suite_pde,
        "characters": _suite_characters,
        "quantum": lambda: _suite_quantum(args.hbar),
        "quasiclassical": _suite_quasiclassical,
        "exactness": lambda: _suite_exactness(args.seed),
    }
    names = list(runners) if args.suite == "all" else [args.suite]
    checks = []
    for name in names:
        checks.extend(runners[name]())
    width = max(len(c.identity) for c in checks) + 2
    failed = 0
    for c in checks:
        failed += not c.passed
        inputs = " ".join(f"{k}={v}" for k, v in c.inputs.items())
        print(f"{c.identity:<{width}} {c.residual:<12.3e} "
              f"tol {c.tolerance:<9.0e} {'pass' if c.passed else 'FAIL'}  "
              f"[{inputs}]")
    print(f"{len(checks) - failed}/{len(checks)} identities passed")
    params = {"suite": args.suite, "genus": args.genus,
              "hbar": args.hbar, "seed": args.seed}
    manifest = _make_manifest(
        "verify-identities", params,
        {"pass": failed == 0, "checks": len(checks), "failed": failed},
        t0, seeds)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps_canonical([c.row() for c in checks]) + "\n")
        with open(_manifest_path(args.report), "w") as fh:
            fh.write(manifest.to_json())
        print(f"wrote {args.report}")
    return 1 if failed else 0


def cmd_characters(args, t0) -> int:
    prod = character_product(args.n, args.order)
    binom = character_binomial(args.n, args.order).chi
    resol = character_resolution(args.n, args.order)
    same = prod.chi.coeffs == binom.coeffs == resol.coeffs
    dims = prod.dimensions()
    shown = ", ".join(str(d) for d in dims[:11])
    print(f"n={args.n} graded dimensions: {shown}"
          + (" ..." if len(dims) > 11 else ""))
    print(f"product, binomial and resolution forms agree to order "
          f"{args.order}: {same}")
    payload = {"n": args.n, "order": args.order, "dimensions": dims,
               "forms_agree": same}
    _emit(args, payload, _make_manifest(
        "characters", {"n": args.n, "order": args.order},
        {"pass": same}, t0))
    return 0 if same else 1


def cmd_fourier(args, t0) -> int:
    t = parse_coeffs(args.t)
    s = build_spectral(t)
    F = parse_poly(args.poly, genus=s.genus)
    kv = [int(v) for v in args.k.split(",")]
    if len(kv) != s.genus:
        raise ValueError(f"k needs {s.genus} entries for this curve")
    c = fourier_coefficient(s, F, kv if any(kv) else None)
    c = complex(c)
    payload = {"t": _coeff_list(t), "poly": args.poly, "k": kv,
               "coefficient": c, "abs": abs(c)}
    print(f"fourier coefficient k={kv} of {args.poly}: "
          f"{c.real:.12g} {c.imag:+.12g}i  (|c| = {abs(c):.12g})")
    _emit(args, payload, _make_manifest(
        "fourier", {"t": args.t, "poly": args.poly, "k": args.k},
        {"pass": True}, t0))
    return 0


# ---------------------------------------------------------------------------
# dispatch

def _add_json(sub, default_name):
    sub.add_argument("--json", dest="json_path", nargs="?",
                     const=default_name, default=None,
                     help="write results to a JSON file "
                          f"(default name {default_name})")


def _add_csv(sub, default_name):
    sub.add_argument("--csv", dest="csv_path", nargs="?",
                     const=default_name, default=None,
                     help="write samples to a CSV file "
                          f"(default name {default_name})")


def build_parser() -> _Parser:
    parser = _Parser(prog="todasov", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value parameter file; "
                        "command-line flags take precedence")
    subs = parser.add_subparsers(dest="command", metavar="command")

    p = subs.add_parser("periods", help="branch points, period matrix, "
                        "actions of a spectral curve")
    p.add_argument("--t", required=True,
                   help="conserved polynomial coefficients, constant first")
    p.add_argument("--nodes", type=int, default=None)
    _add_json(p, "periods.json")

    p = subs.add_parser("evolve", help="integrate one commuting flow")
    p.add_argument("--phase", required=True,
                   help="JSON file with fields p and q")
    p.add_argument("--flow", type=int, default=1)
    p.add_argument("--periods", type=float, default=1.0,
                   help="duration in turns of the fastest angle variable")
    p.add_argument("--samples", type=int, default=2001)
    _add_csv(p, "evolve.csv")

    p = subs.add_parser("quantize-bs", help="semiclassical level from "
                        "the action rule")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--nj", type=int, required=True)
    _add_json(p, "quantize-bs.json")

    p = subs.add_parser("quantize-exact", help="relative two-site "
                        "spectrum with Baxter residuals")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--levels", type=int, default=6)
    _add_json(p, "quantize-exact.json")

    p = subs.add_parser("qfunction", help="sample one Q function on a grid")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--grid", default="-10:10:0.01",
                   help="start:stop:step for the sample points")
    _add_csv(p, "qfunction.csv")

    p = subs.add_parser("matrix-element", help="normalized matrix element "
                        "between two levels")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--levels", required=True, help="two levels, e.g. 2,3")
    p.add_argument("--poly", default="b1",
                   help="coefficient list or b1 for the separation variable")
    _add_json(p, "matrix-element.json")

    p = subs.add_parser("verify-identities", help="run one verification "
                        "suite and report residuals")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", default=None,
                   help="write the identity report to this JSON file")

    p = subs.add_parser("characters", help="graded characters and the "
                        "equality of their three forms")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--order", type=int, default=40)
    _add_json(p, "characters.json")

    p = subs.add_parser("fourier", help="classical Fourier coefficient "
                        "on a spectral curve")
    p.add_argument("--t", required=True)
    p.add_argument("--poly", default="b1")
    p.add_argument("--k", default="1", help="integer harmonic vector")
    _add_json(p, "fourier.json")
    return parser


_RUNNERS = {
    "periods": cmd_periods,
    "evolve": cmd_evolve,
    "quantize-bs": cmd_quantize_bs,
    "quantize-exact": cmd_quantize_exact,
    "qfunction": cmd_qfunction,
    "matrix-element": cmd_matrix_element,
    "verify-identities": cmd_verify,
    "characters": cmd_characters,
    "fourier": cmd_fourier,
}

# config keys are applied per command only where a flag exists and was
# not given explicitly
_CONFIG_CASTS = {"hbar": float, "levels": str, "level": int, "nj": int,
                 "genus": int, "seed": int, "n": int, "order": int,
                 "nodes": int, "flow": int, "periods": float,
                 "samples": int, "t": str, "poly": str, "k": str,
                 "grid": str, "suite": str}

_HBAR_DEFAULT = 1.0


def dispatch(argv) -> int:
    t0 = time.monotonic()
    try:
        args = build_parser().parse_args(_merge_value_flags(list(argv)))
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    if args.command is None:
        build_parser().print_help()
        return 2
    try:
        if args.config:
            overrides = load_config(args.config)
            for key, raw in overrides.items():
                if key not in _CONFIG_CASTS:
                    raise ValueError(f"unknown config key {key!r}")
                if getattr(args, key, None) is None and hasattr(args, key):
                    setattr(args, key, _CONFIG_CASTS[key](raw))
        if getattr(args, "hbar", 0) is None:
            args.hbar = _HBAR_DEFAULT
        return _RUNNERS[args.command](args, t0)
    except (ValueError, OSError, TodaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
