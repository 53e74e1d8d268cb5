"""Scenario files: JSON descriptions of groups, fields, slices, and checks.

A scenario names a group and representation from the catalog, declares
fields/maps/points/slices/splittings, and lists checks to run.  The runner
executes every check in isolation (a failing or erroring check never aborts
its siblings), collects one record per check, and writes a JSON report plus
CSV artifacts.  Runs are deterministic given the seed: every check derives
its own RNG stream from the scenario seed and the check's position.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
import zlib

import numpy as np
import jsonschema

from . import flows, homotopy, isomorphism, slices, spectra
from .errors import ScenarioFormatError
from .groups import (
    AlgebraVector,
    equivariant_splitting,
    group_from_name,
    splitting_from_bases,
)
from .representations import (
    field_from_spec,
    map_from_spec,
    rep_from_spec,
    sample_points,
    sampled_equivariance_residual,
    sampled_invariance_residual,
)

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["name", "group", "representation", "checks"],
    "properties": {
        "name": {"type": "string"},
        "group": {"type": "string"},
        "representation": {},
        "seed": {"type": "integer"},
        "fields": {"type": "object"},
        "maps": {"type": "object"},
        "points": {"type": "object"},
        "algebra_vectors": {"type": "object"},
        "slices": {"type": "object"},
        "splittings": {"type": "object"},
        "output_dir": {"type": "string"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "properties": {"name": {"type": "string"}},
            },
        },
    },
}


class ScenarioContext:
    """Resolved objects of one scenario."""

    def __init__(self, data: dict, *, tol_scale: float = 1.0):
        self.data = data
        self.tol_scale = float(tol_scale)
        self.seed = int(data.get("seed", 0))
        self.group = group_from_name(data["group"])
        self.rep = rep_from_spec(self.group, data.get("representation", "standard"))
        self.points = {k: np.asarray(v, dtype=float)
                       for k, v in data.get("points", {}).items()}
        self.algebra_vectors = {
            k: AlgebraVector(self.group, v)
            for k, v in data.get("algebra_vectors", {}).items()}
        self.maps = {}
        for name, spec in data.get("maps", {}).items():
            self.maps[name] = map_from_spec(self.rep, spec, maps=self.maps)
        self.fields = {}
        for name, spec in data.get("fields", {}).items():
            self.fields[name] = field_from_spec(self.rep, spec,
                                                fields=self.fields, maps=self.maps)
        self.slices = {}
        for name, spec in data.get("slices", {}).items():
            self.slices[name] = slices.slice_from_spec(self.rep, spec, self.points)
        self.splittings = {}
        for name, spec in data.get("splittings", {}).items():
            self.splittings[name] = self._splitting(spec)

    def _splitting(self, spec):
        slc = self.slices[spec["slice"]]
        if "m_basis" in spec:
            return splitting_from_bases(self.group, slc.stab_coords,
                                        np.asarray(spec["m_basis"], dtype=float),
                                        slc.stab_component_gens)
        return equivariant_splitting(self.group, slc.stab_coords,
                                     slc.stab_component_gens)

    def tol(self, params, key, default):
        return float(params.get(key, default)) * self.tol_scale

    def rng_for(self, check_name: str, index: int):
        stream = (self.seed * 1000003 + zlib.crc32(f"{index}:{check_name}".encode())) % 2**31
        return np.random.default_rng(stream), stream


# -- individual checks ---------------------------------------------------------

def _check_field_invariance(ctx, params, rng, stream):
    X = ctx.fields[params["field"]]
    tol = ctx.tol(params, "tol", 1e-10)
    res = sampled_invariance_residual(X, seed=stream,
                                      n_group=int(params.get("n_group", 12)),
                                      n_points=int(params.get("n_points", 12)),
                                      radius=float(params.get("radius", 2.0)))
    return {"residuals": {"invariance": res}, "tolerances": {"invariance": tol},
            "pass": res <= tol}


def _check_map_equivariance(ctx, params, rng, stream):
    psi = ctx.maps[params["map"]]
    tol = ctx.tol(params, "tol", 1e-10)
    res = sampled_equivariance_residual(psi, seed=stream,
                                        n_group=int(params.get("n_group", 12)),
                                        n_points=int(params.get("n_points", 12)),
                                        radius=float(params.get("radius", 2.0)))
    return {"residuals": {"equivariance": res}, "tolerances": {"equivariance": tol},
            "pass": res <= tol}


def _check_isomorphism(ctx, params, rng, stream):
    X, Y = ctx.fields[params["X"]], ctx.fields[params["Y"]]
    psi = ctx.maps[params["psi"]]
    tol = ctx.tol(params, "tol", 1e-12)
    witness = isomorphism.verify_isomorphism(X, Y, psi, seed=stream,
                                             tolerance=tol,
                                             radius=float(params.get("radius", 2.0)))
    return {"residuals": {"witness": witness.verified_residual},
            "tolerances": {"witness": tol}, "pass": witness.valid}


def _check_witness_recovery(ctx, params, rng, stream):
    X, Y = ctx.fields[params["X"]], ctx.fields[params["Y"]]
    tol = ctx.tol(params, "tol", 1e-8)
    tol_eq = ctx.tol(params, "tol_equivariance", 1e-6)
    points = [ctx.points[p] for p in params["points"]] if "points" in params else \
        list(sample_points(rng, ctx.rep.dim_V, int(params.get("n_points", 12)),
                           float(params.get("radius", 2.0))))
    psi, residual, _ = isomorphism.recover_witness(X, Y, points)
    eq = sampled_equivariance_residual(psi, seed=stream, n_group=6, n_points=6,
                                       radius=float(params.get("radius", 2.0)))
    return {"residuals": {"recovery": residual, "equivariance": eq},
            "tolerances": {"recovery": tol, "equivariance": tol_eq},
            "pass": residual <= tol and eq <= tol_eq}


def _check_orbit_flow(ctx, params, rng, stream):
    X, Y = ctx.fields[params["X"]], ctx.fields[params["Y"]]
    t_end = float(params.get("t_end", 1.0))
    h = float(params.get("h", 1e-3))
    disc = isomorphism.orbit_flow_check(X, Y, t_end=t_end, h=h, seed=stream,
                                        n_points=int(params.get("n_points", 6)),
                                        radius=float(params.get("radius", 1.5)))
    if "expect_min" in params:
        floor = float(params["expect_min"])
        return {"residuals": {"discrepancy": disc},
                "tolerances": {"must_exceed": floor}, "pass": disc >= floor}
    tol = ctx.tol(params, "tol", 1e-6)
    return {"residuals": {"discrepancy": disc}, "tolerances": {"discrepancy": tol},
            "pass": disc <= tol}


def _check_gauge_identity(ctx, params, rng, stream):
    X, Y = ctx.fields[params["X"]], ctx.fields[params["Y"]]
    psi = ctx.maps[params["psi"]]
    t_end = float(params.get("t_end", 1.0))
    h = float(params.get("h", 1e-3))
    tol = ctx.tol(params, "tol", 1e-5)
    if "points" in params:
        points = [ctx.points[p] for p in params["points"]]
    else:
        base = ctx.points[params["around"]] if "around" in params else \
            np.zeros(ctx.rep.dim_V)
        spread = float(params.get("spread", 0.1))
        points = [base + spread * rng.normal(size=ctx.rep.dim_V)
                  for _ in range(int(params.get("n_points", 10)))]
    report = flows.verify_gauge_identity(X, Y, psi, points, t_end, h)
    residuals = {"sup_error": report.sup_error,
                 "membership_drift": report.membership_drift}
    tolerances = {"sup_error": tol}
    ok = report.sup_error <= tol
    if "ratio_h" in params:
        h0 = float(params["ratio_h"])
        coarse = flows.verify_gauge_identity(X, Y, psi, points, t_end, h0)
        fine = flows.verify_gauge_identity(X, Y, psi, points, t_end, h0 / 2.0)
        factor = coarse.sup_error / max(fine.sup_error, 1e-300)
        residuals["halving_factor"] = factor
        tolerances["halving_factor_min"] = float(params.get("min_factor", 12.0))
        ok = ok and factor >= tolerances["halving_factor_min"]
    return {"residuals": residuals, "tolerances": tolerances, "pass": ok,
            "artifact": {"kind": "gauge_errors", "t": report.t.tolist(),
                         "errors": report.errors.tolist()}}


def _check_relative_equilibrium(ctx, params, rng, stream):
    X = ctx.fields[params["X"]]
    x0 = ctx.points[params["x0"]]
    xi0 = ctx.algebra_vectors.get(params.get("xi0"))
    tol = ctx.tol(params, "tol", 1e-10)
    re = flows.find_relative_equilibrium(X, x0, xi0, tol=tol)
    return {"residuals": {"equation": re.residual}, "tolerances": {"equation": tol},
            "pass": re.residual <= tol,
            "details": {"x": re.x.tolist(), "xi": re.xi.coords.tolist()}}


def _check_stabilizer_census(ctx, params, rng, stream):
    expected = params["expected_dims"]
    expected_fixed = params.get("expected_fixed_dims")
    dims, fixed_dims = [], []
    for name in params["points"]:
        x = ctx.points[name]
        rows = slices.stabilizer_algebra(ctx.rep, x)
        gens = slices.stabilizer_component_gens(ctx.rep, x, rows)
        dims.append(int(rows.shape[0]))
        fixed_dims.append(int(spectra.fixed_subalgebra(ctx.group, rows, gens).dim))
    ok = dims == list(expected)
    if expected_fixed is not None:
        ok = ok and fixed_dims == list(expected_fixed)
    return {"residuals": {"stabilizer_dims": dims, "fixed_dims": fixed_dims},
            "tolerances": {"expected_dims": list(expected),
                           "expected_fixed_dims": expected_fixed},
            "pass": ok}


def _check_slice_decomposition(ctx, params, rng, stream):
    X = ctx.fields[params["X"]]
    slc = ctx.slices[params["slice"]]
    splitting = ctx.splittings.get(params.get("splitting")) or \
        slices.default_splitting(slc)
    tol = ctx.tol(params, "tol", 1e-10)
    worst = 0.0
    n = int(params.get("n_points", 10))
    for _ in range(n):
        s = rng.normal(size=slc.dim)
        s *= float(params.get("fraction", 0.3)) * slc.radius / max(np.linalg.norm(s), 1e-12)
        y = slc.point(s)
        xs, psi = slices.slice_decompose(X, slc, splitting, y)
        recon = xs + ctx.rep.delta_rho(psi.coords) @ y
        worst = max(worst, float(np.linalg.norm(recon - X(y))))
        worst = max(worst, slc.offslice_residual(slc.base_point + xs))
    return {"residuals": {"reconstruction": worst}, "tolerances": {"reconstruction": tol},
            "pass": worst <= tol}


def _check_slice_change_witness(ctx, params, rng, stream):
    X = ctx.fields[params["X"]]
    s1, s2 = ctx.slices[params["slice1"]], ctx.slices[params["slice2"]]
    splitting = ctx.splittings.get(params.get("splitting"))
    tol_mem = ctx.tol(params, "tol_membership", 1e-8)
    tol_id = ctx.tol(params, "tol_identity", 1e-7)
    report = slices.slice_change_witness(
        X, s1, s2, splitting, seed=stream,
        n_points=int(params.get("n_points", 20)),
        fraction=float(params.get("fraction", 0.3)))
    return {"residuals": {"membership": report.membership_residual,
                          "identity": report.identity_residual},
            "tolerances": {"membership": tol_mem, "identity": tol_id},
            "pass": (report.membership_residual <= tol_mem
                     and report.identity_residual <= tol_id)}


def _check_shift_identity(ctx, params, rng, stream):
    X = ctx.fields[params["X"]]
    Y = ctx.fields[params["Y"]]
    psi = ctx.maps[params["psi"]]
    tol = ctx.tol(params, "tol", 1e-6)
    res = spectra.shift_check(X, Y, psi)
    return {"residuals": {"shift": res}, "tolerances": {"shift": tol},
            "pass": res <= tol}


def _check_slice_spectra(ctx, params, rng, stream):
    X = ctx.fields[params["X"]]
    s1, s2 = ctx.slices[params["slice1"]], ctx.slices[params["slice2"]]
    sp1 = ctx.splittings.get(params.get("splitting1"))
    sp2 = ctx.splittings.get(params.get("splitting2"))
    comp = spectra.compare_slice_spectra(X, s1, s2, sp1, sp2)
    tol_mem = ctx.tol(params, "tol_membership", 1e-5)
    tol_re = ctx.tol(params, "tol_re", 1e-5)
    tol_comm = ctx.tol(params, "tol_commutation", 1e-6)
    residuals = {"membership": comp.membership_residual,
                 "max_re_diff": comp.max_re_diff,
                 "commutation": comp.commutation_residual,
                 "max_im_diff": float(comp.im_diffs.max()) if comp.im_diffs.size else 0.0,
                 "shift_real_bound": comp.shift_real_bound}
    tolerances = {"membership": tol_mem, "max_re_diff": tol_re,
                  "commutation": tol_comm}
    ok = (comp.membership_residual <= tol_mem and comp.max_re_diff <= tol_re
          and comp.commutation_residual <= tol_comm)
    if "tol_full" in params:
        full = max(abs(a - b) for a, b in comp.pairs)
        residuals["max_eig_diff"] = float(full)
        tolerances["max_eig_diff"] = ctx.tol(params, "tol_full", 1e-5)
        ok = ok and full <= tolerances["max_eig_diff"]
    if "expect_min_im_diff" in params:
        tolerances["min_im_diff"] = float(params["expect_min_im_diff"])
        ok = ok and residuals["max_im_diff"] >= tolerances["min_im_diff"]
    pairs = [[a.real, a.imag, b.real, b.imag] for a, b in comp.pairs]
    return {"residuals": residuals, "tolerances": tolerances, "pass": ok,
            "artifact": {"kind": "eigenvalue_pairs", "pairs": pairs}}


def _check_chain_homotopy(ctx, params, rng, stream):
    slc = ctx.slices[params["slice"]]
    splitting = ctx.splittings.get(params.get("splitting")) or \
        slices.default_splitting(slc)
    degrees = params.get("degrees", [0, 1, 2, 3])
    tol = ctx.tol(params, "tol", 1e-12)
    reports = []
    worst = 0.0
    all_ok = True
    for d in degrees:
        pair = homotopy.build_K(slc, splitting, int(d), ctx.rep)
        rep = homotopy.verify_homotopy_equivalence(pair, tol=tol)
        reports.append(rep)
        worst = max(worst, rep["max_residual"])
        all_ok = all_ok and rep["pass"]
    return {"residuals": {"max_identity_residual": worst},
            "tolerances": {"max_identity_residual": tol},
            "pass": all_ok,
            "details": {"per_degree": reports}}


CHECKS = {
    "field_invariance": (_check_field_invariance,
                         "X(g v) = rho(g) X(v)",
                         "sampled invariance residual of a vector field"),
    "map_equivariance": (_check_map_equivariance,
                         "psi(g v) = Ad(g) psi(v)",
                         "sampled equivariance residual of an algebra-valued map"),
    "isomorphism_witness": (_check_isomorphism,
                            "X = Y + psi_V with psi_V(v) = delta_rho(psi(v)) v",
                            "verifies a candidate isomorphism witness on samples"),
    "witness_recovery": (_check_witness_recovery,
                         "psi(v) = argmin_xi |delta_rho(xi) v - (X - Y)(v)|",
                         "pointwise least-squares witness on the free locus"),
    "orbit_flow": (_check_orbit_flow,
                   "f(Phi^X_t(v)) = f(Phi^Y_t(v)) for invariant f",
                   "isomorphic fields drive invariant functions identically"),
    "gauge_identity": (_check_gauge_identity,
                       "Phi^X_t(m) = F_t(m) . Phi^Y_t(m), dF/dt = psi(Phi^Y_t(m)) F",
                       "flows of witnessed-isomorphic fields differ by a group gauge"),
    "relative_equilibrium": (_check_relative_equilibrium,
                             "X(x) = delta_rho(xi) x",
                             "gauge-fixed Newton solve for a relative equilibrium"),
    "stabilizer_census": (_check_stabilizer_census,
                          "h = ker(xi -> delta_rho(xi) x), h^H = Ad(H)-fixed part",
                          "stabilizer algebra and fixed-subalgebra dimensions"),
    "slice_decomposition": (_check_slice_decomposition,
                            "X(y) = X^S(y) + delta_rho(psi^S(y)) y, X^S tangent",
                            "pointwise slice/orbit decomposition of a field"),
    "slice_change_witness": (_check_slice_change_witness,
                             "X^S'(y') - Tphi(X^S)(y) = delta_rho(nu(y')) y', nu in h",
                             "slice-change witness membership and identity"),
    "shift_identity": (_check_shift_identity,
                       "DX(0) = DY(0) + delta_rho(psi(0))",
                       "linearizations at a fixed equilibrium shift by delta_rho(psi(0))"),
    "slice_spectra": (_check_slice_spectra,
                      "D2 - T D1 T^-1 in delta_rho(h^H); equal real parts",
                      "slice-independence of linearization spectra"),
    "chain_homotopy": (_check_chain_homotopy,
                       "K0 d = d K1, p K = id, id - K p = d h + h d, coker iso",
                       "chain homotopy equivalence on polynomial truncations"),
}


def run_checks(ctx: ScenarioContext):
    records = []
    for index, check in enumerate(ctx.data["checks"]):
        name = check["name"]
        start = time.perf_counter()
        record = {"check": name, "id": check.get("id", f"{index}:{name}")}
        if name not in CHECKS:
            record.update({"pass": False, "error": f"unknown check {name!r}",
                           "residuals": {}, "tolerances": {}})
        else:
            rng, stream = ctx.rng_for(name, index)
            try:
                result = CHECKS[name][0](ctx, check, rng, stream)
                record.update(result)
                record.setdefault("error", None)
            except Exception as exc:   # isolation: a failing check never aborts siblings
                record.update({"pass": False, "residuals": {}, "tolerances": {},
                               "error": f"{type(exc).__name__}: {exc}"})
        record["wall_time_s"] = time.perf_counter() - start
        records.append(record)
    return records


def _canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def run_scenario(scenario, *, seed=None, output_dir=None, tol_scale=1.0):
    """Run a scenario given as dict, builtin name, or file path.

    Returns the report dict; writes ``report.json`` and CSV artifacts to the
    output directory when one is configured.  Exit-status semantics live in
    the CLI: 0 all pass, 1 check failure, 2 parse error.
    """
    data = load_scenario(scenario)
    if seed is not None:
        data = dict(data)
        data["seed"] = int(seed)
    ctx = ScenarioContext(data, tol_scale=tol_scale)
    records = run_checks(ctx)
    digest = hashlib.sha256(_canonical_json(data).encode()).hexdigest()
    report = {
        "scenario": {"name": data["name"], "digest": digest, "seed": ctx.seed,
                     "group": data["group"]},
        "checks": [{k: v for k, v in r.items() if k != "artifact"} for r in records],
        "overall_pass": all(r.get("pass", False) for r in records),
    }
    out = output_dir or data.get("output_dir")
    files = []
    if out:
        os.makedirs(out, exist_ok=True)
        for record in records:
            artifact = record.get("artifact")
            if not artifact:
                continue
            name = record["id"].replace(":", "_").replace("/", "_")
            path = os.path.join(out, f"{name}.csv")
            _write_artifact_csv(artifact, path)
            files.append(os.path.basename(path))
        report["files"] = sorted(files) + ["report.json"]
        _atomic_write(os.path.join(out, "report.json"),
                      json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report


def _write_artifact_csv(artifact, path):
    kind = artifact.get("kind")
    if kind == "gauge_errors":
        t = np.asarray(artifact["t"])
        errors = np.asarray(artifact["errors"])
        header = "t," + ",".join(f"err_point_{i + 1}" for i in range(errors.shape[0]))
        _atomic_write(path, header + "\n" + "\n".join(
            ",".join(f"{x:.17g}" for x in np.concatenate([[t[j]], errors[:, j]]))
            for j in range(t.shape[0])) + "\n")
    elif kind == "eigenvalue_pairs":
        rows = artifact["pairs"]
        header = "re_1,im_1,re_2,im_2"
        _atomic_write(path, header + "\n" + "\n".join(
            ",".join(f"{x:.17g}" for x in row) for row in rows) + "\n")


def load_scenario(scenario) -> dict:
    """Normalize a scenario reference (dict, builtin name, or path) to a dict."""
    if isinstance(scenario, dict):
        data = scenario
    elif isinstance(scenario, str) and scenario in BUILTIN_SCENARIOS:
        data = BUILTIN_SCENARIOS[scenario]()
    else:
        try:
            with open(scenario) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ScenarioFormatError(f"cannot read scenario: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioFormatError(
                f"scenario is not valid JSON (line {exc.lineno}, column {exc.colno}): "
                f"{exc.msg}") from exc
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ScenarioFormatError(
            f"scenario failed schema validation at {exc.json_path}: {exc.message}") from exc
    return data


# -- built-in scenarios ---------------------------------------------------------

def _norm2_cubic_tensor(dim):
    """Coefficients of the invariant cubic |v|^2 v as a dense tensor."""
    T = np.zeros((dim,) * 4)
    for i in range(dim):
        for j in range(dim):
            T[i, j, j, i] += 1.0
    return T


def so2_minimal() -> dict:
    """SO(2) on the plane: the minimal witnessed-isomorphic pair and its checks."""
    cubic = _norm2_cubic_tensor(2).tolist()
    return {
        "name": "so2_minimal",
        "group": "SO2",
        "representation": "standard",
        "seed": 7,
        "points": {"origin": [0.0, 0.0], "unit_x": [1.0, 0.0]},
        "maps": {
            "psi": {"kind": "constant", "coords": [1.0]},
            "psi_shift": {"kind": "constant", "coords": [0.25]},
        },
        "fields": {
            "X": {"kind": "linear", "matrix": [[1.0, -1.0], [1.0, 1.0]]},
            "Y": {"kind": "linear", "matrix": [[1.0, 0.0], [0.0, 1.0]]},
            "Y_double": {"kind": "linear", "matrix": [[2.0, 0.0], [0.0, 2.0]]},
            "X_shift": {"kind": "linear", "matrix": [[0.5, -1.0], [1.0, 0.5]]},
            "Y_shift": {"kind": "sum", "terms": [
                {"ref": "X_shift"}, {"map_ref": "psi_shift", "scale": -1.0}]},
            "X_cubic": {"kind": "sum", "terms": [
                {"ref": "X_shift"},
                {"of": {"kind": "polynomial", "coeffs": {"3": cubic}}}]},
            "Y_cubic": {"kind": "sum", "terms": [
                {"ref": "X_cubic"}, {"map_ref": "psi_shift", "scale": -1.0}]},
        },
        "checks": [
            {"name": "field_invariance", "field": "X", "tol": 1e-10},
            {"name": "map_equivariance", "map": "psi", "tol": 1e-12},
            {"name": "isomorphism_witness", "X": "X", "Y": "Y", "psi": "psi",
             "tol": 1e-12},
            {"name": "witness_recovery", "X": "X", "Y": "Y", "tol": 1e-8,
             "tol_equivariance": 1e-6},
            {"name": "orbit_flow", "X": "X", "Y": "Y", "tol": 1e-6},
            {"name": "orbit_flow", "X": "X", "Y": "Y_double", "expect_min": 0.1,
             "id": "orbit_flow_control"},
            {"name": "gauge_identity", "X": "X", "Y": "Y", "psi": "psi",
             "t_end": 1.0, "h": 1e-3, "tol": 1e-5, "n_points": 10,
             "around": "unit_x", "spread": 0.2,
             "ratio_h": 0.03125, "min_factor": 12.0},
            {"name": "shift_identity", "X": "X_shift", "Y": "Y_shift",
             "psi": "psi_shift", "tol": 1e-10},
            {"name": "shift_identity", "X": "X_cubic", "Y": "Y_cubic",
             "psi": "psi_shift", "tol": 1e-6, "id": "shift_cubic"},
        ],
    }


def central_force_o3() -> dict:
    """O(3) on positions+velocities with the inverse-square central force."""
    return {
        "name": "central_force_o3",
        "group": "O3",
        "representation": "double",
        "seed": 11,
        "points": {
            "origin": [0, 0, 0, 0, 0, 0],
            "axis": [1, 0, 0, 0, 0, 0],
            "circular": [1, 0, 0, 0, 1, 0],
        },
        "algebra_vectors": {"Lz": [0.0, 0.0, 1.0]},
        "maps": {"psi": {"kind": "angular_momentum"}},
        "fields": {
            "X": {"kind": "central_force", "k": 1.0, "p": 3.0, "mass": 1.0},
            "Y": {"kind": "sum", "terms": [
                {"ref": "X"}, {"map_ref": "psi", "scale": -1.0}]},
        },
        "slices": {
            "S_re": {"base_point": "circular", "radius": 0.8},
            "S_re_tilted": {"base_point": "circular", "radius": 0.8,
                            "tilt": {"seed": 3, "scale": 0.15}},
        },
        "checks": [
            {"name": "map_equivariance", "map": "psi", "tol": 1e-10, "radius": 1.5},
            {"name": "isomorphism_witness", "X": "X", "Y": "Y", "psi": "psi",
             "tol": 1e-12, "radius": 1.5},
            {"name": "relative_equilibrium", "X": "X", "x0": "circular",
             "xi0": "Lz", "tol": 1e-10},
            {"name": "stabilizer_census",
             "points": ["origin", "axis", "circular"],
             "expected_dims": [3, 1, 0], "expected_fixed_dims": [0, 0, 0]},
            {"name": "slice_decomposition", "X": "X", "slice": "S_re",
             "tol": 1e-10, "fraction": 0.25},
            {"name": "gauge_identity", "X": "X", "Y": "Y", "psi": "psi",
             "t_end": 1.0, "h": 1e-3, "tol": 1e-5, "n_points": 10,
             "around": "circular", "spread": 0.05,
             "ratio_h": 0.01, "min_factor": 12.0},
            {"name": "orbit_flow", "X": "X", "Y": "Y", "tol": 1e-6,
             "radius": 0.05, "n_points": 4},
            {"name": "slice_spectra", "X": "X", "slice1": "S_re",
             "slice2": "S_re_tilted", "tol_membership": 1e-5, "tol_re": 1e-5,
             "tol_full": 1e-5},
        ],
    }


def harmonic_o3_slices() -> dict:
    """Harmonic central force: generic orbit type, two tilted slices."""
    return {
        "name": "harmonic_o3_slices",
        "group": "O3",
        "representation": "double",
        "seed": 13,
        "points": {"re": [1, 0, 0, 0, 1, 0]},
        "algebra_vectors": {"Lz": [0.0, 0.0, 1.0]},
        "fields": {"X": {"kind": "central_force", "k": 1.0, "p": 0.0, "mass": 1.0}},
        "slices": {
            "S1": {"base_point": "re", "radius": 0.8,
                   "tilt": {"seed": 5, "scale": 0.12}},
            "S2": {"base_point": "re", "radius": 0.8,
                   "tilt": {"seed": 9, "scale": 0.15}},
        },
        "checks": [
            {"name": "relative_equilibrium", "X": "X", "x0": "re", "xi0": "Lz",
             "tol": 1e-10},
            {"name": "slice_change_witness", "X": "X", "slice1": "S1",
             "slice2": "S2", "n_points": 20, "tol_membership": 1e-8,
             "tol_identity": 1e-7, "fraction": 0.25},
            {"name": "slice_spectra", "X": "X", "slice1": "S1", "slice2": "S2",
             "tol_membership": 1e-5, "tol_re": 1e-5, "tol_full": 1e-5},
        ],
    }


def o3_axis_slices() -> dict:
    """O(2) orbit type of the central-force system: slice change with h != 0."""
    return {
        "name": "o3_axis_slices",
        "group": "O3",
        "representation": "double",
        "seed": 17,
        "points": {"axis": [1, 0, 0, 0, 0, 0]},
        "fields": {"X": {"kind": "central_force", "k": 1.0, "p": 0.0, "mass": 1.0}},
        "slices": {
            "S1": {"base_point": "axis", "radius": 0.8},
            "S2": {"base_point": "axis", "radius": 0.8,
                   "tilt": {"seed": 2, "scale": 0.12}},
        },
        "checks": [
            {"name": "stabilizer_census", "points": ["axis"],
             "expected_dims": [1], "expected_fixed_dims": [0]},
            {"name": "slice_change_witness", "X": "X", "slice1": "S1",
             "slice2": "S2", "n_points": 20, "tol_membership": 1e-8,
             "tol_identity": 1e-7, "fraction": 0.25},
        ],
    }


def so2_on_r4() -> dict:
    """Fixed point with a circle stabilizer acting on R^4: nonzero h^H shift.

    The group is the 2-torus; the base point's stabilizer is the second
    circle factor, an SO(2) acting nontrivially on the slice.  Two
    splittings differing by a graph map produce slice linearizations whose
    real parts agree while imaginary parts shift by delta_rho of an
    h^H element.
    """
    return {
        "name": "so2_on_r4",
        "group": "T2",
        "representation": "standard",
        "seed": 19,
        "points": {"re": [1.0, 0.0, 0.0, 0.0]},
        "fields": {"X": {"kind": "hopf", "mu": 0.3, "omega": 1.0,
                         "lam_re": -0.2, "lam_im": 0.7}},
        "slices": {"S": {"base_point": "re", "radius": 0.8}},
        "splittings": {
            "orthogonal": {"slice": "S"},
            "graph": {"slice": "S", "m_basis": [[1.0, 0.4]]},
        },
        "checks": [
            {"name": "field_invariance", "field": "X", "tol": 1e-10},
            {"name": "relative_equilibrium", "X": "X", "x0": "re", "tol": 1e-10},
            {"name": "slice_spectra", "X": "X", "slice1": "S", "slice2": "S",
             "splitting1": "orthogonal", "splitting2": "graph",
             "tol_membership": 1e-5, "tol_re": 1e-5,
             "expect_min_im_diff": 1e-2},
        ],
    }


def so2_tube_chain() -> dict:
    """SO(2) acting on the plane as its own tube over the ray slice."""
    return {
        "name": "so2_tube_chain",
        "group": "SO2",
        "representation": "standard",
        "seed": 23,
        "points": {"x": [1.0, 0.0]},
        "slices": {"S": {"base_point": "x", "radius": 0.9}},
        "checks": [
            {"name": "chain_homotopy", "slice": "S", "degrees": [0, 1, 2, 3],
             "tol": 1e-12},
        ],
    }


def z2_line_chain() -> dict:
    """The two-element group acting by sign on the line: odd fields only."""
    return {
        "name": "z2_line_chain",
        "group": "Zn:2",
        "representation": "sign_line",
        "seed": 29,
        "points": {"x": [0.0]},
        "slices": {"S": {"base_point": "x", "radius": 1.0}},
        "checks": [
            {"name": "chain_homotopy", "slice": "S", "degrees": [0, 1, 2, 3],
             "tol": 1e-12},
        ],
    }


def o3_axis_chain() -> dict:
    """Chain complexes at the O(2) orbit type of the central-force system."""
    return {
        "name": "o3_axis_chain",
        "group": "O3",
        "representation": "double",
        "seed": 31,
        "points": {"axis": [1, 0, 0, 0, 0, 0]},
        "slices": {"S": {"base_point": "axis", "radius": 0.8}},
        "checks": [
            {"name": "chain_homotopy", "slice": "S", "degrees": [0, 1, 2, 3],
             "tol": 1e-12},
        ],
    }


BUILTIN_SCENARIOS = {
    "so2_minimal": so2_minimal,
    "central_force_o3": central_force_o3,
    "harmonic_o3_slices": harmonic_o3_slices,
    "o3_axis_slices": o3_axis_slices,
    "so2_on_r4": so2_on_r4,
    "so2_tube_chain": so2_tube_chain,
    "z2_line_chain": z2_line_chain,
    "o3_axis_chain": o3_axis_chain,
}

FIELD_KINDS = ["linear", "polynomial", "central_force", "hopf", "induced", "sum"]
MAP_KINDS = ["constant", "angular_momentum", "sum"]


def list_builtins() -> dict:
    """Stable catalog listing: groups, field kinds, checks, scenarios."""
    from .groups import catalog_names
    return {
        "groups": catalog_names(),
        "field_kinds": sorted(FIELD_KINDS),
        "map_kinds": sorted(MAP_KINDS),
        "checks": sorted(CHECKS),
        "scenarios": sorted(BUILTIN_SCENARIOS),
    }
