"""JSON encoding and decoding of the library's objects.

Decoders raise PreconditionError with a violation list on malformed input,
so the CLI can map every schema problem to exit status 2.
"""

from __future__ import annotations

import json

from .errors import PreconditionError
from .linalg import Matrix
from .rings import FieldSpec

SCHEMA_VERSION = "1.0"


def _need(data, key, where):
    if not isinstance(data, dict) or key not in data:
        raise PreconditionError(f"{where}: missing field {key!r}",
                                [{"kind": "schema", "where": where, "missing": key}])
    return data[key]


def _int(x, where):
    if isinstance(x, bool) or not isinstance(x, int):
        raise PreconditionError(f"{where}: expected an integer, got {x!r}",
                                [{"kind": "schema", "where": where, "expected": "integer"}])
    return x


def field_from_json(data) -> FieldSpec:
    ell = _int(_need(data, "ell", "field"), "field.ell")
    r = _int(data.get("r", 1), "field.r")
    modulus = data.get("modulus")
    return FieldSpec(ell, r, tuple(modulus) if modulus is not None else None)


def field_to_json(spec: FieldSpec) -> dict:
    out = {"ell": spec.ell, "r": spec.r}
    if spec.r > 1:
        out["modulus"] = list(spec.modulus)
    return out


def ring_from_json(data):
    """Residue field, or W_m when an "m" > 1 is present."""
    k = field_from_json(data)
    m = _int(data.get("m", 1), "m")
    if m < 1:
        raise PreconditionError("m must be >= 1", [{"kind": "schema", "where": "m"}])
    return k if m == 1 else k.witt(m)


def matrix_from_json(ring, rows, where="matrix") -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise PreconditionError(f"{where}: expected a list of rows",
                                [{"kind": "schema", "where": where, "expected": "matrix"}])
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise PreconditionError(f"{where}: ragged rows", [{"kind": "schema", "where": where}])
    try:
        return Matrix(ring, [[ring(a) for a in r] for r in rows], widths.pop() if widths else 0)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"{where}: bad entry ({exc})", [{"kind": "schema", "where": where}])


def pair_from_json(data, where="pair"):
    from .tame import TamePair

    ring = ring_from_json(data)
    q = _int(_need(data, "q", where), f"{where}.q")
    tau = matrix_from_json(ring, _need(data, "tau", where), f"{where}.tau")
    sigma = matrix_from_json(ring, _need(data, "sigma", where), f"{where}.sigma")
    return TamePair(q, tau, sigma)


def pair_to_json(p) -> dict:
    out = field_to_json(p.field)
    out.update({"q": p.q, "m": p.m, "tau": p.tau.to_json(), "sigma": p.sigma.to_json()})
    return out


def module_from_json(data, where="module"):
    from .cohom import LocalModule

    k = field_from_json(data)
    q = _int(_need(data, "q", where), f"{where}.q")
    phi = matrix_from_json(k, _need(data, "phi", where), f"{where}.phi")
    iota = matrix_from_json(k, _need(data, "iota", where), f"{where}.iota")
    if phi.shape != iota.shape or phi.n_rows != phi.n_cols:
        raise PreconditionError(f"{where}: phi and iota must be square of equal size",
                                [{"kind": "schema", "where": where}])
    return LocalModule(k, q, phi, iota, data.get("derived_from"))


def group_from_json(data, where="group"):
    """Either {"table": [[..]], "action": [M_0, ...]} or {"generators": [M, ...]}."""
    from .cocycle import FiniteGroupData

    k = field_from_json(data)
    if "table" in data:
        table = data["table"]
        n = len(table)
        if not all(isinstance(r, list) and len(r) == n and all(isinstance(x, int) and 0 <= x < n for x in r)
                   for r in table):
            raise PreconditionError(f"{where}: table must be an n x n array of indices < n",
                                    [{"kind": "schema", "where": f"{where}.table"}])
        action = _need(data, "action", where)
        if len(action) != n:
            raise PreconditionError(f"{where}: need one action matrix per element",
                                    [{"kind": "schema", "where": f"{where}.action"}])
        mats = [matrix_from_json(k, a, f"{where}.action[{i}]") for i, a in enumerate(action)]
        return FiniteGroupData.from_table(k, table, mats, data.get("generators"))
    gens = _need(data, "generators", where)
    mats = [matrix_from_json(k, a, f"{where}.generators[{i}]") for i, a in enumerate(gens)]
    return FiniteGroupData.from_matrices(k, mats, limit=data.get("limit", 2000))


def load_input(arg: str):
    """Parse --input: inline JSON when it starts with '{' or '[', else a file path."""
    text = arg.strip()
    try:
        if text.startswith("{") or text.startswith("["):
            return json.loads(text)
        with open(arg, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise PreconditionError(f"cannot read input: {exc}", [{"kind": "io", "detail": str(exc)}])
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"input is not valid JSON: {exc}",
                                [{"kind": "schema", "detail": str(exc)}])


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
