"""Global dimension bookkeeping for deformation problems.

Everything here is integer arithmetic on per-place dimension records:
Wiles' Euler-characteristic difference, the tangent space inequality,
the relation count bound, the "big image" thresholds on ell, the
dimension count behind the N-2 variable bound, and the classification of
local shapes for GL_3 over Q.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PreconditionError
from .rings import is_prime, multiplicative_order_mod

PLACE_KINDS = ("finite", "above_ell", "real", "complex")


@dataclass(frozen=True)
class LocalDatum:
    """Dimension record for one place.

    ``in_sigma`` marks membership of the ramification set; places outside it
    carry the unramified condition, so dim_T = dim_h0 and gen_Jv = 0 there.
    """

    label: str
    kind: str
    dim_T: int = 0
    dim_h0: int = 0
    smooth: bool = True
    gen_Jv: int = 0
    in_sigma: bool = True

    def violations(self) -> list[dict]:
        out = []
        if self.kind not in PLACE_KINDS:
            out.append({"kind": "unknown_place_kind", "label": self.label, "value": self.kind})
        if min(self.dim_T, self.dim_h0, self.gen_Jv) < 0:
            out.append({"kind": "negative_dimension", "label": self.label})
        if self.kind in ("real", "complex") and self.dim_T != 0:
            out.append({"kind": "archimedean_tangent_nonzero", "label": self.label})
        if not self.in_sigma:
            if self.gen_Jv != 0:
                out.append({"kind": "relations_outside_sigma", "label": self.label})
            if self.kind in ("finite", "above_ell") and self.dim_T != self.dim_h0:
                out.append({"kind": "unbalanced_outside_sigma", "label": self.label})
        if self.smooth and self.gen_Jv != 0:
            out.append({"kind": "smooth_with_relations", "label": self.label})
        return out

    @property
    def is_archimedean(self) -> bool:
        return self.kind in ("real", "complex")


@dataclass(frozen=True)
class GlobalProblem:
    N: int
    degree: int
    data: tuple = ()
    dual_selmer_dim: int = 0
    ell: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "data", tuple(self.data))
        bad = self.violations()
        if bad:
            raise PreconditionError(f"invalid global problem: {bad[0]['kind']}", bad)

    def violations(self) -> list[dict]:
        out = []
        if self.N < 2:
            out.append({"kind": "N_too_small", "N": self.N})
        if self.degree < 1:
            out.append({"kind": "degree_too_small", "degree": self.degree})
        if self.ell is not None and (self.ell == 2 or not is_prime(self.ell)):
            out.append({"kind": "bad_ell", "ell": self.ell})
        if self.dual_selmer_dim < 0:
            out.append({"kind": "negative_dual_selmer"})
        labels = [d.label for d in self.data]
        if len(set(labels)) != len(labels):
            out.append({"kind": "duplicate_place"})
        n_real = sum(1 for d in self.data if d.kind == "real")
        n_complex = sum(1 for d in self.data if d.kind == "complex")
        if n_real + 2 * n_complex > self.degree:
            out.append({"kind": "too_many_archimedean_places"})
        for d in self.data:
            out.extend(d.violations())
        return out

    def sigma(self):
        return [d for d in self.data if d.in_sigma]


def wiles_difference(p: GlobalProblem) -> int:
    """Sum over all listed places of dim T_v - dim H^0_v (dim T = 0 at infinity)."""
    return sum(d.dim_T - d.dim_h0 for d in p.data)


def tangent_inequality(p: GlobalProblem):
    """(holds, margin) for sum dim T >= (N-2) + sum dim H^0 over the ramification set."""
    s = p.sigma()
    margin = sum(d.dim_T for d in s) - (p.N - 2) - sum(d.dim_h0 for d in s)
    return margin >= 0, margin


def infinity_h0(N: int, m: int) -> int:
    """dim H^0(R, ad0) when complex conjugation has m eigenvalues +1."""
    if not 0 <= m <= N:
        raise PreconditionError(f"need 0 <= m <= N, got m={m}, N={N}")
    return m * m + (N - m) ** 2 - 1


def smooth_variable_count(p: GlobalProblem, main_hypotheses: bool = False) -> int:
    """Number of power-series variables once the problem is smooth."""
    rough = [d.label for d in p.data if not d.is_archimedean and not d.smooth]
    if rough:
        raise PreconditionError(f"non-smooth places: {rough}",
                                [{"kind": "non_smooth_place", "labels": rough}])
    s = p.sigma()
    count = sum(d.dim_T for d in s) - sum(d.dim_h0 for d in s)
    if main_hypotheses and count < p.N - 2:
        raise PreconditionError(f"variable count {count} below N-2 = {p.N - 2}")
    return count


def relation_bound(p: GlobalProblem) -> int:
    """Upper bound on generators of the relation ideal: local relations plus dual Selmer."""
    return sum(d.gen_Jv for d in p.data) + p.dual_selmer_dim


# ---------------------------------------------------------------------------
# thresholds on ell

@dataclass(frozen=True)
class BigCheckInput:
    ell: int
    N: int
    degree: int = 1
    d: int | None = None
    e: int | None = None
    gl3_cos2pi7_excluded: bool = False

    def violations(self) -> list[dict]:
        out = []
        if not is_prime(self.ell):
            out.append({"kind": "ell_not_prime", "ell": self.ell})
        if self.N < 2 or self.degree < 1:
            out.append({"kind": "bad_dimensions"})
        if (self.d is None) != (self.e is None):
            out.append({"kind": "d_and_e_must_be_given_together"})
        if self.d is not None:
            if self.d < 1 or self.e < 1:
                out.append({"kind": "d_e_positive"})
            else:
                if (self.ell - 1) % self.e:
                    out.append({"kind": "e_does_not_divide_ell_minus_1", "e": self.e})
                if self.d > self.N:
                    out.append({"kind": "d_exceeds_N", "d": self.d})
                if self.degree * self.d < self.e:
                    out.append({"kind": "e_exceeds_degree_times_d", "e": self.e})
        return out


def big_check(inp: BigCheckInput) -> dict:
    """Evaluate each sufficient condition for big image separately."""
    bad = inp.violations()
    if bad:
        raise PreconditionError(f"invalid big_check input: {bad[0]['kind']}", bad)
    ell, N, deg = inp.ell, inp.N, inp.degree
    criteria = {}
    if inp.d is not None:
        C = max(5, 2 * inp.e * inp.d * N + 1)
        criteria["i"] = {"formula": "max(5, 2*e*d*N+1)", "threshold": C, "pass": ell > C}
    else:
        criteria["i"] = {"formula": "max(5, 2*e*d*N+1)", "threshold": None, "pass": None}
    t2 = 2 * deg * N ** 3 + 1
    criteria["ii"] = {"formula": "2*deg*N^3+1", "threshold": t2, "pass": ell > t2}
    t3 = N ** (3 * deg * N)
    criteria["iii"] = {"formula": "N^(3*deg*N)", "threshold": t3, "pass": ell > t3}
    if N == 3 and deg == 1:
        ok = ell >= 7 and (ell != 7 or inp.gl3_cos2pi7_excluded)
        criteria["iv"] = {"formula": "ell>=7 and (ell!=7 or cos(2pi/7) excluded)",
                          "threshold": 7, "pass": ok}
    else:
        criteria["iv"] = {"formula": "ell>=7 and (ell!=7 or cos(2pi/7) excluded)",
                          "threshold": None, "pass": None}
    fired = [name for name, c in criteria.items() if c["pass"]]
    return {"big": bool(fired), "fired": fired, "criteria": criteria}


# ---------------------------------------------------------------------------
# main dimension count

def main_theorem_ledger(N: int, deg: int, m: int, ell_places=None, h3_flag: bool = True) -> dict:
    """The chain ell-term - archimedean bound = 2m(N-m) >= 2(N-1) >= N-2."""
    ell_places = [deg] if ell_places is None else list(ell_places)
    if N < 2:
        raise PreconditionError("N must be >= 2")
    if sum(ell_places) != deg or any(f < 1 for f in ell_places):
        raise PreconditionError(f"local degrees {ell_places} do not sum to [F:Q]={deg}")
    if not 1 <= m <= N - 1:
        raise PreconditionError(
            f"m={m} outside [1, N-1]: complex conjugation would act by a scalar",
            [{"kind": "totally_even", "m": m}])
    if not h3_flag:
        raise PreconditionError("the vanishing hypothesis at primes above ell must be set")
    ad0 = N * N - 1
    per_place = [f * ad0 for f in ell_places]
    ell_term = sum(per_place)
    inf_distinguished = infinity_h0(N, m)
    inf_bound = (deg - 1) * ad0 + inf_distinguished
    margin = ell_term - inf_bound
    closed = 2 * m * (N - m)
    if margin != closed:
        raise AssertionError("dimension chain does not close")
    # the same count as a place-by-place problem, with the archimedean bound attained
    data = [LocalDatum(f"v|ell#{i}", "above_ell", dim_T=x, dim_h0=0) for i, x in enumerate(per_place)]
    data.append(LocalDatum("inf_R", "real", dim_h0=inf_distinguished))
    # remaining real places with scalar complex conjugation attain dim H^0 = N^2-1
    data += [LocalDatum(f"inf#{i}", "real", dim_h0=ad0) for i in range(1, deg)]
    prob = GlobalProblem(N, deg, data)
    ok, tmargin = tangent_inequality(prob)
    if wiles_difference(prob) != margin:
        raise AssertionError("place-by-place count disagrees with the closed form")
    variables = smooth_variable_count(prob)
    return {
        "N": N,
        "degree": deg,
        "m": m,
        "ell_places": ell_places,
        "ell_term": ell_term,
        "ell_term_formula": "[F_v:Q_ell](N^2-1) summed over v|ell",
        "infinity_h0": inf_distinguished,
        "infinity_h0_formula": "m^2+(N-m)^2-1",
        "infinity_bound": inf_bound,
        "infinity_bound_formula": "(deg-1)(N^2-1)+m^2+(N-m)^2-1",
        "infinity_term": inf_bound,
        "margin": margin,
        "margin_formula": "2m(N-m)",
        "margin_at_least_2(N-1)": margin >= 2 * (N - 1),
        "m(N-m)>=N-1": m * (N - m) >= N - 1,
        "tangent_inequality": ok,
        "tangent_margin": tmargin,
        "variables": variables,
        "variables_lower_bound": N - 2,
        "variables_ok": variables >= N - 2,
    }


# ---------------------------------------------------------------------------
# GL_3 over Q: local shapes at p in {2, 3, ell}

SHAPE_PATTERNS = {
    "a": ((1, 1, 1), (0, 1, 1), (0, 0, 1)),
    "b": ((1, 1, 1), (1, 1, 1), (0, 0, 1)),
    "c": ((1, 1, 1), (0, 1, 1), (0, 1, 1)),
}


def pattern_dim(pattern) -> int:
    """Trace-zero matrices supported on the pattern (which contains the diagonal)."""
    return sum(sum(row) for row in pattern) - 1


@dataclass(frozen=True)
class EllShapeGL3:
    """Local shape of a 3-dim residual representation at the prime p.

    shape_type "A": diagonal (1, w, w^2) up to an unramified twist.
    shape_type "B": diagonal (1, eps, w); ``epsilon`` is the exponent j with
    eps = w^j, or None when eps is not a power of w.
    shape_type "C": irreducible with rho ~ rho(1).
    ``x_split`` / ``z_split`` record whether those extension classes split
    (None when unknown).
    """

    ell: int
    p: int
    shape_type: str
    epsilon: int | None = None
    epsilon_ramified: bool = False
    x_split: bool | None = None
    z_split: bool | None = None

    def omega_order(self) -> int:
        if self.p == self.ell:
            return self.ell - 1
        return multiplicative_order_mod(self.p, self.ell)


def classify_ell_gl3(shape: EllShapeGL3) -> dict:
    ell, p = shape.ell, shape.p
    if not is_prime(ell) or ell < 7:
        raise PreconditionError(f"need a prime ell >= 7, got {ell}")
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if p not in (2, 3) and p != ell:
        raise PreconditionError(
            f"p={p}: only p in {{2, 3, ell}} need a special local condition",
            [{"kind": "uninteresting_prime", "p": p}])
    o = shape.omega_order()
    t = shape.shape_type
    obligations = []
    if t == "C":
        if o not in (1, 3):
            raise PreconditionError(
                "Comparing determinants gives omega-bar^3=1, which fails here",
                [{"kind": "type_c_determinant", "p": p, "ell": ell, "omega_order": o}])
        return {
            "type": "C", "p": p, "ell": ell, "omega_order": o,
            "case": "E1", "pattern": None, "dim_N": None,
            "admissible": True,
            "obligations": ["rho_p absolutely irreducible and induced from a character"],
        }
    if o in (1, 2, 3):
        # omega^-1 and omega^2 (or omega) coincide; the cases below are not distinct
        raise PreconditionError("the upper-triangular constructions need omega-bar^3 != 1",
                                [{"kind": "omega_cubed_trivial", "p": p, "ell": ell}])
    if t == "A":
        if shape.epsilon is not None:
            raise PreconditionError("Type A takes no epsilon")
        case = "a"
    elif t == "B":
        j = shape.epsilon
        if j is None or shape.epsilon_ramified and p != ell:
            case = "a"
            j_norm = None
        else:
            j_norm = j % o
            if j_norm in (0, (-1) % o):
                case = "b"
            elif j_norm in (1 % o, 2 % o):
                case = "c"
            else:
                case = "a"
        if j_norm == (-1) % o:
            if shape.x_split:
                raise PreconditionError("Type B with eps = omega^-1 needs x non-split")
            obligations.append("x is non-split")
        if j_norm == 2 % o:
            if shape.z_split:
                raise PreconditionError("Type B with eps = omega^2 needs z non-split")
            obligations.append("z is non-split")
    else:
        raise PreconditionError(f"unknown shape type {t!r}")
    obligations.append("N has no quotient isomorphic to k(1)")
    obligations.append("H^0 of ad0/N vanishes")
    pattern = SHAPE_PATTERNS[case]
    dim_N = pattern_dim(pattern)
    h0_inf = infinity_h0(3, 1)
    return {
        "type": t, "p": p, "ell": ell, "omega_order": o,
        "case": case,
        "pattern": [list(r) for r in pattern],
        "dim_N": dim_N,
        "dim_N_at_least_5": dim_N >= 5,
        "infinity_h0": h0_inf,
        "tangent_check": dim_N >= 1 + h0_inf,
        "admissible": True,
        "obligations": obligations,
    }
