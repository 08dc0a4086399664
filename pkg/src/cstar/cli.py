"""Command line driver: read a system description, run a pipeline, emit a residual report.

Usage::

    cstar <command> <system.json> [--depth N] [--budget K] [--tol X] [--json PATH] [--seed S]

Exit status is 0 when every check passes, 1 when a check fails or a
computation raises, and 2 when the input cannot be read or validated.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cstar.algebra import Algebra, random_element
from cstar.cgns import (build_tower, cgns_operators, cyclic_span_dimension, faithful_injectivity,
                        multiplicative_limit_certificates, md_nesting_certificates, unitary_dilation_certificates,
                        tower_certificates, unitary_equivalence, verify_cgns)
from cstar.channel import LinearMap, UcpMap, multiplicative_domain, verify_ucp
from cstar.dilation import (build_dilation, dilation_certificates, minimality_and_separating,
                            non_separating_vector, right_inverse_analyzer, separating_value,
                            verify_dilation_diagram)
from cstar.ergodic import classification_checks, classify, dilation_transfer_check
from cstar.errors import (CStarError, InvalidState, ModularObstruction, NotASection, NotCP,
                          NotUnital, ParseError, ValidationError)
from cstar.gns import (State, check_invariance, contraction_certificates, gns_construct,
                       modular_certificates, modular_commutation_check, modular_oracle,
                       modular_pair, omega_cyclic_for_commutant, phi_adjoint, adjunction_residual,
                       transfer_contraction)
from cstar.numerics import fro, hermitize
from cstar.report import Report, all_passed, check, flag
from cstar.stinespring import lambda0, lambda0_certificates

SPEC_VERSION = 1
COMMANDS = ("validate", "gns", "stinespring", "tower", "cgns-verify", "adjoint", "dilate", "ergodic",
            "right-inverse", "all")
DEFAULT_DEPTH = 3
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# -- system description --------------------------------------------------------------

@dataclass(eq=False)
class SystemSpec:
    name: str
    algebra: Algebra
    ucp: UcpMap
    state: State
    right_inverse: UcpMap | None = None
    tolerance: float = 1e-10
    seed: int = 0


def _at(path: list) -> str:
    return "$" + "".join(f"[{p!r}]" if isinstance(p, str) else f"[{p}]" for p in path)


def _scalar(x, path) -> complex:
    if isinstance(x, bool):
        raise ParseError(f"{_at(path)}: expected a number, got a boolean")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                   for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"{_at(path)}: expected a number or a [re, im] pair")


def _matrix(x, path, shape=None) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ParseError(f"{_at(path)}: expected a matrix as a list of rows")
    width = len(x[0])
    if any(len(r) != width for r in x):
        raise ParseError(f"{_at(path)}: rows have different lengths")
    m = np.array([[_scalar(v, path + [i, j]) for j, v in enumerate(r)] for i, r in enumerate(x)])
    if shape is not None and m.shape != shape:
        raise ValidationError(f"{_at(path)}: shape {m.shape}, expected {shape}")
    return m


def _field(obj, key, path, kind=None, required=True):
    if not isinstance(obj, dict):
        raise ParseError(f"{_at(path)}: expected an object")
    if key not in obj:
        if required:
            raise ParseError(f"{_at(path)}: missing field {key!r}")
        return None
    v = obj[key]
    if kind is not None and not isinstance(v, kind):
        raise ParseError(f"{_at(path + [key])}: wrong type {type(v).__name__}")
    return v


def _dynamics(obj, alg: Algebra, path, tol: float) -> UcpMap:
    if not isinstance(obj, dict):
        raise ParseError(f"{_at(path)}: expected an object")
    kinds = [k for k in ("kraus", "superop", "stochastic") if k in obj]
    if len(kinds) != 1:
        raise ParseError(f"{_at(path)}: give exactly one of 'kraus', 'superop', 'stochastic'")
    kind = kinds[0]
    where = path + [kind]
    try:
        if kind == "kraus":
            ks = obj["kraus"]
            if not isinstance(ks, list) or not ks:
                raise ParseError(f"{_at(where)}: expected a non-empty list of matrices")
            dd = alg.dense_dim
            mats = [_matrix(k, where + [i], (dd, dd)) for i, k in enumerate(ks)]
            return UcpMap.from_kraus(alg, mats, tol=max(tol, 1e-9))
        if kind == "superop":
            n = alg.total_dim
            s = _matrix(obj["superop"], where, (n, n))
            return verify_ucp(LinearMap(alg, s), tol)
        p = _matrix(obj["stochastic"], where)
        if np.abs(p.imag).max() > 0:
            raise ValidationError(f"{_at(where)}: stochastic matrix must be real")
        return UcpMap.from_stochastic(p.real, alg)
    except NotUnital as exc:
        raise ValidationError(f"{_at(where)}: dynamics is not unital: {exc}") from exc
    except NotCP as exc:
        raise ValidationError(f"{_at(where)}: dynamics is not completely positive: {exc}") from exc
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ValidationError(f"{_at(where)}: {exc}") from exc


def _state(obj, alg: Algebra, path, tol: float) -> State:
    if not isinstance(obj, dict):
        raise ParseError(f"{_at(path)}: expected an object")
    try:
        if "densities" in obj:
            ds = obj["densities"]
            if not isinstance(ds, list) or len(ds) != len(alg.block_dims):
                raise ValidationError(f"{_at(path + ['densities'])}: need one density per block "
                                      f"({len(alg.block_dims)})")
            mats = [_matrix(r, path + ["densities", i], (d, d)) for i, (r, d) in enumerate(zip(ds, alg.block_dims))]
            return State(alg, tuple(mats), tol=max(tol, 1e-12))
        if "probabilities" in obj:
            p = obj["probabilities"]
            if not isinstance(p, list):
                raise ParseError(f"{_at(path + ['probabilities'])}: expected a list")
            vals = [_scalar(v, path + ["probabilities", i]).real for i, v in enumerate(p)]
            if len(vals) != alg.total_dim:
                raise ValidationError(f"{_at(path + ['probabilities'])}: need {alg.total_dim} entries")
            return State.from_probabilities(alg, vals)
    except InvalidState as exc:
        raise ValidationError(f"{_at(path)}: invalid state: {exc}") from exc
    raise ParseError(f"{_at(path)}: give 'densities' or 'probabilities'")


def load_system(doc, tol: float | None = None, seed: int | None = None) -> SystemSpec:
    """Validate a decoded system description."""
    if not isinstance(doc, dict):
        raise ParseError("$: top level must be an object")
    version = doc.get("version", SPEC_VERSION)
    if version != SPEC_VERSION:
        raise ValidationError(f"$['version']: unsupported version {version!r}")
    tol_in = _field(doc, "tolerance", [], (int, float), required=False)
    tol = float(tol if tol is not None else (tol_in if tol_in is not None else 1e-10))
    if not tol > 0:
        raise ValidationError("$['tolerance']: must be positive")
    seed_in = _field(doc, "seed", [], int, required=False)
    seed = int(seed if seed is not None else (seed_in or 0))
    alg_doc = _field(doc, "algebra", [], dict)
    blocks = _field(alg_doc, "blocks", ["algebra"], list)
    if not blocks or not all(isinstance(b, int) and not isinstance(b, bool) and b > 0 for b in blocks):
        raise ValidationError("$['algebra']['blocks']: block sizes must be positive integers")
    alg = Algebra(tuple(blocks))
    state = _state(_field(doc, "state", [], dict), alg, ["state"], tol)
    ucp = _dynamics(_field(doc, "dynamics", [], dict), alg, ["dynamics"], tol)
    ri = doc.get("right_inverse")
    right = _dynamics(ri, alg, ["right_inverse"], tol) if ri is not None else None
    name = doc.get("name", "system")
    return SystemSpec(str(name), alg, ucp, state, right, tol, seed)


def parse_system(path) -> SystemSpec:
    """Read and validate a system description from a JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return load_system(doc)


# -- encoding helpers ---------------------------------------------------------------

def encode_matrix(m) -> list:
    m = np.asarray(m, complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def encode_complex_list(xs) -> list:
    return [[float(complex(x).real), float(complex(x).imag)] for x in xs]


def encode_system(sys_: SystemSpec | object, dynamics: str = "superop") -> dict:
    """JSON document describing a system; ``dynamics`` picks the encoding of the map."""
    alg = sys_.algebra
    doc = {"version": SPEC_VERSION, "name": sys_.name, "algebra": {"blocks": list(alg.block_dims)},
           "state": {"densities": [encode_matrix(r) for r in sys_.state.densities]},
           "tolerance": getattr(sys_, "tolerance", getattr(sys_, "tol", 1e-10)),
           "seed": int(sys_.seed)}

    def enc(m: UcpMap) -> dict:
        m = m.on(alg)
        if dynamics == "kraus":
            dd = alg.dense_dim
            ks = []
            for k in m.kraus():
                ks.append(encode_matrix(np.asarray(k, complex).reshape(dd, dd)))
            return {"kraus": ks}
        if dynamics == "stochastic":
            n = alg.total_dim
            p = np.array([[m(alg.basis(j)).blocks[i][0, 0].real for j in range(n)] for i in range(n)])
            return {"stochastic": p.tolist()}
        return {"superop": encode_matrix(m.superop)}

    doc["dynamics"] = enc(sys_.ucp)
    ri = getattr(sys_, "right_inverse", None)
    if ri is not None:
        doc["right_inverse"] = enc(ri)
    return doc


# -- pipelines -----------------------------------------------------------------------

@dataclass
class Options:
    depth: int = DEFAULT_DEPTH
    budget: int | None = None
    tol: float | None = None
    seed: int | None = None


@dataclass
class _Context:
    spec: SystemSpec
    opts: Options
    cache: dict = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.spec.seed if self.opts.seed is None else self.opts.seed

    @property
    def depth(self) -> int:
        return max(self.opts.depth, self.opts.budget or 0)

    def get(self, key, make):
        if key not in self.cache:
            self.cache[key] = make()
        return self.cache[key]

    def gns(self):
        return self.get("gns", lambda: gns_construct(self.spec.algebra, self.spec.state))

    def transfer(self):
        return self.get("u", lambda: transfer_contraction(self.gns(), self.spec.ucp, self.spec.state))

    def tower(self):
        return self.get("tower", lambda: build_tower(self.spec.ucp, self.spec.state, self.depth))

    def cgns(self):
        return self.get("cgns", lambda: cgns_operators(self.tower()))

    def multiplicative(self) -> bool:
        return self.get("mult", lambda: multiplicative_domain(self.spec.ucp).is_full())

    def dilation(self):
        return self.get("dilation", lambda: build_dilation(self.cgns()))


def _stage_validate(ctx: _Context, rep: Report):
    s = ctx.spec
    alg = s.algebra
    one = alg.unit()
    unital = fro(alg.to_vec(s.ucp(one) - one))
    neg = max(max(0.0, -float(np.linalg.eigvalsh(hermitize(c)).min())) for c in s.ucp.choi_blocks.values())
    rep.extend([
        check("system.unital", "Phi(1) = 1", unital, 1e-9, "dynamics is unital"),
        check("system.cp", "negative part of the Choi matrix", neg, 1e-9, "dynamics is completely positive"),
        check("state.trace", "phi(1) = 1", abs(s.state(one) - 1), 1e-9, "state is normalized"),
        check("state.positive", "negative part of the density", max(
            max(0.0, -float(np.linalg.eigvalsh(r).min())) for r in s.state.densities), 1e-9, "state is positive"),
        check_invariance(s.ucp, s.state, 1e-9),
    ])
    rep.data["block_dims"] = list(alg.block_dims)
    rep.data["faithful"] = bool(s.state.faithful)
    rep.data["multiplicative"] = bool(ctx.multiplicative())


def _stage_gns(ctx: _Context, rep: Report):
    s = ctx.spec
    g = ctx.gns()
    rep.extend(g.certificates(1e-10))
    rng = np.random.default_rng(ctx.seed)
    worst = 0.0
    for i in range(100):
        a = random_element(s.algebra, int(rng.integers(2 ** 31)))
        worst = max(worst, abs(s.state(a) - complex(g.omega.conj() @ g.rep(a) @ g.omega)))
    rep.extend([check("gns.random_reproduction", "|phi(a) - <Omega, pi(a) Omega>| on 100 seeded elements",
                      worst, 1e-10, "GNS representation reproduces the state")])
    u = ctx.transfer()
    rep.extend(contraction_certificates(g, s.ucp, u, 1e-10))
    rep.data["gns_dim"] = g.dim


def _stage_stinespring(ctx: _Context, rep: Report):
    t = ctx.tower()
    g = t.gns
    st = t.levels[0].stinespring
    rep.extend(st.certificates(1e-10))
    lam = lambda0(g, st)
    rep.extend(lambda0_certificates(g, st, lam, t.transfer, 1e-10))
    rep.data["gns_dim"] = g.dim
    rep.data["dilation_dim"] = st.dilation_dim


def _stage_tower(ctx: _Context, rep: Report):
    t = ctx.tower()
    rep.extend(tower_certificates(t, 1e-9))
    rep.extend(md_nesting_certificates(t))
    rep.data["depth"] = t.depth
    rep.data["dims"] = list(t.dims)


def _stage_cgns(ctx: _Context, rep: Report):
    s = ctx.spec
    c = ctx.cgns()
    rep.extend(verify_cgns(c, 1e-9))
    for n in range(c.depth + 1):
        rep.extend([flag(f"cgns.cyclic_span[{n}]", f"span of V^j pi(A) Omega, j <= {n}, fills L_{n}",
                         cyclic_span_dimension(c, n) == c.tower.dims[n], "Omega_inf is cyclic")])
    if s.state.faithful:
        rep.extend([faithful_injectivity(c)])
    # uniqueness: a second tower on a reordered algebra with a rotated basis
    other = build_tower(s.ucp, s.state, c.depth, algebra=s.algebra.permuted(ctx.seed + 1),
                        rng=np.random.default_rng(ctx.seed + 1))
    eq = unitary_equivalence(c, cgns_operators(other))
    rep.extend(eq.checks)
    if ctx.multiplicative():
        rep.extend(unitary_dilation_certificates(c))
        if omega_cyclic_for_commutant(c.gns):
            rep.extend(multiplicative_limit_certificates(c))
    rep.data["ambient_dim"] = c.ambient_dim
    rep.data["collapsed"] = bool(c.collapsed)


def _stage_adjoint(ctx: _Context, rep: Report):
    s = ctx.spec
    g = ctx.gns()
    mp = modular_pair(g)
    rep.extend(modular_certificates(g, mp))
    oracle = modular_oracle(g)
    rep.extend([
        check("modular.oracle_delta", "closed-form Delta matches the polar decomposition", fro(mp.delta - oracle.delta),
              1e-9, "modular operator from the Tomita map"),
        check("modular.oracle_j", "closed-form J matches the polar decomposition",
              fro(mp.conj_unitary - oracle.conj_unitary), 1e-9, "modular conjugation from the Tomita map"),
    ])
    comm = modular_commutation_check(ctx.transfer(), mp, tol=1e-8)
    commutes = all_passed(comm)
    try:
        adj = phi_adjoint(s.ucp, s.state, g=g)
    except ModularObstruction:
        adj = None
    rep.extend([flag("adjoint.equivalence", "a phi-adjoint exists exactly when U commutes with the modular group",
                     (adj is not None) == commutes, "existence of the phi-adjoint")])
    rep.data["adjoint_exists"] = adj is not None
    rep.data["modular_commutation_residual"] = max(c.residual for c in comm)
    if adj is not None:
        rep.extend([check("adjoint.adjunction", "phi(a Phi#(b)) = phi(Phi(a) b)",
                          adjunction_residual(s.ucp, adj, s.state), 1e-10, "defining identity of the phi-adjoint")])
        rep.data["adjoint_superop"] = encode_matrix(adj.superop)


def _stage_dilate(ctx: _Context, rep: Report):
    d = ctx.dilation()
    K = ctx.opts.budget if ctx.opts.budget is not None else d.budget
    rep.extend(dilation_certificates(d))
    for n in range(K):
        rep.extend([c for c in verify_dilation_diagram(d, n) if c.id.startswith("diagram.dynamics")])
    rep.extend(verify_dilation_diagram(d, K))
    rep.extend(minimality_and_separating(d))
    bad = non_separating_vector(d)
    rep.extend([flag("separating.negative_control", "a non-separating vector is detected",
                     separating_value(d, bad) < 1e-6, "separating test rejects a non-separating vector")])
    rep.data["dilated_algebra_dim"] = d.big_algebra.dim
    rep.data["budget"] = K


def _stage_ergodic(ctx: _Context, rep: Report):
    s = ctx.spec
    r = classify(s.ucp, s.state)
    rep.extend(classification_checks(r))
    rep.data.update({"ergodic": r.ergodic, "weakly_mixing": r.weakly_mixing,
                     "fixed_space_dim": r.fixed_space_dim, "inconclusive": r.inconclusive,
                     "peripheral_eigenvalues": encode_complex_list(sorted(r.peripheral_eigenvalues,
                                                                          key=lambda z: (z.real, z.imag))),
                     "cesaro_residuals": list(r.cesaro_residuals)})
    if ctx.multiplicative() and s.state.faithful:
        tr = dilation_transfer_check(ctx.dilation(), seed=ctx.seed)
        rep.extend(tr.checks)
        rep.data["transfer_horizon"] = tr.horizon


def _stage_right_inverse(ctx: _Context, rep: Report):
    s = ctx.spec
    if s.right_inverse is None:
        raise ValidationError("$['right_inverse']: the system has no right inverse to analyse")
    try:
        ri = right_inverse_analyzer(s.ucp, s.right_inverse, s.state, depth=ctx.depth)
    except NotASection as exc:
        rep.data["section_residual"] = exc.residual
        if exc.witness is not None:
            rep.data["witness"] = encode_matrix(exc.witness.dense())
        raise
    rep.extend(ri.checks)
    if ri.dilation_checks is not None:
        rep.extend(ri.dilation_checks, prefix="dilation:")


STAGES = {
    "validate": _stage_validate,
    "gns": _stage_gns,
    "stinespring": _stage_stinespring,
    "tower": _stage_tower,
    "cgns-verify": _stage_cgns,
    "adjoint": _stage_adjoint,
    "dilate": _stage_dilate,
    "ergodic": _stage_ergodic,
    "right-inverse": _stage_right_inverse,
}


def _skip_reason(stage: str, ctx: _Context) -> str | None:
    s = ctx.spec
    if stage == "adjoint" and not s.state.faithful:
        return "state is not faithful"
    if stage == "dilate":
        if not ctx.multiplicative():
            return "dynamics is not multiplicative"
        if not s.state.faithful:
            return "state is not faithful"
    if stage == "right-inverse" and s.right_inverse is None:
        return "no right inverse given"
    return None


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def run(command: str, spec: SystemSpec, options: Options | None = None) -> Report:
    """Run one pipeline (or every applicable one for ``all``) and collect its checks."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    opts = options or Options()
    ctx = _Context(spec, opts)
    rep = Report(command)
    rep.data["system"] = spec.name
    rep.data["options"] = {"depth": ctx.depth, "budget": opts.budget, "seed": ctx.seed}
    if command != "all":
        t0 = time.perf_counter()
        try:
            STAGES[command](ctx, rep)
        except CStarError as exc:
            rep.error = _error_text(exc)
        rep.timings[command] = time.perf_counter() - t0
        return rep
    skipped = {}
    for stage, fn in STAGES.items():
        reason = _skip_reason(stage, ctx)
        if reason is not None:
            skipped[stage] = reason
            continue
        sub = Report(stage)
        t0 = time.perf_counter()
        try:
            fn(ctx, sub)
        except CStarError as exc:
            sub.error = _error_text(exc)
        rep.timings[stage] = time.perf_counter() - t0
        rep.extend(sub.checks, prefix=f"{stage}:")
        extra = {k: v for k, v in sub.data.items() if k not in ("system", "options")}
        if extra:
            rep.data[stage] = extra
        if sub.error is not None:
            rep.error = f"{stage}: {sub.error}"
            break
    rep.data["skipped"] = skipped
    return rep


def emit_report(report: Report, fmt: str = "json") -> bytes:
    return report.emit(fmt)


# -- entry point ---------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cstar", description="Certify dilation identities for finite C*-dynamics.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("system", help="system description (JSON)")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="tower depth N (default %(default)s)")
    p.add_argument("--budget", type=int, default=None, help="largest power k checked in the dilation")
    p.add_argument("--tol", type=float, default=None, help="input validation tolerance")
    p.add_argument("--json", metavar="PATH", default=None, help="also write the JSON report here")
    p.add_argument("--seed", type=int, default=None, help="seed for sampled checks")
    p.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.depth < 1 or (args.budget is not None and args.budget < 0):
        print("cstar: depth must be >= 1 and budget >= 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        spec = parse_system(args.system)
        if args.tol is not None or args.seed is not None:
            doc = json.loads(Path(args.system).read_text())
            spec = load_system(doc, tol=args.tol, seed=args.seed)
    except (ParseError, ValidationError) as exc:
        print(f"cstar: {_error_text(exc)}", file=sys.stderr)
        if args.json:
            Path(args.json).write_bytes(Report(args.command, error=_error_text(exc)).emit("json"))
        return EXIT_INPUT
    opts = Options(args.depth, args.budget, args.tol, args.seed)
    rep = run(args.command, spec, opts)
    sys.stdout.write(rep.emit(args.format).decode())
    if args.format == "json":
        sys.stdout.write("\n")
    if args.json:
        Path(args.json).write_bytes(rep.emit("json"))
    if rep.error is not None and rep.error.startswith("ValidationError"):
        return EXIT_INPUT
    return EXIT_PASS if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
