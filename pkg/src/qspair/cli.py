"""Command line front end: job configs, check orchestration and JSON reports.

Exit codes: 0 when every requested check passes, 1 on a check failure,
2 on a configuration error.  Reports contain no timestamps or timings unless
``--timings`` is given, so repeated runs of one config are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .charlab import (SpectrumError, boundary_qchar, check_coproduct, check_factorization,
                      check_omega_prime, appendix_lemmas, drinfeld_polys, format_scalar,
                      joint_spectrum_verify, module_action_check, qchar, spectrum_report,
                      specialization_oracle)
from .coideal import dual_oracle_check, embed, lw_relation_checks, verify_kolb
from .loopalg import Params, Rep, eval_module, tensor, trivial_rep, verify_relations
from .rootdata import build_satake, root_suite
from .scalars import parse_scalar
from .symnc import lemma_suite

CHECKS = ("relations", "kolb", "lemmas", "dual-oracle", "factorization", "coproduct",
          "spectrum", "qchar", "boundary-qchar", "module-action")
DEFAULT_MODULES = ({"eval": {"a": "q^2"}},)
MAX_DIM = 64
SPECIALIZE_MAX_DIM = 12


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    N: int
    u: list = field(default_factory=list)
    modules: list = field(default_factory=list)
    order: int = 6
    checks: list = field(default_factory=list)
    specialize: Fraction | None = None
    max_dim: int = MAX_DIM

    @classmethod
    def from_dict(cls, raw) -> "JobConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a JSON object")
        known = {"N", "u", "modules", "order", "M", "checks", "specialize", "max_dim"}
        extra = sorted(set(raw) - known)
        if extra:
            raise ConfigError(f"config.{extra[0]}: unknown field")
        N = raw.get("N")
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ConfigError("config.N: must be a positive integer")
        u = raw.get("u", ["1"] * (N + 1))
        if not isinstance(u, list) or len(u) != N + 1:
            raise ConfigError(f"config.u: must be a list of {N + 1} scalar strings")
        for k, x in enumerate(u):
            _scalar(x, f"config.u[{k}]")
        d = build_satake(N)
        if any(parse_scalar(str(u[i])) != parse_scalar(str(u[d.tau(i)])) for i in d.nodes):
            raise ConfigError("config.u: u must be tau-symmetric")
        if "order" in raw and "M" in raw and raw["order"] != raw["M"]:
            raise ConfigError("config.M: conflicts with config.order")
        order = raw.get("order", raw.get("M", 6))
        if not isinstance(order, int) or isinstance(order, bool) or order < 1:
            raise ConfigError("config.order: must be a positive integer")
        modules = raw.get("modules", list(DEFAULT_MODULES))
        if not isinstance(modules, list) or not modules:
            raise ConfigError("config.modules: must be a nonempty list")
        for k, m in enumerate(modules):
            _check_module(m, f"config.modules[{k}]")
        checks = raw.get("checks", list(CHECKS))
        if not isinstance(checks, list):
            raise ConfigError("config.checks: must be a list")
        for k, c in enumerate(checks):
            if c not in CHECKS:
                raise ConfigError(f"config.checks[{k}]: unknown check {c!r}")
        sval = raw.get("specialize")
        if sval is not None:
            try:
                sval = Fraction(str(sval))
            except (ValueError, ZeroDivisionError):
                raise ConfigError("config.specialize: must be a rational number") from None
            if sval == 0:
                raise ConfigError("config.specialize: must be nonzero")
        max_dim = raw.get("max_dim", MAX_DIM)
        if not isinstance(max_dim, int) or max_dim < 1:
            raise ConfigError("config.max_dim: must be a positive integer")
        return cls(N, [str(x) for x in u], modules, order,
                   [c for c in CHECKS if c in checks], sval, max_dim)

    @property
    def params(self) -> Params:
        return Params(self.N, tuple(parse_scalar(x) for x in self.u))

    def to_json(self) -> dict:
        return {"N": self.N, "u": self.u, "modules": self.modules, "order": self.order,
                "checks": self.checks,
                "specialize": None if self.specialize is None else str(self.specialize)}


def _scalar(text, path):
    if not isinstance(text, (str, int)):
        raise ConfigError(f"{path}: expected a scalar string")
    try:
        s = parse_scalar(str(text))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if s.is_zero():
        raise ConfigError(f"{path}: must be nonzero")
    return s


def _check_module(m, path):
    if not isinstance(m, dict) or len(m) != 1:
        raise ConfigError(f"{path}: expected one of eval, tensor, trivial")
    (kind, body), = m.items()
    if kind == "eval":
        if not isinstance(body, dict) or "a" not in body:
            raise ConfigError(f"{path}.eval: missing spectral parameter a")
        _scalar(body["a"], f"{path}.eval.a")
    elif kind == "tensor":
        if not isinstance(body, list) or len(body) != 2:
            raise ConfigError(f"{path}.tensor: expected two module specs")
        for k, sub in enumerate(body):
            _check_module(sub, f"{path}.tensor[{k}]")
    elif kind != "trivial":
        raise ConfigError(f"{path}: unknown module kind {kind!r}")


def module_dim(mspec, N: int) -> int:
    (kind, body), = mspec.items()
    if kind == "eval":
        return N + 1
    if kind == "trivial":
        return 1
    return module_dim(body[0], N) * module_dim(body[1], N)


def module_name(mspec) -> str:
    (kind, body), = mspec.items()
    if kind == "eval":
        return f"V({format_scalar(parse_scalar(str(body['a'])))})"
    if kind == "trivial":
        return "trivial"
    return f"{module_name(body[0])}⊗{module_name(body[1])}"


def build_module(mspec, params: Params) -> Rep:
    (kind, body), = mspec.items()
    if kind == "eval":
        return eval_module(params, parse_scalar(str(body["a"])), check=False)
    if kind == "trivial":
        return trivial_rep(params)
    return tensor(build_module(body[0], params), build_module(body[1], params), check=False)


# -- running checks ----------------------------------------------------------------------

def _gate_report(theorem, N, result, **extra) -> dict:
    out = {"theorem": theorem, "N": N, "status": "pass" if result["pass"] else "fail",
           "count": len(result["relations"]), "witnesses": result["failures"]}
    out.update(extra)
    return out


def _skip(theorem, N, reason) -> dict:
    return {"theorem": theorem, "N": N, "status": "skipped", "reason": reason}


def _run_module_checks(cfg: JobConfig, mspec) -> list:
    N, M = cfg.N, cfg.order
    d = build_satake(N)
    V = build_module(mspec, cfg.params)
    out = []
    rel = verify_relations(V)
    if "relations" in cfg.checks or not rel["pass"]:
        out.append(_gate_report("relations", N, rel))
    if not rel["pass"]:
        return out
    kolb = verify_kolb(V)
    if "kolb" in cfg.checks or not kolb["pass"]:
        out.append(_gate_report("kolb", N, kolb))
    if not kolb["pass"]:
        return out
    X = embed(V, check=False)
    factors = V.cache.get("factors")
    for check in cfg.checks:
        if check == "lemmas":
            out.append(_gate_report("appendix-lemmas", N, appendix_lemmas(V)))
            for i in d.finite_nodes:
                out.append(check_omega_prime(V, i))
            out.append(_gate_report("loop-relations", N, lw_relation_checks(X, min(M, 3))))
        elif check == "dual-oracle":
            out.append(_gate_report("dual-oracle", N, dual_oracle_check(X), r=[-1, 0, 1, 2]))
        elif check == "factorization":
            out.extend(check_factorization(X, i, M) for i in d.finite_nodes)
        elif check == "coproduct":
            if factors is None:
                out.append(_skip("coproduct", N, "module is not a tensor product"))
            else:
                out.extend(check_coproduct(factors[0], factors[1], i, M) for i in d.finite_nodes)
        elif check == "spectrum":
            out.extend(_spectrum_reports(cfg, X))
        elif check == "qchar":
            out.append({"theorem": "qchar", "N": N, "M": M, "status": "pass",
                        "qchar": qchar(V, max(M, 5)).to_json()})
        elif check == "boundary-qchar":
            try:
                data = boundary_qchar(X, M)
                out.append({"theorem": "boundary-qchar", "N": N, "M": M, "status": "pass",
                            "lweights": data.to_json()})
            except SpectrumError as exc:
                out.append({"theorem": "boundary-qchar", "N": N, "M": M, "status": "fail",
                            "witnesses": [{"reason": str(exc)}]})
        elif check == "module-action":
            if factors is None:
                out.append(_skip("module-action", N, "module is not a tensor product"))
            else:
                rep = module_action_check(factors[0], factors[1], M)
                rep.pop("boundary_qchar", None)
                out.append(rep)
    return out


def _spectrum_reports(cfg: JobConfig, X) -> list:
    N, M = cfg.N, cfg.order
    d = X.diagram
    data = boundary_qchar(X, M, verify=False)
    out = []
    for i in d.finite_nodes:
        rep = {"theorem": "spectrum", "N": N, "i": i, "M": M}
        rep.update(spectrum_report(X, i, data, M))
        if cfg.specialize is not None and X.dim <= SPECIALIZE_MAX_DIM:
            sres = specialization_oracle(X, i, data, M, cfg.specialize)
            rep["specialization"] = sres
            if sres["status"] != "pass":
                rep["status"] = "fail"
        out.append(rep)
    ok = joint_spectrum_verify(X, data, M)
    out.append({"theorem": "joint-spectrum", "N": N, "M": M, "status": "pass" if ok else "fail",
                "witnesses": [] if ok else [{"reason": "characteristic polynomial"}]})
    return out


def run(cfg: JobConfig, timings: bool = False) -> dict:
    """Execute the checks of a job in dependency order."""
    for k, mspec in enumerate(cfg.modules):
        dim = module_dim(mspec, cfg.N)
        if dim > cfg.max_dim:
            raise ConfigError(f"config.modules[{k}]: dimension {dim} exceeds the cap {cfg.max_dim}")
    results = []
    if "lemmas" in cfg.checks:
        t0 = time.perf_counter()
        sym = _gate_report("symbolic-lemmas", cfg.N, lemma_suite(6))
        if timings:
            sym["seconds"] = round(time.perf_counter() - t0, 3)
        results.append({"module": None, "reports": [sym]})
    for mspec in cfg.modules:
        t0 = time.perf_counter()
        entry = {"module": module_name(mspec), "reports": _run_module_checks(cfg, mspec)}
        if timings:
            entry["seconds"] = round(time.perf_counter() - t0, 3)
        results.append(entry)
    failed = any(r["status"] == "fail" for e in results for r in e["reports"])
    return {"config": cfg.to_json(), "status": "fail" if failed else "pass",
            "note": "a pass is consistency on the given modules, not a proof",
            "results": results}


# -- output ------------------------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, default=str) + "\n"


def _text_summary(report: dict) -> str:
    lines = []
    for entry in report.get("results", []):
        mod = entry["module"] or "symbolic"
        for r in entry["reports"]:
            idx = f" i={r['i']}" if "i" in r else ""
            lines.append(f"{r['theorem']:<16} {mod:<24} N={r['N']}{idx}  {r['status']}")
    lines.append(f"overall: {report['status']}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------------------

def _params_from_args(args) -> Params:
    if args.N is None or args.N < 1:
        raise ConfigError("--N: must be a positive integer")
    return Params(args.N)


def _module_from_args(args) -> Rep:
    params = _params_from_args(args)
    a = _scalar(args.a, "--a")
    return eval_module(params, a)


def cmd_verify(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{args.config}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON ({exc.msg})") from None
    if args.specialize is not None:
        raw = dict(raw, specialize=args.specialize)
    if args.order is not None:
        raw = dict(raw, order=args.order)
        raw.pop("M", None)
    report = run(JobConfig.from_dict(raw), timings=args.timings)
    _emit(_text_summary(report) if args.text else dumps(report), args.out)
    return 0 if report["status"] == "pass" else 1


def cmd_qchar(args) -> int:
    V = _module_from_args(args)
    chi = qchar(V, max(args.order, 5))
    if args.text:
        rows = []
        for t in chi.to_json():
            mono = " ".join(f"Y_{{{y['i']},{y['a']}}}" + ("" if y["e"] == 1 else f"^{y['e']}")
                            for y in t["Y"]) or "1"
            rows.append(f"{t['mult']} * {mono}")
        _emit("\n".join(rows) + "\n", args.out)
    else:
        _emit(dumps(chi.to_json()), args.out)
    return 0


def cmd_boundary_qchar(args) -> int:
    V = _module_from_args(args)
    X = embed(V)
    try:
        data = boundary_qchar(X, args.order)
    except SpectrumError as exc:
        _emit(dumps({"status": "fail", "witnesses": [{"reason": str(exc)}]}), args.out)
        return 1
    out = data.to_json()
    status = 0
    if args.specialize is not None:
        sval = Fraction(args.specialize)
        out["specialization"] = [specialization_oracle(X, i, data, args.order, sval)
                                 for i in X.diagram.finite_nodes]
        status = 0 if all(s["status"] == "pass" for s in out["specialization"]) else 1
    if args.text:
        rows = [f"{e['mult']} * " + "  ".join(f"gamma_{i}: {', '.join(c)}" for i, c in e["gamma"].items())
                for e in out["entries"]]
        _emit("\n".join(rows) + "\n", args.out)
    else:
        _emit(dumps(out), args.out)
    return status


def cmd_dump_lw(args) -> int:
    V = _module_from_args(args)
    fmt = lambda roots: [format_scalar(a) for a in roots]  # noqa: E731
    rows = []
    for e in drinfeld_polys(V, max(args.order, 5)):
        row = {"mult": e["mult"], "weight": e["weight"]}
        for key in ("Q", "R", "Q_star", "R_star", "Q_dagger", "R_dagger"):
            row[key] = {str(i): fmt(r) for i, r in sorted(e[key].items())}
        rows.append(row)
    _emit(dumps({"N": V.N, "a": args.a, "C": format_scalar(V.params.C),
                 "note": "each root list stores a with P(z) = prod (1 - a z)", "lweights": rows}),
          args.out)
    return 0


def cmd_lemma_suite(args) -> int:
    raw = {"N": args.N, "checks": ["lemmas"]}
    if args.a is not None:
        raw["modules"] = [{"eval": {"a": args.a}}]
    report = run(JobConfig.from_dict(raw))
    _emit(_text_summary(report) if args.text else dumps(report), args.out)
    return 0 if report["status"] == "pass" else 1


def cmd_root_suite(args) -> int:
    if args.N is None or args.N < 1:
        raise ConfigError("--N: must be a positive integer")
    reports = [root_suite(N) for N in range(1, args.N + 1)]
    ok = all(r["ok"] for r in reports)
    if args.text:
        text = "".join(f"N={r['N']}: {'pass' if r['ok'] else 'fail'}\n" for r in reports)
        text += f"overall: {'pass' if ok else 'fail'}\n"
    else:
        text = dumps({"status": "pass" if ok else "fail", "suites": reports})
    _emit(text, args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qspair", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_a=True, order=True):
        sp.add_argument("--out", help="write the output to this file")
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--json", action="store_true", help="JSON output (default)")
        mode.add_argument("--text", action="store_true", help="short human-readable summary")
        if need_a:
            sp.add_argument("--N", type=int, required=True)
            sp.add_argument("--a", default="q^2", help="spectral parameter, e.g. q^3")
        if order:
            sp.add_argument("--order", type=int, default=6)

    v = sub.add_parser("verify", help="run the checks of a JSON job config")
    v.add_argument("config")
    v.add_argument("--order", type=int, default=None, help="override the config order")
    v.add_argument("--specialize", default=None, help="rational value of v for the numeric oracle")
    v.add_argument("--timings", action="store_true", help="add wall-clock timings to the report")
    common(v, need_a=False, order=False)
    v.set_defaults(func=cmd_verify)

    qc = sub.add_parser("qchar", help="q-character of an evaluation module")
    common(qc)
    qc.set_defaults(func=cmd_qchar)

    bq = sub.add_parser("boundary-qchar", help="boundary q-character of an evaluation module")
    common(bq)
    bq.add_argument("--specialize", default=None, help="also run the numeric oracle at v = value")
    bq.set_defaults(func=cmd_boundary_qchar)

    dl = sub.add_parser("dump-lw", help="l-weights and Drinfeld polynomials")
    common(dl)
    dl.set_defaults(func=cmd_dump_lw)

    ls = sub.add_parser("lemma-suite", help="symbolic and matrix lemma suite")
    common(ls, need_a=False, order=False)
    ls.add_argument("--N", type=int, required=True)
    ls.add_argument("--a", default=None, help="spectral parameter of the test module (default q^2)")
    ls.set_defaults(func=cmd_lemma_suite)

    rs = sub.add_parser("root-suite", help="root combinatorics for every rank up to N")
    common(rs, need_a=False, order=False)
    rs.add_argument("--N", type=int, required=True)
    rs.set_defaults(func=cmd_root_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if getattr(args, "order", None) is not None and args.order < 1:
            raise ConfigError("--order: must be a positive integer")
        if getattr(args, "specialize", None) is not None:
            try:
                if Fraction(args.specialize) == 0:
                    raise ValueError
            except (ValueError, ZeroDivisionError):
                raise ConfigError("--specialize: must be a nonzero rational") from None
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
