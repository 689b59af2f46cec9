"""Command-line interface.

Exit codes: 0 = ran fine (including "conditions not satisfied" reports),
1 = a congruence verification ran and failed, 2 = usage or data errors.
Characters are named by Conrey labels "modulus.index" ("1.1" is the
trivial character).  A config file of KEY=VALUE lines may set `endpoint`
and `fixtures`; environment variables EISCONG_ENDPOINT, EISCONG_FIXTURES
and EISCONG_OFFLINE override it, and flags override both.
"""

from __future__ import annotations

import argparse
import json
import sys

from .characters import DirichletChar
from .congruence import bk_report, check_conditions, search_congruence_primes, value_conductor
from .eisenstein import CuspMatrix, DeltaChoice, EisensteinParams, c_gamma, \
    constant_term_e_delta, e_delta
from .errors import EiscongError
from .lvalues import l_value_at_negative
from .newforms import fetch_newform, sturm_bound, verify_congruence
from .residue import primes_above


def _build_params(args) -> EisensteinParams:
    psi = DirichletChar.from_label(args.psi)
    phi = DirichletChar.from_label(args.phi)
    n = psi.conductor * phi.conductor
    if getattr(args, "N", None) is not None and args.N != n:
        raise EiscongError(
            f"--N {args.N} contradicts the character conductors (u*v = {n})")
    if args.k <= 2:
        raise EiscongError("k must exceed 2")
    return EisensteinParams(n, args.M, args.k, psi, phi)


def _parse_delta(params: EisensteinParams, spec: str) -> DeltaChoice:
    if spec in ("psi", "phi"):
        return DeltaChoice.constant(params, spec)
    selection = {}
    for item in spec.split(","):
        p, side = item.split(":")
        selection[int(p)] = side
    return DeltaChoice(params, selection)


def _emit(args, payload, human_lines):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=1))
    else:
        for line in human_lines:
            print(line)


def cmd_search(args) -> int:
    params = _build_params(args)
    triples = search_congruence_primes(params, ell_max=args.ell_max)
    payload = [rep.to_json() for _, _, rep in triples]
    lines = [f"search N={params.N} M={params.M} k={params.k} "
             f"psi={params.psi.label} phi={params.phi.label}:"]
    if triples:
        for ell, lam, _rep in triples:
            lines.append(f"  congruence prime: ell={ell}  lambda'={lam.pretty()}")
    else:
        lines.append("  no admissible congruence primes")
    _emit(args, payload, lines)
    return 0


def cmd_check(args) -> int:
    params = _build_params(args)
    reports = [check_conditions(params, args.ell, lam)
               for lam in primes_above(args.ell, value_conductor(params))]
    payload = [r.to_json() for r in reports]
    lines = []
    for r in reports:
        verdict = "satisfied" if r.satisfied else "not satisfied"
        lines.append(f"ell={args.ell} lambda'={r.lambda_prime.pretty()}: {verdict} "
                     f"(cond1={r.cond1}, cond2={r.cond2_ok}, admissible={r.admissible})")
    _emit(args, payload, lines)
    return 0


def _verify_at_ell(params, label, ell, bound, include_ell, offline, fixtures, endpoint):
    min_coeffs = bound if bound is not None else sturm_bound(params.k, params.N * params.M)
    nf = fetch_newform(label, min_coeffs, offline=offline,
                       fixture_dir=fixtures, endpoint=endpoint)
    best = None
    for lam in primes_above(ell, value_conductor(params)):
        cert = verify_congruence(nf, params, lam, bound=bound, include_ell=include_ell)
        if cert.passed:
            return cert
        if best is None:
            best = cert
    return best


def cmd_verify(args) -> int:
    params = _build_params(args)
    cert = _verify_at_ell(params, args.label, args.ell, args.bound,
                          not args.exclude_ell, args.offline, args.fixtures,
                          args.endpoint)
    payload = cert.to_json()
    verdict = "PASS" if cert.passed else f"FAIL at q={cert.first_failing_q}"
    lines = [f"verify {args.label} mod {cert.lambda_prime.pretty()} "
             f"(bound {cert.bound}, {len(cert.checked_primes)} primes): {verdict}"]
    _emit(args, payload, lines)
    return 0 if cert.passed else 1


def cmd_eis(args) -> int:
    params = _build_params(args)
    delta = _parse_delta(params, args.delta)
    if args.eis_command == "qexp":
        f = e_delta(params, delta, args.prec)
        _emit(args, f.to_json(),
              [f"E_delta[{delta.label()}] level {f.level} weight {f.weight} "
               f"char {f.character.label}:"] +
              [f"  a_{n} = {f.coeffs[n]!r}" for n in range(f.precision + 1)])
    else:
        gamma = CuspMatrix(args.a, args.beta, args.b, args.d)
        ct = constant_term_e_delta(params, delta, gamma)
        payload = {"gamma": [gamma.a, gamma.beta, gamma.b, gamma.d],
                   "delta": delta.label(),
                   "constant_term": ct.to_json()}
        lines = [f"a_0(E_delta[gamma]) at gamma={gamma!r}: {ct!r}"]
        if gamma.b % params.v == 0:
            cg = c_gamma(params, gamma)
            payload["c_gamma"] = cg.to_json()
            lines.append(f"C_gamma = {cg!r}")
        _emit(args, payload, lines)
    return 0


def cmd_lvalue(args) -> int:
    chi = DirichletChar.from_label(args.chi)
    val = l_value_at_negative(args.k, chi)
    _emit(args, val.to_json(), [f"L(1-{args.k}, chi[{chi.label}]) = {val!r}"])
    return 0


def cmd_bk(args) -> int:
    params = _build_params(args)
    reports = [bk_report(params, lam, args.d, cap=args.cap)
               for lam in primes_above(args.ell, value_conductor(params))]
    payload = [r.to_json() for r in reports]
    lines = [f"lambda'={r.lambda_prime.pretty()}: ord_k={r.order_k} "
             f"ord_k2={r.order_k2} S={list(r.p_new_primes)}" for r in reports]
    _emit(args, payload, lines)
    return 0


# -- reproduce ----------------------------------------------------------

_EXAMPLES = {
    "ramanujan": {"N": 1, "M": 1, "k": 12, "psi": "1.1", "phi": "1.1",
                  "label": "1.12.a.a", "bound": 200},
    "5.1": {"N": 5, "M": 2, "k": 8, "psi": "1.1", "phi": "5.4",
            "label": "10.8.b.a", "bound": 100},
    "5.2": {"N": 7, "M": 2, "k": 7, "psi": "1.1", "phi": "7.3",
            "label": "14.7.d.a", "bound": None},
    "5.3": {"N": 7, "M": 6, "k": 6, "psi": "1.1", "phi": "7.4",
            "label": "42.6.e.c", "bound": None},
}


def cmd_reproduce(args) -> int:
    spec = _EXAMPLES[args.example]
    psi = DirichletChar.from_label(spec["psi"])
    phi0 = DirichletChar.from_label(spec["phi"])
    lines = []
    payload = {"example": args.example, "certificates": []}
    ok = True
    # the examples pin phi only up to complex conjugation; try the orbit
    for phi in phi0.galois_conjugates():
        params = EisensteinParams(spec["N"], spec["M"], spec["k"], psi, phi)
        triples = search_congruence_primes(params)
        if not triples:
            continue
        lines.append(f"params: {params.describe()}")
        for ell, lam, _rep in triples:
            lines.append(f"  predicted congruence prime ell={ell} lambda'={lam.pretty()}")
        payload["search"] = [rep.to_json() for _, _, rep in triples]
        try:
            cert = _verify_at_ell(params, spec["label"], triples[0][0],
                                  spec["bound"], True, args.offline,
                                  args.fixtures, args.endpoint)
        except EiscongError as exc:
            if phi != phi0.galois_conjugates()[-1]:
                continue  # conjugate character may match the stored newform
            raise
        payload["certificates"].append(cert.to_json())
        verdict = "PASS" if cert.passed else f"FAIL at q={cert.first_failing_q}"
        lines.append(f"  verify {spec['label']} mod {cert.lambda_prime.pretty()}: "
                     f"{verdict} (bound {cert.bound})")
        ok = cert.passed
        break
    else:
        raise EiscongError("no parameter choice in the Galois orbit produced "
                           "a congruence prime")
    _emit(args, payload, lines)
    return 0 if ok else 1


# -- argument plumbing ----------------------------------------------------


def _read_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise EiscongError(f"bad config line: {raw.rstrip()}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip().strip('"')
    return out


def _add_param_flags(sp, with_m=True):
    sp.add_argument("--N", type=int, default=None,
                    help="level of the Eisenstein series (u*v; inferred from the characters)")
    if with_m:
        sp.add_argument("--M", type=int, required=True, help="square-free lift level factor")
    sp.add_argument("--k", type=int, required=True, help="weight (must exceed 2)")
    sp.add_argument("--psi", required=True, help="Conrey label of psi, e.g. 1.1")
    sp.add_argument("--phi", required=True, help="Conrey label of phi, e.g. 5.4")


def _common_flags(ap, suppress=False):
    d = argparse.SUPPRESS if suppress else None
    ap.add_argument("--json", action="store_true",
                    default=argparse.SUPPRESS if suppress else False,
                    help="machine-readable output")
    ap.add_argument("--config", default=d, help="KEY=VALUE config file (endpoint, fixtures)")
    ap.add_argument("--fixtures", default=d, help="fixture directory")
    ap.add_argument("--endpoint", default=d, help="LMFDB API base URL")
    ap.add_argument("--offline", action="store_true",
                    default=argparse.SUPPRESS if suppress else False,
                    help="never touch the network; fixtures only")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="eiscong",
        description="Predict and verify Eisenstein congruence primes for "
                    "newforms of square-free level with character.")
    _common_flags(ap)
    # the same flags are accepted after the subcommand as well
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search", parents=[common],
                        help="find all congruence primes for one parameter set")
    _add_param_flags(sp)
    sp.add_argument("--ell-max", type=int, default=None)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("check", parents=[common],
                        help="evaluate Conditions (1)/(2) at a given ell")
    _add_param_flags(sp)
    sp.add_argument("--ell", type=int, required=True)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("verify", parents=[common],
                        help="verify the congruence against newform data")
    _add_param_flags(sp)
    sp.add_argument("--label", required=True, help="LMFDB newform label")
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--bound", type=int, default=None,
                    help="coefficient bound (default: the Sturm bound)")
    sp.add_argument("--exclude-ell", action="store_true",
                    help="check only q with q not dividing N*M*ell")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("eis", help="q-expansions and cusp constants")
    eis_sub = sp.add_subparsers(dest="eis_command", required=True)
    for name in ("qexp", "cusp"):
        esp = eis_sub.add_parser(name, parents=[common])
        _add_param_flags(esp)
        esp.add_argument("--delta", default="psi",
                         help="'psi', 'phi', or per-prime like '2:psi,3:phi'")
        if name == "qexp":
            esp.add_argument("--prec", type=int, default=10)
        else:
            esp.add_argument("--a", type=int, required=True)
            esp.add_argument("--beta", type=int, required=True)
            esp.add_argument("--b", type=int, required=True)
            esp.add_argument("--d", type=int, required=True)
        esp.set_defaults(func=cmd_eis)

    sp = sub.add_parser("lvalue", parents=[common], help="exact L(1-k, chi)")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--chi", required=True, help="Conrey label")
    sp.set_defaults(func=cmd_lvalue)

    sp = sub.add_parser("bk", parents=[common],
                        help="Selmer quotient orders (exact valuations)")
    _add_param_flags(sp)
    sp.add_argument("--ell", type=int, required=True)
    sp.add_argument("--d", type=int, default=1, help="proper divisor of M")
    sp.add_argument("--cap", type=int, default=64)
    sp.set_defaults(func=cmd_bk)

    sp = sub.add_parser("reproduce", parents=[common],
                        help="run a bundled example end to end")
    sp.add_argument("example", choices=sorted(_EXAMPLES))
    sp.set_defaults(func=cmd_reproduce)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.config:
            cfg = _read_config(args.config)
            if args.fixtures is None:
                args.fixtures = cfg.get("fixtures")
            if args.endpoint is None:
                args.endpoint = cfg.get("endpoint")
        return args.func(args)
    except EiscongError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
