"""``treeshift`` command line: load specs and function literals, run experiments, emit reports.

Exit codes: 0 success, 1 unreadable or malformed input, 2 a hypothesis of the
requested experiment fails, 64 unknown verb or flag.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from . import corpus as corpus_mod
from .errors import PreconditionError, SpecError, VertexError
from .functions import ZERO, load_function
from .hypercyclic import criterion_run, forward_not_hypercyclic_probe, free_end_obstruction
from .norms import divergence_certificate, operator_norm, spectral_radius_estimate
from .reports import ExperimentReport, exact, vref
from .scalars import parse_scalar
from .shifts import apply_backward, apply_forward, duality_pair
from .spectral import complex_grid, eigen_check, rational_grid, resolvent_probe
from .tree import TreeSpec, TreeView, bound_constants

EX_USAGE = 64
VERBS = ("validate", "describe", "norm", "bounds", "diverge", "spectrum", "eigen",
         "resolvent", "hypercyclic", "obstruct", "duality", "corpus")
HBS_MISSING = "B unbounded: tree not homogeneous by sectors"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _scalar(text):
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad scalar {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="treeshift", description="Shift operators on Lipschitz spaces of trees.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, help_, tree=True):
        sp = sub.add_parser(name, help=help_)
        if tree:
            sp.add_argument("--tree", required=True, metavar="PATH")
        sp.add_argument("--output", choices=("json", "csv", "plain"), default="json")
        return sp

    sp = verb("validate", "check a tree spec")
    sp.add_argument("--require-hbs", action="store_true", help="fail unless homogeneous by sectors")
    verb("describe", "canonical form and structure of a spec")
    sp = verb("norm", "exact norm of B^n")
    sp.add_argument("--power", type=int, default=1)
    verb("bounds", "bound constants and the norm sandwich for B")
    sp = verb("diverge", "divergence certificate when B is unbounded")
    sp.add_argument("--depth", type=int, default=50)
    sp = verb("spectrum", "spectral radius estimate from exact norms")
    sp.add_argument("--nmax", type=int, default=10)
    sp = verb("eigen", "eigenfunction check (grid sweep without --lambda)")
    sp.add_argument("--lambda", dest="lam", type=_scalar)
    sp.add_argument("--depth", type=int, default=8)
    sp = verb("resolvent", "solve (S - lambda) f = chi_o")
    sp.add_argument("--lambda", dest="lam", type=_scalar, required=True)
    sp.add_argument("--depth", type=int, default=10)
    sp = verb("hypercyclic", "run the hypercyclicity criterion for B")
    sp.add_argument("--f", required=True, metavar="PATH")
    sp.add_argument("--nmax", type=int, default=10)
    sp = verb("obstruct", "free-end obstruction and the forward-shift bound")
    sp.add_argument("--f", metavar="PATH")
    sp.add_argument("--power", type=int, default=1, help="orbit time N")
    sp = verb("duality", "check the pairing identity on seeded functions")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--depth", type=int, default=4)
    sp = verb("corpus", "write a seeded corpus of specs", tree=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--out", default="corpus", metavar="DIR")
    return p


# ---------------------------------------------------------------------------
# verbs: each returns (results, exactness, table, columns)
# ---------------------------------------------------------------------------


def _need_hbs(tree):
    if tree.hbs_level() is None:
        raise PreconditionError(HBS_MISSING)


def cmd_validate(tree, args):
    if args.require_hbs:
        _need_hbs(tree)
    return {"valid": True, "hbs_level": tree.hbs_level()}, {}, [], ()


def cmd_describe(tree, args):
    spec = tree.spec
    res = {
        "canonical": spec.to_dict(),
        "canonical_json": spec.to_json(),
        "hbs_level": tree.hbs_level(),
        "root_degree": tree.gamma(()),
        "homogeneous_degree": tree.homogeneous_degree(),
        "leaves": [vref(v) for v in tree.leaves()],
        "has_free_end": tree.has_free_end(),
        "free_end_vertex": vref(tree.free_end_vertex()),
        "level_sizes": [len(tree.level(L)) for L in range(min(5, tree.max_depth) + 1)],
    }
    return res, {}, [], ()


def cmd_norm(tree, args):
    comp = operator_norm(tree, args.power)
    res = {
        "power": args.power,
        "status": comp.status,
        "exact_norm": exact(comp.exact_value),
        "scan_level": comp.scan_level,
        "witness_vertex": vref(comp.witness_vertex),
        "witness_row_l1": exact(comp.witness_row.l1) if comp.witness_row else None,
        "level_l1": [[L, exact(x)] for L, x in comp.level_l1],
    }
    if comp.upper_bounds:
        res["upper_bounds"] = {k: exact(v) for k, v in comp.upper_bounds.items()}
        res["lower_bound_witnesses"] = {tag: exact(val) for tag, _, val in comp.lower_bound_witnesses}
    table = [(L, exact(x)) for L, x in comp.level_l1]
    return res, {"exact_norm": comp.status == "exact"}, table, ("level", "max_row_l1")


def cmd_bounds(tree, args):
    _need_hbs(tree)
    bc = bound_constants(tree)
    comp = operator_norm(tree, 1)
    g = bc.root_degree
    lowers = {
        "2gamma(o)": 2 * g,
        "3Gamma'-2": 3 * bc.GammaPrime - 2,
        "Gamma''+2gamma(o)-2": bc.GammaDoublePrime + 2 * g - 2,
    }
    lowers.update({tag: val for tag, _, val in comp.lower_bound_witnesses})
    lower = max(lowers.values())
    upper = bc.upper_lambda
    res = {
        "Lambda": exact(bc.Lambda),
        "Gamma": exact(bc.Gamma),
        "Omega": exact(bc.Omega),
        "GammaPrime": exact(bc.GammaPrime),
        "GammaDoublePrime": exact(bc.GammaDoublePrime),
        "hbs_level": bc.hbs_level,
        "lower": exact(lower),
        "lower_terms": {k: exact(v) for k, v in lowers.items()},
        "exact": exact(comp.exact_value),
        "upper": exact(upper),
        "upper_gamma_omega": exact(bc.upper_gamma_omega),
        "sandwich_holds": lower <= comp.exact_value <= upper <= bc.upper_gamma_omega,
    }
    return res, {"exact": True, "bounds": True}, [], ()


def cmd_diverge(tree, args):
    cert = divergence_certificate(tree, args.depth)
    lo = min(10, args.depth)
    res = {
        "levels": args.depth,
        "Gamma": exact(cert.gamma_sup),
        "certified_unbounded": cert.certified,
        "exceeds_level_minus_Gamma": cert.exceeds_linear(lo, args.depth),
        "exceeds_harmonic_minus_Gamma": cert.exceeds_harmonic(lo, args.depth),
    }
    table = [(r.level, exact(r.max_row_l1), exact(r.level_witness), exact(r.harmonic_witness), vref(r.vertex)) for r in cert.rows]
    res["rows"] = [list(x) for x in table]
    return res, {"rows": True}, table, ("level", "max_row_l1", "level_witness", "harmonic_witness", "vertex")


def cmd_spectrum(tree, args):
    rows = spectral_radius_estimate(tree, args.nmax)
    table = [(r.n, exact(r.norm), r.root, r.ratio, vref(r.witness)) for r in rows]
    res = {"rows": [list(x) for x in table]}
    return res, {"exact_norm": True, "root": False, "ratio": False}, table, (
        "n", "exact_norm_as_fraction", "root", "ratio", "witness_vertex_path")


def _verdict_payload(v):
    return {
        "lambda": exact(v.lam),
        "claims": sorted(v.claims),
        "residual": v.residual,
        "depth": v.depth,
        "in_L": v.in_L,
        "in_L0": v.in_L0,
        "classification": v.classification,
    }


def cmd_eigen(tree, args):
    if args.lam is not None:
        v = eigen_check(tree, args.lam, args.depth)
        return _verdict_payload(v), {"residual": v.exact}, [], ()
    gamma = tree.homogeneous_degree()
    if not gamma:
        eigen_check(tree, 1, args.depth)  # raises the unsupported-instance error
    table = []
    for lam in rational_grid(gamma) + complex_grid(gamma):
        v = eigen_check(tree, lam, args.depth)
        z = complex(lam)
        table.append((z.real, z.imag, v.classification))
    return {"points": len(table), "gamma": gamma}, {}, table, ("re", "im", "classification")


def cmd_resolvent(tree, args):
    probe = resolvent_probe(tree, args.lam, args.depth)
    res = {"lambda": exact(args.lam), "status": probe.status}
    if probe.function is not None:
        res.update({
            "norm": exact(probe.norm.value),
            "residual": probe.residual,
            "growth_ratios": [exact(r) for r in probe.growth_ratios],
        })
    else:
        res["reason"] = "(S f)(o) = 0 for every f, so S f = chi_o has no solution"
    return res, {"residual": True}, [], ()


def cmd_hypercyclic(tree, args):
    f = load_function(args.f)
    run = criterion_run(tree, f, args.nmax)
    table = [(r.n, exact(r.bn_norm), exact(r.rn_norm), exact(r.identity_defect)) for r in run.rows]
    res = {
        "verdict": run.verdict,
        "failing_columns": run.failing_columns,
        "hbs_level": run.hbs_level,
        "mu": run.mu,
        "M_f": exact(run.sup_f),
        "envelope_holds": run.envelope_holds(),
        "free_end": vref(run.free_end),
        "rows": [list(x) for x in table],
    }
    return res, {"rows": True}, table, ("n", "BnF_norm", "RnF_norm", "identity_defect")


def cmd_obstruct(tree, args):
    f = load_function(args.f) if args.f else ZERO
    res = {"N": args.power, "forward_bound": exact(forward_not_hypercyclic_probe(tree, f, args.power))}
    if tree.free_end_vertex() is not None:
        _need_hbs(tree)
        w = free_end_obstruction(tree, None, f, args.power)
        res.update({"v_star": vref(w.v_star), "w_N": vref(w.w_N), "lower_bound": exact(w.lower_bound), "certified": w.certified})
    else:
        res["free_end"] = None
    return res, {"lower_bound": True}, [], ()


def cmd_duality(tree, args):
    rng = random.Random(args.seed)
    defects = 0
    for _ in range(args.count):
        f = corpus_mod.random_finite_support(rng, tree, args.depth)
        g = corpus_mod.random_finite_support(rng, tree, args.depth)
        lhs = duality_pair(tree, f, apply_forward(tree, g, 1))
        rhs = duality_pair(tree, apply_backward(tree, f, 1), g)
        defects += lhs != rhs
    res = {"pairs": args.count, "seed": args.seed, "mismatches": defects, "identity_holds": defects == 0}
    return res, {"identity": True}, [], ()


HANDLERS = {
    "validate": cmd_validate,
    "describe": cmd_describe,
    "norm": cmd_norm,
    "bounds": cmd_bounds,
    "diverge": cmd_diverge,
    "spectrum": cmd_spectrum,
    "eigen": cmd_eigen,
    "resolvent": cmd_resolvent,
    "hypercyclic": cmd_hypercyclic,
    "obstruct": cmd_obstruct,
    "duality": cmd_duality,
}


def _echo(args) -> dict:
    out = {"verb": args.verb}
    for k, v in sorted(vars(args).items()):
        if k != "verb" and v is not None:
            out[k] = exact(v) if isinstance(v, Fraction) else (str(v) if isinstance(v, complex) else v)
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"treeshift: usage error: {exc}", file=stderr)
        return EX_USAGE
    t0 = time.perf_counter()
    try:
        if args.verb == "corpus":
            manifest = corpus_mod.write_corpus(args.seed, args.count, args.out)
            report = ExperimentReport(_echo(args), "", {"out": args.out, "files": [e["file"] for e in manifest["files"]]})
        else:
            tree = TreeView(TreeSpec.load(args.tree))
            results, exactness, table, columns = HANDLERS[args.verb](tree, args)
            report = ExperimentReport(_echo(args), tree.spec.fingerprint(), results, exactness, 0.0, table, columns)
    except SpecError as exc:
        print(f"treeshift: invalid input: {exc}", file=stderr)
        return 1
    except (OSError, VertexError) as exc:
        print(f"treeshift: {exc}", file=stderr)
        return 1
    except ValueError as exc:
        print(f"treeshift: precondition failed: {exc}", file=stderr)
        return 2
    except PreconditionError as exc:
        print(f"treeshift: precondition failed: {exc}", file=stderr)
        return 2
    report.wall_time = time.perf_counter() - t0
    stdout.write(report.render(args.output))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
