"""Command-line interface and report documents."""

from __future__ import annotations

import functools
import json
import random
import sys
import time
from fractions import Fraction
from importlib.resources import files
from pathlib import Path

import click

from .exactmat import ExactMatrix, all_plucker_residuals
from .expansion import (
    all_contexts,
    cauchy_binet_terms,
    chi_triple,
    curvature,
    curvature_scan,
    left_matroid_minors,
    monomial_condition,
)
from .laurent import LaurentPoly, parse_poly, squarefree_decompose
from .matroid import find_generic_columns, from_minor_map
from .protocol import (
    Bounds,
    ProtocolResult,
    UnlabeledAnswer,
    decode_shortcut,
    gmap_of,
    induced_set_map,
    recover_from_answer,
    recover_matrices,
    run_protocol,
    ProtocolError,
)
from .reduce import HYPOTHESIS_FAILED, NOT_REDUCED, REDUCED, check_reduction
from .textio import Context, InputError, load_matrix, matrix_document, merge_contexts
from .yalg import ab_terms, b_function, y_roots, reconstruct_from_D, resonance_check

EXIT_OK, EXIT_NOT_REDUCED, EXIT_HYPOTHESIS, EXIT_INPUT = 0, 2, 3, 4
VERDICT_EXIT = {REDUCED: EXIT_OK, NOT_REDUCED: EXIT_NOT_REDUCED, HYPOTHESIS_FAILED: EXIT_HYPOTHESIS}

FIXTURES = files("cbreduce") / "fixtures"
EXAMPLES = ("1.2", "4.1", "5.3", "5.9")

# report builders


def _subset(s) -> list[int]:
    return list(s) if s is not None else None


def _assumptions_doc(rep) -> dict:
    gc = rep.generic_columns
    return {
        "r_generic": rep.r_generic,
        "r_zero_minor": _subset(rep.r_witness),
        "generic_columns": None if gc is None else {"basis": list(gc[0]), "alpha1": gc[1], "alpha2": gc[2]},
        "dimension_bound": rep.dimension_bound,
        "dualized": rep.dualized,
        "matroid_error": rep.matroid_error,
    }


def expand_report(left: ExactMatrix, right: ExactMatrix, ctx: Context) -> dict:
    h = cauchy_binet_terms(left, right)
    matroid = from_minor_map(left_matroid_minors(left), validate=False)
    mono = monomial_condition(h)
    terms = []
    for s in h.nonzero():
        term = {"subset": list(s), "h": ctx.fmt(h.values[s])}
        if mono.ok:
            term["exponent"] = list(mono.assignment[s][1])
        terms.append(term)
    doc = {
        "command": "expand",
        "k": h.k,
        "n": h.n,
        "d": h.nvars,
        "terms": terms,
        "nonzero_terms": len(terms),
        "determinant": ctx.fmt(h.total()),
        "monomial_condition": mono.ok,
        "left_matroid_bases": [list(s) for s in matroid.sorted_bases()],
    }
    if not mono.ok:
        doc["non_monomial_subset"] = list(mono.witness)
    return doc


def _witness_doc(hs, quad, value) -> dict:
    return {"H": list(hs), "alpha": list(quad[:2]), "beta": list(quad[2:]), "value": list(value)}


def curvature_report(left: ExactMatrix, right: ExactMatrix, at=None, limit: int | None = None) -> dict:
    h = cauchy_binet_terms(left, right)
    mono = monomial_condition(h)
    doc = {"command": "curvature", "k": h.k, "n": h.n, "monomial_condition": mono.ok}
    if not mono.ok:
        doc["non_monomial_subset"] = list(mono.witness)
        return doc
    if at is not None:
        hs, quad = at
        try:
            v = curvature(mono.assignment, hs, *quad)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        doc["evaluation"] = {"H": list(hs), "alpha": list(quad[:2]), "beta": list(quad[2:]),
                             "value": None if v is None else list(v), "evaluable": v is not None}
        return doc
    witnesses = [_witness_doc(*w) for w in curvature_scan(mono.assignment, h.n, h.k)]
    doc["nonzero_witnesses"] = len(witnesses)
    doc["witnesses"] = witnesses if limit is None else witnesses[:limit]
    return doc


def _context_doc(data, ctx: Context) -> dict:
    chi = data.chi
    roots = [ctx.fmt(r.value) for r in y_roots(chi)]
    return {
        "basis": list(chi.base),
        "i": chi.i,
        "j": chi.j,
        "alpha": chi.alpha,
        "beta": chi.beta,
        "chi": [ctx.fmt(v) for v in chi.values],
        "A": ctx.fmt(data.a),
        "B": ctx.fmt(data.b),
        "Q": ctx.fmt(data.q),
        "D": ctx.fmt(data.d),
        "kind": data.kind,
        "type": data.config_type,
        "class": data.config_class,
        "proportional": [list(p) for p in data.proportional],
        "roots": roots,
    }


def classify_report(left: ExactMatrix, right: ExactMatrix, ctx: Context, everything: bool = False, limit: int | None = None) -> dict:
    h = cauchy_binet_terms(left, right)
    counts = {"observable": 0, "ConstantY": 0, "RationalY": 0, "Radical": 0}
    records = []
    discs = set()
    for c in all_contexts(h.n, h.k):
        chi = chi_triple(h, *c)
        if not chi.observable:
            continue
        counts["observable"] += 1
        data = ab_terms(chi)
        counts[data.kind] += 1
        if data.kind == "Radical":
            discs.add(ctx.fmt(data.d))
        if everything or data.kind == "Radical":
            records.append(_context_doc(data, ctx))
    return {
        "command": "classify-y",
        "k": h.k,
        "n": h.n,
        "counts": counts,
        "radical_discriminants": sorted(discs),
        "contexts": records if limit is None else records[:limit],
    }


def reduction_report(left: ExactMatrix, right: ExactMatrix) -> tuple[dict, int]:
    res = check_reduction(left, right)
    doc = {"command": "check-reduction", "verdict": res.verdict, "assumptions": _assumptions_doc(res.assumptions)}
    if res.psi is not None:
        doc["psi"] = {str(a): list(e) for a, e in sorted(res.psi.items())}
        doc["m0"] = list(res.m0)
        doc["gauge"] = {"basis": list(res.gauge["basis"]), "alpha1": res.gauge["alpha1"],
                        "alpha2": res.gauge["alpha2"], "free": res.gauge["free"]}
    if res.witness is not None:
        w = dict(res.witness)
        for key in ("subset", "H", "quadruple"):
            if w.get(key) is not None:
                w[key] = list(w[key])
        if "value" in w:
            w["value"] = list(w["value"])
        doc["witness"] = w
    return doc, VERDICT_EXIT[res.verdict]


def _fr(x) -> str:
    return str(Fraction(x))


def _pair_doc(pair) -> dict:
    return {
        "a": [[_fr(x) for x in row] for row in pair.a.rows()],
        "q": [[_fr(x) for x in row] for row in pair.q.rows()],
        "generic_columns": {"basis": list(pair.witness[0]), "alpha1": pair.witness[1], "alpha2": pair.witness[2]},
        "gmap": [{"subset": list(s), "g": _fr(v)} for s, v in sorted(pair.gmap.items())],
    }


def protocol_report(result: ProtocolResult, shortcut: bool) -> tuple[dict, int]:
    doc = {
        "command": "simulate-protocol",
        "mode": "shortcut" if shortcut else "full",
        "induced": result.induced,
        "stage": result.stage,
        "reason": result.reason,
        "psi": None if result.psi is None else {str(a): b for a, b in sorted(result.psi.items())},
    }
    if "chain" in result.extra:
        doc["chain"] = [_subset(s) for s in result.extra["chain"]]
    if result.pair is not None:
        doc["pair"] = _pair_doc(result.pair)
    if result.induced:
        code = EXIT_OK
    elif result.stage == "hypothesis":
        code = EXIT_HYPOTHESIS
    else:
        code = EXIT_NOT_REDUCED
    return doc, code


# demos


def _fixture_pair(name: str):
    left, lctx = load_matrix(FIXTURES / f"{name}_left.json")
    right, rctx = load_matrix(FIXTURES / f"{name}_right.json")
    return left, right, merge_contexts(lctx, rctx)


def demo_1_2() -> dict:
    left, right, ctx = _fixture_pair("ex1_2")
    h = cauchy_binet_terms(left, right)
    mono = monomial_condition(h)
    degrees = sorted({e[0] for _, e in mono.assignment.values()})
    cited = curvature(mono.assignment, (3, 4, 5, 6), 1, 2, 7, 8)
    red, _ = reduction_report(left, right)
    return {
        "example": "1.2",
        "nonzero_terms": len(h.nonzero()),
        "all_monomial": mono.ok,
        "degrees": degrees,
        "r_all_minors_nonzero": all(v != 0 for v in right.maximal_minors().values()),
        "left_matroid_size": len(from_minor_map(left_matroid_minors(left))),
        "cited_curvature": {"H": [3, 4, 5, 6], "alpha": [1, 2], "beta": [7, 8], "value": list(cited)},
        "nonzero_witnesses": sum(1 for _ in curvature_scan(mono.assignment, h.n, h.k)),
        "reduction": red,
    }


def demo_4_1() -> dict:
    left, right, ctx = _fixture_pair("ex4_1")
    matroid = from_minor_map(left_matroid_minors(left))
    red, _ = reduction_report(left, right)
    return {
        "example": "4.1",
        "left_matroid_bases": [list(s) for s in matroid.sorted_bases()],
        "generic_columns": find_generic_columns(matroid),
        "reduction": red,
    }


def demo_5_3() -> dict:
    doc = json.loads((FIXTURES / "ex5_3.json").read_text())
    names = tuple(doc["vars"])
    nv = len(names)
    b = parse_poly(doc["B"], nv, names)
    parts = squarefree_decompose(b)
    fmt = Context(nv, names).fmt
    configs = []
    for conf in doc["configurations"]:
        e = [parse_poly(x, nv, names) for x in conf]
        sq = squarefree_decompose(b_function(*e))
        configs.append({"configuration": conf, "Q": fmt(sq.q), "D": fmt(sq.d),
                        "class": "I" if sq.q.is_monomial() else "II"})
    rec = reconstruct_from_D(parts.d)
    e1, e3 = LaurentPoly.var(0, nv), LaurentPoly.var(1, nv)
    return {
        "example": "5.3",
        "B": doc["B"],
        "Q": fmt(parts.q),
        "D": fmt(parts.d),
        "configurations": configs,
        "reconstructed": [{"triple": [fmt(x) for x in c.triple], "class": c.config_class} for c in rec.candidates],
        "unrealized": rec.unrealized,
        "resonance_d1_2_d2_1": resonance_check(e1 * e1, 4 * e1 * e3, e3 * e3, 2, 1),
    }


def demo_5_9() -> dict:
    left, right, ctx = _fixture_pair("ex5_9")
    h = cauchy_binet_terms(left, right)
    mono = monomial_condition(h)
    witnesses = list(curvature_scan(mono.assignment, h.n, h.k)) if mono.ok else []
    rm = right.maximal_minors()
    residuals = [r for m in (left.maximal_minors(), rm) for _, _, r in all_plucker_residuals(m, h.n, h.k)]
    cls = classify_report(left, right, ctx)
    return {
        "example": "5.9",
        "r_minors_nonzero": all(v != 0 for v in rm.values()),
        "all_monomial": mono.ok,
        "exponents": sorted({e[0] for _, e in mono.assignment.values()}) if mono.ok else None,
        "plucker_residuals_zero": all(r == 0 for r in residuals),
        "nonzero_witnesses": len(witnesses),
        "first_witness": _witness_doc(*witnesses[0]) if witnesses else None,
        "classification": {k: cls[k] for k in ("counts", "radical_discriminants")},
        "radical_contexts": cls["contexts"][:4],
    }


DEMOS = {"1.2": demo_1_2, "4.1": demo_4_1, "5.3": demo_5_3, "5.9": demo_5_9}


def demo_report(example: str) -> dict:
    return {"command": "demo", **DEMOS[example]()}


# random planted instances


def _generic_matrix(rng: random.Random, rows: int, cols: int, span: int = 5) -> ExactMatrix:
    while True:
        m = ExactMatrix([[Fraction(rng.randint(-span, span)) for _ in range(cols)] for _ in range(rows)])
        probe = m if rows <= cols else m.transpose()
        if all(v != 0 for v in probe.maximal_minors().values()):
            return m


def planted_protocol_instance(k: int, n: int, seed: int):
    rng = random.Random(seed)
    a = _generic_matrix(rng, k, n)
    q = _generic_matrix(rng, n, k)
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return a, q, dict(zip(range(1, n + 1), perm))


# click plumbing


def _emit(doc: dict, output: str | None, started: float | None) -> None:
    if started is not None:
        doc["timings"] = {"seconds": round(time.perf_counter() - started, 4)}
    text = json.dumps(doc, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except InputError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        sys.exit(code or EXIT_OK)

    return wrapper


def _load_pair(left: str, right: str):
    lm, lctx = load_matrix(left)
    rm, rctx = load_matrix(right)
    if rm.shape != (lm.ncols, lm.nrows):
        raise InputError(f"{right}: shape {rm.shape} does not match the left factor {lm.shape}")
    return lm, rm, merge_contexts(lctx, rctx)


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise InputError(f"cannot read integer list {text!r}") from None


output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the report here instead of stdout.")
timings_option = click.option("--timings", is_flag=True, help="Add wall-clock timings to the report.")
pair_options = [
    click.option("--left", "-l", required=True, type=click.Path(exists=True, dir_okay=False), help="Left factor document (k x n)."),
    click.option("--right", "-r", required=True, type=click.Path(exists=True, dir_okay=False), help="Right factor document (n x k)."),
]


def with_pair(fn):
    for opt in reversed(pair_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="cbreduce")
def main():
    """Exact checks of monomial deformations of Cauchy-Binet expansions."""
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)


@main.command()
@with_pair
@output_option
@timings_option
@_guard
def expand(left, right, output, timings):
    """Cauchy-Binet terms h(I) of a matrix pair."""
    started = time.perf_counter() if timings else None
    lm, rm, ctx = _load_pair(left, right)
    _emit(expand_report(lm, rm, ctx), output, started)


@main.command("curvature")
@with_pair
@click.option("--scan", is_flag=True, help="List every quadruple with nonzero curvature (default).")
@click.option("--at", "at", help="Evaluate one quadruple, written H|a1,a2,b1,b2.")
@click.option("--limit", type=int, help="Keep only the first LIMIT witnesses in the report.")
@output_option
@timings_option
@_guard
def curvature_cmd(left, right, scan, at, limit, output, timings):
    """Curvature of the exponent map over exchanged bases."""
    started = time.perf_counter() if timings else None
    lm, rm, _ = _load_pair(left, right)
    where = None
    if at:
        if "|" not in at:
            raise InputError("--at expects H|a1,a2,b1,b2")
        hs, quad = at.split("|", 1)
        quad = _parse_ints(quad)
        if len(quad) != 4:
            raise InputError("--at needs exactly four indices after '|'")
        where = (_parse_ints(hs), quad)
    _emit(curvature_report(lm, rm, where, limit), output, started)


@main.command("classify-y")
@with_pair
@click.option("--all", "everything", is_flag=True, help="Report every observable context, not only radical ones.")
@click.option("--limit", type=int, help="Keep only the first LIMIT context records.")
@output_option
@timings_option
@_guard
def classify_y(left, right, everything, limit, output, timings):
    """A/B-terms, squarefree parts and classification of every observable context."""
    started = time.perf_counter() if timings else None
    lm, rm, ctx = _load_pair(left, right)
    _emit(classify_report(lm, rm, ctx, everything, limit), output, started)


@main.command("check-reduction")
@with_pair
@output_option
@timings_option
@_guard
def check_reduction_cmd(left, right, output, timings):
    """Decide whether the expansion reduces to a per-element potential."""
    started = time.perf_counter() if timings else None
    lm, rm, _ = _load_pair(left, right)
    doc, code = reduction_report(lm, rm)
    _emit(doc, output, started)
    return code


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _read_set_map(path: str, bases, n: int) -> dict:
    doc = _read_json(path)
    if "psi" in doc:
        psi = doc["psi"]
        if sorted(psi) != list(range(1, n + 1)):
            raise InputError(f"{path}: psi must be a permutation of 1..{n}")
        return induced_set_map(dict(zip(range(1, n + 1), psi)), bases)
    if "set_map" in doc:
        try:
            return {tuple(sorted(a)): tuple(sorted(b)) for a, b in doc["set_map"]}
        except (TypeError, ValueError):
            raise InputError(f"{path}: set_map must be a list of [subset, subset] pairs") from None
    raise InputError(f"{path}: expected a 'psi' or 'set_map' field")


def _answer_from_file(path: str, n: int, k: int, shortcut: bool, reference, g_size: int) -> ProtocolResult:
    doc = _read_json(path)
    try:
        if shortcut:
            maxg, delta = int(doc["maxg"]), int(doc["delta"])
            try:
                decoded = decode_shortcut(maxg, delta, n, k, g_size)
                pair = recover_matrices(decoded, n, k)
            except ProtocolError as exc:
                return ProtocolResult(False, exc.stage, reason=str(exc))
            return ProtocolResult(True, "done", pair=pair)
        t0 = tuple(Fraction(x) for x in doc["t0"])
        values = tuple(sorted(Fraction(x) for x in doc["values"]))
        if "lambda" in doc:
            bounds = Bounds(Fraction(doc["lambda"]), Fraction(doc["mu"]))
        else:
            mags = [abs(Fraction(x)) for x in doc["values_at_one"]]
            bounds = Bounds(min(mags) / 2, 2 * max(mags))
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from None
    if len(t0) != n:
        raise InputError(f"{path}: t0 has {len(t0)} entries, expected {n}")
    return recover_from_answer(UnlabeledAnswer(t0, values), bounds, n, k, reference)


@main.command("simulate-protocol")
@click.option("--left", "-l", type=click.Path(exists=True, dir_okay=False), help="Matrix a (k x n).")
@click.option("--right", "-r", type=click.Path(exists=True, dir_okay=False), help="Matrix q (n x k).")
@click.option("--perm", "-p", type=click.Path(exists=True, dir_okay=False), help="Document with 'psi' or 'set_map'.")
@click.option("--random", "planted", help="Plant a random instance of shape K,N instead of reading files.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for --random.")
@click.option("--shortcut", is_flag=True, help="Use the two-scalar integer shortcut.")
@click.option("--answer-file", type=click.Path(exists=True, dir_okay=False), help="Externally produced answer document.")
@click.option("--no-reference", is_flag=True, help="Do not use the labeled g-map of (a, q) to name psi.")
@output_option
@timings_option
@_guard
def simulate_protocol(left, right, perm, planted, seed, shortcut, answer_file, no_reference, output, timings):
    """Recover an element permutation and a matrix pair from unlabeled answers."""
    started = time.perf_counter() if timings else None
    if planted:
        shape = _parse_ints(planted)
        if len(shape) != 2 or not 0 < shape[0] <= shape[1]:
            raise InputError("--random expects K,N with 0 < K <= N")
        a, q, psi = planted_protocol_instance(shape[0], shape[1], seed)
        set_map = induced_set_map(psi, gmap_of(a, q))
    else:
        if not (left and right):
            raise InputError("give --left and --right, or --random K,N")
        a, q, _ = _load_pair(left, right)
        set_map = None
    k, n = a.shape
    reference = gmap_of(a, q)
    if perm:
        set_map = _read_set_map(perm, reference, n)
    if set_map is None:
        set_map = {s: s for s in reference}
    if answer_file:
        result = _answer_from_file(answer_file, n, k, shortcut, None if no_reference else reference, len(reference))
    else:
        try:
            result = run_protocol(a, q, set_map, use_reference=not no_reference, shortcut=shortcut)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    doc, code = protocol_report(result, shortcut)
    if planted:
        doc["planted"] = {"a": matrix_document(a), "q": matrix_document(q),
                          "psi": {str(x): y for x, y in sorted(psi.items())}}
    _emit(doc, output, started)
    return code


@main.command()
@click.option("--example", "-e", required=True, type=click.Choice(EXAMPLES), help="Bundled worked example.")
@output_option
@timings_option
@_guard
def demo(example, output, timings):
    """Reproduce a bundled worked example."""
    started = time.perf_counter() if timings else None
    _emit(demo_report(example), output, started)
