"""Command-line interface.

Every subcommand computes first and writes afterwards: stdout gets the
selected format (human tables by default, machine JSON/CSV on request), file
outputs are written atomically via a temp-file rename, and figures render
only when --plot is given.  Exit codes: 0 success, 1 validation or usage
error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import decompose as decompose_mod
from . import kfamily
from . import measure as measure_mod
from . import quadrature
from . import represent as represent_mod
from .errors import NumericFailure

SEED_ENV_VAR = "EXTREMAL_MOMENTS_SEED"

_CATALOG = """\
commands:
  quad gauss N | lobatto N | radau N --end left|right
                         construct a classical rule
  quad classify --moments-degree K --quadrature FILE
                         extreme-point test against Lebesgue moments
  extremality --n N [--trials T] [--seed S] [--slack EPS]
                         sweep the gauss/lobatto sandwich over exact functionals
  measure moments FILE --max-degree K
                         moments of a measure file
  measure decompose FILE --a A [--out-prefix P]
  decompose FILE --a A [--out-prefix P]
                         split a continuous symmetric measure in class
  kfamily --b B --x X --y Y
                         an extreme measure mu_(x,y) with its pair weights
  represent FILE --b B [--grid NXxNY] [--max-degree K] [--out FILE]
                         fit a mixing measure over the extreme family

common options: --format human|json|csv, --out FILE, --plot FILE.png
the extremality seed falls back to $EXTREMAL_MOMENTS_SEED, then 0
"""


def subcommand_catalog() -> str:
    """The command catalog shown by --help."""
    return _CATALOG


def _fmt(v: float) -> str:
    # Human output: 12 significant digits.
    return format(v, ".12g")


def _machine(v: float) -> str:
    return repr(float(v))


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for numeric
    # failures, so remap usage problems to exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class _Output:
    stdout: str = ""
    files: list[tuple[str, str]] = field(default_factory=list)
    figures: list = field(default_factory=list)  # (path, figure)


def _write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    handle = tempfile.NamedTemporaryFile(
        "w", dir=directory, suffix=".tmp", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.unlink(handle.name)
        raise


def _save_figure_atomic(fig, path: str) -> None:
    from . import plotting

    directory = os.path.dirname(os.path.abspath(path))
    suffix = os.path.splitext(path)[1] or ".png"
    handle = tempfile.NamedTemporaryFile(dir=directory, suffix=suffix, delete=False)
    handle.close()
    try:
        plotting.save_figure(fig, handle.name)
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.unlink(handle.name)
        raise


def _emit(out: _Output) -> int:
    for path, text in out.files:
        _write_text_atomic(path, text)
    for path, fig in out.figures:
        _save_figure_atomic(fig, path)
    if out.stdout:
        sys.stdout.write(out.stdout)
        if not out.stdout.endswith("\n"):
            sys.stdout.write("\n")
    return 0


def _load_json_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc


def _load_measure(path: str) -> measure_mod.Measure:
    return measure_mod.Measure.from_dict(_load_json_file(path))


def _add_format_flags(parser: argparse.ArgumentParser, out_flag: bool = True) -> None:
    parser.add_argument(
        "--format", choices=("human", "json", "csv"), default="human",
        help="output format (default: human, 12 significant digits)",
    )
    if out_flag:
        parser.add_argument("--out", metavar="FILE",
                            help="also write the output to FILE")
    parser.add_argument("--plot", metavar="FILE",
                        help="render a figure of the result to FILE")


def _quad_text(q: quadrature.Quadrature, fmt: str, label: str) -> str:
    if fmt == "json":
        return json.dumps(q.to_dict())
    if fmt == "csv":
        lines = ["node,weight"]
        lines += [f"{_machine(x)},{_machine(w)}" for x, w in zip(q.nodes, q.weights)]
        return "\n".join(lines)
    width = max(len(_fmt(x)) for x in q.nodes)
    lines = [f"rule: {label}", f"{'node'.ljust(width)}  weight"]
    lines += [f"{_fmt(x).ljust(width)}  {_fmt(w)}" for x, w in zip(q.nodes, q.weights)]
    lines.append(f"sum(weights) = {_fmt(math.fsum(q.weights))}")
    return "\n".join(lines)


def _cmd_quad_rule(ns) -> _Output:
    if ns.quad_command == "gauss":
        q = quadrature.gauss(ns.n)
        label = f"gauss({ns.n})"
    elif ns.quad_command == "lobatto":
        q = quadrature.lobatto(ns.n)
        label = f"lobatto({ns.n})"
    else:
        q = quadrature.radau(ns.n, ns.end)
        label = f"radau({ns.n}, {ns.end})"
    text = _quad_text(q, ns.format, label)
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, text + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append((ns.plot, plotting.quadrature_figure(q, label)))
    return out


def _cmd_quad_classify(ns) -> _Output:
    q = quadrature.Quadrature.from_dict(_load_json_file(ns.quadrature))
    moments = quadrature.MomentVector.lebesgue(ns.moments_degree)
    extreme = quadrature.is_extreme(q, moments)
    canonical = quadrature.canonicalize(q)
    if ns.format == "json":
        text = json.dumps(
            {
                "distinct_nodes": len(canonical.nodes),
                "moment_order": moments.order,
                "extreme": extreme,
            }
        )
    elif ns.format == "csv":
        text = (
            "distinct_nodes,moment_order,extreme\n"
            f"{len(canonical.nodes)},{moments.order},{str(extreme).lower()}"
        )
    else:
        text = "\n".join(
            [
                f"quadrature: {ns.quadrature}",
                f"distinct nodes: {len(canonical.nodes)}",
                f"moment order: {moments.order}",
                f"extreme: {'yes' if extreme else 'no'}",
            ]
        )
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, text + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append(
            (ns.plot, plotting.quadrature_figure(canonical, ns.quadrature))
        )
    return out


def _extremality_candidates(n: int, trials: int, seed: int):
    base = [(f"gauss({p})", quadrature.gauss(p)) for p in range(n, 2 * n + 1)]
    base += [(f"lobatto({p})", quadrature.lobatto(p)) for p in range(n + 1, 2 * n + 1)]
    rng = np.random.default_rng(seed)
    candidates = list(base)
    for i in range(trials):
        ia, ib = rng.integers(0, len(base), size=2)
        t = float(rng.uniform(0.05, 0.95))
        mixed = quadrature.convex_combination(base[ia][1], base[ib][1], t)
        candidates.append((f"mix{i}({base[ia][0]},{base[ib][0]},t={t:.6f})", mixed))
    return candidates


def _cmd_extremality(ns) -> _Output:
    seed = ns.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, "0"))
    catalog = quadrature.convex_catalog(ns.n)
    candidates = _extremality_candidates(ns.n, ns.trials, seed)
    reports = [
        quadrature.verify_extremality(ns.n, q, catalog, ns.slack)
        for _, q in candidates
    ]
    rows = []
    for i, f in enumerate(catalog):
        values = [r.checks[i].value for r in reports]
        rows.append(
            {
                "function": f.name,
                "lower": reports[0].checks[i].lower,
                "min": min(values),
                "max": max(values),
                "upper": reports[0].checks[i].upper,
                "ok": all(r.checks[i].ok for r in reports),
            }
        )
    passed = all(row["ok"] for row in rows)
    if ns.format == "json":
        text = json.dumps(
            {
                "n": ns.n,
                "slack": ns.slack,
                "seed": seed,
                "candidates": len(candidates),
                "passed": passed,
                "functions": rows,
            }
        )
    elif ns.format == "csv":
        lines = ["function,lower,min,max,upper,ok"]
        lines += [
            ",".join(
                [
                    row["function"],
                    _machine(row["lower"]),
                    _machine(row["min"]),
                    _machine(row["max"]),
                    _machine(row["upper"]),
                    str(row["ok"]).lower(),
                ]
            )
            for row in rows
        ]
        text = "\n".join(lines)
    else:
        name_width = max(len(row["function"]) for row in rows)
        lines = [
            f"extremality sweep: n={ns.n}, candidates={len(candidates)}, "
            f"seed={seed}, slack={ns.slack:g}",
            f"{'function'.ljust(name_width)}  "
            f"{'gauss(n)':>16}  {'min T':>16}  {'max T':>16}  {'lobatto(n+1)':>16}  ok",
        ]
        for row in rows:
            lines.append(
                f"{row['function'].ljust(name_width)}  "
                f"{_fmt(row['lower']):>16}  {_fmt(row['min']):>16}  "
                f"{_fmt(row['max']):>16}  {_fmt(row['upper']):>16}  "
                f"{'yes' if row['ok'] else 'NO'}"
            )
        lines.append(f"result: {'PASS' if passed else 'FAIL'}")
        text = "\n".join(lines)
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, text + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append((ns.plot, plotting.extremality_figure(reports)))
    return out


def _cmd_measure_moments(ns) -> _Output:
    mu = _load_measure(ns.file)
    values = [measure_mod.moment(mu, k) for k in range(ns.max_degree + 1)]
    if ns.format == "json":
        text = json.dumps({"moments": values})
    elif ns.format == "csv":
        lines = ["k,moment"]
        lines += [f"{k},{_machine(v)}" for k, v in enumerate(values)]
        text = "\n".join(lines)
    else:
        lines = [f"measure: {ns.file}", "k   moment"]
        lines += [f"{k:<3} {_fmt(v)}" for k, v in enumerate(values)]
        text = "\n".join(lines)
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, text + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append((ns.plot, plotting.measure_figure(mu, ns.file)))
    return out


def _cmd_decompose(ns) -> _Output:
    mu = _load_measure(ns.file)
    result = decompose_mod.decompose(mu, ns.a)
    machine = json.dumps(result.to_dict())
    if ns.format == "json":
        text = machine
    elif ns.format == "csv":
        text = (
            "a1,b1,alpha\n"
            f"{_machine(result.a1)},{_machine(result.b1)},{_machine(result.alpha)}"
        )
    else:
        in1 = measure_mod.in_class(result.nu1, ns.a)
        in2 = measure_mod.in_class(result.nu2, ns.a)
        text = "\n".join(
            [
                f"a: {_fmt(ns.a)}",
                f"a1: {_fmt(result.a1)}",
                f"b1: {_fmt(result.b1)}",
                f"alpha: {_fmt(result.alpha)}",
                f"E1: [{_fmt(-result.b1)}, {_fmt(-result.a1)}] u "
                f"[{_fmt(result.a1)}, {_fmt(result.b1)}]",
                f"nu1 in class: {'yes' if in1 else 'no'}",
                f"nu2 in class: {'yes' if in2 else 'no'}",
            ]
        )
    out = _Output(stdout=text)
    if ns.out_prefix:
        out.files.append((f"{ns.out_prefix}.json", machine + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append((ns.plot, plotting.decomposition_figure(mu, result)))
    return out


def _cmd_kfamily(ns) -> _Output:
    point = kfamily.make(ns.b, ns.x, ns.y)
    mu = kfamily.to_measure(point)
    kind = kfamily.classify(point)
    measure_json = json.dumps(mu.to_dict())
    if ns.format == "json":
        text = json.dumps(
            {
                "b": point.b,
                "x": point.x,
                "y": point.y,
                "p": point.p,
                "q": point.q,
                "kind": kind,
                "measure": mu.to_dict(),
            }
        )
    elif ns.format == "csv":
        text = (
            "b,x,y,p,q,kind\n"
            f"{_machine(point.b)},{_machine(point.x)},{_machine(point.y)},"
            f"{_machine(point.p)},{_machine(point.q)},{kind}"
        )
    else:
        text = "\n".join(
            [
                f"p = {_fmt(point.p)}",
                f"q = {_fmt(point.q)}",
                f"kind = {kind}",
                f"measure = {measure_json}",
            ]
        )
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, text + "\n"))
    if ns.plot:
        from . import plotting

        out.figures.append(
            (ns.plot, plotting.measure_figure(mu, f"mu_({ns.x:g},{ns.y:g})"))
        )
    return out


def _parse_grid(raw: str) -> tuple[int, int]:
    parts = raw.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"grid must look like NXxNY, got {raw!r}")
    try:
        nx, ny = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"grid must look like NXxNY, got {raw!r}") from None
    return nx, ny


def _cmd_represent(ns) -> _Output:
    sigma = _load_measure(ns.file)
    grid = _parse_grid(ns.grid)
    basis = represent_mod.TestBasis(ns.max_degree)
    result = represent_mod.represent(sigma, ns.b, grid=grid, basis=basis)
    buffer = io.StringIO()
    represent_mod.write_mixing_csv(result, buffer)
    mixing_csv = buffer.getvalue()
    if ns.format == "json":
        text = json.dumps(
            {
                "b": result.gamma.b,
                "grid": list(result.grid),
                "max_degree": result.max_degree,
                "residual": result.residual,
                "support": [
                    {"x": p[0], "y": p[1], "weight": w}
                    for p, w in zip(result.gamma.points, result.gamma.weights)
                ],
            }
        )
    elif ns.format == "csv":
        text = mixing_csv.rstrip("\n")
    else:
        lines = [
            f"measure: {ns.file}",
            f"b: {_fmt(ns.b)}   grid: {result.grid[0]}x{result.grid[1]}   "
            f"max degree: {result.max_degree}",
            f"residual: {_fmt(result.residual)}",
            f"support points: {len(result.gamma.points)}",
            f"{'x':>16}  {'y':>16}  weight",
        ]
        for (x, y), w in zip(result.gamma.points, result.gamma.weights):
            lines.append(f"{_fmt(x):>16}  {_fmt(y):>16}  {_fmt(w)}")
        text = "\n".join(lines)
    out = _Output(stdout=text)
    if ns.out:
        out.files.append((ns.out, mixing_csv))
    if ns.plot:
        from . import plotting

        out.figures.append((ns.plot, plotting.mixing_figure(result)))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="extremal-moments",
        description=(
            "Moment-constrained positive quadratures and extreme symmetric "
            "measures on [-1, 1]."
        ),
        epilog=subcommand_catalog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    quad = sub.add_parser("quad", help="construct or classify quadratures",
                          epilog=subcommand_catalog(),
                          formatter_class=argparse.RawDescriptionHelpFormatter)
    quad_sub = quad.add_subparsers(dest="quad_command", required=True,
                                   metavar="RULE")
    for name, meta in (("gauss", "N"), ("lobatto", "POINTS")):
        rule = quad_sub.add_parser(name, help=f"{name} rule")
        rule.add_argument("n", type=int, metavar=meta)
        _add_format_flags(rule)
        rule.set_defaults(handler=_cmd_quad_rule)
    radau = quad_sub.add_parser("radau", help="radau rule")
    radau.add_argument("n", type=int, metavar="N")
    radau.add_argument("--end", choices=("left", "right"), required=True)
    _add_format_flags(radau)
    radau.set_defaults(handler=_cmd_quad_rule)
    classify = quad_sub.add_parser("classify",
                                   help="extreme-point test for a stored rule")
    classify.add_argument("--moments-degree", type=int, required=True, metavar="K")
    classify.add_argument("--quadrature", required=True, metavar="FILE")
    _add_format_flags(classify)
    classify.set_defaults(handler=_cmd_quad_classify)

    extremality = sub.add_parser("extremality",
                                 help="verify the gauss/lobatto sandwich")
    extremality.add_argument("--n", type=int, required=True)
    extremality.add_argument("--trials", type=int, default=50,
                             help="random convex combinations to add (default 50)")
    extremality.add_argument("--seed", type=int, default=None,
                             help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")
    extremality.add_argument("--slack", type=float, default=1e-10)
    _add_format_flags(extremality)
    extremality.set_defaults(handler=_cmd_extremality)

    measure = sub.add_parser("measure", help="operations on measure files")
    measure_sub = measure.add_subparsers(dest="measure_command", required=True,
                                         metavar="OP")
    moments = measure_sub.add_parser("moments", help="print moments")
    moments.add_argument("file", metavar="FILE")
    moments.add_argument("--max-degree", type=int, required=True, metavar="K")
    _add_format_flags(moments)
    moments.set_defaults(handler=_cmd_measure_moments)
    for holder in (measure_sub, sub):
        dec = holder.add_parser("decompose",
                                help="split a continuous symmetric measure in class")
        dec.add_argument("file", metavar="FILE")
        dec.add_argument("--a", type=float, required=True)
        dec.add_argument("--out-prefix", metavar="P",
                         help="write the result to P.json")
        _add_format_flags(dec, out_flag=False)
        dec.set_defaults(handler=_cmd_decompose)

    kfam = sub.add_parser("kfamily", help="an extreme measure mu_(x,y)")
    kfam.add_argument("--b", type=float, required=True)
    kfam.add_argument("--x", type=float, required=True)
    kfam.add_argument("--y", type=float, required=True)
    _add_format_flags(kfam)
    kfam.set_defaults(handler=_cmd_kfamily)

    rep = sub.add_parser("represent", help="fit a mixing measure over K(b)")
    rep.add_argument("file", metavar="FILE")
    rep.add_argument("--b", type=float, required=True)
    rep.add_argument("--grid", default="101x101", metavar="NXxNY")
    rep.add_argument("--max-degree", type=int, default=12, metavar="K")
    _add_format_flags(rep)
    rep.set_defaults(handler=_cmd_represent)

    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _emit(ns.handler(ns))
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
