"""Command-line front end.

Subcommands: box, wiring, table, orbit, search, scan, graph, moe.  All numeric
output is deterministic given the inputs and --seed.  Exit codes: 0 success,
1 usage error, 2 validation failure.
"""

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from boxlab import boxes, graphs, moe, optimize, orbits, wirings

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(x, digits=12):
    return f"{x:.{digits}g}"


def _write_out(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_box(spec):
    """A box argument is a named box, a JSON/CSV file path, or 'c1,c2,c3'
    coordinates in the PR,SR,I basis."""
    try:
        return boxes.make_named_box(spec)
    except ValueError:
        pass
    if "," in spec:
        c1, c2, c3 = (float(t) for t in spec.split(","))
        basis = [boxes.make_named_box(n) for n in ("PR", "SR", "I")]
        return boxes.mix(list(zip((c1, c2, c3), basis)))
    with open(spec) as fh:
        text = fh.read()
    if spec.endswith(".json") or text.lstrip().startswith("{"):
        return boxes.box_from_json(text)
    return boxes.box_from_csv(text)


def _load_wiring(spec):
    if spec in wirings.WIRING_NAMES:
        return wirings.named_wiring(spec)
    with open(spec) as fh:
        return wirings.wiring_from_json(fh.read())


def _load_graph(spec):
    if spec.startswith("C") and spec[1:].isdigit():
        return graphs.cycle_graph(int(spec[1:]))
    if spec.startswith("K") and spec[1:].isdigit():
        return graphs.complete_graph(int(spec[1:]))
    if spec.startswith("P") and spec[1:].isdigit():
        return graphs.path_graph(int(spec[1:]))
    if "+" in spec:
        parts = [_load_graph(p) for p in spec.split("+")]
        g = parts[0]
        for p in parts[1:]:
            g = graphs.disjoint_union(g, p)
        return g
    with open(spec) as fh:
        text = fh.read()
    if "," in text:
        return graphs.parse_adjacency_csv(text)
    return graphs.parse_edge_list(text)


def _coeff_string(coeffs, names):
    parts = []
    for c, n in zip(coeffs, names):
        frac = Fraction(c).limit_denominator(64)
        if abs(float(frac) - c) > 1e-9 or frac == 0:
            if abs(c) < 1e-12:
                continue
            parts.append(f"{c:+.6g}*{n}")
        else:
            parts.append(f"{frac:+}*{n}")
    return " ".join(parts) if parts else "0"


def _render_cell(box, basis_boxes, basis_names):
    for b, n in zip(basis_boxes, basis_names):
        if np.max(np.abs(box - b)) < 1e-10:
            return n
    flats = np.stack([boxes.box_to_flat(b) for b in basis_boxes], axis=1)
    target = boxes.box_to_flat(box)
    sol, residual, _, _ = np.linalg.lstsq(flats, target, rcond=None)
    if np.max(np.abs(flats @ sol - target)) < 1e-9:
        return _coeff_string(sol, basis_names)
    return "<outside basis span>"


def cmd_box(args):
    box = _load_box(args.name)
    report = boxes.validate_ns(box, tol=args.tol)
    if args.format == "json":
        _write_out(args, boxes.box_to_json(box) + "\n")
    elif args.format == "csv":
        _write_out(args, boxes.box_to_csv(box))
    else:
        lines = [f"box {args.name}"]
        lines.append("correlation table (rows xy, cols ab):")
        for row in boxes.correlation_table(box):
            lines.append("  " + "  ".join(f"{v:.4f}" for v in row))
        for variant in ("CHSH", "CHSH'", "CHSH''"):
            lines.append(f"{variant}: {_fmt(boxes.chsh_value(box, variant))}")
        e = boxes.biases(box)
        lines.append(
            "biases: "
            + " ".join(f"eta[{x}{y}]={_fmt(e[x, y])}" for x in (0, 1) for y in (0, 1))
        )
        rep = boxes.collapse_criterion(box)
        lines.append(
            f"collapse: A={_fmt(rep.A)} B={_fmt(rep.B)} satisfied={rep.satisfied}"
            + (f" mu*={_fmt(rep.mu_star)} mu_max={_fmt(rep.mu_max)}" if rep.satisfied else "")
        )
        lines.append(f"valid_ns: {report.ok}")
        _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_wiring(args):
    if args.layout:
        _write_out(args, wirings.layout_doc() + "\n")
        return EXIT_OK
    w = _load_wiring(args.name)
    report = wirings.validate_wiring(w, tol=args.tol)
    if args.format == "json":
        _write_out(args, wirings.wiring_to_json(w) + "\n")
    else:
        lines = [f"wiring {args.name}: " + " ".join(_fmt(v, 6) for v in w)]
        lines.append(f"valid: {report.ok}")
        if not report.ok:
            for name, resid in report.failures:
                lines.append(f"  violated {name}: {resid:.3e}")
        _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_table(args):
    w = _load_wiring(args.wiring)
    names = [n.strip() for n in args.boxes.split(",")]
    basis = [_load_box(n) for n in names]
    table = wirings.multiplication_table(w, basis)
    # Render against the basis extended with I (products can leave the hull).
    render_names = list(names)
    render_basis = list(basis)
    if "I" not in render_names:
        render_names.append("I")
        render_basis.append(boxes.make_named_box("I"))
    cells = [[_render_cell(table[i][j], render_basis, render_names) for j in range(len(basis))] for i in range(len(basis))]
    if args.format == "csv":
        lines = ["," + ",".join(names)]
        for name, row in zip(names, cells):
            lines.append(name + "," + ",".join(f'"{c}"' for c in row))
        _write_out(args, "\n".join(lines) + "\n")
    else:
        width = max(len(c) for row in cells for c in row)
        width = max(width, max(len(n) for n in names))
        head = " " * (width + 2) + "".join(n.ljust(width + 2) for n in names)
        lines = [head]
        for name, row in zip(names, cells):
            lines.append(name.ljust(width + 2) + "".join(c.ljust(width + 2) for c in row))
        _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_orbit(args):
    box = _load_box(args.box)
    w = _load_wiring(args.wiring)
    rows = orbits.orbit_dump_rows(box, w, args.kmax, tilted=not args.full)
    lines = ["k,chsh_prime,chsh,c1,c2,c3"]
    for row in rows:
        lines.append(",".join([str(row[0])] + [_fmt(v) for v in row[1:]]))
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _descent_config(args):
    kwargs = {}
    if args.config:
        with open(args.config) as fh:
            kwargs.update(json.load(fh))
    for field in ("learning_rate", "max_iters", "tol_eps", "k_reset", "chi", "replicas", "line_search_iters"):
        val = getattr(args, field, None)
        if val is not None:
            kwargs[field] = val
    kwargs["seed"] = args.seed
    return optimize.DescentConfig(**kwargs)


def cmd_search(args):
    box = _load_box(args.box)
    cfg = _descent_config(args)
    if args.task == "A":
        result = optimize.task_a_adaptive(box, args.n, cfg)
        if result is None:
            _write_out(args, "nothing found\n")
            return EXIT_OK
        payload = [[float(v) for v in w] for w in result]
        _write_out(args, json.dumps({"task": "A", "wirings": payload}) + "\n")
        return EXIT_OK
    result = optimize.task_b_constant(box, args.n, args.lmax, cfg)
    if result is None:
        _write_out(args, "nothing found\n")
        return EXIT_OK
    _write_out(args, json.dumps({"task": "B", "wiring": [float(v) for v in result]}) + "\n")
    return EXIT_OK


_SVG_COLORS = {"collapsing": "#e07b00", "not-ns": "#888888", "unknown": "#3465a4"}


def _scan_svg(rows):
    size = 640
    pad = 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for c1, c2, label, _, _ in rows:
        # Simplex drawn with c1 on the x-axis and c2 on the slanted axis.
        px = pad + (c1 + 0.5 * c2) * (size - 2 * pad)
        py = size - pad - c2 * (size - 2 * pad)
        parts.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="2" fill="{_SVG_COLORS[label]}"/>')
    for i, (label, color) in enumerate(_SVG_COLORS.items()):
        y = 20 + 16 * i
        parts.append(f'<circle cx="16" cy="{y}" r="5" fill="{color}"/>')
        parts.append(f'<text x="28" y="{y + 4}" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_scan(args):
    names = [n.strip() for n in args.basis.split(",")]
    basis = [_load_box(n) for n in names]
    cfg = None
    if args.method in ("taskA", "taskB"):
        cfg = _descent_config(args)
    wiring = _load_wiring(args.wiring) if args.wiring else (
        wirings.named_wiring("W_BS") if args.method == "right_power" else None
    )
    rows = optimize.slice_scan(basis, args.grid, args.method, cfg=cfg, wiring=wiring, kmax=args.kmax)
    if args.format == "svg":
        _write_out(args, _scan_svg(rows))
        return EXIT_OK
    lines = ["c1,c2,label,witness_kind,witness_value"]
    for c1, c2, label, kind, value in rows:
        lines.append(f"{_fmt(c1)},{_fmt(c2)},{label},{kind},{_fmt(value)}")
    text = "\n".join(lines) + "\n"
    _write_out(args, text)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(_scan_svg(rows))
    return EXIT_OK


def cmd_graph(args):
    g = _load_graph(args.g)
    h = _load_graph(args.h)
    if args.check_iso:
        ok = graphs.d_fractionally_isomorphic(g, h, args.d)
        _write_out(args, f"{args.d}-fractionally isomorphic: {ok}\n")
        return EXIT_OK if ok else EXIT_VALIDATION
    params = graphs.common_equitable_partition(g, h, args.d)
    if params is None:
        _write_out(args, "no common equitable partition\n")
        return EXIT_VALIDATION
    lines = [f"partition: k={params.k} sizes={params.sizes.tolist()}"]
    for t in range(params.d + 1):
        lines.append(f"counts t={t}: {params.counts[t].tolist()}")
    strategy = graphs.build_perfect_strategy(g, h, args.d, params)
    report = graphs.validate_strategy(strategy)
    lines.append(f"strategy valid: {report.ok}")
    if args.strategy_out:
        rows = graphs.strategy_dump_rows(strategy.table)
        with open(args.strategy_out, "w") as fh:
            fh.write("x_A,x_B,y_A,y_B,prob\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row[:4]) + f",{_fmt(row[4])}\n")
        lines.append(f"strategy written to {args.strategy_out}")
    if args.pr_box:
        split = graphs.component_split(h)
        # A path of length 2 in G: middle vertex with two neighbors at
        # distance 2 from each other.
        dist = graphs.distance_matrix(g)
        path = None
        for mid in range(g.n):
            nbrs = np.flatnonzero(g.adjacency[mid])
            for a in nbrs:
                for b in nbrs:
                    if a != b and dist[a, b] == 2:
                        path = (int(a), int(mid), int(b))
                        break
                if path:
                    break
            if path:
                break
        if path is None:
            _write_out(args, "\n".join(lines) + "\ngraph has no induced 2-path\n")
            return EXIT_VALIDATION
        box = graphs.pr_from_isomorphism(strategy, path, split)
        lines.append("simulated box (rows xy, cols ab):")
        for row in boxes.correlation_table(box):
            lines.append("  " + "  ".join(_fmt(v, 6) for v in row))
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_moe(args):
    if args.action == "table":
        params = None
        if args.seesaw:
            params = {"dim": args.dim, "iters": args.iters, "restarts": args.restarts, "seed": args.seed}
        rows = moe.moe_table_rows(args.kmax, params)
        if args.format == "csv":
            lines = ["k,npa1,seesaw_lower,conjecture"]
            for k, npa1, lower, conj in rows:
                lines.append(f"{k},{_fmt(npa1)},{_fmt(lower)},{_fmt(conj)}")
        else:
            lines = [f"{'K':>3}  {'NPA-1':>8}  {'seesaw':>8}  {'conjecture':>10}"]
            for k, npa1, lower, conj in rows:
                seesaw_txt = f"{lower:.4f}" if lower == lower else "-"
                lines.append(f"{k:>3}  {npa1:8.4f}  {seesaw_txt:>8}  {conj:10.4f}")
        _write_out(args, "\n".join(lines) + "\n")
        return EXIT_OK
    result = moe.seesaw(args.k, args.dim, args.iters, args.restarts, args.seed)
    bound = args.k + 2 * args.k**0.5
    lines = [
        f"seesaw k={args.k} dim={args.dim}: best <z|W|z> = {_fmt(result.best)}",
        f"conjectured norm bound: {_fmt(bound)}",
        f"win prob lower bound: {_fmt(moe.win_prob(args.k, result.best))}",
    ]
    _write_out(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="boxlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("text", "csv", "json", "svg"), default="text")

    p = sub.add_parser("box", help="build or validate a box")
    p.add_argument("--name", required=True, help="named box, file path, or c1,c2,c3 in the PR,SR,I basis")
    common(p)
    p.set_defaults(func=cmd_box)

    p = sub.add_parser("wiring", help="build or validate a wiring")
    p.add_argument("--name", default="W_BS")
    p.add_argument("--layout", action="store_true", help="print the 32-coordinate layout")
    common(p)
    p.set_defaults(func=cmd_wiring)

    p = sub.add_parser("table", help="multiplication table of a wiring")
    p.add_argument("--wiring", required=True)
    p.add_argument("--boxes", required=True, help="comma-separated box names")
    common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("orbit", help="dump an orbit as CSV")
    p.add_argument("--box", required=True)
    p.add_argument("--wiring", default="W_BS")
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--full", action="store_true", help="full orbit instead of the tilted one")
    common(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("search", help="wiring search (tasks A and B)")
    p.add_argument("--task", choices=("A", "B"), required=True)
    p.add_argument("--box", required=True)
    p.add_argument("--n", type=int, default=5, help="max products (A) / max power (B)")
    p.add_argument("--lmax", type=int, default=2)
    p.add_argument("--config", default=None, help="JSON file with DescentConfig fields")
    for field, typ in (
        ("learning_rate", float),
        ("max_iters", int),
        ("tol_eps", float),
        ("k_reset", int),
        ("chi", float),
        ("replicas", int),
        ("line_search_iters", int),
    ):
        p.add_argument(f"--{field.replace('_', '-')}", dest=field, type=typ, default=None)
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("scan", help="label a slice grid")
    p.add_argument("--basis", required=True, help="three comma-separated box names")
    p.add_argument("--grid", type=int, default=60)
    p.add_argument("--method", choices=("analytic", "taskA", "taskB", "right_power"), default="analytic")
    p.add_argument("--wiring", default=None)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--svg", default=None, help="also write an SVG scatter to this path")
    p.add_argument("--config", default=None)
    for field, typ in (
        ("learning_rate", float),
        ("max_iters", int),
        ("tol_eps", float),
        ("k_reset", int),
        ("chi", float),
        ("replicas", int),
        ("line_search_iters", int),
    ):
        p.add_argument(f"--{field.replace('_', '-')}", dest=field, type=typ, default=None)
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("graph", help="graph-game machinery")
    p.add_argument("--g", required=True, help="graph name (C6, K3, K3+K3, ...) or file")
    p.add_argument("--h", required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--check-iso", action="store_true")
    p.add_argument("--strategy-out", default=None)
    p.add_argument("--pr-box", action="store_true")
    common(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("moe", help="monogamy bound tables and seesaw")
    p.add_argument("action", choices=("table", "seesaw"))
    p.add_argument("--kmax", type=int, default=12)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--seesaw", action="store_true", help="fill the seesaw column of the table")
    common(p)
    p.set_defaults(func=cmd_moe)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"boxlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"boxlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # boxlab validation errors
        from boxlab.errors import BoxlabError

        if isinstance(exc, BoxlabError):
            print(f"boxlab: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        raise


if __name__ == "__main__":
    sys.exit(main())
