"""Command line interface.

Exit codes: 0 success, 1 structured rejection (invalid scheme, rejected
classification, uncertified margin), 2 parse or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .catalog import CoherenceFailure, NEGATIVE_NAMES, Polyhedron, UnknownName, generate, generate_negative, polyhedron
from .classifier import ClassifierError, classify_m1_3
from .covering import MarginNotCertified, covering_increase_check
from .catalog import polyhedron_spec
from .embedding import embed, nearest_neighbor_graph
from .fileio import (
    ParseError,
    RunManifest,
    format_embedding,
    format_spectra,
    load_manifest,
    read_scheme,
    run_pipeline,
    serialize_scheme,
)
from .scheme import SchemeError, intersection_numbers, validate_scheme
from .spectral import compute_idempotents, is_q_polynomial_for
from .tolerances import DEFAULT

EXIT_OK, EXIT_REJECTED, EXIT_IO = 0, 1, 2


def _tol(args):
    return DEFAULT.override(eig_rel=args.tol_eig, gram=args.tol_gram)


def _emit(args, text, data):
    print(json.dumps(data, indent=2) if args.json else text)


def cmd_validate(args):
    M = read_scheme(args.file)
    A = validate_scheme(M)
    p = intersection_numbers(A)
    data = {"valid": True, "n": M.n, "d": M.d, "valencies": list(p.k)}
    _emit(args, f"valid n={M.n} d={M.d} valencies={list(p.k)}", data)
    return EXIT_OK


def cmd_spectra(args):
    M = read_scheme(args.file)
    A = validate_scheme(M)
    S = compute_idempotents(A, intersection_numbers(A), tol=_tol(args))
    qpoly = [j for j in range(1, S.d + 1) if is_q_polynomial_for(S, j)]
    print(format_spectra(S, q_polynomial=qpoly))
    return EXIT_OK


def cmd_embed(args):
    tol = _tol(args)
    M = read_scheme(args.file)
    A = validate_scheme(M)
    S = compute_idempotents(A, intersection_numbers(A), tol=tol)
    emb = embed(A, S, args.idempotent, tol)
    if args.json:
        data = {
            "j": emb.j,
            "m": emb.m,
            "alpha": emb.alpha,
            "gamma_alpha": list(emb.gamma_alpha),
            "faithful": emb.faithful,
            "values": list(emb.values),
            "points": emb.points.tolist(),
        }
        if args.gram:
            data["gram"] = emb.gram.tolist()
        print(json.dumps(data, indent=2))
    else:
        print(format_embedding(emb, gram=args.gram), end="")
    if args.figure:
        from .plotting import plot_embedding

        graph = nearest_neighbor_graph(emb, tol) if emb.faithful else None
        plot_embedding(emb, graph, args.figure)
    return EXIT_OK


def cmd_classify(args):
    tol = _tol(args)
    status = EXIT_OK
    out = []
    for path in args.files:
        input_id = args.id if args.id and len(args.files) == 1 else Path(path).stem
        result = classify_m1_3(read_scheme(path), tol)
        out.append((input_id, result))
        if result.rejected:
            status = EXIT_REJECTED
        if args.figure_dir and not result.rejected:
            from .plotting import plot_embedding

            M = read_scheme(path)
            A = validate_scheme(M)
            S = compute_idempotents(A, tol=tol)
            emb = embed(A, S, result.j, tol)
            plot_embedding(emb, nearest_neighbor_graph(emb, tol),
                           Path(args.figure_dir) / f"{input_id}.png", title=f"{input_id}: {result.label}")
    if args.json:
        print(json.dumps([dict(r.to_dict(), id=i) for i, r in out], indent=2))
    else:
        for i, r in out:
            print(r.to_line(i))
    return status


def cmd_catalog(args):
    if args.name.lower() == "list":
        for p in Polyhedron:
            print(p.slug)
        for name in NEGATIVE_NAMES:
            print(name)
        return EXIT_OK
    try:
        label = polyhedron(args.name)
    except UnknownName:
        M = generate_negative(args.name)
        print(serialize_scheme(M, comment=f"negative control {args.name}"), end="")
        return EXIT_OK
    try:
        spec, M = generate(label)
    except CoherenceFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"label": label.slug, "coherent": False, "coordinates": exc.spec.vertices.tolist()}))
        return EXIT_REJECTED
    if args.json:
        print(json.dumps({
            "label": label.slug,
            "n": M.n,
            "d": M.d,
            "relations": M.entries.tolist(),
            "coordinates": spec.vertices.tolist(),
        }, indent=2))
    else:
        print(serialize_scheme(M, comment=f"{label.display}", coordinates=spec.vertices), end="")
    return EXIT_OK


def cmd_covering(args):
    spec = polyhedron_spec(polyhedron(args.name))
    try:
        report = covering_increase_check(spec, args.step)
    except MarginNotCertified as exc:
        print(f"NOT-CERTIFIED {exc}")
        return EXIT_REJECTED
    data = {k: getattr(report, k) for k in report.__dataclass_fields__}
    text = (
        f"{report.label} CERTIFIED margin={report.margin:.6g} alpha={report.alpha:.12g} "
        f"mesh_min={report.mesh_min:.12g} step={report.mesh_step:g} depth={report.depth} "
        f"points={report.mesh_points} max_edge={report.max_edge:.6g}"
    )
    _emit(args, text, data)
    if args.figure:
        from .plotting import plot_covering

        plot_covering(spec, report, args.figure)
    return EXIT_OK


def cmd_batch(args):
    manifest = load_manifest(args.manifest)
    if args.tol_eig is not None:
        manifest.options["tol_eig"] = args.tol_eig
    if args.tol_gram is not None:
        manifest.options["tol_gram"] = args.tol_gram
    if args.workers:
        manifest.options["workers"] = args.workers
    if args.output_dir:
        manifest.options["output_dir"] = str(args.output_dir)
    done = run_pipeline(manifest)
    if args.json:
        print(done.to_json())
    else:
        for r in done.results:
            print(r.to_line())
    out = done.options.get("output_dir")
    if out:
        _write_batch(done, Path(out), args.figures)
    return EXIT_OK


def _write_batch(done: RunManifest, out: Path, figures: bool):
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(done.to_json())
    rows = ["id\tverdict\tn\tj\talpha\telapsed_ms\terror"]
    for r in done.results:
        res = r.result
        rows.append("\t".join(str(x) for x in (
            r.id,
            res.label if res else "ERROR",
            res.n if res else "",
            "" if res is None or res.j is None else res.j,
            "" if res is None or res.alpha is None else f"{res.alpha:.12g}",
            r.elapsed_ms,
            r.error or "",
        )))
    (out / "results.tsv").write_text("\n".join(rows) + "\n")
    if not figures:
        return
    from .plotting import plot_batch_summary, plot_embedding

    plot_batch_summary(done, out / "summary.png")
    paths = dict(done.inputs)
    for r in done.results:
        if r.result is None or r.result.rejected:
            continue
        M = read_scheme(paths[r.id])
        A = validate_scheme(M)
        tol = DEFAULT.override(eig_rel=done.options.get("tol_eig"), gram=done.options.get("tol_gram"))
        emb = embed(A, compute_idempotents(A, tol=tol), r.result.j, tol)
        plot_embedding(emb, nearest_neighbor_graph(emb, tol), out / "figures" / f"{r.id}.png",
                       title=f"{r.id}: {r.result.label}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol-eig", type=float, default=None,
                        help=f"relative eigenvalue clustering tolerance (default {DEFAULT.eig_rel:g})")
    common.add_argument("--tol-gram", type=float, default=None,
                        help=f"inner-product equality tolerance (default {DEFAULT.gram:g})")

    parser = argparse.ArgumentParser(prog="sphembed", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the scheme axioms")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectra", parents=[common], help="eigenmatrices P, Q and multiplicities")
    p.add_argument("file")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("embed", parents=[common], help="spherical embedding for one idempotent")
    p.add_argument("file")
    p.add_argument("--idempotent", "-j", type=int, required=True)
    p.add_argument("--gram", action="store_true", help="append the Gram matrix")
    p.add_argument("--figure", type=Path, help="write a plot of the embedding")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("classify", parents=[common], help="classify faithful m=3 embeddings")
    p.add_argument("files", nargs="+")
    p.add_argument("--id", help="input id for the verdict line (single file)")
    p.add_argument("--figure-dir", type=Path, help="plot accepted embeddings here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("catalog", parents=[common], help="emit a generated scheme ('list' for names)")
    p.add_argument("name")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("covering", parents=[common], help="certify the covering margin of a solid")
    p.add_argument("name")
    p.add_argument("--step", type=float, default=0.005, help="mesh step in radians")
    p.add_argument("--figure", type=Path, help="write a map of max inner products")
    p.set_defaults(func=cmd_covering)

    p = sub.add_parser("batch", parents=[common], help="classify every scheme in a manifest")
    p.add_argument("manifest")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--output-dir", type=Path, help="write manifest.json and results.tsv here")
    p.add_argument("--figures", action="store_true", help="also render figures into the output dir")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ParseError, UnknownName) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SchemeError, ClassifierError, IndexError) as exc:
        print(f"REJECTED:{type(exc).__name__} {exc}")
        return EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())
