"""Command line interface.

Subcommands: ``gen`` (seeded instances), ``run`` (online algorithms
with transcripts), ``solve`` (exact offline optima), ``adversary``
(lower-bound drills), ``roundtrip`` (permit/cluster optimum equality),
``batch`` (CSV grids), ``verify`` (validate documents; exit 1 on
violations), and ``report`` (figures from batch CSV).  Outputs are
deterministic for a fixed seed, modulo the tool-version header field.
The environment variable ``RADII_MAX_N`` raises the exact solver's
distinct-location cap (default 20).
"""

from __future__ import annotations

import csv as csv_mod
import io
import sys
from fractions import Fraction

import click

from . import adversary as adv
from . import experiments, generators, reductions, report, serialize
from .fractional import FracSumRad, PhasedFrac
from .metric import validate_metric
from .model import feasibility_violations, solution_cost
from .offline import ExactSizeError, exact_opt, exact_opt_pow2, permit_opt
from .online import ALGORITHMS

RUN_CHOICES = [
    "pd",
    "simple",
    "naive",
    "fixed-adapter",
    "flexible-adapter",
    "frac",
    "frac-phased",
]


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _load_instance(path):
    return serialize.instance_from_dict(serialize.load_json(path))


@click.group()
def main():
    """Online sum-of-radii clustering toolkit."""


# --- gen ----------------------------------------------------------------------


@main.group()
def gen():
    """Generate seeded instances."""


_seed = click.option("--seed", default=0, show_default=True, type=int)
_out = click.option("-o", "--out", default=None, help="output path (stdout default)")


@gen.command("finite")
@click.option("--points", default=10, show_default=True, type=int)
@click.option("--demands", default=8, show_default=True, type=int)
@click.option("--wmax", default=8, show_default=True, type=int)
@_seed
@_out
def gen_finite(points, demands, wmax, seed, out):
    inst = generators.gen_finite(
        generators.rng_from(seed), points, demands, wmax
    )
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("hst")
@click.option("--alpha", default="5/2", show_default=True)
@click.option("--levels", default=2, show_default=True, type=int)
@click.option("--demands", default=8, show_default=True, type=int)
@_seed
@_out
def gen_hst(alpha, levels, demands, seed, out):
    inst = generators.gen_hst(
        generators.rng_from(seed), demands, alpha=Fraction(alpha), levels=levels
    )
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("plane-uniform")
@click.option("--n", default=8, show_default=True, type=int)
@click.option("--box", default=8.0, show_default=True, type=float)
@_seed
@_out
def gen_plane(n, box, seed, out):
    inst = generators.gen_plane_uniform(generators.rng_from(seed), n, box)
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("line-uniform")
@click.option("--n", default=8, show_default=True, type=int)
@click.option("--length", default=32, show_default=True, type=int)
@click.option("--as-finite", is_flag=True, help="emit an integer distance matrix")
@_seed
@_out
def gen_line(n, length, as_finite, seed, out):
    inst = generators.gen_line_uniform(
        generators.rng_from(seed), n, length, as_finite=as_finite
    )
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("planted")
@click.option("--demands", default=256, show_default=True, type=int)
@click.option("--sites", default=12, show_default=True, type=int)
@click.option("--box", default=64.0, show_default=True, type=float)
@_seed
@_out
def gen_planted(demands, sites, box, seed, out):
    inst = generators.gen_planted_plane(generators.rng_from(seed), demands, sites, box)
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("permit")
@click.option("--types", default=3, show_default=True, type=int)
@click.option("--normal-form/--no-normal-form", default=True, show_default=True)
@_seed
@_out
def gen_permit(types, normal_form, seed, out):
    p = generators.gen_permit(
        generators.rng_from(seed), types, normal_form=normal_form
    )
    _emit(serialize.dump_json(serialize.permit_to_dict(p)), out)


@gen.command("permit-reduced")
@click.option("--types", default=3, show_default=True, type=int)
@_seed
@_out
def gen_permit_reduced(types, seed, out):
    p = generators.gen_permit(generators.rng_from(seed), types, normal_form=True)
    inst, _ = reductions.permit_to_cluster(p)
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


@gen.command("adversarial")
@click.option("--metric", "metric_kind", default="hst", type=click.Choice(["hst", "plane"]))
@click.option("--algorithm", default="pd", type=click.Choice(sorted(ALGORITHMS)))
@click.option("--alpha", default="5/2", show_default=True)
@click.option("--levels", default=2, show_default=True, type=int)
@_out
def gen_adversarial(metric_kind, algorithm, alpha, levels, out):
    """Realized drill stream against a deterministic algorithm."""
    if algorithm == "simple":
        raise click.UsageError("the drill needs a deterministic algorithm")
    make = lambda m, f: ALGORITHMS[algorithm](m, f)
    runner = adv.run_hst_adversary if metric_kind == "hst" else adv.run_plane_adversary
    res = runner(make, Fraction(alpha), levels)
    if metric_kind == "hst":
        from .metric import StrictHst

        metric = StrictHst(Fraction(alpha), [3] * levels)
    else:
        from .metric import PlaneMetric, StrictHst, embed_hst

        t = StrictHst(Fraction(alpha), [3] * levels)
        metric = PlaneMetric([embed_hst(t)[p] for p in t.points])
    from .model import Instance

    inst = Instance(metric, res.demands, res.f, name=f"adversarial-{algorithm}")
    _emit(serialize.dump_json(serialize.instance_to_dict(inst)), out)


# --- run / solve ----------------------------------------------------------------


@main.command("run")
@click.option("-i", "--instance", "path", required=True)
@click.option("--algorithm", default="pd", type=click.Choice(RUN_CHOICES))
@click.option("--unknown-n", is_flag=True, help="hide the stream length from the algorithm")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "csv"]))
@_seed
@_out
def run_cmd(path, algorithm, unknown_n, fmt, seed, out):
    """Run an online algorithm over an instance and emit its transcript."""
    inst = _load_instance(path)
    if algorithm == "frac":
        if unknown_n:
            raise click.UsageError(
                "frac needs the demand count; use frac-phased for unknown-length streams"
            )
        alg = FracSumRad(inst.metric, inst.f, n=inst.n)
    elif algorithm == "frac-phased":
        alg = PhasedFrac(inst.metric, inst.f)
    elif algorithm == "simple":
        alg = ALGORITHMS["simple"](
            inst.metric, inst.f, n=None if unknown_n else inst.n, seed=seed
        )
    else:
        alg = ALGORITHMS[algorithm](inst.metric, inst.f)
    alg.run(inst.demands)
    if fmt == "json":
        _emit(serialize.dump_json(serialize.run_to_dict(alg, inst)), out)
        return
    events = serialize.jsonable(alg.events)
    cols = sorted({k for ev in events for k in ev})
    buf = io.StringIO()
    buf.write(f"# {serialize.TOOL_TAG}\n")
    writer = csv_mod.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for ev in events:
        writer.writerow([_csv_cell(ev.get(c)) for c in cols])
    _emit(buf.getvalue(), out)


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        import json

        return json.dumps(v, sort_keys=True)
    if isinstance(v, float):
        return repr(v)
    return str(v)


@main.command("solve")
@click.option("-i", "--instance", "path", required=True)
@click.option(
    "--centers",
    default="auto",
    type=click.Choice(["auto", "all", "demands", "exact-plane"]),
)
@click.option("--pow2", is_flag=True, help="restrict radii to {0} u {2^k f}")
@_out
def solve_cmd(path, centers, pow2, out):
    """Exact offline optimum of an instance."""
    inst = _load_instance(path)
    try:
        solver = exact_opt_pow2 if pow2 else exact_opt
        sol = solver(inst, centers=centers)
    except ExactSizeError as err:
        raise click.ClickException(str(err))
    _emit(
        serialize.dump_json(
            serialize.solution_to_dict(sol, metric=inst.metric, f=inst.f)
        ),
        out,
    )


# --- adversary / roundtrip ------------------------------------------------------


@main.command("adversary")
@click.option("--metric", "metric_kind", default="hst", type=click.Choice(["hst", "plane"]))
@click.option("--algorithm", default="pd", type=click.Choice(sorted(ALGORITHMS)))
@click.option("--alpha", default="5/2", show_default=True)
@click.option("--levels", default=2, show_default=True, type=int)
@click.option(
    "--opt-mode",
    default="auto",
    type=click.Choice(["auto", "exact", "exact-plane", "structural"]),
)
@_out
def adversary_cmd(metric_kind, algorithm, alpha, levels, opt_mode, out):
    """Drill an algorithm with the leftmost-uncovered-leaf stream."""
    if algorithm == "simple":
        raise click.UsageError("the drill needs a deterministic algorithm")
    make = lambda m, f: ALGORITHMS[algorithm](m, f)
    if metric_kind == "hst":
        if opt_mode == "exact-plane":
            raise click.UsageError("exact-plane optimum needs --metric plane")
        res = adv.run_hst_adversary(make, Fraction(alpha), levels, opt_mode=opt_mode)
    else:
        res = adv.run_plane_adversary(make, Fraction(alpha), levels, opt_mode=opt_mode)
    _emit(serialize.dump_json(serialize.adversary_to_dict(res)), out)


@main.command("roundtrip")
@click.option("-i", "--permit", "path", required=True)
def roundtrip_cmd(path):
    """Check permit optimum == cluster optimum on the window tree."""
    p = serialize.permit_from_dict(serialize.load_json(path))
    if not p.is_normal_form():
        raise click.UsageError("roundtrip needs a normal-form permit instance")
    cost, purchases = permit_opt(p)
    inst, tree = reductions.permit_to_cluster(p)
    tree_cost = solution_cost(exact_opt(inst), inst.f)
    back = reductions.cluster_sol_to_permit_sol(tree, exact_opt(inst))
    click.echo(f"permit optimum:  {cost}")
    click.echo(f"cluster optimum: {tree_cost}")
    click.echo(f"purchases: {purchases}  round-trip: {back}")
    if cost != tree_cost:
        click.echo("MISMATCH", err=True)
        sys.exit(1)
    click.echo("equal")


# --- batch / verify / report ----------------------------------------------------


@main.command("batch")
@click.option("--kinds", default="finite,hst,plane", show_default=True)
@click.option("--sizes", default="4,8,16", show_default=True)
@click.option("--count", default=5, show_default=True, type=int, help="instances per kind and size")
@click.option("--algorithms", default="pd,naive", show_default=True)
@click.option("--trials", default=1, show_default=True, type=int)
@click.option("--report-dir", default=None, help="also render figures here")
@_seed
@_out
def batch_cmd(kinds, sizes, count, algorithms, trials, report_dir, seed, out):
    """Run an algorithm grid over generated instances; emit CSV."""
    gens = {
        "finite": lambda rng, n: generators.gen_finite(rng, max(6, n), n),
        "hst": lambda rng, n: generators.gen_hst(rng, n),
        "plane": lambda rng, n: generators.gen_plane_uniform(rng, n),
        "line": lambda rng, n: generators.gen_line_uniform(rng, n),
    }
    instances = []
    stamp = 0
    for kind in kinds.split(","):
        kind = kind.strip()
        if kind not in gens:
            raise click.UsageError(f"unknown kind {kind!r}")
        for n in (int(s) for s in sizes.split(",")):
            for c in range(count):
                rng = generators.rng_from(seed + 1000 * stamp)
                inst = gens[kind](rng, n)
                inst.name = f"{kind}-n{n}-{c}"
                instances.append(inst)
                stamp += 1
    algs = [a.strip() for a in algorithms.split(",")]
    rows = experiments.run_batch(instances, algs, seed=seed, trials=trials)
    text = experiments.rows_to_csv(rows)
    _emit(text, out)
    if report_dir:
        made = report.render_report(rows, report_dir)
        for pth in made:
            click.echo(f"figure: {pth}", err=True)


@main.command("verify")
@click.option("-i", "--input", "path", required=True)
@click.option("--instance", "inst_path", default=None, help="context for solutions")
def verify_cmd(path, inst_path):
    """Validate a document; exit 1 when violations are found."""
    doc = serialize.load_json(path)
    schema = doc.get("schema", "")
    problems = []
    if schema.startswith("sumradii/instance"):
        inst = serialize.instance_from_dict(doc)
        problems = validate_metric(inst.metric)
        known = set(inst.metric.points)
        problems += [
            {"kind": "demand", "detail": f"unknown point {u}"}
            for u in inst.demands
            if u not in known
        ]
    elif schema.startswith("sumradii/solution"):
        if not inst_path:
            raise click.UsageError("solutions verify against --instance")
        inst = _load_instance(inst_path)
        sol = serialize.solution_from_dict(doc, metric=inst.metric)
        problems = feasibility_violations(inst, sol)
    elif schema.startswith("sumradii/permit"):
        problems = serialize.permit_from_dict(doc).validate()
    elif schema.startswith("sumradii/adversary"):
        if not doc.get("certificate_ok", False):
            problems = [{"kind": "certificate", "detail": "ratio below floor"}]
    elif schema.startswith("sumradii/run"):
        events = doc.get("events", [])
        costs = [ev.get("cost") for ev in events if ev.get("cost") is not None]
        if any(b < a - 1e-9 for a, b in zip(costs, costs[1:])):
            problems = [{"kind": "transcript", "detail": "cost not monotone"}]
    else:
        raise click.UsageError(f"unrecognized schema {schema!r}")
    if problems:
        for p in problems[:25]:
            click.echo(f"violation: {p}")
        click.echo(f"{len(problems)} violation(s)")
        sys.exit(1)
    click.echo("ok")


@main.command("report")
@click.option("-i", "--input", "path", required=True, help="batch CSV")
@click.option("--outdir", default="figures", show_default=True)
def report_cmd(path, outdir):
    """Render figures from a batch CSV."""
    rows = experiments.rows_from_csv(path)
    made = report.render_report(rows, outdir)
    for pth in made:
        click.echo(pth)


if __name__ == "__main__":
    main()
