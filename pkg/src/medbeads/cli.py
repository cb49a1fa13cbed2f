"""Operator command line: ingest, verify, reindex, get, context, patients, serve.

Exit codes: 0 success, 1 domain failure (corruption found, dangling
references above threshold), 2 usage or I/O error. Output is line-oriented
and stable; ``--json`` switches to machine-readable equivalents.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .beads import ROLE_VALUES
from .engine import ADDR_ENV, DEFAULT_ADDR, Engine, resolve_data_dir
from .errors import MedBeadsError
from .fhir import iter_bundle_paths
from .traversal import serialize_context


def _engine(ctx: click.Context) -> Engine:
    return Engine(resolve_data_dir(ctx.obj.get("data_dir")))


@click.group()
@click.option("--data-dir", envvar="MEDBEADS_DATA_DIR", default=None,
              help="Data directory (default ./medbeads_data).")
@click.pass_context
def main(ctx: click.Context, data_dir: str | None):
    """Tamper-evident clinical record store."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir


@main.command()
@click.argument("paths", nargs=-1, required=True)
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable stats.")
@click.option("--max-dangling", default=0, show_default=True,
              help="Exit 1 when total dangling references exceed this.")
@click.option("--summary-file", type=click.Path(), default=None,
              help="Also write the JSON summary to this file.")
@click.pass_context
def ingest(ctx, paths, as_json, max_dangling, summary_file):
    """Convert FHIR bundle files (or directories of them) into beads."""
    engine = _engine(ctx)
    bundle_files = []
    for p in paths:
        path = Path(p)
        if not path.exists():
            click.echo(f"error: no such path: {p}", err=True)
            sys.exit(2)
        bundle_files.extend(iter_bundle_paths(path))
    summaries = []
    total_dangling = 0
    failed = False
    for bundle_file in bundle_files:
        try:
            root_id, stats = engine.ingest(bundle_file)
        except MedBeadsError as exc:
            click.echo(f"error: {bundle_file}: {exc}", err=True)
            failed = True
            continue
        total_dangling += stats.dangling_references
        summary = {"bundle": str(bundle_file), "root": root_id, **stats.to_dict()}
        summaries.append(summary)
        if as_json:
            continue
        click.echo(f"bundle: {bundle_file}")
        click.echo(f"  root: {root_id}")
        click.echo(f"  converted: {stats.total_converted}")
        for name, count in sorted(stats.converted.items()):
            click.echo(f"    {name}: {count}")
        click.echo(f"  administrative: {stats.total_filtered}")
        for name, count in sorted(stats.filtered.items()):
            click.echo(f"    {name}: {count}")
        click.echo(f"  skipped: {stats.total_skipped}")
        click.echo(f"  dangling_references: {stats.dangling_references}")
        for err in stats.errors:
            click.echo(f"  error: {err}")
    if as_json:
        click.echo(json.dumps(summaries, indent=2))
    if summary_file:
        Path(summary_file).write_text(json.dumps(summaries, indent=2), encoding="utf-8")
    if failed:
        sys.exit(2)
    if total_dangling > max_dangling:
        click.echo(f"dangling references: {total_dangling} (threshold {max_dangling})", err=True)
        sys.exit(1)


@main.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def verify(ctx, as_json):
    """Re-hash every stored object and report broken chains."""
    engine = _engine(ctx)
    report = engine.verify()
    if as_json:
        click.echo(json.dumps({
            "checked": report.checked,
            "corrupted": [{"id": i, "failure": k} for i, k in report.corrupted],
            "broken_descendants": report.broken_descendants,
        }, indent=2))
    else:
        click.echo(f"checked: {report.checked}")
        for bead_id, kind in report.corrupted:
            click.echo(f"corrupted: {bead_id} ({kind})")
        for bead_id in report.broken_descendants:
            click.echo(f"broken descendant: {bead_id}")
        click.echo("store pristine" if report.pristine else "corruption found")
    sys.exit(0 if report.pristine else 1)


@main.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def reindex(ctx, as_json):
    """Rebuild the ephemeral index by scanning the object store."""
    engine = _engine(ctx)
    stats = engine.reindex()
    if as_json:
        click.echo(json.dumps({
            "objects_scanned": stats.objects_scanned,
            "records_written": stats.records_written,
            "edges_written": stats.edges_written,
            "skipped_corrupted": stats.skipped_corrupted,
            "duration_seconds": stats.duration_seconds,
        }, indent=2))
    else:
        click.echo(f"objects scanned: {stats.objects_scanned}")
        click.echo(f"records written: {stats.records_written}")
        click.echo(f"edges written: {stats.edges_written}")
        click.echo(f"skipped (corrupted): {stats.skipped_corrupted}")
        click.echo(f"duration: {stats.duration_seconds:.3f}s")


@main.command()
@click.argument("bead_id")
@click.pass_context
def get(ctx, bead_id):
    """Print one bead as JSON."""
    engine = _engine(ctx)
    try:
        bead = engine.get_bead(bead_id)
    except MedBeadsError as exc:  # unknown id, integrity violation
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(bead.to_dict(), indent=2, sort_keys=True, ensure_ascii=False))


@main.command()
@click.argument("bead_id")
@click.option("--depth", default=None, type=int, help="Traversal limit (default 5).")
@click.option("--role", default=None, type=click.Choice(sorted(ROLE_VALUES)),
              help="Clearance-filter results for this viewer role.")
@click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]),
              show_default=True)
@click.option("--descendants", is_flag=True, help="Traverse downward instead of upward.")
@click.pass_context
def context(ctx, bead_id, depth, role, fmt, descendants):
    """Print the causal context (ancestors) of a bead."""
    engine = _engine(ctx)
    try:
        if descendants:
            result = engine.descendants(bead_id, depth, role)
        else:
            result = engine.context(bead_id, depth, role)
    except MedBeadsError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    if fmt == "json":
        click.echo(json.dumps(result.to_dict(), indent=2, sort_keys=True, ensure_ascii=False))
    else:
        click.echo(serialize_context(result), nl=False)


@main.command()
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def patients(ctx, as_json):
    """List patient root beads."""
    engine = _engine(ctx)
    roots = engine.patients()
    if as_json:
        click.echo(json.dumps(roots, indent=2))
    else:
        for r in roots:
            name = r["name"] or "(unnamed)"
            click.echo(f"{r['id']}  {r['timestamp']}  beads={r['bead_count']}  {name}")


@main.command()
@click.option("--addr", envvar=ADDR_ENV, default=DEFAULT_ADDR, show_default=True,
              help="host:port to bind.")
@click.pass_context
def serve(ctx, addr):
    """Run the HTTP API until interrupted."""
    import uvicorn

    from .api import create_app

    host, _, port = addr.partition(":")
    app = create_app(resolve_data_dir(ctx.obj.get("data_dir")))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080), log_level="info")


if __name__ == "__main__":
    main()
