#!/usr/bin/env python3
"""
Command-line front end: batch commands for analysis, attack scans,
optimization and protocol simulation.

    python cli.py analyze --source singlet
    python cli.py analyze --attack sample_inputs/delta_06_04.json --protocol Extended9
    python cli.py scan --objective wtilde --resolution 720 --output scan.csv
    python cli.py optimize --objective w
    python cli.py simulate sample_inputs/extended9_singlet_full_sacrifice.json --output-dir results
    python cli.py replay results/manifest.json

Exit codes: 0 success, 2 input error, 3 I/O error, 4 numerical error.
"""

from __future__ import annotations

import functools
import logging
import tempfile
from pathlib import Path

import click

import optimizer
from protocol.export import to_json, write_records_csv, write_result_json, write_transcript_jsonl
from protocol.session import run_session
from protocol.sifting import sift
from quantum_model import ProductAttack, Protocol
from run_manifest import MANIFEST_NAME, RunManifest
from runtime_logging import configure_logging, set_run_context
from security_metrics import security_report
from session_config import load_attack_file, load_session_config, parse_source, session_spec_from_dict
from validators import (
    NumericalError,
    ValidationError,
    validate_choice,
    validate_margin,
    validate_resolution,
    validate_tolerance,
    validate_workers,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

OBJECTIVE_CHOICES = tuple(optimizer.OBJECTIVES)
PROTOCOL_CHOICES = tuple(p.value for p in Protocol)


def guarded(fn):
    """Translate library errors into the documented exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as e:
            field = f" [{e.field}]" if e.field else ""
            click.echo(f"input error{field}: {e.message}", err=True)
            raise click.exceptions.Exit(EXIT_INPUT)
        except NumericalError as e:
            click.echo(f"numerical error: {e.message}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERICAL)
        except OSError as e:
            click.echo(f"I/O error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_IO)
    return wrapper


def _manifest_path_for(output) -> Path:
    return Path(f"{output}.manifest.json")


# ============== EXECUTION (shared by commands and replay) ==============

def execute_analyze(params: dict) -> tuple[dict, RunManifest]:
    source = parse_source(params["source"])
    report = security_report(source, params.get("protocol", "Original4"), params.get("margin", 0.0))
    payload = {"source": source.label, **report.to_dict()}

    manifest = RunManifest("analyze", params)
    if params.get("output"):
        Path(params["output"]).write_text(to_json(payload), encoding="utf-8")
        manifest.record_output("report", params["output"])
    if params.get("pdf"):
        from pdf_export import generate_security_report
        Path(params["pdf"]).write_bytes(generate_security_report(report, source.label).getvalue())
        manifest.record_output("pdf", params["pdf"])
    if manifest.outputs:
        manifest.write(_manifest_path_for(params.get("output") or params["pdf"]))
    return payload, manifest


def execute_scan(params: dict) -> tuple[dict, RunManifest]:
    objective = optimizer.get_objective(params["objective"])
    grid = optimizer.grid_scan(objective, params["resolution"], workers=params.get("workers", 1))

    output = Path(params["output"])
    with open(output, "w", encoding="utf-8", newline="") as fh:
        grid.write_csv(fh)

    manifest = RunManifest("scan", params)
    manifest.record_output("grid", output)
    manifest.write(_manifest_path_for(output))
    logger.info("scan %s: minimum %r at %r", params["objective"], grid.min_value, grid.argmin)
    return {"objective": params["objective"], **grid.summary(), "output": str(output)}, manifest


def execute_optimize(params: dict) -> tuple[dict, RunManifest]:
    finder = optimizer.FINDERS[params["objective"]]
    result = finder(params["resolution"], params["tolerance"], workers=params.get("workers", 1))
    payload = {"objective": params["objective"], **result.to_dict()}

    manifest = RunManifest("optimize", params)
    if params.get("output"):
        Path(params["output"]).write_text(to_json(payload), encoding="utf-8")
        manifest.record_output("result", params["output"])
        manifest.write(_manifest_path_for(params["output"]))
    return payload, manifest


def execute_simulate(params: dict) -> tuple[dict, RunManifest]:
    spec = session_spec_from_dict(params["session"])
    set_run_context("simulate", spec.config.seed)

    records = run_session(spec.config, spec.source, workers=params.get("workers", 1))
    result, transcript = sift(records, spec.config)

    out_dir = Path(params["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("simulate", params, seed=spec.config.seed)

    result_path = out_dir / "result.json"
    with open(result_path, "w", encoding="utf-8") as fh:
        write_result_json(result, fh, include_keys=params.get("include_keys", False))
    manifest.record_output("result", result_path)

    if params.get("records"):
        path = out_dir / "records.csv"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            write_records_csv(records, fh)
        manifest.record_output("records", path)

    if params.get("transcript"):
        path = out_dir / "transcript.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            write_transcript_jsonl(transcript, fh)
        manifest.record_output("transcript", path)

    if params.get("pdf"):
        from pdf_export import generate_session_report
        path = out_dir / "session.pdf"
        path.write_bytes(generate_session_report(result, spec.config, spec.source.label).getvalue())
        manifest.record_output("pdf", path)

    manifest.write(out_dir / MANIFEST_NAME)
    return result.to_dict(include_keys=params.get("include_keys", False)), manifest


EXECUTORS = {
    "analyze": execute_analyze,
    "scan": execute_scan,
    "optimize": execute_optimize,
    "simulate": execute_simulate,
}

FILE_PARAMS = ("output", "pdf")


def redirect_outputs(params: dict, scratch: Path) -> dict:
    """Copy of `params` whose output paths point into `scratch`; file names are kept."""
    redirected = dict(params)
    for key in FILE_PARAMS:
        if redirected.get(key):
            target = scratch / key
            target.mkdir(parents=True, exist_ok=True)
            redirected[key] = str(target / Path(redirected[key]).name)
    if redirected.get("output_dir"):
        redirected["output_dir"] = str(scratch / "output_dir")
    return redirected


# ============== COMMANDS ==============

@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG logging (stderr).")
def main(verbose):
    """Security workbench for the Wigner-inequality Ekert protocol."""
    configure_logging(verbose)


@main.command()
@click.option("--source", "source_name", type=click.Choice(["singlet"], case_sensitive=False),
              help="Use the ideal singlet source.")
@click.option("--attack", "attack_path", type=click.Path(dir_okay=False),
              help="JSON array of {phi_a, phi_b, weight} atoms.")
@click.option("--intercept-resend", "ir_angle", help="Single-channel intercept-resend basis, e.g. 0.25pi.")
@click.option("--protocol", type=click.Choice(PROTOCOL_CHOICES, case_sensitive=False), default="Original4",
              show_default=True)
@click.option("--margin", default=0.0, show_default=True, help="Safety margin of the W < -QBER test.")
@click.option("--output", type=click.Path(dir_okay=False), help="Also write the report JSON here.")
@click.option("--pdf", type=click.Path(dir_okay=False), help="Write a PDF report here.")
@guarded
def analyze(source_name, attack_path, ir_angle, protocol, margin, output, pdf):
    """Closed-form security report for a source (JSON on stdout)."""
    chosen = [x for x in (source_name, attack_path, ir_angle) if x is not None]
    if len(chosen) != 1:
        raise ValidationError("Give exactly one of --source, --attack, --intercept-resend", "source")

    if source_name is not None:
        source_spec = "singlet"
    elif attack_path is not None:
        source_spec = {"attack": load_attack_file(attack_path).to_records()}
    else:
        source_spec = {"intercept_resend": ir_angle}

    set_run_context("analyze")
    params = {
        "source": source_spec,
        "protocol": validate_choice(protocol, PROTOCOL_CHOICES, "protocol"),
        "margin": validate_margin(margin),
        "output": output,
        "pdf": pdf,
    }
    payload, _ = execute_analyze(params)
    click.echo(to_json(payload), nl=False)


@main.command()
@click.option("--objective", type=click.Choice(OBJECTIVE_CHOICES, case_sensitive=False), required=True)
@click.option("--resolution", type=int, default=optimizer.DEFAULT_RESOLUTION, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="CSV path (default scan_<objective>_<resolution>.csv).")
@click.option("--workers", type=int, default=1, show_default=True)
@guarded
def scan(objective, resolution, output, workers):
    """Evaluate an attack objective on the [0,pi)^2 grid and write it as CSV."""
    set_run_context("scan")
    objective = objective.lower()
    resolution = validate_resolution(resolution)
    params = {
        "objective": objective,
        "resolution": resolution,
        "output": output or f"scan_{objective}_{resolution}.csv",
        "workers": validate_workers(workers),
    }
    payload, _ = execute_scan(params)
    click.echo(to_json(payload), nl=False)


@main.command()
@click.option("--objective", type=click.Choice(OBJECTIVE_CHOICES, case_sensitive=False), required=True)
@click.option("--resolution", type=int, default=optimizer.DEFAULT_RESOLUTION, show_default=True)
@click.option("--tolerance", type=float, default=optimizer.DEFAULT_TOLERANCE, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="Also write the result JSON here.")
@click.option("--workers", type=int, default=1, show_default=True)
@guarded
def optimize(objective, resolution, tolerance, output, workers):
    """Grid scan plus simplex refinement of an attack objective (JSON on stdout)."""
    set_run_context("optimize")
    params = {
        "objective": objective.lower(),
        "resolution": validate_resolution(resolution),
        "tolerance": validate_tolerance(tolerance),
        "output": output,
        "workers": validate_workers(workers),
    }
    payload, _ = execute_optimize(params)
    click.echo(to_json(payload), nl=False)


@main.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--output-dir", type=click.Path(file_okay=False), default="results", show_default=True)
@click.option("--records/--no-records", default=False, help="Export per-round records as CSV.")
@click.option("--transcript/--no-transcript", default=False, help="Export the sifting transcript as JSON lines.")
@click.option("--include-keys/--no-include-keys", default=False, help="Put the raw key bits in result.json.")
@click.option("--pdf/--no-pdf", default=False, help="Write session.pdf.")
@click.option("--workers", type=int, default=1, show_default=True)
@guarded
def simulate(config_path, output_dir, records, transcript, include_keys, pdf, workers):
    """Run a seeded session and sift it; writes result.json and manifest.json."""
    spec = load_session_config(config_path)
    session = spec.to_dict()
    if isinstance(spec.source, ProductAttack):
        # inline the atoms so the manifest does not depend on other files
        session["source"] = {"attack": spec.source.distribution.to_records()}

    params = {
        "session": session,
        "output_dir": output_dir,
        "records": records,
        "transcript": transcript,
        "include_keys": include_keys,
        "pdf": pdf,
        "workers": validate_workers(workers),
    }
    payload, _ = execute_simulate(params)
    click.echo(to_json(payload), nl=False)


@main.command()
@click.argument("manifest_path", type=click.Path(dir_okay=False))
@guarded
def replay(manifest_path):
    """Re-execute a manifest and check every output against its recorded digest."""
    manifest = RunManifest.load(manifest_path)
    executor = EXECUTORS.get(manifest.command)
    if executor is None:
        raise ValidationError(f"Unknown command '{manifest.command}' in manifest", "manifest")

    set_run_context("replay", manifest.seed)
    expected = {name: entry.get("sha256") for name, entry in manifest.outputs.items()}

    # the recorded outputs stay untouched; the re-run writes into a scratch directory
    with tempfile.TemporaryDirectory(prefix="replay-") as scratch:
        _, rerun = executor(redirect_outputs(manifest.parameters, Path(scratch)))

    matches = {name: rerun.outputs.get(name, {}).get("sha256") == digest for name, digest in expected.items()}
    logger.info("replay %s: %d of %d outputs reproduced", manifest.command, sum(matches.values()), len(matches))
    click.echo(to_json({"command": manifest.command, "outputs": matches, "reproduced": all(matches.values())}),
               nl=False)
    if not all(matches.values()):
        raise NumericalError("Replayed outputs differ from the manifest")


if __name__ == "__main__":
    main()
