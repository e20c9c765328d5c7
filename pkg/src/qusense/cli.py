"""Command-line front end: validate JSON experiment configs, run the studies,
emit CSV/JSON data files, a metadata sidecar, and optional report figures.

Exit codes: 0 success, 2 unreadable/malformed config, 3 numeric invariant
violation during the run.  Failures print a one-line JSON error record to
stderr so callers can parse them.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, metrology, noise, sensing
from .core import DENSE_CAP, CapacityError, InvariantError

DEFAULT_SEED = 20123
FORMATS = ("csv", "json")


class ConfigError(Exception):
    """Raised for unreadable, malformed, or schema-violating configs."""


# --- schema -------------------------------------------------------------------


def _int_field(default, minimum=None, maximum=None):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, int):
            return None, "expected an integer"
        if minimum is not None and v < minimum:
            return None, f"must be >= {minimum}"
        if maximum is not None and v > maximum:
            return None, f"must be <= {maximum}"
        return v, None

    return default, check


def _number_field(default, positive=False):
    def check(v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            return None, "expected a number"
        v = float(v)
        if positive and v <= 0:
            return None, "must be > 0 (negative or zero violates the precondition)"
        return v, None

    return default, check


def _nullable_number_field(default, positive=False):
    base_default, base_check = _number_field(default, positive)

    def check(v):
        if v is None:
            return None, None
        return base_check(v)

    return base_default, check


def _dims_field(default):
    def check(v):
        if not isinstance(v, list) or not v or not all(
            isinstance(d, int) and not isinstance(d, bool) for d in v
        ):
            return None, "expected a nonempty list of integers"
        if any(d < 2 for d in v):
            return None, "every qudit dimension must be >= 2"
        if math.prod(v) > DENSE_CAP:
            return None, f"total dimension exceeds the dense cap {DENSE_CAP}"
        return [int(d) for d in v], None

    return default, check


def _choice_field(default, options):
    def check(v):
        if v not in options:
            return None, f"must be one of {sorted(options)}"
        return v, None

    return default, check


def _choice_list_field(default, options):
    def check(v):
        if not isinstance(v, list) or not v:
            return None, "expected a nonempty list"
        bad = [x for x in v if x not in options]
        if bad:
            return None, f"unknown entries {bad}, allowed: {sorted(options)}"
        return list(v), None

    return default, check


def _pair_field(default, positive=False, unit_interval=False):
    def check(v):
        if v is None and default is None:
            return None, None
        if not isinstance(v, list) or len(v) != 2 or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
        ):
            return None, "expected a pair of numbers"
        v = [float(x) for x in v]
        if positive and any(x <= 0 for x in v):
            return None, "entries must be > 0"
        if unit_interval and any(not 0 <= x <= 1 for x in v):
            return None, "entries must lie in [0, 1]"
        return v, None

    return default, check


COMMON_SCHEMA = {
    "seed": _int_field(DEFAULT_SEED, minimum=0),
    "out": (".", lambda v: (v, None) if isinstance(v, str) else (None, "expected a string")),
    "format": _choice_field("csv", FORMATS),
}

SCHEMAS = {
    "digitize": {
        "dims": _dims_field([3, 2, 2]),
        "phi_points": _int_field(144, minimum=3),
    },
    "acfield": {
        "dims": _dims_field([3, 2, 2]),
        "field_points": _int_field(96, minimum=2),
        "shots": _int_field(0, minimum=0),
    },
    "correlate": {
        "couplings": _pair_field([6000.0, 12400.0], positive=True),
        "initial": _choice_list_field(
            ["superposition", "superposition"], sensing.TARGET_STATES
        ),
        "detuning": _number_field(2500.0),
        "tau": _nullable_number_field(None, positive=True),
        "tc_max": _number_field(6e-3, positive=True),
        "tc_step": _number_field(15e-6, positive=True),
        "shots": _int_field(0, minimum=0),
        "t2_star": _nullable_number_field(5e-3, positive=True),
        "readout_fidelities": _pair_field(None, unit_interval=True),
        "phase_ledger": _choice_field(
            sensing.LEDGER_FOUR_TAU, (sensing.LEDGER_FOUR_TAU, sensing.LEDGER_TWO_TAU)
        ),
    },
    "fisher": {
        "n_max": _int_field(8, minimum=1, maximum=10),
        "strategies": _choice_list_field(list(metrology.STRATEGIES), metrology.STRATEGIES),
        "phi_points": _int_field(None, minimum=3),
        "emit_curves": (True, lambda v: (v, None) if isinstance(v, bool) else (None, "expected a boolean")),
    },
    "purity": {
        "n_max": _int_field(5, minimum=1, maximum=8),
        "phi_points": _int_field(256, minimum=3),
    },
}


def load_config(path) -> dict:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def validate_config(data: dict) -> tuple[dict, list[str]]:
    """Check a parsed config against its experiment schema.

    Returns the fully defaulted config and a list of human-readable
    diagnostics; an empty list means the config is runnable.
    """
    diagnostics: list[str] = []
    experiment = data.get("experiment")
    if experiment is None:
        return {}, ["experiment: required field is missing"]
    if experiment not in SCHEMAS:
        return {}, [f"experiment: unknown experiment {experiment!r}, expected one of {sorted(SCHEMAS)}"]
    schema = {**COMMON_SCHEMA, **SCHEMAS[experiment]}
    config = {"experiment": experiment}
    for key, (default, check) in schema.items():
        if key in data:
            value, err = check(data[key])
            if err:
                diagnostics.append(f"{key}: {err}")
            else:
                config[key] = value
        else:
            config[key] = default
    unknown = sorted(set(data) - set(schema) - {"experiment"})
    for key in unknown:
        diagnostics.append(f"{key}: unknown field (unknown fields are rejected)")
    if experiment == "correlate" and config.get("tau") is None and config.get("couplings"):
        config["tau"] = sensing.default_tau(config["couplings"])
    return config, diagnostics


# --- output writers -------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_table(path: Path, columns, rows, fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    else:
        payload = {
            "columns": list(columns),
            "rows": [
                [v if isinstance(v, str) else float(_fmt(v)) for v in row] for row in rows
            ],
        }
        path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8", newline="\n")
    return str(path)


# --- experiment runners ---------------------------------------------------------


def _run_digitize(config, seed, out_dir, fmt, plot):
    dims = tuple(config["dims"])
    grid = np.linspace(0.0, 2 * math.pi, config["phi_points"], endpoint=False)
    image_qft = sensing.qft_outcome_image(dims, grid)
    image_local = sensing.local_hadamard_outcome_image(dims, grid)
    files = []
    for name, image in (("qft", image_qft), ("local_hadamard", image_local)):
        rows = [
            (phi, k, image[i, k])
            for i, phi in enumerate(grid)
            for k in range(image.shape[1])
        ]
        ext = "csv" if fmt == "csv" else "json"
        files.append(
            write_table(
                out_dir / f"digitize_{name}.{ext}", ("phi", "outcome", "probability"), rows, fmt
            )
        )
    if plot:
        from .plotting import plot_digitize

        files.append(
            plot_digitize(grid, image_local, image_qft, out_dir / "digitize_readout.png")
        )
    return files, {}


def _run_acfield(config, seed, out_dir, fmt, plot):
    dims = tuple(config["dims"])
    grid = np.linspace(0.0, 2 * math.pi, config["field_points"], endpoint=False)
    result = sensing.simulate_ac_field_estimation(grid, dims, config["shots"], seed)
    ext = "csv" if fmt == "csv" else "json"
    image_rows = [
        (phi, k, result.image[i, k])
        for i, phi in enumerate(grid)
        for k in range(result.image.shape[1])
    ]
    estimate_rows = [
        (phi, int(result.estimate_indices[i]), result.estimates[i])
        for i, phi in enumerate(grid)
    ]
    files = [
        write_table(
            out_dir / f"acfield_image.{ext}", ("field_phase", "outcome", "probability"),
            image_rows, fmt,
        ),
        write_table(
            out_dir / f"acfield_estimates.{ext}",
            ("field_phase", "estimate_index", "estimate_phase"),
            estimate_rows, fmt,
        ),
    ]
    if plot:
        from .plotting import plot_acfield

        files.append(
            plot_acfield(grid, result.image, result.estimates, out_dir / "acfield_staircase.png")
        )
    return files, {}


def _run_correlate(config, seed, out_dir, fmt, plot):
    cfg = sensing.TargetSpinConfig(
        couplings=tuple(config["couplings"]),
        initial=tuple(config["initial"]),
        detuning=config["detuning"],
    )
    times = np.arange(0.0, config["tc_max"] + config["tc_step"] / 2, config["tc_step"])
    run = sensing.CorrelationRun(
        tau=config["tau"],
        correlation_times=times,
        shots=config["shots"],
        t2_star=config["t2_star"],
        readout_fidelities=None
        if config["readout_fidelities"] is None
        else tuple(config["readout_fidelities"]),
        phase_ledger=config["phase_ledger"],
    )
    result = sensing.simulate_correlation_spectroscopy(cfg, run, seed)
    ext = "csv" if fmt == "csv" else "json"
    series_rows = [
        (t, result.p_memory[i, 0], result.p_memory[i, 1]) for i, t in enumerate(times)
    ]
    spectrum_rows = [
        (f, result.spectra[i, 0], result.spectra[i, 1])
        for i, f in enumerate(result.frequencies)
    ]
    files = [
        write_table(
            out_dir / f"correlate_timeseries.{ext}",
            ("correlation_time", "p_memory1", "p_memory2"),
            series_rows, fmt,
        ),
        write_table(
            out_dir / f"correlate_spectrum.{ext}",
            ("frequency", "magnitude_memory1", "magnitude_memory2"),
            spectrum_rows, fmt,
        ),
    ]
    report = {
        "peak_frequency_memory1": float(result.peak_frequencies[0]),
        "peak_frequency_memory2": float(result.peak_frequencies[1]),
        "linewidth_memory1": float(result.linewidths[0]),
        "linewidth_memory2": float(result.linewidths[1]),
        "target_frequencies": [float(f) for f in result.target_frequencies],
        "first_step_phases": {
            ",".join(key): [float(v) for v in value]
            for key, value in result.first_step_table.items()
        },
    }
    if plot:
        from .plotting import plot_correlate

        files.append(
            plot_correlate(
                times, result.p_memory, result.frequencies, result.spectra,
                out_dir / "correlate_spectroscopy.png",
            )
        )
    return files, report


def _run_fisher(config, seed, out_dir, fmt, plot):
    table_rows = []
    curve_rows = []
    for n in range(1, config["n_max"] + 1):
        for strategy in config["strategies"]:
            grid = (
                None
                if config["phi_points"] is None
                else metrology.default_phi_grid(config["phi_points"])
            )
            scan = metrology.fisher_scan(strategy, n, grid)
            table_rows.append((n, strategy, scan.qfi, scan.cfi_mean))
            if config["emit_curves"]:
                curve_rows.extend(
                    (n, strategy, phi, val)
                    for phi, val in zip(scan.phi_grid, scan.cfi_curve)
                )
    ext = "csv" if fmt == "csv" else "json"
    files = [
        write_table(
            out_dir / f"fisher_table.{ext}", ("n", "strategy", "qfi", "cfi_mean"),
            table_rows, fmt,
        )
    ]
    if config["emit_curves"]:
        files.append(
            write_table(
                out_dir / f"fisher_curves.{ext}", ("n", "strategy", "phi", "cfi"),
                curve_rows, fmt,
            )
        )
    if plot:
        from .plotting import plot_fisher

        files.append(plot_fisher(table_rows, out_dir / "fisher_scaling.png"))
    return files, {}


def _run_purity(config, seed, out_dir, fmt, plot):
    grid = np.linspace(0.0, 2 * math.pi, config["phi_points"], endpoint=False)
    rows = []
    for n in range(1, config["n_max"] + 1):
        for mapping in noise.MAPPINGS:
            study = noise.purity_study(n, grid, mapping)
            rows.append((n, mapping, study.mean_purity, study.stderr))
    ext = "csv" if fmt == "csv" else "json"
    files = [
        write_table(
            out_dir / f"purity.{ext}", ("n", "mapping", "mean_purity", "stderr"), rows, fmt
        )
    ]
    if plot:
        from .plotting import plot_purity

        files.append(plot_purity(rows, out_dir / "purity_study.png"))
    return files, {}


RUNNERS = {
    "digitize": _run_digitize,
    "acfield": _run_acfield,
    "correlate": _run_correlate,
    "fisher": _run_fisher,
    "purity": _run_purity,
}


def _error_record(code: int, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": message}}) + "\n")


def _execute(experiment, config_path, out_dir, seed, fmt, plot) -> int:
    try:
        data = load_config(config_path)
    except ConfigError as exc:
        _error_record(2, str(exc))
        return 2
    config, diagnostics = validate_config(data)
    if config.get("experiment") not in (None, experiment):
        diagnostics.append(
            f"experiment: config names {config['experiment']!r} but the "
            f"{experiment!r} command was invoked"
        )
    if diagnostics:
        _error_record(2, "; ".join(diagnostics))
        return 2
    final_seed = seed if seed is not None else config["seed"]
    final_fmt = fmt if fmt is not None else config["format"]
    out = Path(out_dir if out_dir is not None else config["out"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        files, report = RUNNERS[experiment](config, final_seed, out, final_fmt, plot)
    except (InvariantError, CapacityError) as exc:
        _error_record(3, f"numeric invariant violation: {exc}")
        return 3
    meta = {
        "experiment": experiment,
        "artifact_version": __version__,
        "config_sha256": hashlib.sha256(Path(config_path).read_bytes()).hexdigest(),
        "seed": final_seed,
        "outputs": [Path(f).name for f in files],
    }
    if report:
        meta["report"] = report
    meta_path = out / f"{experiment}_meta.json"
    meta_path.write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8", newline="\n")
    for f in files + [str(meta_path)]:
        click.echo(f)
    return 0


@click.group()
@click.version_option(version=__version__)
def main():
    """Run QFT-based quantum sensing studies from JSON configs."""


def _register(experiment: str, help_text: str) -> None:
    @click.option("--config", "config_path", required=True, type=click.Path(), help="JSON config file")
    @click.option("--out", "out_dir", default=None, help="output directory (default from config)")
    @click.option("--seed", default=None, type=click.IntRange(min=0), help="override the config seed")
    @click.option("--format", "fmt", default=None, type=click.Choice(FORMATS), help="output format")
    @click.option("--plot", is_flag=True, help="also render report figures")
    def command(config_path, out_dir, seed, fmt, plot):
        sys.exit(_execute(experiment, config_path, out_dir, seed, fmt, plot))

    command.__name__ = experiment
    main.command(name=experiment, help=help_text)(command)


_register("digitize", "Phase digitization readout: local Hadamard vs inverse QFT.")
_register("acfield", "AC-field phase estimation staircase over a full 2*pi sweep.")
_register("correlate", "Two-target correlation spectroscopy with QFT demultiplexing.")
_register("fisher", "QFI/CFI scaling table for the sql/qpea/noon strategies.")
_register("purity", "Mean register purity after dephasing, QFT vs local mapping.")


@main.command(name="validate", help="Check a config against its schema without running.")
@click.option("--config", "config_path", required=True, type=click.Path())
def validate_command(config_path):
    try:
        data = load_config(config_path)
    except ConfigError as exc:
        _error_record(2, str(exc))
        sys.exit(2)
    _, diagnostics = validate_config(data)
    for line in diagnostics:
        click.echo(line)
    sys.exit(0 if not diagnostics else 2)


if __name__ == "__main__":
    main()
