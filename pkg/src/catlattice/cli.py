"""Command line front end: ``catlattice simulate|green|wigner|compare|cat``.

Every command writes one long-format table (CSV or JSON) and exits with a
nonzero status when a leakage or comparison threshold is breached, so the
commands can gate CI runs.
"""

from __future__ import annotations

import logging
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click
import numpy as np

from . import cats, fock, lattice, wigner
from .lattice import LatticeSpec
from .tables import read_table, write_table

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "CATLATTICE_OUTPUT_DIR"
COMMANDS = ("simulate", "green", "wigner", "compare", "cat")
EXIT_OK, EXIT_BREACH, EXIT_ERROR = 0, 1, 2


class DescriptorError(ValueError):
    def __init__(self, text: str, position: int, expected: str):
        pointer = " " * position + "^"
        super().__init__(
            f"bad state descriptor at position {position}: expected {expected}\n  {text}\n  {pointer}"
        )
        self.position = position
        self.expected = expected


@dataclass(frozen=True)
class StateDescriptor:
    """Parsed launch state; call it with a dimension to build the vector."""

    kind: str
    beta: complex = 0j
    k: int = 0
    text: str = ""

    def __call__(self, dim: int) -> np.ndarray:
        if self.kind == "fock":
            return fock.basis(self.k, dim)
        if self.kind == "coherent":
            return cats.coherent_state(self.beta, dim)
        if self.kind == "dfock":
            return cats.displaced_fock(self.beta, self.k, dim)
        if self.kind == "cat":
            return cats.cat_from_fock(self.beta, self.k, dim)[0]
        raise ValueError(self.kind)

    @property
    def reach(self) -> float:
        return abs(self.beta)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, expected: str):
        raise DescriptorError(self.text, self.pos, expected)

    def literal(self, s: str) -> bool:
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.literal(s):
            self.fail(repr(s))

    def number(self) -> float:
        start = self.pos
        t = self.text
        while self.pos < len(t) and (t[self.pos].isdigit() or t[self.pos] in "+-.eE"):
            self.pos += 1
        try:
            return float(t[start:self.pos])
        except ValueError:
            self.pos = start
            self.fail("a real number")

    def integer(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("a nonnegative integer")
        return int(self.text[start:self.pos])

    def end(self):
        if self.pos != len(self.text):
            self.fail("end of descriptor")


def parse_input_descriptor(text: str) -> StateDescriptor:
    """Parse ``fock:<k>``, ``coherent:<re>,<im>``, ``coherent:n=<mean>``,
    ``dfock:<re>,<im>,<k>``, ``dfock:n=<mean>,<k>`` or ``cat:<re>,<im>[,<k>]``.

    The ``n=`` forms take a real positive displacement with ``|beta|^2 = mean``.
    """
    sc = _Scanner(text.strip())
    for kind in ("fock", "coherent", "dfock", "cat"):
        if sc.literal(kind + ":"):
            break
    else:
        sc.fail("one of 'fock:', 'coherent:', 'dfock:', 'cat:'")

    if kind == "fock":
        k = sc.integer()
        sc.end()
        return StateDescriptor("fock", 0j, k, text)

    if kind in ("coherent", "dfock") and sc.literal("n="):
        start = sc.pos
        mean = sc.number()
        if mean < 0:
            sc.pos = start
            sc.fail("a nonnegative mean photon number")
        beta = complex(math.sqrt(mean), 0.0)
    else:
        re = sc.number()
        sc.expect(",")
        im = sc.number()
        beta = complex(re, im)

    k = 0
    if kind == "dfock":
        sc.expect(",")
        k = sc.integer()
    elif kind == "cat" and sc.literal(","):
        k = sc.integer()
    sc.end()
    return StateDescriptor(kind, beta, k, text)


@dataclass
class RunConfig:
    command: str
    spec: LatticeSpec = field(default_factory=LatticeSpec)
    input: str = "fock:0"
    z_max: float = 4.0
    z_samples: int = 400
    output_path: str | None = None
    output_format: str = "csv"
    tol: float = 1e-8
    wigner_range: float = 2.0
    resolution: int = 41
    dim: int | None = None
    numeric_csv: str | None = None

    def validate(self) -> StateDescriptor:
        if self.command not in COMMANDS:
            raise click.UsageError(f"unknown command {self.command!r}")
        if self.z_samples < 2:
            raise click.UsageError("z_samples must be >= 2")
        if not self.z_max > 0:
            raise click.UsageError("z_max must be > 0")
        if self.output_format not in ("csv", "json"):
            raise click.UsageError("output format must be csv or json")
        return parse_input_descriptor(self.input)

    def echo(self) -> dict:
        d = asdict(self)
        d["spec"] = asdict(self.spec)
        d.pop("output_path")
        return d

    def resolve_output(self) -> Path:
        if self.output_path:
            return Path(self.output_path)
        base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
        return base / f"{self.command}.{self.output_format}"

    @property
    def z_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.z_samples)


def _field_rows(z_grid, fields):
    for zj, row in zip(z_grid, fields):
        for m, e in enumerate(row):
            yield (zj, m, e.real, e.imag, abs(e) ** 2)


FIELD_COLUMNS = ("z", "m", "re", "im", "intensity")


def _simulate(cfg: RunConfig, desc: StateDescriptor) -> tuple[int, dict]:
    psi = desc(cfg.spec.sites)
    rec = lattice.evolve_numeric(cfg.spec, psi, cfg.z_grid, label=desc.text)
    summary = {"max_leakage": rec.max_leakage, "max_norm_error": float(np.max(np.abs(rec.norms - 1)))}
    write_table(cfg.resolve_output(), FIELD_COLUMNS, _field_rows(rec.z_grid, rec.fields),
                cfg.echo(), cfg.output_format, summary)
    if not rec.ok:
        log.warning(rec.warning)
        return EXIT_BREACH, summary
    return EXIT_OK, summary


def _green(cfg: RunConfig, desc: StateDescriptor) -> tuple[int, dict]:
    if desc.kind != "fock":
        raise click.UsageError("green needs a single-site launch, e.g. --input fock:3")
    n = cfg.spec.sites
    fields = np.array([lattice.green_matrix(n, cfg.spec.g * z)[:, desc.k] for z in cfg.z_grid])
    missing = np.clip(1.0 - np.sum(np.abs(fields) ** 2, axis=1), 0.0, None)
    leak = missing + np.sum(np.abs(fields[:, -fock.EDGE_ROWS:]) ** 2, axis=1)
    summary = {"max_leakage": float(np.max(leak))}
    write_table(cfg.resolve_output(), FIELD_COLUMNS, _field_rows(cfg.z_grid, fields),
                cfg.echo(), cfg.output_format, summary)
    if summary["max_leakage"] > cfg.spec.leakage_tol:
        j = int(np.argmax(leak))
        log.warning("leakage %.3e at z=%.6g exceeds %.1e", leak[j], cfg.z_grid[j], cfg.spec.leakage_tol)
        return EXIT_BREACH, summary
    return EXIT_OK, summary


def _wigner(cfg: RunConfig, desc: StateDescriptor) -> tuple[int, dict]:
    r = cfg.wigner_range
    corner = math.hypot(r, r)
    probe = desc(max(cfg.dim or 0, fock.required_dim(desc.reach, desc.k) + 10))
    dim = cfg.dim or fock.required_dim(corner, fock.occupation_extent(probe))
    psi = desc(dim)
    grid = wigner.wigner_grid(psi, (-r, r), (-r, r), cfg.resolution, label=desc.text)
    missing = int(np.count_nonzero(np.isnan(grid.values)))
    summary = {"dim": dim, "missing_points": missing, "center": grid.at(0j),
               "max_abs": float(np.nanmax(np.abs(grid.values)))}
    rows = (
        (x, y, grid.values[i, j])
        for i, y in enumerate(grid.y_axis)
        for j, x in enumerate(grid.x_axis)
    )
    write_table(cfg.resolve_output(), ("x", "y", "w"), rows, cfg.echo(), cfg.output_format, summary)
    if missing:
        log.warning("%d grid points exceed the truncation guard at dim=%d", missing, dim)
        return EXIT_BREACH, summary
    return EXIT_OK, summary


def _compare(cfg: RunConfig, desc: StateDescriptor) -> tuple[int, dict]:
    spec = cfg.spec
    psi = desc(spec.sites)
    if cfg.numeric_csv:
        _, data = read_table(cfg.numeric_csv)
        z_grid = np.unique(data["z"])
        numeric = (data["re"] + 1j * data["im"]).reshape(z_grid.size, -1)
        if numeric.shape[1] != spec.sites:
            raise click.UsageError("numeric table does not match --sites")
        leak = np.sum(np.abs(numeric[:, -fock.EDGE_ROWS:]) ** 2, axis=1)
    else:
        z_grid = cfg.z_grid
        rec = lattice.evolve_numeric(spec, psi, z_grid, label=desc.text)
        numeric, leak = rec.fields, rec.leakage
    analytic = np.array([lattice.green_matrix(spec.sites, spec.g * z) @ psi for z in z_grid])
    diff = np.abs(analytic - numeric)
    j, m = np.unravel_index(int(np.argmax(diff)), diff.shape)
    summary = {"max_abs_diff": float(diff[j, m]), "at_z": float(z_grid[j]), "at_m": int(m),
               "max_leakage": float(np.max(leak))}
    rows = (
        (z, mm, a.real, a.imag, n.real, n.imag, dd)
        for z, arow, nrow, drow in zip(z_grid, analytic, numeric, diff)
        for mm, (a, n, dd) in enumerate(zip(arow, nrow, drow))
    )
    cols = ("z", "m", "analytic_re", "analytic_im", "numeric_re", "numeric_im", "abs_diff")
    write_table(cfg.resolve_output(), cols, rows, cfg.echo(), cfg.output_format, summary)
    status = EXIT_OK
    if summary["max_abs_diff"] > cfg.tol:
        log.warning("analytic and numeric propagators differ by %.3e at m=%d, z=%.6g",
                    diff[j, m], m, z_grid[j])
        status = EXIT_BREACH
    if summary["max_leakage"] > spec.leakage_tol:
        log.warning("leakage %.3e exceeds %.1e", summary["max_leakage"], spec.leakage_tol)
        status = EXIT_BREACH
    return status, summary


def _cat(cfg: RunConfig, desc: StateDescriptor) -> tuple[int, dict]:
    spec = cfg.spec
    if desc.kind == "cat":
        state, decomp = cats.cat_from_fock(desc.beta, desc.k, spec.sites)
        z = 0.0
    elif desc.kind in ("coherent", "dfock"):
        z = cfg.z_max
        state, decomp = lattice.propagate_cat(spec, desc.beta, desc.k, z, guard=None)
    else:
        raise click.UsageError("cat needs a cat:, coherent: or dfock: input")
    recon = decomp.reconstruct(spec.sites)
    leak = float(np.sum(np.abs(state[-fock.EDGE_ROWS:]) ** 2))
    summary = {
        "reconstruction_error": float(np.max(np.abs(recon - state))),
        "max_leakage": leak,
        "components": [
            {"weight_re": c.weight.real, "weight_im": c.weight.imag,
             "displacement_re": c.displacement.real, "displacement_im": c.displacement.imag,
             "fock_index": c.fock_index}
            for c in decomp
        ],
    }
    out = cfg.resolve_output()
    write_table(out, FIELD_COLUMNS, _field_rows([z], [state]), cfg.echo(), cfg.output_format, summary)
    comp_rows = [tuple(c.values()) for c in summary["components"]]
    write_table(out.with_name(out.stem + "_components" + out.suffix),
                tuple(summary["components"][0].keys()), comp_rows, cfg.echo(), cfg.output_format)
    if summary["reconstruction_error"] > 1e-6 or leak > spec.leakage_tol:
        return EXIT_BREACH, summary
    return EXIT_OK, summary


_HANDLERS = {"simulate": _simulate, "green": _green, "wigner": _wigner,
             "compare": _compare, "cat": _cat}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns ``(exit_status, summary)``."""
    desc = cfg.validate()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", lattice.LeakageWarning)
        return _HANDLERS[cfg.command](cfg, desc)


def _lattice_options(f):
    f = click.option("--sites", type=int, default=60, show_default=True, help="Number of waveguides.")(f)
    f = click.option("--g", "g", type=float, default=1.0, show_default=True, help="Coupling scale per unit length.")(f)
    f = click.option("--leakage-tol", type=float, default=1e-8, show_default=True)(f)
    f = click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
                     help=f"Output file (default: ${OUTPUT_DIR_ENV}/<command>.<format>).")(f)
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)(f)
    return f


def _z_options(f):
    f = click.option("--zmax", type=float, default=4.0, show_default=True, help="Propagation length.")(f)
    f = click.option("--samples", type=int, default=400, show_default=True, help="Number of z samples.")(f)
    return f


def _invoke(**kw) -> None:
    try:
        status, summary = run(RunConfig(**kw))
    except (fock.TruncationError, DescriptorError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ERROR)
    for key, val in summary.items():
        if key != "components":
            click.echo(f"{key}: {val}", err=True)
    sys.exit(status)


def _spec(sites, g, leakage_tol):
    try:
        return LatticeSpec(g=g, sites=sites, leakage_tol=leakage_tol)
    except ValueError as exc:
        raise click.BadParameter(str(exc))


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Deformed Glauber-Fock lattice simulator."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")


@main.command()
@_lattice_options
@_z_options
@click.option("--input", "input_", default="fock:0", show_default=True, help="Launch state descriptor.")
def simulate(sites, g, leakage_tol, output, fmt, zmax, samples, input_):
    """Propagate a launch state numerically; writes |E_m(z)|^2 and amplitudes."""
    _invoke(command="simulate", spec=_spec(sites, g, leakage_tol), input=input_, z_max=zmax,
            z_samples=samples, output_path=output, output_format=fmt)


@main.command()
@_lattice_options
@_z_options
@click.option("--input", "input_", default="fock:0", show_default=True)
def green(sites, g, leakage_tol, output, fmt, zmax, samples, input_):
    """Write the analytic Green function for a single-site launch."""
    _invoke(command="green", spec=_spec(sites, g, leakage_tol), input=input_, z_max=zmax,
            z_samples=samples, output_path=output, output_format=fmt)


@main.command("wigner")
@_lattice_options
@click.option("--state", "input_", default="fock:0", show_default=True)
@click.option("--range", "range_", type=float, default=2.0, show_default=True,
              help="Grid covers [-range, range] in both quadratures.")
@click.option("--resolution", type=int, default=41, show_default=True)
@click.option("--dim", type=int, default=None, help="Fock truncation (default: sized for the grid).")
def wigner_cmd(sites, g, leakage_tol, output, fmt, input_, range_, resolution, dim):
    """Wigner function W(x + iy) of a state on a square grid."""
    _invoke(command="wigner", spec=_spec(sites, g, leakage_tol), input=input_,
            output_path=output, output_format=fmt, wigner_range=range_,
            resolution=resolution, dim=dim)


@main.command()
@_lattice_options
@_z_options
@click.option("--input", "input_", default="fock:0", show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True, help="Allowed analytic/numeric difference.")
@click.option("--numeric-csv", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Compare against amplitudes from a 'simulate' table instead of recomputing.")
def compare(sites, g, leakage_tol, output, fmt, zmax, samples, input_, tol, numeric_csv):
    """Check the analytic Green function against the numeric propagator."""
    _invoke(command="compare", spec=_spec(sites, g, leakage_tol), input=input_, z_max=zmax,
            z_samples=samples, output_path=output, output_format=fmt, tol=tol,
            numeric_csv=numeric_csv)


@main.command()
@_lattice_options
@_z_options
@click.option("--input", "input_", default="cat:1,0", show_default=True)
def cat(sites, g, leakage_tol, output, fmt, zmax, samples, input_):
    """Cat-state components: D_NL on a Fock state, or lattice splitting of a displaced state at zmax."""
    _invoke(command="cat", spec=_spec(sites, g, leakage_tol), input=input_, z_max=zmax,
            z_samples=samples, output_path=output, output_format=fmt)


if __name__ == "__main__":
    main()
