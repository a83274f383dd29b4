"""Command-line front end: spectrum scans, EP location, Jordan checks,
survival dynamics, generic threshold models, and figure-reproduction presets.

Configuration can come from a plain-text file of ``key = value`` lines
(``#`` starts a comment); command-line flags override file values.  Unknown
keys are rejected with their line number.  All CSV output uses fixed
17-significant-digit scientific notation so repeated runs are byte-identical
and doubles round-trip exactly.

The environment variable BANDEDGE_NUM_THREADS, if set, caps the BLAS thread
pools (it must be read before numpy spins them up, hence the early hook in
``main``).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BandEdgeError, ConfigError

_UNSET = object()


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            cells.append(v if isinstance(v, str) else _fmt(v))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None


# per-subcommand schema: key -> (type, default, validator)
def _positive(name):
    def check(v):
        if not v > 0:
            raise ConfigError(f"{name} must be > 0, got {v}")
    return check


def _nonneg(name):
    def check(v):
        if not v >= 0:
            raise ConfigError(f"{name} must be >= 0, got {v}")
    return check


_SCHEMAS = {
    "spectrum": {
        "g": (float, 0.1, _nonneg("g")),
        "eps_d": (float, -2.0, None),
        "eps_min": (float, None, None),
        "eps_max": (float, None, None),
        "step": (float, 0.001, _positive("step")),
        # extended-precision root polish ("high") or vectorized double ("fast")
        "precision": (str, "high", None),
    },
    "ep": {
        "g": (float, 0.1, _nonneg("g")),
        "re_min": (float, -2.15, None),
        "re_max": (float, -1.85, None),
        "im_min": (float, -0.08, None),
        "im_max": (float, 0.08, None),
        "n_re": (int, 61, _positive("n_re")),
        "n_im": (int, 41, _positive("n_im")),
        "sheet": (bool, False, None),
    },
    "jordan": {},
    "dynamics": {
        "g": (float, 0.02, _nonneg("g")),
        "eps_d": (float, -2.0, None),
        "t_max": (float, 600.0, _positive("t_max")),
        "dt": (float, 0.5, _positive("dt")),
        "method": (str, "oracle", None),
        "n_sites": (int, None, None),
        "gnuplot": (bool, False, None),
    },
    "generic": {
        "model": (str, "const", None),
        "g": (float, 0.1, _nonneg("g")),
        "e_min": (float, None, None),
        "e_max": (float, None, None),
        "n_points": (int, 81, _positive("n_points")),
    },
    "figures": {
        "name": (str, "fig1", None),
    },
}

_METHODS = {"oracle", "bessel", "intermediate", "longtime", "all"}
_MODELS = {"const", "lorentzian", "main-text"}
_FIGURES = {"fig1", "fig3", "fig4", "fig5"}


def parse_config_file(path: str, schema: dict) -> dict:
    values = {}
    errors = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw!r}")
            continue
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key not in schema:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        typ = schema[key][0]
        try:
            if typ is bool:
                values[key] = val.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = typ(val)
        except ValueError:
            errors.append(f"line {lineno}: cannot parse {val!r} as {typ.__name__}")
    if errors:
        raise ConfigError("config file errors:\n  " + "\n  ".join(errors))
    return values


def parse_config(argv, schema_lookup=None) -> RunConfig:
    """argparse front end; flags override config-file values."""
    schemas = schema_lookup or _SCHEMAS
    parser = argparse.ArgumentParser(
        prog="bandedge",
        description="Spectral structure and decay dynamics of a quantum "
        "emitter at a 1-D band edge",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in schemas.items():
        aliases = ["jordan-check"] if name == "jordan" else []
        p = sub.add_parser(name, aliases=aliases)
        p.add_argument("--config", default=None)
        p.add_argument("--output", "-o", default=None)
        for key, (typ, _default, _check) in schema.items():
            flag = "--" + key.replace("_", "-")
            if typ is bool:
                p.add_argument(flag, action="store_const", const=True,
                               default=_UNSET, dest=key)
            else:
                p.add_argument(flag, type=typ, default=_UNSET, dest=key)
    ns = parser.parse_args(argv)
    name = "jordan" if ns.subcommand == "jordan-check" else ns.subcommand
    schema = schemas[name]
    merged = {k: d for k, (t, d, c) in schema.items()}
    if ns.config is not None:
        merged.update(parse_config_file(ns.config, schema))
    for key in schema:
        v = getattr(ns, key)
        if v is not _UNSET:
            merged[key] = v
    for key, (typ, _d, check) in schema.items():
        v = merged.get(key)
        if v is not None and check is not None:
            check(v)
    if name == "spectrum" and merged["precision"] not in ("high", "fast"):
        raise ConfigError("precision must be 'high' or 'fast'")
    if name == "spectrum" and (merged["eps_min"] is None) != (merged["eps_max"] is None):
        raise ConfigError("scan mode needs both eps_min and eps_max")
    if name == "dynamics" and merged["method"] not in _METHODS:
        raise ConfigError(f"method must be one of {sorted(_METHODS)}")
    if name == "generic" and merged["model"] not in _MODELS:
        raise ConfigError(f"model must be one of {sorted(_MODELS)}")
    if name == "figures" and merged["name"] not in _FIGURES:
        raise ConfigError(f"figure name must be one of {sorted(_FIGURES)}")
    return RunConfig(subcommand=name, params=merged, output=ns.output)


# ---------------------------------------------------------------------------
# Subcommand runners (import numerical modules lazily so that the thread-cap
# environment hook in main() runs before numpy loads BLAS)
# ---------------------------------------------------------------------------

def _run_spectrum(cfg: RunConfig) -> int:
    from .model import ModelParams
    from .spectrum import discrete_spectrum, spectrum_scan

    p = cfg.params
    if p["eps_min"] is not None and p["eps_max"] is not None:
        rows = spectrum_scan(p["g"], p["eps_min"], p["eps_max"], p["step"])
        out = cfg.output or "spectrum_scan.csv"
        write_csv(
            out,
            ["eps_d", "class", "re_E", "im_E", "re_lambda", "im_lambda",
             "re_psid_sq", "im_psid_sq"],
            [
                (r.eps_d, r.state.state_class.value, r.state.energy.real,
                 r.state.energy.imag, r.state.lam.real, r.state.lam.imag,
                 r.state.psid_sq.real, r.state.psid_sq.imag)
                for r in rows
            ],
        )
        print(f"wrote {out} ({len(rows)} rows)")
        return 0
    params = ModelParams(epsilon_d=p["eps_d"], g=p["g"])
    states = discrete_spectrum(params, polish="mp" if p["precision"] == "high" else "fast")
    states.sort(key=lambda s: s.energy.real)
    print(f"discrete spectrum at eps_d = {p['eps_d']}, g = {p['g']}:")
    for s in states:
        print(
            f"  {s.state_class.value:<15} E = {s.energy.real:+.12f}"
            f"{s.energy.imag:+.12f}i   lam = {s.lam.real:+.12f}"
            f"{s.lam.imag:+.12f}i"
        )
    if cfg.output:
        write_csv(
            cfg.output,
            ["class", "re_E", "im_E", "re_lambda", "im_lambda",
             "re_psid_sq", "im_psid_sq"],
            [
                (s.state_class.value, s.energy.real, s.energy.imag,
                 s.lam.real, s.lam.imag, s.psid_sq.real, s.psid_sq.imag)
                for s in states
            ],
        )
        print(f"wrote {cfg.output}")
    return 0


def _run_ep(cfg: RunConfig) -> int:
    import numpy as np

    from .ep import all_ep_locations, complex_parameter_sheet, scan_consistency_rows

    p = cfg.params
    locs = all_ep_locations(p["g"])
    print(f"exceptional points at g = {p['g']}:")
    for loc in locs:
        print(
            f"  n = {loc.n:+d}: E_bar = {loc.energy.real:+.10f}"
            f"{loc.energy.imag:+.10f}i   eps_bar = {loc.eps_d.real:+.10f}"
            f"{loc.eps_d.imag:+.10f}i"
        )
    if p["sheet"]:
        re = np.linspace(p["re_min"], p["re_max"], p["n_re"])
        im = np.linspace(p["im_min"], p["im_max"], p["n_im"])
        cells = complex_parameter_sheet(p["g"], re, im)
        out = cfg.output or "ep_sheet.csv"
        write_csv(
            out,
            ["re_eps", "im_eps", "branch_id", "re_E", "im_E"],
            [(a, b, str(c), d, e) for a, b, c, d, e in scan_consistency_rows(cells)],
        )
        print(f"wrote {out}")
    return 0


def _run_jordan(cfg: RunConfig) -> int:
    from .jordan import (
        eigenvalue_one_defect,
        jordan_chain_check,
        limit_matrix,
        verify_jordan_form,
    )

    print("limit matrix B^{-1}A (g = 0, eps_d = -2):")
    print(limit_matrix())
    ok, J = verify_jordan_form()
    print("transformed matrix R^{-1} (B^{-1}A) R:")
    print(J.astype(int))
    alg, geo = eigenvalue_one_defect()
    print(f"eigenvalue 1: algebraic multiplicity {alg}, geometric {geo}")
    residuals = jordan_chain_check()
    failed = False
    for name, res in residuals.items():
        norm = sum(abs(x) for x in res)
        print(f"  chain relation {name}: residual {'0 (exact)' if norm == 0 else res}")
        failed |= norm != 0
    if failed or not ok or (alg, geo) != (3, 2):
        print("STRUCTURAL FAILURE")
        return 2
    print("all structural checks exact")
    return 0


def _run_dynamics(cfg: RunConfig) -> int:
    import numpy as np

    from .dynamics import (
        LatticeConfig,
        survival_bessel_sum,
        survival_intermediate_law,
        survival_lattice_oracle,
        survival_longtime_law,
    )
    from .model import ModelParams

    p = cfg.params
    params = ModelParams(epsilon_d=p["eps_d"], g=p["g"])
    times = np.arange(0.0, p["t_max"] + 1e-9, p["dt"])
    method = p["method"]
    traces = []
    if method in ("oracle", "all"):
        n = p["n_sites"] or int(2 * p["t_max"] + 50)
        traces.append(
            survival_lattice_oracle(params, LatticeConfig(n, p["t_max"]), times)
        )
    if method in ("bessel", "all"):
        traces.append(survival_bessel_sum(params, times))
    if method in ("intermediate", "all"):
        P = survival_intermediate_law(p["g"], times)
        traces.append(_law_trace(times, P, "IntermediateLaw"))
    if method in ("longtime", "all"):
        tl = times[times > 0]
        P = survival_longtime_law(params, tl)
        traces.append(_law_trace(tl, P, "LongTimeLaw"))
    out = cfg.output or "dynamics.csv"
    rows = []
    for tr in traces:
        name = tr.method.value if hasattr(tr.method, "value") else tr.method
        for i, t in enumerate(tr.times):
            a = tr.amplitude[i]
            rows.append((t, a.real, a.imag, tr.probability[i], name))
    write_csv(out, ["t", "re_A", "im_A", "P", "method"], rows)
    print(f"wrote {out} ({len(rows)} rows)")
    if p["gnuplot"]:
        script = Path(out).with_suffix(".gp")
        script.write_text(_gnuplot_dynamics(out))
        print(f"wrote {script}")
    return 0


def _law_trace(times, P, name):
    import numpy as np

    from .dynamics import Method, SurvivalTrace

    amp = np.sqrt(np.clip(P, 0.0, None)).astype(complex)
    return SurvivalTrace(
        times=np.asarray(times, dtype=float),
        amplitude=amp,
        probability=np.asarray(P, dtype=float),
        method=Method(name),
    )


def _gnuplot_dynamics(csv_name: str) -> str:
    return (
        "set datafile separator ','\n"
        "set xlabel 't (units of 1/J)'\n"
        "set ylabel 'P(t)'\n"
        f"plot '{csv_name}' every ::1 using 1:4 with lines title 'P(t)'\n"
    )


def _run_generic(cfg: RunConfig) -> int:
    import numpy as np

    from .generic import make_model, self_energy_quadrature, sigma_closed_form

    p = cfg.params
    model = make_model(p["model"], p["g"])
    e_min = p["e_min"] if p["e_min"] is not None else model.e_th - 4.0
    e_max = p["e_max"] if p["e_max"] is not None else model.e_th - 0.01
    if not e_min < e_max < model.e_th:
        raise ConfigError(
            f"need e_min < e_max < E_th = {model.e_th}; got [{e_min}, {e_max}]"
        )
    rows = []
    for E in np.linspace(e_min, e_max, p["n_points"]):
        q = self_energy_quadrature(model, E)
        c = sigma_closed_form(model, E)
        rows.append((E, q, c, abs(q - c)))
    out = cfg.output or f"generic_{p['model']}.csv"
    write_csv(out, ["E", "sigma_quadrature", "sigma_closed_form", "abs_err"], rows)
    worst = max(r[3] for r in rows)
    print(f"wrote {out}; worst |quadrature - closed form| = {worst:.3e}")
    return 0 if worst < 1e-8 else 1


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

def _run_figures(cfg: RunConfig) -> int:
    name = cfg.params["name"]
    outdir = Path(cfg.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    {"fig1": _fig1, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}[name](outdir)
    return 0


def _fig1(outdir: Path) -> None:
    """Four discrete eigenvalues in the E and k planes at g = 0.5, eps_d = -2."""
    import cmath

    from .model import ModelParams
    from .spectrum import discrete_spectrum

    states = discrete_spectrum(ModelParams(epsilon_d=-2.0, g=0.5))
    states.sort(key=lambda s: (s.energy.real, s.energy.imag))
    rows = []
    for s in states:
        k = -1j * cmath.log(s.lam)  # lam = e^{ik}
        rows.append(
            (s.state_class.value, s.energy.real, s.energy.imag, k.real, k.imag)
        )
    csv = outdir / "fig1_states.csv"
    write_csv(csv, ["class", "re_E", "im_E", "re_k", "im_k"], rows)
    (outdir / "fig1.gp").write_text(
        "set datafile separator ','\nset multiplot layout 1,2\n"
        "set xlabel 'Re E'; set ylabel 'Im E'\n"
        f"plot '{csv.name}' every ::1 using 2:3 with points pt 7 title 'E plane'\n"
        "set xlabel 'Re k'; set ylabel 'Im k'\n"
        f"plot '{csv.name}' every ::1 using 4:5 with points pt 7 title 'k plane'\n"
        "unset multiplot\n"
    )


def _fig3(outdir: Path) -> None:
    """Near-edge spectrum vs eps_d in [-2.15, -1.85] at g = 0.1."""
    from .spectrum import spectrum_scan

    rows = spectrum_scan(0.1, -2.15, -1.85, 0.001)
    csv = outdir / "fig3_scan.csv"
    write_csv(
        csv,
        ["eps_d", "class", "re_E", "im_E", "re_lambda", "im_lambda",
         "re_psid_sq", "im_psid_sq"],
        [
            (r.eps_d, r.state.state_class.value, r.state.energy.real,
             r.state.energy.imag, r.state.lam.real, r.state.lam.imag,
             r.state.psid_sq.real, r.state.psid_sq.imag)
            for r in rows
        ],
    )
    (outdir / "fig3.gp").write_text(
        "set datafile separator ','\nset multiplot layout 2,1\n"
        "set xlabel 'eps_d'; set ylabel 'Re E'\n"
        f"plot '{csv.name}' every ::1 using 1:3 with dots title 'Re E'\n"
        "set ylabel 'Im E'\n"
        f"plot '{csv.name}' every ::1 using 1:4 with dots title 'Im E'\n"
        "unset multiplot\n"
    )


def _fig4(outdir: Path) -> None:
    """Eigenvalue sheets over the complex eps_d plane at g = 0.1."""
    import numpy as np

    from .ep import complex_parameter_sheet, scan_consistency_rows

    re = np.linspace(-2.15, -1.85, 61)
    im = np.linspace(-0.08, 0.08, 33)
    cells = complex_parameter_sheet(0.1, re, im)
    csv = outdir / "fig4_sheet.csv"
    write_csv(
        csv,
        ["re_eps", "im_eps", "branch_id", "re_E", "im_E"],
        [(a, b, str(c), d, e) for a, b, c, d, e in scan_consistency_rows(cells)],
    )
    (outdir / "fig4.gp").write_text(
        "set datafile separator ','\n"
        "set xlabel 'Re eps_d'; set ylabel 'Im eps_d'; set zlabel 'Re E'\n"
        f"splot '{csv.name}' every ::1 using 1:2:4 with points pt 0 title 'sheets'\n"
    )


def _fig5(outdir: Path) -> None:
    """Survival probability panels at g = 0.02, eps_d = -2."""
    import numpy as np

    from .dynamics import (
        LatticeConfig,
        asymptotic_plateau,
        survival_intermediate_law,
        survival_lattice_oracle,
        survival_longtime_law,
    )
    from .model import ModelParams

    params = ModelParams(epsilon_d=-2.0, g=0.02)
    times = np.arange(0.0, 600.0 + 1e-9, 0.5)
    oracle = survival_lattice_oracle(params, LatticeConfig(1500, 600.0), times)
    t_pos = times[times > 0]
    rows = [(t, p, "oracle") for t, p in zip(times, oracle.probability)]
    rows += [
        (t, p, "intermediate")
        for t, p in zip(times, survival_intermediate_law(0.02, times))
    ]
    rows += [
        (t, p, "longtime") for t, p in zip(t_pos, survival_longtime_law(params, t_pos))
    ]
    csv = outdir / "fig5_survival.csv"
    write_csv(csv, ["t", "P", "method"], rows)
    plateau = asymptotic_plateau(params)

    def pick(method):
        return f"using 1:(strcol(3) eq '{method}' ? $2 : 1/0)"

    (outdir / "fig5.gp").write_text(
        "set datafile separator ','\nset multiplot layout 3,1\n"
        "set xlabel 't'; set ylabel 'P(t)'\n"
        f"plot '{csv.name}' every ::1 {pick('oracle')} "
        f"with lines title 'exact', {plateau:.6f} title 'plateau'\n"
        "set xrange [0:120]\n"
        f"plot '{csv.name}' every ::1 {pick('oracle')} with lines title 'exact', "
        f"'{csv.name}' every ::1 {pick('intermediate')} "
        "with lines title 't^{3/2} law'\n"
        "set xrange [300:600]\n"
        f"plot '{csv.name}' every ::1 {pick('oracle')} with lines title 'exact', "
        f"'{csv.name}' every ::1 {pick('longtime')} "
        "with lines title 'late-time law'\n"
        "unset multiplot\n"
    )


_RUNNERS = {
    "spectrum": _run_spectrum,
    "ep": _run_ep,
    "jordan": _run_jordan,
    "dynamics": _run_dynamics,
    "generic": _run_generic,
    "figures": _run_figures,
}


def main(argv=None) -> int:
    threads = os.environ.get("BANDEDGE_NUM_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return _RUNNERS[cfg.subcommand](cfg)
    except BandEdgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
