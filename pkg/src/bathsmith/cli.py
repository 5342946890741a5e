"""Command-line front end.

Subcommands wire model files and scenario files into the numeric
modules and write metadata-rich CSV/JSON outputs plus a run manifest.
Exit codes: 2 usage, 3 input validation, 4 numeric failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import bcf as bcf_mod
from . import chainmap, dynamics, estimator, io, model as model_mod, plotting
from .coarsegrain import EffectiveEnvironment, conventional_coarse_grain, fit_effective
from .errors import BathsmithError, ConfigurationError, FitError, NumericError, ValidationError

DEFAULT_SEED = 20250810

EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


def _load_model(path) -> model_mod.SpectralDensityModel:
    try:
        return model_mod.load_model(path)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _guard_numeric(func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except (NumericError, FitError) as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    except (ValidationError, ConfigurationError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be > 0")
    return value


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
def main():
    """Effective-environment construction and validation toolkit."""


@main.command("bcf")
@click.argument("model_file", type=click.Path())
@click.option("--temp", type=float, default=77.0, show_default=True, help="temperature [K]")
@click.option("--tau", type=float, default=300.0, show_default=True, callback=_positive,
              help="horizon of interest [fs]")
@click.option("--sigma", type=float, default=None, callback=_positive,
              help="Gaussian filter sigma [fs]; default tau/3")
@click.option("--dt", type=float, default=0.25, show_default=True, callback=_positive)
@click.option("--span", type=float, default=None, callback=_positive, help="grid end [fs]")
@click.option("--omega-max", type=float, default=2000.0, show_default=True, callback=_positive)
@click.option("--prominence", type=float, default=bcf_mod.DEFAULT_PEAK_PROMINENCE,
              show_default=True, help="peak prominence as fraction of spectrum max")
@click.option("--undamped/--damped", "undamped", default=True, show_default=True,
              help="census on the undamped-mode representation")
@click.option("--out", type=click.Path(), default="bcf_out", show_default=True)
@click.option("--plot", is_flag=True)
def cmd_bcf(model_file, temp, tau, sigma, dt, span, omega_max, prominence, undamped, out, plot):
    """Correlation function, filtered spectrum and peak census of a model."""
    manifest = io.RunManifest()
    mdl = _load_model(model_file)
    manifest.add_input(model_file)
    params = _guard_numeric(
        bcf_mod.BathParameters, temperature=temp, tau=tau, filter_sigma=sigma, dt=dt, span=span
    )
    corr = _guard_numeric(bcf_mod.bcf_quadrature, mdl, params)
    filtered = bcf_mod.gaussian_filter(corr, params.filter_sigma)
    census_model = mdl.as_undamped() if undamped else mdl
    census_corr = _guard_numeric(bcf_mod.bcf_quadrature, census_model, params)
    spec = _guard_numeric(
        bcf_mod.ft_spectrum, bcf_mod.gaussian_filter(census_corr, params.filter_sigma), omega_max
    )
    census = _guard_numeric(bcf_mod.count_peaks, spec, prominence)

    outdir = _outdir(out)
    io.write_correlation_csv(outdir / "correlation.csv", corr)
    io.write_spectrum_csv(outdir / "spectrum.csv", spec)
    (outdir / "peaks.json").write_text(
        json.dumps(
            {
                "prominence": prominence,
                "undamped_census": undamped,
                "count": census.count,
                "peaks": [{"center_cm1": p.center, "height": p.height} for p in census.peaks],
            },
            indent=1,
        )
        + "\n",
        newline="\n",
    )
    for name in ("correlation.csv", "spectrum.csv", "peaks.json"):
        manifest.add_output(outdir / name)
    if plot:
        plotting.write_line_svg(
            outdir / "correlation.svg", corr.t_fs,
            [corr.values.real, corr.values.imag], "t [fs]", "C(t) [cm^-2]", ["Re", "Im"],
        )
        plotting.write_line_svg(
            outdir / "spectrum.svg", spec.omega_cm1, [spec.values], "omega [cm^-1]", "S(omega)"
        )
        manifest.add_output(outdir / "correlation.svg")
        manifest.add_output(outdir / "spectrum.svg")
    manifest.write(outdir / "manifest.json")
    click.echo(f"{census.count} peaks at prominence {prominence:g}; outputs in {outdir}")


@main.command("peaks")
@click.argument("model_file", type=click.Path())
@click.option("--temp", type=float, default=77.0, show_default=True)
@click.option("--tau", type=float, default=300.0, show_default=True, callback=_positive)
@click.option("--sigma", type=float, default=None, callback=_positive)
@click.option("--dt", type=float, default=0.5, show_default=True, callback=_positive)
@click.option("--omega-max", type=float, default=2000.0, show_default=True, callback=_positive)
@click.option("--prominence", type=float, default=bcf_mod.DEFAULT_PEAK_PROMINENCE, show_default=True)
@click.option("--omega-min", type=float, default=0.0, show_default=True)
@click.option("--undamped/--damped", "undamped", default=True, show_default=True)
@click.option("--out", type=click.Path(), default="peaks_out", show_default=True)
def cmd_peaks(model_file, temp, tau, sigma, dt, omega_max, prominence, omega_min, undamped, out):
    """Peak census of the Gaussian-filtered transform spectrum."""
    manifest = io.RunManifest()
    mdl = _load_model(model_file)
    manifest.add_input(model_file)
    sigma = sigma if sigma is not None else tau / 3.0
    params = _guard_numeric(
        bcf_mod.BathParameters,
        temperature=temp, tau=tau, filter_sigma=sigma, dt=dt, span=4.6 * sigma,
    )
    census_model = mdl.as_undamped() if undamped else mdl
    corr = _guard_numeric(bcf_mod.bcf_quadrature, census_model, params)
    spec = _guard_numeric(bcf_mod.ft_spectrum, bcf_mod.gaussian_filter(corr, sigma), omega_max)
    census = _guard_numeric(bcf_mod.count_peaks, spec, prominence, omega_min)
    outdir = _outdir(out)
    (outdir / "peaks.json").write_text(
        json.dumps(
            {
                "prominence": prominence,
                "omega_min_cm1": omega_min,
                "undamped_census": undamped,
                "count": census.count,
                "peaks": [{"center_cm1": p.center, "height": p.height} for p in census.peaks],
            },
            indent=1,
        )
        + "\n",
        newline="\n",
    )
    manifest.add_output(outdir / "peaks.json")
    manifest.write(outdir / "manifest.json")
    click.echo(f"{census.count} peaks: " + ", ".join(f"{p.center:.0f}" for p in census.peaks))


def _env_to_document(env: EffectiveEnvironment) -> dict:
    doc = model_mod.model_to_dict(env.to_model())
    doc["fit_report"] = None
    if env.fit_report is not None:
        doc["fit_report"] = {
            "objective": env.fit_report.objective,
            "iterations": env.fit_report.iterations,
            "multistart_index": env.fit_report.multistart_index,
            "n_starts": env.fit_report.n_starts,
            "seed": env.fit_report.seed,
            "start_objectives": list(env.fit_report.start_objectives),
            "reorg_residual": env.fit_report.reorg_residual,
            "hr_residual": env.fit_report.hr_residual,
        }
    doc["target_reorg_cm1"] = env.target_reorg
    doc["target_hr"] = env.target_hr
    doc["conserves_hr"] = env.conserves_hr
    return doc


def _print_env_table(env: EffectiveEnvironment):
    click.echo("  k   omega[cm^-1]    hr          gamma[cm^-1]")
    for i, l in enumerate(env.lorentzians, 1):
        click.echo(f"  {i:<3d} {l.omega:<15.4f} {l.hr:<11.6f} {l.gamma:.4f}")
    eff_reorg = sum(l.reorganization for l in env.lorentzians) + (
        env.ar.reorganization if env.ar is not None else 0.0
    )
    eff_hr = sum(l.huang_rhys for l in env.lorentzians) + (
        env.ar.huang_rhys if env.ar is not None else 0.0
    )
    click.echo(f"  reorganization: {eff_reorg:.6f} (target {env.target_reorg:.6f})")
    click.echo(f"  huang-rhys:     {eff_hr:.6f} (target {env.target_hr:.6f}"
               + ("" if env.conserves_hr else ", not conserved by construction") + ")")
    if env.fit_report is not None:
        click.echo(
            f"  objective {env.fit_report.objective:.6e} from start "
            f"{env.fit_report.multistart_index}/{env.fit_report.n_starts}, seed {env.fit_report.seed}"
        )


@main.command("fit")
@click.argument("model_file", type=click.Path())
@click.option("--temp", type=float, default=77.0, show_default=True)
@click.option("--tau", type=float, default=300.0, show_default=True, callback=_positive)
@click.option("--peaks", "k_peaks", default="auto", show_default=True,
              help="number of Lorentzians or 'auto'")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--starts", type=int, default=16, show_default=True)
@click.option("--keep-ar/--fit-ar", default=True, show_default=True)
@click.option("--out", type=click.Path(), default="fit_out", show_default=True)
def cmd_fit(model_file, temp, tau, k_peaks, seed, starts, keep_ar, out):
    """Fit a constrained effective Lorentzian set to a model's BCF."""
    if k_peaks != "auto":
        try:
            k_peaks = int(k_peaks)
        except ValueError:
            raise click.BadParameter("--peaks must be an integer or 'auto'")
        if k_peaks < 1:
            raise click.BadParameter("--peaks must be >= 1")
    manifest = io.RunManifest()
    manifest.seeds["fit"] = seed
    mdl = _load_model(model_file)
    manifest.add_input(model_file)
    env = _guard_numeric(
        fit_effective, mdl, temperature=temp, tau=tau, k_peaks=k_peaks,
        keep_ar=keep_ar, n_starts=starts, seed=seed,
    )
    outdir = _outdir(out)
    (outdir / "effective_model.json").write_text(
        json.dumps(_env_to_document(env), indent=1) + "\n", newline="\n"
    )
    manifest.add_output(outdir / "effective_model.json")
    manifest.write(outdir / "manifest.json")
    click.echo(f"fitted {len(env.lorentzians)} Lorentzians:")
    _print_env_table(env)


@main.command("conventional")
@click.argument("model_file", type=click.Path())
@click.option("--omega", type=float, default=1000.0, show_default=True, callback=_positive)
@click.option("--gamma", type=float, default=265.4418729873305, show_default=True,
              callback=_positive, help="half width [cm^-1]")
@click.option("--out", type=click.Path(), default="conventional_out", show_default=True)
def cmd_conventional(model_file, omega, gamma, out):
    """Single broad reorganization-conserving Lorentzian baseline."""
    manifest = io.RunManifest()
    mdl = _load_model(model_file)
    manifest.add_input(model_file)
    env = _guard_numeric(conventional_coarse_grain, mdl, omega, gamma)
    outdir = _outdir(out)
    (outdir / "conventional_model.json").write_text(
        json.dumps(_env_to_document(env), indent=1) + "\n", newline="\n"
    )
    manifest.add_output(outdir / "conventional_model.json")
    manifest.write(outdir / "manifest.json")
    _print_env_table(env)


@main.command("chain")
@click.argument("model_file", type=click.Path())
@click.option("--temp", type=float, default=77.0, show_default=True)
@click.option("--length", type=int, default=None, help="chain length; default from --tau/--tol")
@click.option("--tau", type=float, default=300.0, show_default=True, callback=_positive)
@click.option("--tol", type=float, default=0.05, show_default=True)
@click.option("--out", type=click.Path(), default="chain_out", show_default=True)
@click.option("--plot", is_flag=True)
def cmd_chain(model_file, temp, length, tau, tol, out, plot):
    """Thermalized chain coefficients and the truncated star environment."""
    manifest = io.RunManifest()
    mdl = _load_model(model_file)
    manifest.add_input(model_file)
    if length is None:
        jb, support, feats, masses = chainmap.thermal_measure_inputs(mdl, temp)
        length = _guard_numeric(
            chainmap.chain_length_for_horizon, jb, support, tau, tol,
            features=feats, point_masses=masses, temperature=temp,
        )
        click.echo(f"selected chain length {length} for tau={tau} fs at tol={tol}")
    elif length < 1:
        raise click.BadParameter("--length must be >= 1")
    chain, _ = _guard_numeric(chainmap.chain_for_model, mdl, temp, length)
    env = _guard_numeric(chainmap.chain_to_star, chain)
    outdir = _outdir(out)
    io.write_chain_csv(outdir / "chain.csv", chain, extra=[("temperature_K", temp)])
    io.write_modes_csv(outdir / "modes.csv", env, extra=[("temperature_K", temp)])
    manifest.add_output(outdir / "chain.csv")
    manifest.add_output(outdir / "modes.csv")
    if plot:
        plotting.write_line_svg(
            outdir / "modes.svg", env.omegas, [env.couplings**2],
            "omega [cm^-1]", "g^2 [cm^-2]",
        )
        manifest.add_output(outdir / "modes.svg")
    manifest.write(outdir / "manifest.json")
    click.echo(f"chain of {chain.length} sites, kappa = {chain.kappa:.4f} cm^-1; outputs in {outdir}")


def _load_scenario(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        click.echo(f"error: cannot read scenario {path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except json.JSONDecodeError as exc:
        click.echo(f"error: scenario {path} is not valid JSON (line {exc.lineno})", err=True)
        sys.exit(EXIT_VALIDATION)


@main.command("absorb")
@click.argument("scenario_file", type=click.Path())
@click.option("--threads", type=int, default=1, show_default=True,
              help="worker processes for disorder ensembles")
@click.option("--out", type=click.Path(), default="absorb_out", show_default=True)
@click.option("--plot", is_flag=True)
def cmd_absorb(scenario_file, threads, out, plot):
    """Absorption spectrum from a scenario file (pseudomode or cumulant engine)."""
    manifest = io.RunManifest()
    scen = _load_scenario(scenario_file)
    manifest.add_input(scenario_file)
    base = Path(scenario_file).parent

    def resolve(ref, loader):
        if isinstance(ref, str):
            path = (base / ref) if not Path(ref).is_absolute() else Path(ref)
            manifest.add_input(path)
            return loader(path)
        return ref

    try:
        temperature = float(scen["temperature"])
        grid_cfg = scen.get("grid", {})
        t_max = float(grid_cfg.get("t_max_fs", 400.0))
        dt_out = float(grid_cfg.get("dt_out_fs", 1.0))
        dt_int = float(grid_cfg.get("dt_int_fs", 0.05))
        window_sigma = float(scen.get("window_sigma_fs", 0.0))
        spec_cfg = scen["spectrum"]
        omega_lo, omega_hi = float(spec_cfg["omega_lo_cm1"]), float(spec_cfg["omega_hi_cm1"])
        d_omega = float(spec_cfg.get("d_omega_cm1", 1.0))
        engine = scen.get("engine", "pseudomode")
    except (KeyError, TypeError, ValueError) as exc:
        click.echo(f"error: scenario field problem: {exc!r}", err=True)
        sys.exit(EXIT_VALIDATION)

    t_grid = np.arange(0.0, t_max + dt_out / 2, dt_out)
    outdir = _outdir(out)

    if engine == "cumulant":
        mdl = resolve(scen["environment"], model_mod.load_model)
        epsilon = float(scen.get("epsilon_cm1", 12300.0))
        d = _guard_numeric(dynamics.cumulant_correlation, mdl, temperature, epsilon, t_grid)
        if window_sigma > 0:
            d = d.windowed(window_sigma)
        spec = _guard_numeric(dynamics.absorption_from_correlation, d, omega_lo, omega_hi, d_omega)
    elif engine == "pseudomode":
        system = resolve(scen["system"], model_mod.load_electronic)
        if isinstance(scen["system"], dict):
            system = model_mod.parse_electronic(scen["system"])
        env_model = resolve(scen["environment"], model_mod.load_model)
        layout = scen.get("mode_layout", "per_site")
        fock_overrides = {float(k): int(v) for k, v in scen.get("fock_dims", {}).items()}
        budget = int(scen.get("budget_entries", 10_000_000))
        lors = list(env_model.lorentzians)
        if env_model.ar is not None:
            lors.append(model_mod.ar_pseudomode())
        modes = []
        sites = range(system.n_sites) if layout == "per_site" else [None]
        for site in sites:
            for l in lors:
                fd = fock_overrides.get(
                    l.omega, dynamics.thermal_fock_dim(l.omega, l.hr, temperature)
                )
                modes.append(dynamics.Pseudomode(l.omega, l.hr, l.gamma, fd, site=site))
        pm = dynamics.PseudomodeConfig(
            modes=tuple(modes), bath_temperature=temperature, budget_entries=budget
        )
        dis_cfg = scen.get("disorder")
        if dis_cfg:
            disorder = model_mod.DisorderSpec(
                sigma=float(dis_cfg["sigma_cm1"]),
                n_samples=int(dis_cfg["n_samples"]),
                seed=int(dis_cfg.get("seed", DEFAULT_SEED)),
            )
            manifest.seeds["disorder"] = disorder.seed
            d = _guard_numeric(
                dynamics.disorder_ensemble, system, pm, disorder, t_grid,
                dt=dt_int, n_workers=threads,
            )
        else:
            d = _guard_numeric(dynamics.pseudomode_propagate, system, pm, t_grid, dt=dt_int)
        if window_sigma > 0:
            d = d.windowed(window_sigma)
        spec = _guard_numeric(dynamics.absorption_from_correlation, d, omega_lo, omega_hi, d_omega)
        report = pm.truncation_report()
        worst = max(report.values()) if report else 0.0
        click.echo(f"pseudomode truncation: worst discarded thermal population {worst:.2e}")
    else:
        click.echo(f"error: unknown engine {engine!r}", err=True)
        sys.exit(EXIT_VALIDATION)

    io.write_correlation_csv(outdir / "correlation.csv", d)
    io.write_spectrum_csv(outdir / "spectrum.csv", spec)
    manifest.add_output(outdir / "correlation.csv")
    manifest.add_output(outdir / "spectrum.csv")
    if plot:
        plotting.write_line_svg(
            outdir / "spectrum.svg", spec.omega_cm1, [spec.intensity],
            "omega [cm^-1]", "A(omega) [arb]",
        )
        manifest.add_output(outdir / "spectrum.svg")
    manifest.write(outdir / "manifest.json")
    click.echo(f"spectrum on [{omega_lo:g}, {omega_hi:g}] cm^-1 written to {outdir}")


@main.command("heom-cost")
@click.option("--n-sites", "-n", "n_list", default="2", show_default=True,
              help="comma-separated site counts")
@click.option("--m", "-m", "m_list", default="6,62", show_default=True,
              help="comma-separated Lorentzian counts")
@click.option("--depth", "-l", "l_list", default="5", show_default=True,
              help="comma-separated hierarchy depths")
@click.option("--block", type=int, default=None, help="complex entries per operator; default N")
def cmd_heom_cost(n_list, m_list, l_list, block):
    """Auxiliary-operator counts and memory for a grid of (N, M, L)."""
    try:
        ns = [int(x) for x in n_list.split(",")]
        ms = [int(x) for x in m_list.split(",")]
        ls = [int(x) for x in l_list.split(",")]
    except ValueError:
        raise click.BadParameter("N, M, L lists must be comma-separated integers")
    click.echo(f"{'N':>4} {'M':>4} {'L':>4} {'operators':>16} {'bytes':>16}  size")
    for n in ns:
        for m in ms:
            for l in ls:
                q = estimator.HeomCostQuery(n, m, l, block_entries=block)
                cnt = estimator.heom_count(q)
                mem = estimator.heom_memory(q)
                click.echo(
                    f"{n:>4} {m:>4} {l:>4} {cnt:>16,} {mem:>16,}  {estimator.human_bytes(mem)}"
                )


@main.command("compare")
@click.argument("model_a", type=click.Path())
@click.argument("model_b", type=click.Path())
@click.option("--temp", type=float, default=77.0, show_default=True)
@click.option("--tau", type=float, default=300.0, show_default=True, callback=_positive)
@click.option("--epsilon", type=float, default=12300.0, show_default=True,
              help="monomer site energy [cm^-1]")
@click.option("--out", type=click.Path(), default="compare_out", show_default=True)
def cmd_compare(model_a, model_b, temp, tau, epsilon, out):
    """BCF distance and monomer spectral overlap between two environments."""
    manifest = io.RunManifest()
    ma = _load_model(model_a)
    mb = _load_model(model_b)
    manifest.add_input(model_a)
    manifest.add_input(model_b)
    sigma = tau / 3.0
    params = _guard_numeric(bcf_mod.BathParameters, temperature=temp, tau=tau)
    ca = _guard_numeric(bcf_mod.bcf_quadrature, ma, params)
    cb = _guard_numeric(bcf_mod.bcf_quadrature, mb, params)
    dist = _guard_numeric(bcf_mod.bcf_distance, ca, cb, sigma, tau)

    t_grid = np.arange(0.0, 4.3 * sigma + 0.5, 0.5)
    lo = epsilon - 1000.0
    hi = epsilon + 2500.0
    sa = _guard_numeric(dynamics.monomer_absorption, ma, temp, epsilon, sigma, t_grid, lo, hi)
    sb = _guard_numeric(dynamics.monomer_absorption, mb, temp, epsilon, sigma, t_grid, lo, hi)
    overlap = _guard_numeric(dynamics.spectral_overlap, sa, sb)

    outdir = _outdir(out)
    verdict = {
        "model_a": str(model_a),
        "model_b": str(model_b),
        "temperature_K": temp,
        "tau_fs": tau,
        "sigma_fs": sigma,
        "bcf_distance": dist,
        "monomer_overlap": overlap,
    }
    (outdir / "verdict.json").write_text(json.dumps(verdict, indent=1) + "\n", newline="\n")
    manifest.add_output(outdir / "verdict.json")
    manifest.write(outdir / "manifest.json")
    click.echo(f"{'metric':<22} value")
    click.echo(f"{'bcf_distance':<22} {dist:.6f}")
    click.echo(f"{'monomer_overlap':<22} {overlap:.6f}")


if __name__ == "__main__":
    main()
