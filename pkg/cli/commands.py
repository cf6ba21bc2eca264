"""
Comandos da CLI: cada um valida a configuração, roda o cálculo e grava
os artefatos (CSV/JSON) no diretório de saída.

Códigos de saída: 0 ok, 1 falha de verificação, 2 erro de configuração,
3 solver sem convergência.
"""

import logging
import math

import numpy as np
import pandas as pd

from asymptotics import GridPolicy, LadderModel, LadderSpec, fit_expansion, ladder_energies
from cli.config import RunConfig
from closedform import pekar_energy_closed, phi0, phi0_limit_alpha0
from core.errors import ConfigError, FitError, PolaronError
from core.functional import delta_well_spec, pekar_spec
from core.grid import GridFn, l2_norm
from effpot.constants import d_const, g_const, g_tilde_const
from effpot.potentials import mu_field, v_lower, v_upper, window_integral
from perturbation import (
    classical_minimizer,
    density_l1_distance,
    density_pairing,
    derivative_check,
    pairing_target,
)
from solver.gradient_flow import minimize
from tools.artifact_store import get_store, init_store
from tools.io_tools import save_csv, save_json
from utils.parallel import WorkMonitor, ordered_map
from validation.suite import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3

SURROGATE_NOTE = ("densidade do funcional clássico no nível de Landau mais baixo, "
                  "não do estado fundamental quantizado")


def _save_table(name: str, table: pd.DataFrame, config: RunConfig, footer=()) -> None:
    if config.format == "csv":
        save_csv(name, table, footer=footer)
    else:
        save_json(name, {"rows": table.to_dict(orient="records"), "notes": list(footer)},
                  config=config.public_dict())


def cmd_solve(config: RunConfig) -> int:
    """
    Minimiza o funcional de Pekar (ou o poço delta com --delta-well).

    Returns:
        0 se convergiu, 3 caso contrário (artefatos gravados nos dois casos)
    """
    p = config.params
    if p.alpha == 0 and not config.delta_well:
        raise ConfigError("α = 0 cai no caminho hidrogênico: use --delta-well")
    if config.delta_well and p.alpha != 0:
        raise ConfigError(f"--delta-well exige α = 0, recebido α = {p.alpha}")

    grid = config.grid.build(p)
    spec = delta_well_spec(p.beta, grid) if config.delta_well else pekar_spec(p, grid)
    logger.info(f"🚀 solve α={p.alpha:g} β={p.beta:g} em {grid}")
    report = minimize(spec, config.solver.options())

    if config.delta_well:
        reference = -0.25 * p.beta ** 2
        profile = phi0_limit_alpha0(p.beta, grid.nodes)
    else:
        reference = pekar_energy_closed(p)
        profile = phi0(p, grid.nodes)
    psi = report.minimizer
    l2_gap = l2_norm(psi - GridFn(grid, profile))

    init_store(config.out)
    summary = {
        "energy": report.energy.to_dict(),
        "iterations": report.iterations,
        "converged": report.converged,
        "grad_norm": report.grad_norm,
        "reference": reference,
        "relative_error": abs(report.energy.total - reference) / abs(reference),
        "l2_distance": l2_gap,
    }
    save_json("solve", summary, config=config.public_dict())
    _save_table("profile", pd.DataFrame({"x": grid.nodes, "psi": psi.values, "phi0": profile}),
                config)
    get_store().finalize_manifest("solve")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_potential(config: RunConfig) -> int:
    """Tabela (x, v_upper, v_lower, 1/|x|) e as constantes 𝒢, 𝒟 por janela L."""
    pc = config.potential
    B = pc.field
    x = np.linspace(pc.x_min, pc.x_max, pc.samples)
    ax = np.abs(x)
    coulomb = np.divide(1.0, ax, out=np.full_like(ax, np.inf), where=ax > 0)
    table = pd.DataFrame({
        "x": x,
        "v_upper": np.atleast_1d(v_upper(B, x)),
        "v_lower": np.atleast_1d(v_lower(B, x)),
        "coulomb": coulomb,
    })

    windows = []
    footer = []
    if pc.windows and B <= math.e:
        logger.warning(f"⚠️ B={B:g} ≤ e: constantes 𝒢 e 𝒟 indefinidas, rodapé omitido")
    elif pc.windows:
        leading = math.log(B) - 2.0 * math.log(math.log(B))
        for L in pc.windows:
            G, D = g_const(B, L), d_const(B, L)
            entry = {
                "L": L,
                "G": G,
                "G_tilde": g_tilde_const(B, L),
                "D": D,
                "upper_residual": abs(window_integral(B, L, "upper") - (leading + G)),
                "lower_residual": abs(window_integral(B, L, "lower") - (leading + D)),
            }
            windows.append(entry)
            footer.append(
                f"L={L:.17g} G={G:.17g} D={D:.17g} "
                f"upper_residual={entry['upper_residual']:.3e} "
                f"lower_residual={entry['lower_residual']:.3e}"
            )
            logger.info(f"📊 L={L:g}: 𝒢={G:.10g} 𝒟={D:.10g}")

    init_store(config.out)
    _save_table("potential", table, config, footer=footer)
    constants = {"field": B, "windows": windows}
    if B > math.e:
        constants["mu"] = mu_field(B)
    save_json("constants", constants, config=config.public_dict())
    get_store().finalize_manifest("potential")
    return EXIT_OK


def cmd_ladder(config: RunConfig) -> int:
    """
    Minimiza o funcional clássico ao longo da escada e ajusta a expansão.

    Returns:
        0 com ao menos 4 pontos bem-sucedidos, 3 caso contrário
    """
    lc = config.ladder
    if len(lc.fields) < 4:
        raise ConfigError(f"chave 'ladder.fields': o ajuste exige ≥ 4 campos, recebidos {len(lc.fields)}")
    try:
        spec = LadderSpec(
            fields=tuple(lc.fields),
            model=LadderModel(lc.model),
            params=config.params,
            grid_policy=GridPolicy(scale=lc.scale, n=lc.n),
        )
    except ValueError as exc:
        raise ConfigError(f"chave 'ladder.fields': {exc}") from exc

    points = ladder_energies(spec, config.solver.options())
    table = pd.DataFrame({
        "B": [pt.B for pt in points],
        "ln_B": [math.log(pt.B) for pt in points],
        "mu": [pt.mu for pt in points],
        "e_eff": [pt.e_eff for pt in points],
        "e_eff_over_mu2": [pt.e_eff / pt.mu ** 2 for pt in points],
        "trial_bound": [pt.trial.value if pt.trial else math.nan for pt in points],
        "ok": [pt.ok for pt in points],
        "iterations": [pt.iterations for pt in points],
    })

    params = spec.params_for(spec.fields[0])
    if spec.model is LadderModel.POLARON:
        e0 = pekar_energy_closed(params)
        targets = {"a": e0, "b": -4.0 * e0}
    else:
        targets = {"a": -0.25 * params.beta ** 2, "b": params.beta ** 2}

    init_store(config.out)
    _save_table("ladder", table, config)
    status = EXIT_OK
    try:
        fit = fit_expansion(points)
    except FitError as exc:
        logger.error(f"❌ ajuste impossível: {exc}")
        document = {"fit": None, "error": str(exc), "targets": targets}
        status = EXIT_NOT_CONVERGED
    else:
        deviations = {k: (getattr(fit, k) - t) / abs(t) for k, t in targets.items()}
        icon = "✅" if abs(deviations["a"]) <= 0.03 else "⚠️"
        logger.info(f"{icon} ajuste: a={fit.a:.6g} (alvo {targets['a']:.6g}), "
                    f"b={fit.b:.6g} (alvo {targets['b']:.6g}), c={fit.c:.6g}")
        document = {
            "fit": {"a": fit.a, "b": fit.b, "c": fit.c, "residual": fit.residual},
            "targets": targets,
            "relative_deviation": deviations,
        }
    save_json("fit", document, config=config.public_dict())
    get_store().finalize_manifest("ladder")
    return status


def cmd_perturb(config: RunConfig) -> int:
    """Verificação da derivada em ε = 0 e pareamento de densidades ao longo da escada."""
    p = config.params
    if p.alpha <= 0:
        raise ConfigError("chave 'params.alpha': a verificação da derivada exige α > 0")
    pc = config.perturb
    W = pc.potential()
    grid = config.grid.build(p)
    opts = config.solver.options()

    report = derivative_check(W, p, grid, eps_ladder=pc.eps_ladder, opts=opts,
                              extrapolate=pc.extrapolate)
    document = {
        "eps": list(report.eps),
        "left": list(report.left),
        "right": list(report.right),
        "target": report.target,
        "discrete_target": report.discrete_target,
        "observed_order": report.observed_order,
        "closed_form_gap": report.closed_form_gap,
        "right_lower": list(report.right_lower),
        "left_upper": list(report.left_upper),
        "sandwich_violations": report.sandwich_violations(),
    }

    init_store(config.out)
    fields = [] if config.quick else list(pc.pairing_fields)
    if fields:
        policy = GridPolicy(scale=config.ladder.scale, n=config.ladder.n)
        monitor = WorkMonitor("pareamento")

        def pairing_row(B: float) -> dict:
            row = {"B": B, "mu": mu_field(B)}
            try:
                f = classical_minimizer(B, p, policy, opts)
                row["pairing"] = density_pairing(B, W, p, policy, opts, minimizer=f)
                row["l1_distance"] = density_l1_distance(B, p, f)
            except PolaronError as exc:
                logger.error(f"❌ pareamento em B={B:.3g}: {exc}")
                return {**row, "pairing": math.nan, "l1_distance": math.nan,
                        "ok": False, "error": str(exc)}
            return {**row, "ok": True, "error": None}

        rows = ordered_map(pairing_row, fields, monitor=monitor, is_success=lambda r: r["ok"])
        monitor.log_summary()
        table = pd.DataFrame(rows)
        target = pairing_target(W, p)
        table["target"] = target
        table["gap"] = (table["pairing"] - target).abs()
        _save_table("pairing", table, config, footer=(SURROGATE_NOTE,))
        document["pairing_target"] = target

    save_json("perturb", document, config=config.public_dict())
    get_store().finalize_manifest("perturb")
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    """Roda a suíte de verificação; 0 se todas as checagens passam, 1 caso contrário."""
    init_store(config.out)
    report = run_suite(quick=config.quick)
    save_json("verify", report.to_dict(), config=config.public_dict())
    get_store().finalize_manifest("verify")
    if report.first_failure is not None:
        print(f"❌ primeira falha: {report.first_failure}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "potential": cmd_potential,
    "ladder": cmd_ladder,
    "perturb": cmd_perturb,
    "verify": cmd_verify,
}
