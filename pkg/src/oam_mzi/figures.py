"""Canned sweep configurations for the standard figure set.

Each entry reproduces one figure-style dataset: the parity signal and
sensitivity landscapes, loss and OAM-gearing studies, photon-number and
entropy scalings, the joint photon-number distribution, phase-space
portraits, and the quantum bound comparison.  ``figure_config(fig_id)``
returns the YAML text, which goes through the exact same
:func:`~oam_mzi.sweeps.parse_config` path as a user-supplied file.

The identifiers follow the figure numbering of the reproduced plots:
``fig2`` .. ``fig17`` plus ``figA1``.
"""

from __future__ import annotations

from .errors import ConfigError

__all__ = ["FIGURES", "figure_config", "list_figures"]


_ALL_STATES_R = """\
states:
  - {name: TMSV, r: 1.096}
  - {name: PA11, r: 1.096}
  - {name: PA22, r: 1.096}
  - {name: PS11, r: 1.096}
  - {name: PS22, r: 1.096}
  - {name: PAS11, r: 1.096}
  - {name: PAS22, r: 1.096}
  - {name: PSA11, r: 1.096}
  - {name: PSA22, r: 1.096}
"""

_ALL_STATES_BARE = """\
states:
  - {name: TMSV}
  - {name: PA11}
  - {name: PA22}
  - {name: PS11}
  - {name: PS22}
  - {name: PAS11}
  - {name: PAS22}
  - {name: PSA11}
  - {name: PSA22}
"""

FIGURES: dict[str, str] = {
    # Parity signal vs phase for every input state at a common squeezing.
    "fig2": f"""\
experiment: signal
{_ALL_STATES_R}theta_grid: {{start: -0.4, stop: 0.4, count: 801}}
L_list: [1]
""",
    # Phase sensitivity vs phase for every input state, lossless.
    "fig3": f"""\
experiment: sensitivity
{_ALL_STATES_R}theta_grid: {{start: -0.4, stop: 0.4, count: 801}}
L_list: [1]
""",
    # Sensitivity vs mean photon number, lossless, small fixed phase.
    "fig4": f"""\
experiment: sensitivity_vs_N
{_ALL_STATES_BARE}theta_grid: [1.0e-4]
L_list: [1]
n_grid: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]
numeric: {{leak_tol: 1.0e-8, cutoff_cap: 160}}
""",
    # Fringe width vs topological charge for three squeezing strengths.
    "fig5": """\
experiment: fwhm_vs_L
states:
  - {name: PSA11, r: 0.2}
  - {name: PSA11, r: 0.4}
  - {name: PSA11, r: 0.8}
theta_grid: {start: -1.6, stop: 1.6, count: 3201}
L_list: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
""",
    # OAM-geared sensitivity vs mean photon number, lossless.
    "fig6": """\
experiment: sensitivity_vs_N
states:
  - {name: TMSV}
  - {name: PSA11}
theta_grid: [1.0e-4]
L_list: [1, 3, 11]
n_grid: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12]
numeric: {leak_tol: 1.0e-8, cutoff_cap: 160}
""",
    # Sensitivity vs phase across five loss splits, balanced to unbalanced.
    "fig7": f"""\
experiment: sensitivity
{_ALL_STATES_R}theta_grid: {{start: -0.4, stop: 0.4, count: 401}}
L_list: [1]
T_a: [0.1, 0.2, 0.3, 0.4, 0.5]
T_b: [0.9, 0.8, 0.7, 0.6, 0.5]
""",
    # Sensitivity vs phase at decreasing transmittance.
    "fig8": """\
experiment: sensitivity
states:
  - {name: PSA11, r: 1.096}
theta_grid: {start: -0.4, stop: 0.4, count: 801}
L_list: [1]
T_a: [1.0, 0.75, 0.5]
T_b: [1.0, 0.75, 0.5]
""",
    # Sensitivity vs mean photon number with 50% loss in both arms.
    "fig9": f"""\
experiment: sensitivity_vs_N
{_ALL_STATES_BARE}theta_grid: [1.0e-4]
L_list: [1]
T_a: 0.5
T_b: 0.5
n_grid: [1, 2, 3, 4, 5, 6, 7, 8]
numeric: {{leak_tol: 1.0e-6}}
""",
    # Gearing the phase narrows the lossy sensitivity gap around zero.
    "fig10": """\
experiment: sensitivity
states:
  - {name: PSA11, r: 1.096}
theta_grid: {start: -0.4, stop: 0.4, count: 801}
L_list: [1, 3, 13]
T_a: 0.5
T_b: 0.5
""",
    # High charge beats the Heisenberg scaling despite 50% loss.
    "fig11": f"""\
experiment: sensitivity_vs_N
{_ALL_STATES_BARE}theta_grid: [0.007]
L_list: [21]
T_a: 0.5
T_b: 0.5
n_grid: [1, 2, 3, 4, 5, 6, 7, 8]
numeric: {{leak_tol: 1.0e-6}}
""",
    # Symmetric vs asymmetric loss at fixed and geared charge.
    "fig12": """\
experiment: sensitivity
states:
  - {name: PAS11, r: 1.096}
theta_grid: {start: -0.4, stop: 0.4, count: 401}
L_list: [1, 5]
T_a: [0.5, 0.1]
T_b: [0.5, 0.9]
""",
    # Geared sensitivity vs photon number across the five loss splits.
    "fig13": """\
experiment: sensitivity_vs_N
states:
  - {name: PAS11}
theta_grid: [0.007]
L_list: [21]
T_a: [0.1, 0.2, 0.3, 0.4, 0.5]
T_b: [0.9, 0.8, 0.7, 0.6, 0.5]
n_grid: [1, 2, 3, 4, 5, 6, 7, 8]
numeric: {leak_tol: 1.0e-6}
""",
    # Mean photon number vs squeezing parameter for every state.
    "fig14": f"""\
experiment: photon_vs_r
{_ALL_STATES_BARE}r_grid: {{start: 0.0, stop: 1.2, count: 61}}
""",
    # Entanglement entropy at matched mean photon numbers.
    "fig15": f"""\
experiment: entropy_vs_N
{_ALL_STATES_BARE}n_grid: [1, 2, 3, 4, 5, 6, 7, 8]
numeric: {{leak_tol: 1.0e-8, cutoff_cap: 128}}
""",
    # Joint photon-number distribution of the two robust states.
    "fig16": """\
experiment: joint_distribution
states:
  - {name: PAS11, r: 1.096}
  - {name: PSA11, r: 1.096}
fock_window: 24
""",
    # Phase-space portraits of the input states at a common photon number.
    "fig17": """\
experiment: wigner
states:
  - {name: TMSV, target_N: 5}
  - {name: PA11, target_N: 5}
  - {name: PS11, target_N: 5}
  - {name: PAS11, target_N: 5}
  - {name: PSA11, target_N: 5}
wigner: {extent: 5.25, points: 71, mode: a}
""",
    # Parity sensitivity against the quantum bound, lossless.
    "figA1": """\
experiment: qcrb
states:
  - {name: PAS11}
  - {name: PSA11}
  - {name: PAS22}
  - {name: PSA22}
theta_grid: {start: -0.4, stop: 0.4, count: 4001}
L_list: [1]
n_grid: [5, 6, 7, 8, 9, 10]
numeric: {leak_tol: 1.0e-8, cutoff_cap: 96}
""",
}


def list_figures() -> list[str]:
    """Identifiers in figure order."""
    return list(FIGURES)


def figure_config(fig_id: str) -> str:
    """YAML text of a canned configuration.

    Raises ConfigError for an unknown identifier.
    """
    try:
        return FIGURES[fig_id]
    except KeyError:
        known = ", ".join(FIGURES)
        raise ConfigError(f"figure: unknown id {fig_id!r} (known: {known})") from None
