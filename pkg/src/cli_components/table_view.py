"""Human-readable rendering of an AnalysisReport."""

from typing import List, Optional

from cli_components.report_manager import AnalysisReport


def _vec(values: Optional[List[float]]) -> str:
    if values is None:
        return "-"
    return "(" + ", ".join(f"{v:+.4f}" for v in values) + ")"


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def render_table(report: AnalysisReport) -> str:
    lines = []
    lines.append("=" * 60)
    lines.append(f"QFI ANALYSIS: {report.spec.get('kind', '?')} (N = {report.n_qubits})")
    lines.append("=" * 60)
    lines.append(f"  Symmetric:  {_yes_no(report.symmetric)}")
    lines.append(f"  Entangled:  {_yes_no(report.entangled)}")

    lines.append("")
    lines.append("-" * 60)
    lines.append("COLLECTIVE COVARIANCE (gamma_C)")
    lines.append("-" * 60)
    for row in report.gamma_c:
        lines.append("  " + "  ".join(f"{v:10.5f}" for v in row))

    clu = report.clu
    lines.append("")
    lines.append("-" * 60)
    lines.append("COLLECTIVE ROTATIONS")
    lines.append("-" * 60)
    lines.append(f"  Best F_Q:    {clu['fq']:.6f}")
    lines.append(f"  Direction:   {_vec(clu['direction'])}{'  (degenerate)' if clu['degenerate'] else ''}")

    lu = report.lu
    lines.append("")
    lines.append("-" * 60)
    lines.append("LOCAL ROTATIONS")
    lines.append("-" * 60)
    lines.append(f"  Best found:  {lu['lower']:.6f}")
    lines.append(f"  Upper bound: {lu['upper']:.6f}")
    lines.append(f"  Certified:   {_yes_no(lu['certified'])}")
    for k, direction in enumerate(lu["assignment"], 1):
        lines.append(f"    qubit {k:2}: {_vec(direction)}")

    verdict = report.verdict
    lines.append("")
    lines.append("-" * 60)
    lines.append("VERDICT")
    lines.append("-" * 60)
    lines.append(f"  Useful (collective): {_yes_no(verdict['useful_clu'])}")
    lines.append(f"  Useful (local):      {_yes_no(verdict['useful_lu'])}")
    if verdict["boundary"]:
        lines.append("  F_Q sits at the shot-noise boundary")
    family = verdict["family_detected"]
    if family is not None:
        lines.append(f"  GHZ family member:   q = {family['q']:.6f}, phi = {family['phi']:.6f}")
    if verdict["witness_direction"] is not None:
        lines.append(f"  Witness direction:   {_vec(verdict['witness_direction'])}")

    ref = report.reference

    def fmt(value: Optional[float]) -> str:
        return "inf" if value is None else f"{value:.6f}"

    lines.append("")
    lines.append("-" * 60)
    lines.append("PHASE SENSITIVITY (one repetition)")
    lines.append("-" * 60)
    lines.append(f"  Shot-noise limit:        {fmt(ref['shot_noise'])}")
    lines.append(f"  Heisenberg limit:        {fmt(ref['heisenberg'])}")
    lines.append(f"  Heisenberg (N_tot):      {fmt(ref['heisenberg_total'])}")
    lines.append(f"  Cramer-Rao, collective:  {fmt(ref['delta_theta_clu'])}")
    lines.append(f"  Cramer-Rao, local:       {fmt(ref['delta_theta_lu'])}")
    lines.append("=" * 60)
    lines.append(f"seed {report.seed}, restarts {report.restarts}, version {report.tool_version}")
    return "\n".join(lines) + "\n"
