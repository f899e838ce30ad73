"""Profile files and human-readable design / KL reports."""
import numpy as np

from ..channel import RadioParams, db_to_linear, dbm_to_watts, linear_to_db, noise_power
from ..errors import ProfileParseError
from ..linkdesign import UserProfile, optimal_design, sort_users
from ..modem import min_kl_over_codebook, pairwise_kl


def parse_profiles(text):
    """Parse ``P_dBm beta_dB`` lines (whitespace or comma separated, ``#`` comments)."""
    profiles = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 2:
            raise ProfileParseError(lineno, f"expected 2 columns (P_dBm beta_dB), got {len(fields)}")
        try:
            p_dbm, beta_db = (float(f) for f in fields)
        except ValueError:
            raise ProfileParseError(lineno, f"non-numeric value in {line!r}") from None
        if not (np.isfinite(p_dbm) and np.isfinite(beta_db)):
            raise ProfileParseError(lineno, "values must be finite")
        profiles.append(UserProfile(P=float(dbm_to_watts(p_dbm)), beta=float(db_to_linear(beta_db))))
    if not profiles:
        raise ProfileParseError(0, "profile file lists no users")
    return profiles


def load_profiles(path):
    with open(path) as fh:
        return parse_profiles(fh.read())


def _dbm(w):
    return linear_to_db(w) + 30.0


def design_report(profiles, sigma2=None, M=None):
    """Text report of the closed-form design for (possibly unsorted) profiles."""
    if isinstance(profiles, str):
        profiles = load_profiles(profiles)
    if sigma2 is None:
        sigma2 = noise_power(RadioParams())
    order = sort_users(profiles)
    ranked = [profiles[i] for i in order]
    design = optimal_design(ranked, sigma2)
    lines = ["user mapping (input line order -> sorted rank, sub-constellation):"]
    for rank, i in enumerate(order):
        u = profiles[i]
        lines.append(f"  user {i + 1} -> rank {rank + 1}, level {design.perm[rank] + 1}"
                     f"  (P*beta = {u.P * u.beta:.6g})")
    lines.append(f"d = {design.d:.6g}")
    lines.append("p = (" + ", ".join(f"{v:.6g}" for v in design.p) + ")")
    lines.append("perm = (" + ", ".join(str(k + 1) for k in design.perm) + ")")
    lines.append("per-user slot powers [W (dBm)], budget:")
    for rank, u in enumerate(ranked):
        j = design.perm[rank]
        slot1 = 1.0 / (design.p[j] * u.beta)
        slot2 = design.p[j] * design.energies[j] * design.d ** 2 / u.beta
        lines.append(f"  rank {rank + 1}: slot1 {slot1:.4g} ({_dbm(slot1):.2f}), "
                     f"slot2 {slot2:.4g} ({_dbm(slot2):.2f}), P {u.P:.4g} ({_dbm(u.P):.2f})")
    if design.K <= 6:
        value, (c, ct) = min_kl_over_codebook(design, ranked, sigma2)
        lines.append(f"sigma2 = {sigma2:.6g}")
        lines.append(f"min KL (1 antenna) = {value:.6g} between c = {c:.6g} and c~ = {ct:.6g}")
        if M is not None:
            lines.append(f"min KL ({M} antennas) = {M * value:.6g}")
    return "\n".join(lines), design


def kl_table(profiles, sigma2=None, M=1, limit=20):
    """Smallest ordered-pair KL distances of the designed codebook, as text."""
    if isinstance(profiles, str):
        profiles = load_profiles(profiles)
    if sigma2 is None:
        sigma2 = noise_power(RadioParams())
    ranked = [profiles[i] for i in sort_users(profiles)]
    design = optimal_design(ranked, sigma2)
    table, c = pairwise_kl(design, ranked, sigma2)
    np.fill_diagonal(table, np.inf)
    flat = np.argsort(table, axis=None, kind="stable")[:limit]
    lines = [f"{'i':>5} {'j':>5} {'c_i':>24} {'c_j':>24} {'KL':>12} {'KL*M':>12}"]
    for f in flat:
        i, j = divmod(int(f), table.shape[1])
        lines.append(f"{i:>5} {j:>5} {c[i]:>24.6g} {c[j]:>24.6g} {table[i, j]:>12.6g} {M * table[i, j]:>12.6g}")
    return "\n".join(lines)
