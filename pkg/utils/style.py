"""Styles partagés du visualiseur (couleurs par méthode, mise en forme Plotly).
Le CDB garde toujours la couleur principale ; les variantes SDB prennent les bleus plus clairs.
"""
PRIMARY = "#08306b"
SECONDARY = "#2b6cb0"
LIGHT = "#7fb8f7"
ACCENT = "#08519c"
SOFT = "#5aa3e6"
PALE = "#dbe9fb"
WARNING = "#c2410c"

# CDB puis variantes SDB dans l'ordre du fichier
METHOD_SEQUENCE = [PRIMARY, SOFT, SECONDARY, LIGHT, ACCENT, PALE]
COLOR_SEQUENCE = [PRIMARY, SECONDARY, LIGHT]

METHOD_LABELS = {
    "cdb": "CDB (exact)",
    "psrs": "PSRS (pont par rejet)",
}

PLOT_LAYOUT = dict(
    paper_bgcolor='rgba(0,0,0,0)',
    plot_bgcolor='rgba(0,0,0,0)',
    font=dict(family='Inter', color='#1e293b'),
    title_font=dict(size=14),
    xaxis=dict(gridcolor='#f1f5f9'),
    yaxis=dict(gridcolor='#f1f5f9'),
)


def method_colors(methods):
    """Associe une couleur à chaque méthode, le CDB en premier."""
    ordered = sorted(set(methods), key=lambda m: (m != "cdb", m != "psrs", str(m)))
    return {m: METHOD_SEQUENCE[i % len(METHOD_SEQUENCE)] for i, m in enumerate(ordered)}


def method_label(method):
    method = str(method)
    if method.startswith("sdb(delta=") and method.endswith(")"):
        return f"SDB (Δ = {method[len('sdb(delta='):-1]})"
    return METHOD_LABELS.get(method, method)
