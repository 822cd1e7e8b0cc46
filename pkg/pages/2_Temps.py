"""
⏱️ Page Temps de calcul
Temps par pont en fonction de l'horizon T, CDB contre PSRS
"""
import streamlit as st
import plotly.express as px
import plotly.graph_objects as go
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
from utils.data_loader import get_results, timing_summary, median_ratio, format_seconds

st.set_page_config(page_title="Temps de calcul", page_icon="⏱️", layout="wide", initial_sidebar_state="collapsed")

from utils.navbar import inject_navbar_css, render_navbar, page_header, render_footer
from utils.style import PLOT_LAYOUT, method_colors, method_label

inject_navbar_css()
render_navbar("Temps de calcul")

page_header("Temps de calcul", "Coût d'un pont en fonction de la distance entre observations")

df, header = get_results("timing")
if df.empty:
    st.warning("⚠️ Chargez un fichier de l'expérience timing depuis la page d'accueil")
    st.stop()

meta = header.get("meta", {})
summary = timing_summary(df)
horizons = sorted(df["T"].unique())

col1, col2, col3 = st.columns(3)

with col1:
    cdb = summary[summary["method"] == "cdb"]
    st.metric("Médiane CDB (T max)", format_seconds(cdb["median"].iloc[-1]) if not cdb.empty else "N/A",
              f"T = {horizons[-1]:g}")

with col2:
    ratio = median_ratio(df, 100.0, 50.0)
    st.metric(
        "Rapport médian T=100 / T=50",
        f"{ratio:.2f}" if ratio is not None else "N/A",
        help="Croissance linéaire attendue : environ 2"
    )

with col3:
    st.metric("PSRS hors budget", int(summary["budget_exhausted"].sum()),
              help=f"Budget = {meta.get('psrs_budget_factor', 'N/A')} × temps CDB, T <= {meta.get('psrs_cutoff', 'N/A')}")

log_scale = st.toggle("Échelle logarithmique", value=True)

# Boîtes à moustaches par horizon ; les PSRS abandonnés sont exclus du graphique.
ok = df[df["status"] == "ok"].copy()
ok["méthode"] = ok["method"].map(method_label)
colors = {method_label(m): c for m, c in method_colors(df["method"]).items()}
fig = px.box(
    ok,
    x="T",
    y="seconds",
    color="méthode",
    color_discrete_map=colors,
    labels={"T": "Horizon T", "seconds": "Secondes par pont"},
    log_y=log_scale,
    height=500,
)
fig.update_layout(**PLOT_LAYOUT)
st.plotly_chart(fig, use_container_width=True)

st.divider()
st.subheader("Médianes par horizon")

fig_line = go.Figure()
for method, group in summary.groupby("method"):
    fig_line.add_trace(go.Scatter(
        x=group["T"],
        y=group["median"],
        mode="lines+markers",
        name=method_label(method),
        line=dict(color=method_colors(df["method"])[method]),
    ))
fig_line.update_layout(xaxis_title="Horizon T", yaxis_title="Temps médian (s)", height=420, **{
    k: v for k, v in PLOT_LAYOUT.items() if k not in ("xaxis", "yaxis")
})
if log_scale:
    fig_line.update_yaxes(type="log")
st.plotly_chart(fig_line, use_container_width=True)

display = summary.copy()
display["method"] = display["method"].map(method_label)
st.dataframe(display, use_container_width=True, hide_index=True)
st.caption("Les durées dépendent de la machine et ne sont pas reproductibles d'une exécution à l'autre.")

render_footer(meta)
