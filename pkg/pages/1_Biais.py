"""
📐 Page Biais
Loi du point milieu des ponts : CDB exact contre SDB discrétisé
"""
import streamlit as st
import plotly.graph_objects as go
import numpy as np
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
from utils.data_loader import get_results, midpoint_summary, ks_frame, brownian_midpoint_density

st.set_page_config(page_title="Biais", page_icon="📐", layout="wide", initial_sidebar_state="collapsed")

from utils.navbar import inject_navbar_css, render_navbar, page_header, render_footer
from utils.style import PLOT_LAYOUT, WARNING, method_colors, method_label

inject_navbar_css()
render_navbar("Biais")

page_header("Biais du point milieu", "Histogrammes de X_{T/2} par méthode et statistique de Kolmogorov-Smirnov")

df, header = get_results("bias")
if df.empty:
    st.warning("⚠️ Chargez un fichier de l'expérience bias depuis la page d'accueil")
    st.stop()

meta = header.get("meta", {})
methods = list(dict.fromkeys(df["method"]))
colors = method_colors(methods)

selected = st.multiselect(
    "Méthodes affichées",
    methods,
    default=methods,
    format_func=method_label,
)
bins = st.slider("Nombre de classes", min_value=10, max_value=150, value=60, step=5)

# Histogrammes superposés, normalisés en densité pour comparer des effectifs différents.
fig = go.Figure()
for method in selected:
    values = df.loc[df["method"] == method, "midpoint"]
    fig.add_trace(go.Histogram(
        x=values,
        nbinsx=bins,
        histnorm="probability density",
        name=method_label(method),
        marker_color=colors[method],
        opacity=0.55,
    ))

grid = np.linspace(df["midpoint"].min(), df["midpoint"].max(), 400)
density = brownian_midpoint_density(meta, grid)
if density is not None:
    fig.add_trace(go.Scatter(x=grid, y=density, mode="lines", name="Loi exacte", line=dict(color=WARNING, width=2)))

fig.update_layout(barmode="overlay", height=480, xaxis_title="Point milieu", yaxis_title="Densité", **{
    k: v for k, v in PLOT_LAYOUT.items() if k not in ("xaxis", "yaxis")
})
st.plotly_chart(fig, use_container_width=True)

col_summary, col_ks = st.columns(2)

with col_summary:
    st.subheader("Moments empiriques")
    summary = midpoint_summary(df)
    summary["method"] = summary["method"].map(method_label)
    st.dataframe(summary, use_container_width=True, hide_index=True)

with col_ks:
    st.subheader("KS contre le CDB")
    ks = ks_frame(header)
    if ks.empty:
        st.warning("⚠️ Pas de tableau KS dans les métadonnées du fichier")
    else:
        ks["method"] = ks["method"].map(method_label)
        st.dataframe(ks, use_container_width=True, hide_index=True)
        st.caption("Le biais du SDB décroît avec le pas Δ ; le CDB sert de référence exacte.")

render_footer(meta)
