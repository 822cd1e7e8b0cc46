"""
〰️ Page Trajectoires
Échantillons de ponts CDB pour plusieurs horizons
"""
import streamlit as st
import plotly.graph_objects as go
import sys
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))
from utils.data_loader import bridge_slider_range, get_results, paths_for

st.set_page_config(page_title="Trajectoires", page_icon="〰️", layout="wide", initial_sidebar_state="collapsed")

from utils.navbar import inject_navbar_css, render_navbar, page_header, render_footer
from utils.style import PLOT_LAYOUT, COLOR_SEQUENCE

inject_navbar_css()
render_navbar("Trajectoires")

page_header("Trajectoires", "Ponts CDB révélés sur leur grille finale, interpolés linéairement")

df, header = get_results("paths")
if df.empty:
    st.warning("⚠️ Chargez un fichier de l'expérience paths depuis la page d'accueil")
    st.stop()

meta = header.get("meta", {})
horizons = sorted(df["T"].unique())

selected_T = st.selectbox("Horizon T", horizons, format_func=lambda t: f"T = {t:g}")
subset = paths_for(df, selected_T)
bridges = sorted(subset["bridge"].unique())
slider_range = bridge_slider_range(len(bridges))
if slider_range is not None:
    n_shown = st.slider("Nombre de ponts affichés", min_value=1, max_value=slider_range[0], value=slider_range[1])
else:
    n_shown = len(bridges)
    st.caption("Un seul pont dans ce fichier pour cet horizon.")

fig = go.Figure()
for i, bridge in enumerate(bridges[:n_shown]):
    path = subset[subset["bridge"] == bridge]
    fig.add_trace(go.Scatter(
        x=path["t"],
        y=path["value"],
        mode="lines",
        name=f"pont {bridge}",
        line=dict(color=COLOR_SEQUENCE[i % len(COLOR_SEQUENCE)], width=1),
        opacity=0.8,
    ))
fig.update_layout(xaxis_title="t", yaxis_title="X_t", height=520, showlegend=False, **{
    k: v for k, v in PLOT_LAYOUT.items() if k not in ("xaxis", "yaxis")
})
st.plotly_chart(fig, use_container_width=True)

col1, col2 = st.columns(2)

with col1:
    st.metric("Points révélés par pont (médiane)", int(subset.groupby("bridge").size().median()))

with col2:
    st.metric("Extrémités", f"{meta.get('x0', 'N/A')} → {meta.get('xT', 'N/A')}")

render_footer(meta)
