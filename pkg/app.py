"""
〰️ Confluent - Visualiseur des benchmarks de ponts de diffusion
Page d'accueil : chargement d'un fichier produit par bridge-bench et synthèse
"""
import streamlit as st
import sys
from pathlib import Path

# Ajouter le dossier racine au path pour charger les utilitaires partagés.
sys.path.append(str(Path(__file__).parent))
from utils.data_loader import (
    list_result_files,
    load_results_path,
    load_results_text,
    store_results,
    get_results,
)
from utils.navbar import inject_navbar_css, render_navbar, page_header, render_footer

st.set_page_config(
    page_title="Confluent - Ponts de diffusion",
    page_icon="〰️",
    layout="wide",
    initial_sidebar_state="collapsed"
)

inject_navbar_css()
render_navbar("Accueil")

page_header(
    "Ponts de diffusion exacts",
    "Résultats des expériences bridge-bench : biais, temps de calcul et trajectoires"
)

# Deux sources possibles : un fichier déposé ou un fichier du dossier results/.
col_upload, col_local = st.columns(2)

with col_upload:
    uploaded = st.file_uploader("📂 Déposer un fichier de résultats", type=["csv", "json"])

with col_local:
    local_files = list_result_files()
    choice = st.selectbox(
        "📁 Ou choisir un fichier du dossier results/",
        ["—"] + [p.name for p in local_files],
    )

if uploaded is not None:
    df, header = load_results_text(uploaded.getvalue().decode("utf-8"))
    store_results(df, header)
elif choice != "—":
    df, header = load_results_path(next(p for p in local_files if p.name == choice))
    store_results(df, header)
else:
    df, header = get_results()

if df.empty:
    st.info("ℹ️ Aucun fichier chargé. Lancez par exemple `bridge-bench bias --bridges 100 --out results/bias.csv`.")
    render_footer()
    st.stop()

meta = header.get("meta", {})
experiment = header.get("experiment", "?")

st.header("Synthèse")

col1, col2, col3, col4 = st.columns(4)

with col1:
    st.metric("Expérience", experiment)

with col2:
    dof = meta.get("dof")
    st.metric("Modèle", meta.get("model", "N/A"), f"v = {dof:g}" if dof is not None else None)

with col3:
    st.metric("Ponts par configuration", meta.get("n_bridges", "N/A"))

with col4:
    st.metric("Pas MCMC", meta.get("n_mcmc", "N/A"))

with st.expander("Paramètres complets de l'exécution"):
    st.json(meta)

pages = {"bias": "pages/1_Biais.py", "timing": "pages/2_Temps.py", "paths": "pages/3_Trajectoires.py"}
if experiment in pages:
    st.page_link(pages[experiment], label="➡️ Ouvrir la page d'analyse de cette expérience")

st.divider()
st.subheader("Tableau des résultats")

st.dataframe(df, use_container_width=True, height=400)

csv = df.to_csv(index=False).encode('utf-8')
st.download_button(
    label="📥 Télécharger le tableau (CSV)",
    data=csv,
    file_name=f"{experiment}_resultats.csv",
    mime="text/csv",
    key="download_results"
)

render_footer(meta)
