"""
Navbar et CSS communs à toutes les pages du visualiseur.
Navigation par st.page_link() dans le même onglet.
"""
import streamlit as st

from utils.style import ACCENT, PALE, PRIMARY, SECONDARY

PAGES = [
    ("Accueil", "app.py"),
    ("Biais", "pages/1_Biais.py"),
    ("Temps de calcul", "pages/2_Temps.py"),
    ("Trajectoires", "pages/3_Trajectoires.py"),
]

TEXT = "#1e293b"
MUTED = "#64748b"
BORDER = "#e2e8f0"

# Une seule feuille pour toutes les pages ; les couleurs suivent la palette des méthodes
NAVBAR_CSS = f"""
<style>
@import url('https://fonts.googleapis.com/css2?family=Inter:wght@400;500;600;700&family=JetBrains+Mono&display=swap');
html, body, [class*="css"] {{ font-family: 'Inter', sans-serif !important; }}
section[data-testid="stSidebar"], [data-testid="collapsedControl"] {{ display: none !important; }}

.navbar-brand-text {{ font-size: 1.3rem; font-weight: 700; color: {PRIMARY}; line-height: 2.4rem; }}
.navbar-brand-text span {{ color: {SECONDARY}; }}
.navbar-rule {{ border-bottom: 2px solid {PALE}; margin: -0.5rem -1rem 1.5rem -1rem; }}

[data-testid="stPageLink"] a {{ font-size: 0.9rem !important; color: {MUTED} !important; text-decoration: none !important; }}
[data-testid="stPageLink"] a:hover {{ color: {ACCENT} !important; background: {PALE} !important; }}

h1, h2, h3 {{ color: {TEXT} !important; }}
.page-header {{ text-align: center; padding: 1.5rem 0 0.5rem 0; }}
.page-header h1 {{ font-size: 2.1rem; font-weight: 700; margin: 0; }}
.page-header p {{ color: {MUTED}; margin-top: 0.4rem; }}

[data-testid="stMetric"] {{ border-left: 4px solid {PRIMARY}; background: #ffffff; padding: 1rem 1.2rem; border-radius: 8px; }}
[data-testid="stMetricValue"] {{ font-family: 'JetBrains Mono', monospace; }}
[data-testid="stDataFrame"] {{ border: 1px solid {BORDER}; border-radius: 8px; }}
.stDownloadButton > button {{ color: {PRIMARY} !important; border: 1px solid {PRIMARY} !important; background: transparent !important; }}

.site-footer {{ text-align: center; color: {MUTED}; font-size: 0.8rem; border-top: 1px solid {BORDER}; margin-top: 2rem; padding: 1.5rem 0; }}
</style>
"""


def inject_navbar_css():
    st.markdown(NAVBAR_CSS, unsafe_allow_html=True)


def render_navbar(active_page="Accueil"):
    """Marque à gauche, un lien par page ensuite ; la page courante est désactivée."""
    brand_col, *link_cols = st.columns([2] + [1] * len(PAGES))

    with brand_col:
        st.markdown('<div class="navbar-brand-text">〰️ <span>Conf</span>luent</div>', unsafe_allow_html=True)

    for col, (label, page_path) in zip(link_cols, PAGES):
        with col:
            st.page_link(page_path, label=label, disabled=(label == active_page))

    st.markdown('<div class="navbar-rule"></div>', unsafe_allow_html=True)


def page_header(title, subtitle):
    st.markdown(
        f'<div class="page-header"><h1>{title}</h1><p>{subtitle}</p></div>',
        unsafe_allow_html=True,
    )


def render_footer(meta=None):
    """Pied de page ; rappelle la graine quand un fichier est chargé."""
    seed = f" · graine {meta.get('seed')}" if meta else ""
    st.markdown(f'<div class="site-footer">Fichiers produits par bridge-bench{seed}</div>', unsafe_allow_html=True)
