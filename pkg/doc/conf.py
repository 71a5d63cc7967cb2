"""Document configuration."""
# pylint: disable=invalid-name
import os
import sys

from hilange import __version__

sys.path.insert(0, os.path.abspath(os.pardir))

# -- General configuration ------------------------------------------------

extensions = ["sphinx.ext.autodoc", "m2r2"]
templates_path = ["_templates"]
source_suffix = [".rst", ".md"]
master_doc = "index"

project = "Hilange"
copyright = "2022, Hilange developers"  # pylint: disable=redefined-builtin
author = "Hilange developers"
version = __version__
release = __version__
language = "en"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = []
html_sidebars = {
    "**": [
        "relations.html",
        "searchbox.html",
    ]
}
htmlhelp_basename = "Hilangedoc"

# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "hilange", "Hilange Documentation", [author], 1)]
