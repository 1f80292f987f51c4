"""Sphinx configuration for abel-sonin."""
import os
import sys

sys.path.insert(0, os.path.abspath('../src'))

import abel_sonin  # noqa: E402

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.viewcode']
autodoc_member_order = 'bysource'

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']

project = 'abel-sonin'
author = "Maryam K"
copyright = "2024, Maryam K"
version = release = abel_sonin.__version__

pygments_style = 'sphinx'
html_theme = 'alabaster'
htmlhelp_basename = 'abel_sonindoc'
