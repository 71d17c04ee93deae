# -*- coding: utf-8 -*-
#
# wavemask documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

__version__ = '0.3.0'

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.imgmath',
    'sphinx.ext.viewcode',
    'recommonmark'
]

templates_path = ['_templates']

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}

master_doc = 'index'

project = u'wavemask'
copyright = u'2026, the wavemask developers'

version = __version__
release = __version__

language = None

autodoc_member_order = 'bysource'

exclude_patterns = []

pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinxdoc'
html_static_path = ['_static']
html_sidebars = { '**': ['globaltoc.html', 'relations.html', 'sourcelink.html', 'searchbox.html'], }
html_use_index = True
html_show_sourcelink = True
htmlhelp_basename = 'wavemaskdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'wavemask.tex', u'wavemask documentation',
   u'the wavemask developers', 'manual'),
]

man_pages = [
    ('index', 'wavemask', u'wavemask documentation',
     [u'the wavemask developers'], 1)
]

intersphinx_mapping = {'python': ('https://docs.python.org/3', None),
                       'numpy': ('https://numpy.org/doc/stable', None)}
