#!/usr/bin/env python
# -*- coding: utf-8 -*-

# format setup arguments

from os import walk
from os.path import abspath, normpath, splitext
from os.path import join as pj

from setuptools import setup, find_packages

short_descr = "Numerical experiments on operator-valued free convolution and free infinite divisibility"
readme = open('README.md').read()

# find packages
pkgs = find_packages(where='src', include=['freediv', 'freediv.*'])

pkg_data = {}

nb = len(normpath(abspath("src/freediv"))) + 1
data_rel_pth = lambda pth: normpath(abspath(pth))[nb:]

data_files = []
for root, dnames, fnames in walk("src/freediv"):
    for name in fnames:
        if splitext(name)[-1] in [u'.json', u'.toml']:
            data_files.append(data_rel_pth(pj(root, name)))

pkg_data['freediv'] = data_files

# find version number in src/freediv/version.py
_version = {}
with open("src/freediv/version.py") as fp:
    exec(fp.read(), _version)

version = _version['__version__']

setup_kwds = dict(
    name='freediv',
    version=version,
    description=short_descr,
    long_description=readme,
    long_description_content_type='text/markdown',
    license='cecill-c',
    zip_safe=False,
    python_requires='>=3.8',

    packages=pkgs,
    package_dir={'': 'src'},

    package_data=pkg_data,

    install_requires=['numpy', 'scipy', 'pandas', 'tomli; python_version < "3.11"'],
    extras_require={'test': ['pytest']},
    entry_points={'console_scripts': ['freediv = freediv.cli:main']},
    keywords='free probability, operator-valued, free convolution, infinite divisibility, Steinitz lemma',
)


setup(**setup_kwds)
