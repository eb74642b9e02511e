#!/usr/bin/env python

from setuptools import setup

setup(name='torpath',
      version='1.0',
      description='Deterministic Tor path-selection simulator and benchmark harness',
      packages=['torpath', 'torpath.network', 'torpath.circuit', 'torpath.selection',
                'torpath.harness', 'torpath.utils'],
      python_requires='>=3.8',
      install_requires=['numpy>=1.17', 'networkx', 'sortedcontainers',
                        'PyYAML', 'jsonschema>=3.0'],
      extras_require={'color': ['colorlog']},
      entry_points={'console_scripts': ['torpath = torpath.__main__:main_entry']},
      )
