# -*- coding: utf-8 -*-
"""
netreduce: reduction of network dynamics onto group observables
"""


from setuptools import setup


setup(name='netreduce', # this will be name of package in packages list : pip list 
      version='0.1.0',
      description='Homogeneous and spectral reductions of dynamics on weighted directed networks',
      keywords='network,dimension reduction,spectral,bifurcation,sis,stochastic block model',
      license='MIT License',
      packages=['netreduce', 'netreduce.dynamics'],
      install_requires = ['tqdm','numpy','torch','scipy','pandas','networkx'],
      extras_require = {'tests': ['pytest','hypothesis']},
      entry_points = {'console_scripts': ['netreduce=netreduce.cli:main']}
     )
