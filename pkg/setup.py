from setuptools import setup

setup(name='ade_sieve',
      version='0.1.0',
      packages=['ade_sieve', 'ade_sieve.cases'],
      package_data={'ade_sieve.cases': ['cases.json']},
      install_requires=['numpy', 'sympy', 'mpmath'],
      extras_require={'test': ['pytest']},
      entry_points={'console_scripts': ['ade-sieve = ade_sieve.cli:main']},
)
