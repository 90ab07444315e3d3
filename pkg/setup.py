from setuptools import find_packages, setup

requires = [
    'numpy',
    'scipy',
    'networkx',
    'dwave-networkx',
    'minorminer',
    'numba',
    'PyYAML'
]

setup(name='bdmst-tools',
      version='0.1.0',
      install_requires=requires,
      license='GPLv3',
      packages=find_packages(include=['bdmst_tools', 'bdmst_tools.*']),
      entry_points={
          'console_scripts': [
              'bdmst-tools=bdmst_tools.cli.commandline:main'
          ]
      }
)
