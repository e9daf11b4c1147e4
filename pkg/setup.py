from setuptools import setup, find_packages

setup(
    name='PyAirComp',
    version='0.1.0-alpha.1',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.8',
        'PyYAML>=6.0',
        'watchdog>=3.0.0',
    ],
    entry_points={
        'console_scripts': ['pyaircomp=pyaircomp.cli:main'],
    },
    description='Monte Carlo simulator for robust over-the-air computation with type-based multiple access.',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
    ],
    python_requires='>=3.9',
    keywords='aircomp, tbma, byzantine, robust-aggregation, federated-learning, simulation',
)
