from setuptools import setup, find_packages

setup(
    name="knapsack-scoring",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy>=1.23.0",
        "pandas>=1.5.0",
        "tqdm>=4.65.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "hypothesis>=6.70",
        ],
    },
    entry_points={
        "console_scripts": [
            "kss=scripts.kss:main",
            "kss-check-oracles=scripts.check_oracles:main",
        ],
    },
    python_requires=">=3.8",
    description="Scoring mechanisms that incentivize effort on a knapsack of binary prediction tasks",
    keywords="scoring rules, mechanism design, incentive compatibility, knapsack",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
)
