from setuptools import setup, find_packages

with open("README.md", "r") as read_me:
    long_description = read_me.read()


setup(
    name="symsum",
    description="Exact lattice computations for symplectic 4-manifolds, symplectic sums and their minimality",
    long_description=long_description,
    long_description_content_type="text/markdown",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    install_requires=[
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0",
        "lxml>=4.9.2",
        "humanize>=4.6.0",
        "sympy>=1.12",
    ],
    extras_require={
        "docs": [
            "sphinx >= 5.0.2",
            "sphinx-rtd-theme >= 1.0.0",
            "sphinxcontrib-mermaid==0.8.1",
        ],
        "test": [
            "pytest>=7.2.0",
            "hypothesis>=6.70.0",
        ],
    },
    entry_points={"console_scripts": ["symsum=symsum.symsum:run"]},
    classifiers=[
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    keywords=["symplectic", "4-manifolds", "intersection lattice", "geography"],
)
