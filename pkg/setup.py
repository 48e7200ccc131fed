import pathlib

from setuptools import find_packages, setup
import fblmimo

# The directory containing this file
HERE = pathlib.Path(__file__).parent

# The text of the README file
README = (HERE / "README.md").read_text(encoding="utf-8")

if __name__ == "__main__":
    setup(
        name="fblmimo",
        version=fblmimo.__version__,
        description="Finite-blocklength rate bounds for massive MIMO links, with closed-form channel"
        " dispersion statistics checked against a seeded Monte-Carlo oracle",
        long_description=README,
        long_description_content_type="text/markdown",
        classifiers=[
            "Programming Language :: Python :: 3",
            "Programming Language :: Python :: 3.8",
        ],
        packages=find_packages(include=["fblmimo", "fblmimo.*"]),
        include_package_data=True,
        python_requires=">=3.8",
        install_requires=[
            "numpy>=1.22",
            "scipy>=1.8",
            "rich~=12.3.0",
            "click~=8.1.3",
            "setuptools>=62.1.0",
        ],
        setup_requires="setuptools",
        entry_points={"console_scripts": ["fblmimo = fblmimo.core._cli.fblmimo_cli:main"]},
    )
