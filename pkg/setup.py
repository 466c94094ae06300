from setuptools import setup

with open("README.md", encoding="utf-8") as file:
    long_description = file.read()

install_requires = [
    "attrs",
    "structlog>=20.2",
    "numpy>=1.17",
    "scipy",
]

tests_require = install_requires + ["pytest", "flake8", "mock<4", "hypothesis"]

setup(
    name="hyperpen",
    version="0.1",
    license="MIT",
    description="Penetration properties and prescribed-penetration geodesics in hyperbolic spaces",
    long_description=long_description,
    long_description_content_type="text/markdown",
    test_suite="tests",
    tests_require=tests_require,
    install_requires=install_requires,
    python_requires=">=3.8",
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: POSIX",
        "Operating System :: POSIX :: Linux",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
    ],
    packages=["hyperpen"],
    entry_points={"console_scripts": ["hyperpen=hyperpen.cli:main"]},
    extras_require={"tests": tests_require},
)
