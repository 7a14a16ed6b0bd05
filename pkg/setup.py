from setuptools import setup, find_packages

setup(
    name="fbsde-deep-solvers",
    version="1.0.0",
    packages=find_packages(include=["src", "src.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "pydantic>=2.9.0",
        "pydantic-settings>=2.6.0",
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0.1",
        "langgraph>=0.2.45",
        "matplotlib>=3.7.0",
    ],
    extras_require={"test": ["pytest>=7.4.0"]},
    entry_points={"console_scripts": ["fbsde=src.cli.main:main"]},
)
