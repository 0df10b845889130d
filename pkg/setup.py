# Written by the acorp developers - 2026
#####################################################

from setuptools import setup, find_packages

setup(
    name="acorp",
    version="0.1.0",
    description="Registry, capability tokens, ledger and audit log for algorithmic corporations (A-corps)",
    author="acorp developers",
    license="Apache 2",
    packages=find_packages(include=["acorp", "acorp.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24.4",
        "tqdm>=4.64.1",
        "termcolor",
        "cryptography>=41",
        "fastapi",
        "uvicorn",
        "httpx",
    ],
    entry_points={
        "console_scripts": ["acorp=acorp.interface.cli:main"],
    },
)
