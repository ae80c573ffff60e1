"""
Setup script for the hexufs package.
"""

from setuptools import setup, find_packages

setup(
    name="hexufs",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    py_modules=["main"],
    install_requires=[
        "networkx>=3.1",
        "pydantic>=2.5",
        "python-dotenv>=1.0.0",
        "tqdm>=4.66.1",
        "fastapi>=0.110",
        "uvicorn>=0.27",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
            "hypothesis>=6.90",
            "httpx>=0.26",
        ],
    },
    entry_points={
        "console_scripts": [
            "hexufs=hexufs.cli:main",
        ],
    },
    python_requires=">=3.8",
    description="Ground HEX-program evaluator with decomposed unfounded-set checking",
    author="hexufs Team",
)
