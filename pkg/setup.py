from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="qwpinpaint",
    version="0.1.0",
    description="Quasi-analytic spline wavelet packets and image inpainting",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Image Processing",
    ],
    python_requires=">=3.9",
    install_requires=[
        "click>=8.0.0",
        "numpy>=1.22",
        "scipy>=1.12",
        "tomli>=1.1.0; python_version<'3.11'",
        "tomli-w>=1.0.0",
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'pytest-cov>=4.0.0',
        ],
    },
    entry_points={
        'console_scripts': [
            'qwp=qwpinpaint.cli:main',
        ],
    },
)
