from setuptools import find_packages, setup

import os
from configparser import ConfigParser

here = os.path.abspath(os.path.dirname(__file__))
default_config = os.path.join(here, "wavemask", "wavemask_config.txt")
config = ConfigParser()
config.read([default_config])

# Get the long description from the README file
with open(os.path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()


install_requires = [
    "numpy",
    "scipy",
    "matplotlib",
    "natsort",
    "joblib",
    "scikit-image",
]
tests_require = [
    "pytest",
    "pytest-cov",
    "pytest-xdist",
]
docs_require = ["Sphinx", "recommonmark"]
extras_require = {
    "dev": tests_require + docs_require + ["pre-commit"],
    "docs": docs_require,
    "test": tests_require,
}


setup(
    name="wavemask",
    version=config.get("Configuration", "version"),
    description="Wavelet saliency masks for flow matching in latent space",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="GNU LGPL",
    python_requires=">=3.7",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU Lesser General Public License v3 or later (LGPLv3+)",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Image Processing",
    ],
    keywords="wavelets saliency flow-matching generative-models",
    packages=find_packages(exclude=["tests", "examples", "examples.*"]),
    package_data={"wavemask": ["wavemask_config.txt"]},
    include_package_data=True,
    install_requires=install_requires,
    tests_require=tests_require,
    extras_require=extras_require,
    entry_points={"console_scripts": ["wavemask=wavemask.cli:main"]},
)
