from setuptools import setup, find_packages

setup(
    name="s3t-decoder",
    version="0.1.0",
    description="Spatial-temporal tiny transformer decoding of motor imagery EEG",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    python_requires=">=3.10",
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "psutil>=5.9.0",
        "scikit-learn>=1.3.0",
    ],
    entry_points={
        'console_scripts': [
            's3t-decoder=s3t_decoder.cli:main',
        ],
    },
)
