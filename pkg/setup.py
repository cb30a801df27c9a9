from setuptools import setup, find_packages

setup(
    name="capacity_planner",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy>=1.22",
        "tabulate>=0.9",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "hypothesis>=6.0",
        ],
    },
    entry_points={
        'console_scripts': [
            'capacity-planner=capacity_planner.cli:main',
        ],
    },
    author="",
    author_email="",
    description="Network capacity planning: statistical over-subscription, Ethernet/TCP arithmetic, Reno simulation and fabric audits",
    keywords="network, capacity planning, oversubscription, tcp, clos, leaf-spine",
    python_requires=">=3.8",
)
