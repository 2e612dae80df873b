import os
import shutil
from setuptools import setup, find_packages

# Remove existing build directory
build_dir = 'build'
if os.path.exists(build_dir):
    shutil.rmtree(build_dir)

required_packages = [
    'numpy', 'Pillow', 'pydantic>=2', 'python-dotenv', 'scikit-image', 'scikit-learn', 'scipy>=1.12', 'tqdm',
]

test_packages = ['pytest', 'hypothesis']

setup(
    name='drm-restore',
    version='1.0.0',
    description='Reference-guided all-in-one image restoration with analytic priors',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    py_modules=['main', 'utils', 'errors'],
    python_requires='>=3.9',
    install_requires=required_packages,
    extras_require={'test': test_packages},
    entry_points={'console_scripts': ['drm=main:main']},
)
