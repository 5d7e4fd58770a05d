from setuptools import setup, find_packages
from grope_split import __version__

setup(
    name='grope_split',
    version=__version__,
    py_modules=['grope_split'],
    description='Комбинаторная модель расщепления гроп, ручек и распутывания циклов пересечений',
    long_description=open('README.rst', encoding='utf-8').read(),
    license='MIT',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.10',
    install_requires=['click', 'networkx', 'psutil'],
    entry_points='''
       [console_scripts]
        grope_split=grope_split.command:cli
    ''',
    classifiers=['Environment :: Console'],
    include_package_data=True
)
