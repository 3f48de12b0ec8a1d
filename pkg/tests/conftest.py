pytest_plugins = [
    'tests.fixtures.graphs',
    'tests.fixtures.misc',
]
