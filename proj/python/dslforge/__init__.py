"""Python access to the dslforge workbench: grammar validation, the version
graph, prompt-driven version creation and repair."""

import json

from ._core import DslForgeError
from . import _core

__all__ = ["DslForgeError", "Workbench", "validate", "configurations", "rate_text", "token_diff", "cli"]


def validate(grammar, example=None):
    """Validation of a grammar (and optionally an example) as a dict."""
    return json.loads(_core.validate(grammar, example))


def configurations():
    return json.loads(_core.configurations())


def rate_text(num, den):
    """Three-decimal half-up rendering of num/den, None for den == 0."""
    return _core.rate_text(num, den)


def token_diff(expected, actual):
    return _core.token_diff(expected, actual)


def cli(*args):
    """Run the command line in-process: (exit_code, stdout, stderr)."""
    return _core.cli([str(a) for a in args])


class Workbench:
    """A store directory plus an optional model backend spec
    ("mock:<transcript>" or an http(s) endpoint)."""

    def __init__(self, store_path, backend=None):
        self._s = _core.Session(str(store_path), backend)

    def create_project(self, name):
        return json.loads(self._s.create_project(name))

    def projects(self):
        return json.loads(self._s.projects())

    def versions(self, project_id):
        return json.loads(self._s.versions(project_id))

    def version(self, version_id):
        return json.loads(self._s.get_version(version_id))

    def create_version(self, project_id, **body):
        """Prompt run ({kind, input_format, input, base_ids, with_context, ...})
        or, with ``definition=...``, a manual edit."""
        return json.loads(self._s.create_version(project_id, json.dumps(body)))

    def delete_version(self, version_id):
        self._s.delete_version(version_id)

    def repair(self, version_id, mode="combined", attempts=4):
        return json.loads(self._s.repair(version_id, mode, attempts))

    def metamodel(self, version_id):
        return json.loads(self._s.metamodel(version_id))

    def lineage(self, version_id):
        return json.loads(self._s.lineage(version_id))
