"""Error type shared by every module.

Each error carries a short machine-readable ``code`` (``cycle-detected``,
``bad-interval``, ...) so the command line can print ``error: <code>: <detail>``.
"""

from __future__ import annotations


class StratError(ValueError):
    def __init__(self, code: str, detail: str = "", witness=None):
        self.code = code
        self.detail = detail
        self.witness = witness
        super().__init__(f"{code}: {detail}" if detail else code)
