from dataclasses import dataclass, field


@dataclass
class Report:
    """Outcome of a theorem check.

    A violation records the clause that failed plus whatever witness data the
    caller attached. An empty violation list means every clause held.
    """

    name: str
    violations: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, cond, clause, **witness):
        if not cond:
            self.violations.append({"clause": clause, **witness})
        return bool(cond)

    def merge(self, other, prefix=None):
        for v in other.violations:
            v = dict(v)
            if prefix:
                v["clause"] = f"{prefix}:{v['clause']}"
            self.violations.append(v)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"name": self.name, "ok": self.ok, "data": _jsonable(self.data),
                "violations": _jsonable(self.violations)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj
