from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple


@dataclass(frozen=True)
class Report:
    """Outcome of a property check. A violation carries the smallest witness found."""

    ok: bool
    clause: Optional[str] = None
    witness: Tuple[Any, ...] = ()
    message: str = ""
    context: Tuple[Any, ...] = ()
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def passed(cls, notes: Tuple[str, ...] = ()) -> "Report":
        return cls(ok=True, notes=tuple(notes))

    @classmethod
    def violation(
        cls,
        clause: str,
        witness: Tuple[Any, ...],
        message: str = "",
        context: Tuple[Any, ...] = (),
    ) -> "Report":
        return cls(ok=False, clause=clause, witness=tuple(witness), message=message, context=tuple(context))

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        body: Dict[str, Any] = {"ok": self.ok}
        if not self.ok:
            body["clause"] = self.clause
            body["witness"] = [_plain(item) for item in self.witness]
            body["message"] = self.message
            if self.context:
                body["context"] = [_plain(item) for item in self.context]
        if self.notes:
            body["notes"] = list(self.notes)
        return body


def _plain(item: Any) -> Any:
    if isinstance(item, (frozenset, set)):
        return sorted(_plain(x) for x in item)
    if isinstance(item, tuple):
        return [_plain(x) for x in item]
    return item
