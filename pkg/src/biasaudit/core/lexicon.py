"""Protected attribute group lexicons and cross-group word substitutions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import LexiconError
from .tokenization import tokenize


@dataclass(frozen=True)
class LexiconSet:
    """Word lists for protected attribute groups plus substitution maps.

    ``groups`` maps a group id to its lowercase word list. ``substitutions``
    maps a ``(source_group, target_group)`` pair to a word-for-word mapping
    used to rewrite mentions of the source group as the target group.

    Validated on construction:

    * every word is lowercase, non-empty, and a single token of itself;
    * no word belongs to more than one group;
    * substitution keys/values belong to their source/target lexicons.
    """

    groups: dict[str, tuple[str, ...]]
    substitutions: dict[tuple[str, str], dict[str, str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        seen: dict[str, str] = {}
        for group_id, words in self.groups.items():
            if not group_id:
                raise LexiconError("group id must be non-empty")
            if not words:
                raise LexiconError(f"group {group_id!r} has an empty lexicon")
            for word in words:
                if not word or word != word.lower():
                    raise LexiconError(f"lexicon word {word!r} must be lowercase")
                if tokenize(word) != [word]:
                    raise LexiconError(f"lexicon word {word!r} is not a single token")
                if word in seen and seen[word] != group_id:
                    raise LexiconError(
                        f"word {word!r} appears in groups {seen[word]!r} and {group_id!r}"
                    )
                seen[word] = group_id
        for (src, dst), mapping in self.substitutions.items():
            if src not in self.groups or dst not in self.groups:
                raise LexiconError(f"substitution {src!r}->{dst!r} names an unknown group")
            src_words = set(self.groups[src])
            dst_words = set(self.groups[dst])
            for key, value in mapping.items():
                if key not in src_words:
                    raise LexiconError(
                        f"substitution key {key!r} is not in the {src!r} lexicon"
                    )
                if value not in dst_words:
                    raise LexiconError(
                        f"substitution value {value!r} is not in the {dst!r} lexicon"
                    )

    @property
    def all_words(self) -> frozenset[str]:
        """Union of every group's lexicon."""
        return frozenset(w for words in self.groups.values() for w in words)

    def group_of(self, word: str) -> str | None:
        """Group id owning *word*, or ``None``."""
        for group_id, words in self.groups.items():
            if word in words:
                return group_id
        return None

    def words_of(self, group_id: str) -> frozenset[str]:
        if group_id not in self.groups:
            raise LexiconError(f"unknown group {group_id!r}")
        return frozenset(self.groups[group_id])

    def substitution(self, src: str, dst: str) -> dict[str, str]:
        """The word mapping rewriting *src*-group words as *dst*-group words."""
        try:
            return self.substitutions[(src, dst)]
        except KeyError:
            raise LexiconError(f"no substitution mapping {src!r}->{dst!r}") from None

    @classmethod
    def from_dict(cls, data: dict) -> "LexiconSet":
        """Build from the JSON file layout (``"a->b"`` substitution keys)."""
        try:
            groups = {
                str(gid): tuple(str(w) for w in words)
                for gid, words in data["groups"].items()
            }
        except (KeyError, TypeError, AttributeError) as exc:
            raise LexiconError(f"invalid lexicon file structure: {exc}") from exc
        substitutions: dict[tuple[str, str], dict[str, str]] = {}
        for key, mapping in (data.get("substitutions") or {}).items():
            src, sep, dst = key.partition("->")
            if not sep or not src or not dst:
                raise LexiconError(f"substitution key {key!r} is not of the form 'a->b'")
            substitutions[(src, dst)] = {str(k): str(v) for k, v in mapping.items()}
        return cls(groups=groups, substitutions=substitutions)

    def to_dict(self) -> dict:
        return {
            "groups": {gid: list(words) for gid, words in self.groups.items()},
            "substitutions": {
                f"{src}->{dst}": dict(mapping)
                for (src, dst), mapping in self.substitutions.items()
            },
        }


def load_lexicons(path: str | Path) -> LexiconSet:
    """Read a lexicon JSON file from disk."""
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise LexiconError(f"{path}: not valid JSON ({exc})") from exc
    return LexiconSet.from_dict(data)


def default_lexicons() -> LexiconSet:
    """The packaged male/female lexicons with both substitution directions."""
    text = resources.files("biasaudit.data.lexicons").joinpath("sex.json").read_text("utf-8")
    return LexiconSet.from_dict(json.loads(text))


def default_lexicon_path() -> Path:
    """Filesystem path of the packaged default lexicon file."""
    return Path(str(resources.files("biasaudit.data.lexicons").joinpath("sex.json")))
