"""Security labels: confidentiality and integrity principals."""

from __future__ import annotations

from dataclasses import dataclass

from secpart.errors import LabelSyntaxError
from secpart.labels.principal import STRONGEST, WEAKEST, Principal


@dataclass(frozen=True)
class Label:
    """A pair of a confidentiality and an integrity principal.

    Information may flow from `l1` to `l2` when `l2` is at least as confidential and at most as trusted.
    """

    #: Who may read the data.
    conf: Principal

    #: Who may have influenced the data.
    integ: Principal

    @classmethod
    def parse(cls, text: str) -> Label:
        """Parse a label written `<conf, integ>`.

        Raises:
            LabelSyntaxError: If the text is not a label.

        """
        stripped = text.strip()
        if not (stripped.startswith("<") and stripped.endswith(">")):
            raise LabelSyntaxError(f"Label must be written <conf, integ>, got {text!r}")
        body = stripped[1:-1]
        depth = 0
        for index, char in enumerate(body):
            if char == "(":
                depth += 1
            elif char == ")":
                depth -= 1
            elif char == "," and depth == 0:
                return cls(Principal.parse(body[:index]), Principal.parse(body[index + 1 :]))
        raise LabelSyntaxError(f"Label must have two components, got {text!r}")

    def flows_to(self, other: Label) -> bool:
        """Whether data at this label may flow to `other`."""
        return other.conf.acts_for(self.conf) and self.integ.acts_for(other.integ)

    def acts_for(self, other: Label) -> bool:
        """Pointwise acts-for, used for host authority."""
        return self.conf.acts_for(other.conf) and self.integ.acts_for(other.integ)

    def join(self, other: Label) -> Label:
        """Least upper bound with respect to flows-to."""
        return Label(self.conf & other.conf, self.integ | other.integ)

    def meet(self, other: Label) -> Label:
        """Greatest lower bound with respect to flows-to."""
        return Label(self.conf | other.conf, self.integ & other.integ)

    def disjoin(self, other: Label) -> Label:
        """Pointwise disjunction, the authority both labels share."""
        return Label(self.conf | other.conf, self.integ | other.integ)

    @property
    def conf_projection(self) -> Label:
        """The label with the integrity weakened to the weakest principal."""
        return Label(self.conf, WEAKEST)

    @property
    def integ_projection(self) -> Label:
        """The label with the confidentiality weakened to the weakest principal."""
        return Label(WEAKEST, self.integ)

    @property
    def uncompromised(self) -> bool:
        """Whether the label is at least as trusted as it is secret."""
        return self.integ.acts_for(self.conf)

    def __str__(self) -> str:
        """Render as `<conf, integ>`."""
        return f"<{self.conf}, {self.integ}>"


def label_flows_to(l1: Label, l2: Label) -> bool:
    """Return whether `l1` flows to `l2`."""
    return l1.flows_to(l2)


def label_join(l1: Label, l2: Label) -> Label:
    """Return the join of two labels."""
    return l1.join(l2)


def label_meet(l1: Label, l2: Label) -> Label:
    """Return the meet of two labels."""
    return l1.meet(l2)


def uncompromised(label: Label) -> bool:
    """Return whether the label's integrity acts for its confidentiality."""
    return label.uncompromised


#: Public and trusted, the least restrictive label.
PUBLIC_TRUSTED = Label(WEAKEST, STRONGEST)

#: Secret and untrusted, the most restrictive label.
SECRET_UNTRUSTED = Label(STRONGEST, WEAKEST)

#: The label of the fully trusted endpoints (the ideal host and the environment).
FULLY_TRUSTED = Label(STRONGEST, STRONGEST)

#: The label of the adversary in channel labels: communication with it is public and as trusted as the
#: other endpoint.
ADVERSARY_LABEL = PUBLIC_TRUSTED
