"""Prompt templates for neutral one-sentence amendment summaries.

The two templates are stored verbatim from the reference deployment and are
covered by golden-file tests: do not reflow, translate or "fix" them. The
few-shot exemplar block visibly truncates two lines at percent signs
("Increase to 50", "reduced VAT rate of 5.5"); the printed text is the
citable ground truth, so it ships as-is, with a flag to substitute
percent-restored exemplars and metadata marking the truncation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

from .ingest import render_amendment_text
from .model import Amendment

PLACEHOLDER = "{amendment}"


class PromptMode(str, Enum):
    ZERO_SHOT = "zero"
    FEW_SHOT = "few"


ZERO_SHOT_TEMPLATE = (
    "Here's an amendment: {amendment}\n"
    "Could you summarise this amendment for me in one sentence, as if I were a lawyer?"
)

FEW_SHOT_TEMPLATE = """You are a legal professional tasked with summarizing an amendment. Your task is to summarize the amendment in one sentence maximum. Here are some examples of amendment summaries made by lawyers:

    -Implement an exceptional mechanism for unlocking employee savings (profit-sharing and participation) up to 30,000 euros for funds placed in a savings plan before January 1, 2024, at the employee's request between July 1 and December 31, 2023.
    -Increase to 50
    -Restore the arrangement provided in Article 199 terdecies-0 B of the CGI (General Tax Code) for loans taken out between the date of promulgation of the present law and December 31, 2025.
    -Exempt from VAT non-profit participatory housing projects intended for primary residences.
    -Ensure the application of the reduced VAT rate of 5.5
    -Exempt from the housing tax (TH) social and medico-social establishments and services (EMS) and private health establishments of collective interest.
    -Abolish the real estate wealth tax (IFI).

You should draw inspiration from these summaries for the next amendment. The summary should be neutral, start with an infinitive verb, maintain legal vocabulary, and include important figures. Here's an amendment: {amendment}"""

# the two truncated lines with their percent signs restored; everything else
# identical to the reference text
FEW_SHOT_TEMPLATE_REPAIRED = FEW_SHOT_TEMPLATE.replace(
    "    -Increase to 50\n", "    -Increase to 50%\n"
).replace(
    "    -Ensure the application of the reduced VAT rate of 5.5\n",
    "    -Ensure the application of the reduced VAT rate of 5.5%\n",
)


@dataclass(frozen=True)
class PromptTemplate:
    mode: PromptMode
    template_text: str
    template_id: str
    truncated_exemplars: bool = False

    def __post_init__(self):
        if self.template_text.count(PLACEHOLDER) != 1:
            raise ValueError("template must contain exactly one amendment placeholder")
        if self.mode == PromptMode.FEW_SHOT and "-Abolish the real estate wealth tax" not in self.template_text:
            raise ValueError("few-shot template must carry the exemplar summaries block")


def _template_id(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def get_template(mode: PromptMode, repaired_exemplars: bool = False) -> PromptTemplate:
    mode = PromptMode(mode)
    if mode == PromptMode.ZERO_SHOT:
        text = ZERO_SHOT_TEMPLATE
        truncated = False
    else:
        text = FEW_SHOT_TEMPLATE_REPAIRED if repaired_exemplars else FEW_SHOT_TEMPLATE
        truncated = not repaired_exemplars
    return PromptTemplate(
        mode=mode,
        template_text=text,
        template_id=_template_id(text),
        truncated_exemplars=truncated,
    )


def build_prompt(a: Amendment, mode: PromptMode, repaired_exemplars: bool = False) -> str:
    """Render the template with the amendment's full labeled text substituted
    at the placeholder. Byte-stable for identical inputs."""
    template = get_template(mode, repaired_exemplars)
    return template.template_text.replace(PLACEHOLDER, render_amendment_text(a))
