"""
Site page parsing on top of the standard library HTML parser.
"""

from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Optional

from ..errors import ParseError
from .corpus import SiteRecord
from .pages import RECORD_ID_ATTR, RESULTS_ELEMENT_ID

VOID_TAGS = frozenset(
    {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "wbr"}
)


class Tag:
    """An open element with its attributes."""

    def __init__(self, name: str, attrs: list[tuple[str, Optional[str]]]):
        self.name = name
        self.attrs: dict[str, str] = {k: (v if v is not None else "") for k, v in attrs}

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.attrs.get(key, default)

    def has_class(self, name: str) -> bool:
        return name in self.attrs.get("class", "").split()

    def __repr__(self) -> str:
        attrs = " ".join(f'{k}="{v}"' for k, v in self.attrs.items())
        return f"<{self.name} {attrs}>"


@dataclass
class FormField:
    element_id: str
    name: str
    value: str = ""


@dataclass
class Form:
    """A form as found on a page."""

    element_id: str
    action: str
    method: str
    fields: list[FormField] = field(default_factory=list)
    buttons: list[str] = field(default_factory=list)

    def field_named(self, name: str) -> FormField:
        for f in self.fields:
            if f.name == name:
                return f
        raise ParseError(f"form {self.element_id} has no field named {name!r}")

    def has_button(self, button_id: str) -> bool:
        return button_id in self.buttons

    def submission(self) -> dict[str, str]:
        """Parameters the browser would send on submit."""
        return {f.name: f.value for f in self.fields if f.name}


@dataclass
class _Entry:
    record_id: str
    disease: list[str] = field(default_factory=list)
    description: list[str] = field(default_factory=list)
    drugs: list[str] = field(default_factory=list)


@dataclass
class ParsedPage:
    forms: dict[str, Form]
    results: Optional[list[SiteRecord]]
    declared_count: Optional[int]

    def form(self, element_id: str) -> Form:
        try:
            return self.forms[element_id]
        except KeyError:
            raise ParseError(f"no form with id {element_id!r}") from None


class PageParser(HTMLParser):
    """Collects forms and result entries while checking element nesting."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.tags: list[Tag] = []
        self.forms: dict[str, Form] = {}
        self._form: Optional[Form] = None
        self._results_open = False
        self._results_seen = False
        self._declared_count: Optional[int] = None
        self._entries: list[_Entry] = []
        self._entry: Optional[_Entry] = None
        self._sink: Optional[list[str]] = None
        self.errors: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, Optional[str]]]) -> None:
        element = Tag(tag, attrs)
        if tag in VOID_TAGS:
            self._on_void(element)
            return
        self.tags.append(element)

        if tag == "form":
            form_id = element.get("id", "")
            if form_id in self.forms:
                self.errors.append(f"duplicate form id {form_id!r}")
            self._form = Form(
                element_id=form_id,
                action=element.get("action", ""),
                method=element.get("method", "get").lower(),
            )
            self.forms[form_id] = self._form
        elif tag == "button" and self._form is not None:
            self._form.buttons.append(element.get("id", ""))
        elif element.get("id") == RESULTS_ELEMENT_ID:
            self._results_open = True
            self._results_seen = True
            try:
                self._declared_count = int(element.get("data-count", ""))
            except ValueError:
                self.errors.append("results container without a numeric data-count")
        elif self._results_open and RECORD_ID_ATTR in element.attrs:
            self._entry = _Entry(record_id=element.attrs[RECORD_ID_ATTR])
            self._entries.append(self._entry)
        elif self._entry is not None:
            if element.has_class("disease"):
                self._sink = self._entry.disease
            elif element.has_class("description"):
                self._sink = self._entry.description
            elif element.has_class("drug"):
                self._entry.drugs.append("")
                self._sink = None

    def _on_void(self, element: Tag) -> None:
        if element.name == "input" and self._form is not None:
            self._form.fields.append(
                FormField(
                    element_id=element.get("id", ""),
                    name=element.get("name", ""),
                    value=element.get("value", ""),
                )
            )

    def handle_startendtag(self, tag: str, attrs: list[tuple[str, Optional[str]]]) -> None:
        self._on_void(Tag(tag, attrs))

    def handle_endtag(self, tag: str) -> None:
        if tag in VOID_TAGS:
            return
        if not self.tags or self.tags[-1].name != tag:
            self.errors.append(f"unexpected </{tag}>")
            return
        element = self.tags.pop()
        if tag == "form":
            self._form = None
        elif element.get("id") == RESULTS_ELEMENT_ID:
            self._results_open = False
        elif RECORD_ID_ATTR in element.attrs and self._entry is not None:
            self._entry = None
        self._sink = None

    def handle_data(self, data: str) -> None:
        if self._entry is None or not self.tags:
            return
        top = self.tags[-1]
        if top.has_class("drug") and self._entry.drugs:
            self._entry.drugs[-1] += data
        elif self._sink is not None:
            self._sink.append(data)

    def result(self) -> ParsedPage:
        self.close()
        if self.tags:
            self.errors.append(f"unclosed <{self.tags[-1].name}>")
        if self.errors:
            raise ParseError("malformed page: " + "; ".join(self.errors))

        results = None
        if self._results_seen:
            try:
                results = [
                    SiteRecord(
                        record_id=e.record_id,
                        disease="".join(e.disease),
                        description="".join(e.description),
                        drugs=tuple(e.drugs),
                    )
                    for e in self._entries
                ]
            except ValueError as err:
                raise ParseError(f"invalid result entry: {err}") from err
            if self._declared_count != len(results):
                raise ParseError(
                    f"result count mismatch: declared {self._declared_count}, found {len(results)}"
                )
        return ParsedPage(forms=self.forms, results=results, declared_count=self._declared_count)


def parse_page(html: str) -> ParsedPage:
    """
    Parse a site page.

    Raises:
        ParseError: unbalanced elements or an inconsistent result list
    """
    parser = PageParser()
    try:
        parser.feed(html)
    except Exception as e:
        raise ParseError(f"unparseable page: {e}") from e
    return parser.result()
