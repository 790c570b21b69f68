"""Exception types shared across the library and the CLI."""


class JobspanError(Exception):
    """Base class for library errors."""


class DataFormatError(JobspanError, ValueError):
    """A file or text input does not match its documented format."""


class IndexFormatError(DataFormatError):
    """An index file is malformed, truncated, or has an unsupported version."""


class UnindexedTitleError(JobspanError, KeyError):
    """A query title is not an entry of the index."""

    def __init__(self, titles):
        if isinstance(titles, tuple):
            titles = [titles]
        self.titles = list(titles)
        shown = ", ".join(repr(" ".join(t)) for t in self.titles)
        super().__init__(f"title(s) not in index: {shown}")

    def __str__(self):
        # KeyError would repr() the message; keep it readable.
        return self.args[0]
