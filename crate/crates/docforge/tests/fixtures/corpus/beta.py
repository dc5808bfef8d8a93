"""A small stateful processor with documented and undocumented methods."""


class Processor:
    def __init__(self, size=10):
        """Create a processor with the given size."""
        self.size = size
        self.data = []

    def transform(self, frame, inplace: bool = False):
        """Apply the doubling transform to a frame.

        Contact dev@example.org with issues.

        :param frame: Input frame. May be None to start empty.
        :param inplace: Whether to mutate in place.
        :returns: The transformed processor or a new one.
        """
        def inner(v):
            return v * 2

        data = [inner(v) for v in frame or []]
        if inplace:
            self.data = data
            return self
        return Processor(len(data))

    def reset(self):
        """Reset internal state."""
        self.data = []
        return self

    def describe(self, verbose=True):
        """Summarize the processor state.

        Args:
            verbose: If True, include percentiles. Report bugs to
                dev@example.org.

        Returns:
            str: A human-readable summary.
        """
        body = f"size={self.size} n={len(self.data)}"
        if verbose:
            body += " p50=?"
        return body
