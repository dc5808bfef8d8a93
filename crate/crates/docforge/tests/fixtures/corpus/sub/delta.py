"""Configuration merge utilities living in a subdirectory."""


def merge_configs(base, override=None):
    """Merge two configuration mappings.

    :param base: Base configuration dict.
    :param override: Overrides applied on top. None leaves base unchanged.
    :returns: A new merged dict.
    """
    merged = dict(base)
    merged.update(override or {})
    return merged


def normalize(vec, eps=1e-9):
    """Normalize a vector to unit length.

    :param eps: Guard against division by zero.
    :returns: The normalized vector.
    """
    norm = sum(v * v for v in vec) ** 0.5
    return [v / (norm + eps) for v in vec]


def chunked(seq, size, pad=None):
    """Split a sequence into fixed-size chunks.

    :param seq: The input sequence.
    :param size: Chunk length.
    :param pad: Padding value. None disables padding.
    :param fill: Legacy alias for pad, no longer accepted.
    :returns: List of chunks.
    """
    out = [list(seq[i:i + size]) for i in range(0, len(seq), size)]
    if pad is not None and out and len(out[-1]) < size:
        out[-1].extend([pad] * (size - len(out[-1])))
    return out
