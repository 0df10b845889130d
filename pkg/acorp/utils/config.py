# Written by the acorp developers - 2026
#####################################################
from ..core.errors import ConfigInvalid


def parse_value(text: str):
    # int, then real, then bool/none, else the raw string
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    if lowered == "none":
        return None
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


# Flat "key = value" files, '#' starts a comment
def parse_kv(text: str, source: str = "<string>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(source + ":" + str(lineno) + ": expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigInvalid(source + ":" + str(lineno) + ": empty key")
        if key in values:
            raise ConfigInvalid(source + ":" + str(lineno) + ": duplicate key " + repr(key))
        values[key] = parse_value(value)
    return values


def load_kv_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigInvalid("cannot read config " + repr(path) + ": " + str(e)) from e
    return parse_kv(text, path)
