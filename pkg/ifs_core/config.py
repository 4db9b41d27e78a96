"""Loading box-like IFS definitions from TOML files."""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

from .models import ConfigError
from .serializers import CanonicalIFSSerializer, IFSConfigSerializer, flatten_errors

logger = logging.getLogger(__name__)


def parse_config(data, source='<config>'):
    """Validate an already-decoded config mapping and build the IFS."""
    serializer = IFSConfigSerializer(data=data)
    if not serializer.is_valid():
        field, message = next(flatten_errors(serializer.errors), ('', 'invalid configuration'))
        raise ConfigError(message, field=f"{source}: {field}" if field else source)
    ifs = serializer.save()
    logger.debug("Loaded %d maps from %s", ifs.m, source)
    return ifs


def parse_config_text(text, source='<config>'):
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # the decoder message carries line and column
        raise ConfigError(str(exc), field=source)
    return parse_config(data, source)


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", field=str(path))
    return parse_config_text(text, source=str(path))


def canonical_config(ifs):
    return CanonicalIFSSerializer(ifs).data
