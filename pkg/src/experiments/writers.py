"""
Escrita de Artefatos
====================

- CSV: ponto decimal, sem locale, floats com 17 dígitos significativos,
  fim de linha '\\n'
- JSONL: um registro de trajetória por linha, chaves ordenadas
- Manifesto: JSON indentado, escrito por último

Todo arquivo é escrito em um temporário no mesmo diretório e movido com
os.replace; o digest sha256 é calculado sobre os bytes finais.
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Union

import numpy as np
import pandas as pd

from ..config import OUTPUT_CONFIG

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def to_jsonable(value: Any) -> Any:
    """Converte tipos numpy/complexos/tuplas em tipos JSON nativos."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_digest(path: PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def atomic_write_bytes(path: PathLike, data: bytes) -> str:
    """Escreve `data` em `path` atomicamente e retorna o sha256."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Arquivo escrito: {path} ({len(data)} bytes)")
    return digest(data)


def write_table(path: PathLike, frame: pd.DataFrame) -> str:
    text = frame.to_csv(
        index=False,
        float_format=OUTPUT_CONFIG["float_format"],
        lineterminator="\n",
    )
    return atomic_write_bytes(path, text.encode("utf-8"))


def write_jsonl(path: PathLike, rows: Iterable[dict]) -> str:
    lines = [json.dumps(to_jsonable(row), sort_keys=True, ensure_ascii=False) for row in rows]
    text = "\n".join(lines) + ("\n" if lines else "")
    return atomic_write_bytes(path, text.encode("utf-8"))


def write_json(path: PathLike, payload: dict) -> str:
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return atomic_write_bytes(path, text.encode("utf-8"))
