"""
I/O Tools: gravação de tabelas CSV e documentos JSON no diretório da execução.
Todas as funções retornam dict com status e informações.
"""

import json
import math
from typing import Any, Sequence

import numpy as np
import pandas as pd

from tools.artifact_store import Artifact, get_store

FLOAT_FORMAT = "%.17g"


def _jsonable(value: Any) -> Any:
    """Converte tipos numpy e floats não finitos para JSON estrito."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def save_csv(name: str, table: pd.DataFrame, footer: Sequence[str] = ()) -> dict[str, Any]:
    """
    Salva tabela CSV: cabeçalho obrigatório, '.' decimal, LF, 17 dígitos.

    Args:
        name: Nome do arquivo (com ou sem extensão)
        table: DataFrame com as colunas na ordem de saída
        footer: Linhas de rodapé, gravadas com prefixo '# '

    Returns:
        dict com status e caminho do arquivo
    """
    store = get_store()
    if not name.endswith(".csv"):
        name = f"{name}.csv"
    file_path = store.path_for(name)

    body = table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(body)
        for line in footer:
            f.write(f"# {line}\n")

    store.add(Artifact(
        name=name,
        kind="csv",
        path=name,
        meta={"rows": int(len(table)), "columns": [str(c) for c in table.columns]},
    ))
    return {"status": "ok", "file": str(file_path), "name": name, "kind": "csv"}


def save_json(name: str, data: dict, config: dict | None = None) -> dict[str, Any]:
    """
    Salva arquivo JSON (.json) com chaves ordenadas.

    Args:
        name: Nome do arquivo (com ou sem extensão)
        data: Dicionário a ser serializado
        config: Configuração embutida sob a chave 'config'

    Returns:
        dict com status e caminho do arquivo
    """
    if not isinstance(data, dict):
        return {"status": "error", "error": "Parâmetro 'data' deve ser um dicionário"}
    store = get_store()
    if not name.endswith(".json"):
        name = f"{name}.json"
    file_path = store.path_for(name)

    document = dict(data)
    if config is not None:
        document["config"] = config
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(_jsonable(document), f, indent=2, ensure_ascii=False, sort_keys=True,
                  allow_nan=False)
        f.write("\n")

    store.add(Artifact(name=name, kind="json", path=name, meta={"keys": sorted(document)}))
    return {"status": "ok", "file": str(file_path), "name": name, "kind": "json"}
