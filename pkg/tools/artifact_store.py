"""
ArtifactStore: registra os arquivos gerados por um comando da CLI.
Mantém artifacts.json e gera MANIFEST.md no diretório de saída.

Nada aqui depende do relógio: duas execuções com a mesma configuração
produzem registros idênticos byte a byte.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any


@dataclass
class Artifact:
    """Representa um artefato gerado durante a execução."""
    name: str
    kind: str  # 'csv', 'json', 'manifest'
    path: str  # relativo ao out_dir
    meta: dict[str, Any] | None = None


class ArtifactStore:
    """
    Gerencia artefatos em out_dir.
    Mantém artifacts.json e gera MANIFEST.md.
    """

    def __init__(self, out_dir: str | Path = "runs"):
        self.run_dir = Path(out_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.artifacts_file = self.run_dir / "artifacts.json"
        self.manifest_file = self.run_dir / "MANIFEST.md"
        self.artifacts: list[Artifact] = []

    def path_for(self, name: str) -> Path:
        return self.run_dir / name

    def add(self, artifact: Artifact) -> None:
        """Adiciona (ou substitui, pelo nome) um artefato no registro."""
        self.artifacts = [a for a in self.artifacts if a.name != artifact.name]
        self.artifacts.append(artifact)
        self._save_artifacts()

    def list(self) -> list[dict]:
        """Retorna lista de artefatos como dicionários."""
        return [asdict(a) for a in self.artifacts]

    def _save_artifacts(self) -> None:
        with open(self.artifacts_file, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.list(), f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")

    def finalize_manifest(self, command: str) -> Path:
        """
        Gera MANIFEST.md com a lista de artefatos do comando.
        Retorna o caminho do MANIFEST.md.
        """
        lines = [
            f"# MANIFEST - {command}\n",
            "\n## Artefatos\n",
        ]
        if not self.artifacts:
            lines.append("_Nenhum artefato gerado._\n")
        for i, artifact in enumerate(self.artifacts, 1):
            lines.append(f"### {i}. {artifact.name}\n")
            lines.append(f"- **Tipo:** {artifact.kind}\n")
            lines.append(f"- **Caminho:** `{artifact.path}`\n")
            if artifact.meta:
                meta = json.dumps(artifact.meta, ensure_ascii=False, sort_keys=True)
                lines.append(f"- **Metadados:** {meta}\n")
            lines.append("\n")

        with open(self.manifest_file, "w", encoding="utf-8", newline="\n") as f:
            f.write("".join(lines))
        self.add(Artifact(
            name="MANIFEST.md",
            kind="manifest",
            path="MANIFEST.md",
            meta={"artifact_count": len(self.artifacts)},
        ))
        return self.manifest_file


# Singleton global (inicializado pela CLI a cada comando)
_store: ArtifactStore | None = None


def get_store() -> ArtifactStore:
    """Retorna a instância global do ArtifactStore."""
    if _store is None:
        raise RuntimeError("ArtifactStore não foi inicializado. Chame init_store() primeiro.")
    return _store


def init_store(out_dir: str | Path = "runs") -> ArtifactStore:
    """Inicializa o ArtifactStore global."""
    global _store
    _store = ArtifactStore(out_dir)
    return _store
