"""
原始记录持久化
按行存储的 JSON：首行为 {"schema", "version"} 头，其后每行一条记录
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from config.settings import settings
from src.utils.exceptions import RecordFormatError, SchemaVersionError
from src.utils.logger import ensemble_logger

SCHEMA_NAME = 'battery-records'


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _clean(record: Dict[str, Any]) -> Dict[str, Any]:
    return {key: _to_builtin(value) for key, value in record.items()}


class RecordStore:
    """JSONL 记录文件"""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)

    def persist(self, records: List[Dict[str, Any]]) -> Path:
        """
        写入全部记录（覆盖已有文件）

        Returns:
            文件路径
        """
        self.path.parent.mkdir(parents=True, exist_ok=True)
        header = {'schema': SCHEMA_NAME, 'version': settings.RECORD_SCHEMA_VERSION}
        with self.path.open('w', encoding='utf-8') as handle:
            handle.write(json.dumps(header, sort_keys=True) + '\n')
            for record in records:
                handle.write(json.dumps(_clean(record), sort_keys=True, allow_nan=False) + '\n')
        ensemble_logger.info(f"Persisted {len(records)} records to {self.path}")
        return self.path

    def load(self) -> List[Dict[str, Any]]:
        """
        读取记录

        Raises:
            RecordFormatError: 缺少头、行无法解析或不是对象（带行号）
            SchemaVersionError: 版本不匹配
        """
        with self.path.open('r', encoding='utf-8') as handle:
            lines = handle.read().split('\n')
        if lines and lines[-1] == '':
            lines.pop()
        if not lines:
            raise RecordFormatError("missing schema header", line_number=1)

        header = self._parse(lines[0], 1)
        if header.get('schema') != SCHEMA_NAME:
            raise RecordFormatError(f"unexpected schema {header.get('schema')!r}", line_number=1)
        if header.get('version') != settings.RECORD_SCHEMA_VERSION:
            raise SchemaVersionError(
                f"record schema version {header.get('version')} is not supported "
                f"(expected {settings.RECORD_SCHEMA_VERSION})",
                line_number=1
            )
        return [self._parse(line, number) for number, line in enumerate(lines[1:], start=2)]

    @staticmethod
    def _parse(line: str, number: int) -> Dict[str, Any]:
        try:
            value = json.loads(line)
        except json.JSONDecodeError as e:
            raise RecordFormatError(f"cannot parse record: {e.msg}", line_number=number)
        if not isinstance(value, dict):
            raise RecordFormatError("record is not a JSON object", line_number=number)
        return value


__all__ = ['RecordStore', 'SCHEMA_NAME']
